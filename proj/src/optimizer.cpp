#include <stickbreak/optimizer.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <stickbreak/lexmerge.hpp>
#include <stickbreak/strategies.hpp>

namespace stickbreak
{

namespace
{

using mask_t = std::uint64_t;

constexpr unsigned max_order = 64;

// The binary tree a schedule induces, with the linear structure the LP needs.
struct ScheduleModel {
    unsigned n = 1;
    std::vector<mask_t> leaves;                 // per node
    std::vector<std::vector<int>> stage_nodes;  // live nodes of partition t, t = 1..n
    std::vector<std::pair<int, int>> pairs;     // ordered pairs of nodes live together
    std::vector<int> split_node;                // node split at step t, t = 1..n-1

    explicit ScheduleModel(const SplitSchedule &s) : n(s.n)
    {
        if (s.n == 0 || s.n > max_order) {
            throw std::invalid_argument("schedule order must lie in [1, 64]");
        }
        if (s.choices.size() + 1 != s.n) {
            throw std::invalid_argument("schedule of order n needs n-1 choices");
        }
        std::vector<std::pair<int, int>> children{{-1, -1}};
        std::vector<int> live{0};
        stage_nodes.push_back(live);
        for (std::size_t t = 0; t < s.choices.size(); ++t) {
            const auto c = s.choices[t];
            if (c > t) {
                throw std::invalid_argument("schedule choice out of range at step " + std::to_string(t + 1));
            }
            const int parent = live[c];
            const int a = static_cast<int>(children.size());
            const int b = a + 1;
            children[static_cast<std::size_t>(parent)] = {a, b};
            children.push_back({-1, -1});
            children.push_back({-1, -1});
            split_node.push_back(parent);
            live[c] = a;
            live.push_back(b);
            stage_nodes.push_back(live);
        }
        leaves.assign(children.size(), 0);
        for (std::size_t i = 0; i < live.size(); ++i) {
            leaves[static_cast<std::size_t>(live[i])] = mask_t{1} << i;
        }
        for (std::size_t v = children.size(); v-- > 0;) {
            if (children[v].first >= 0) {
                leaves[v] = leaves[static_cast<std::size_t>(children[v].first)]
                            | leaves[static_cast<std::size_t>(children[v].second)];
            }
        }
        std::set<std::pair<int, int>> seen;
        for (const auto &stage : stage_nodes) {
            for (int u : stage) {
                for (int v : stage) {
                    if (u != v && seen.insert({u, v}).second) {
                        pairs.emplace_back(u, v);
                    }
                }
            }
        }
    }

    std::size_t leaf_count(int node) const
    {
        return static_cast<std::size_t>(std::popcount(leaves[static_cast<std::size_t>(node)]));
    }
};

const Rational &positivity_floor()
{
    static const Rational delta(1, 1000000000);
    return delta;
}

// Variables z_i = y_i - delta >= 0.
std::optional<Witness> solve_model(const ScheduleModel &model, double d, const FeasibilityOptions &opts)
{
    const unsigned n = model.n;
    const Rational &delta = positivity_floor();
    if (n == 1) {
        return Witness{{Rational(1)}, 1.0};
    }
    const Rational dq(d);
    LinearSystem sys;
    sys.vars = n;
    auto row_for = [&](int big, const Rational &factor, int small) {
        // len(big) - factor * len(small) <= 0, shifted by delta.
        std::vector<Rational> row(n);
        const mask_t bm = model.leaves[static_cast<std::size_t>(big)];
        const mask_t sm = model.leaves[static_cast<std::size_t>(small)];
        for (unsigned i = 0; i < n; ++i) {
            if (bm >> i & 1U) {
                row[i] += 1;
            }
            if (sm >> i & 1U) {
                row[i] -= factor;
            }
        }
        Rational bound = delta
                         * (factor * static_cast<long>(model.leaf_count(small))
                            - static_cast<long>(model.leaf_count(big)));
        sys.add_row(std::move(row), std::move(bound));
    };
    for (const auto &[u, v] : model.pairs) {
        row_for(u, dq, v);
    }
    if (opts.require_split_largest) {
        const Rational one(1);
        for (std::size_t t = 0; t < model.split_node.size(); ++t) {
            const int p = model.split_node[t];
            for (int v : model.stage_nodes[t]) {
                if (v != p) {
                    row_for(v, one, p);
                }
            }
        }
    }
    const Rational slack_total = 1 - delta * static_cast<long>(n);
    sys.add_row(std::vector<Rational>(n, Rational(1)), slack_total);
    sys.add_row(std::vector<Rational>(n, Rational(-1)), Rational(-slack_total));

    auto z = find_feasible_point(sys);
    if (!z) {
        return std::nullopt;
    }
    Witness w;
    w.leaf_lengths.reserve(n);
    for (auto &zi : *z) {
        w.leaf_lengths.push_back(zi + delta);
    }
    return w;
}

Rational replay_model(const ScheduleModel &model, const std::vector<Rational> &leaves)
{
    if (leaves.size() != model.n) {
        throw std::invalid_argument("witness needs one length per leaf");
    }
    std::vector<Rational> node_len(model.leaves.size());
    for (std::size_t v = 0; v < model.leaves.size(); ++v) {
        for (unsigned i = 0; i < model.n; ++i) {
            if (model.leaves[v] >> i & 1U) {
                node_len[v] += leaves[i];
            }
        }
    }
    Rational worst(1);
    for (const auto &stage : model.stage_nodes) {
        Rational mx = node_len[static_cast<std::size_t>(stage.front())];
        Rational mn = mx;
        for (int v : stage) {
            const auto &l = node_len[static_cast<std::size_t>(v)];
            if (l > mx) {
                mx = l;
            }
            if (l < mn) {
                mn = l;
            }
        }
        Rational r = mx / mn;
        if (r > worst) {
            worst = r;
        }
    }
    return worst;
}

void finish_witness(const ScheduleModel &model, Witness &w)
{
    w.achieved_disc = replay_model(model, w.leaf_lengths).get_d();
}

unsigned bisection_steps(double tol)
{
    if (!(tol > 0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    const double k = std::ceil(std::log2(1.0 / tol));
    return static_cast<unsigned>(std::clamp(k, 1.0, 52.0));
}

constexpr double infeasible_value = std::numeric_limits<double>::infinity();

// Bisection on the fixed grid 1 + j 2^-K. With a cutoff (itself a grid point or
// 2), schedules whose value exceeds it are skipped: returns nullopt.
std::optional<ScheduleResult> evaluate(const ScheduleModel &model, unsigned steps, double cutoff,
                                       const FeasibilityOptions &opts)
{
    ScheduleResult res;
    if (auto w = solve_model(model, 1.0, opts)) {
        finish_witness(model, *w);
        res.value = 1.0;
        res.witness = std::move(w);
        return res;
    }
    auto at_cutoff = solve_model(model, cutoff, opts);
    if (!at_cutoff) {
        return std::nullopt;
    }
    double lo = 1.0, hi = 2.0;
    std::optional<Witness> best_w;
    if (cutoff == 2.0) {
        best_w = std::move(at_cutoff);
    }
    for (unsigned i = 0; i < steps; ++i) {
        const double mid = (lo + hi) / 2;
        if (mid >= cutoff) {
            // Feasibility is monotone in d.
            hi = mid;
            if (mid == cutoff) {
                best_w = at_cutoff;
            } else {
                best_w.reset();
            }
            continue;
        }
        if (auto w = solve_model(model, mid, opts)) {
            hi = mid;
            best_w = std::move(w);
        } else {
            lo = mid;
        }
    }
    if (!best_w) {
        best_w = solve_model(model, hi, opts);
    }
    finish_witness(model, *best_w);
    res.value = hi;
    res.witness = std::move(best_w);
    return res;
}

std::string canonical_of(const std::vector<std::pair<int, int>> &children, const std::vector<unsigned> &split_time,
                         int node)
{
    const auto [a, b] = children[static_cast<std::size_t>(node)];
    if (a < 0) {
        return "L";
    }
    auto ka = canonical_of(children, split_time, a);
    auto kb = canonical_of(children, split_time, b);
    if (kb < ka) {
        std::swap(ka, kb);
    }
    return "(" + std::to_string(split_time[static_cast<std::size_t>(node)]) + "," + ka + "," + kb + ")";
}

bool splits_stay_below_min(const SplitSchedule &s, const std::vector<Rational> &leaves)
{
    const ScheduleModel model(s);
    std::vector<Rational> node_len(model.leaves.size());
    for (std::size_t v = 0; v < model.leaves.size(); ++v) {
        for (unsigned i = 0; i < model.n; ++i) {
            if (model.leaves[v] >> i & 1U) {
                node_len[v] += leaves[i];
            }
        }
    }
    for (std::size_t t = 0; t < model.split_node.size(); ++t) {
        const auto &stage = model.stage_nodes[t];
        Rational mn = node_len[static_cast<std::size_t>(stage.front())];
        for (int v : stage) {
            mn = std::min(mn, node_len[static_cast<std::size_t>(v)]);
        }
        // children of the split node are live in the next stage
        const auto &next = model.stage_nodes[t + 1];
        const int left = next[s.choices[t]];
        const int right = next.back();
        if (node_len[static_cast<std::size_t>(left)] > mn || node_len[static_cast<std::size_t>(right)] > mn) {
            return false;
        }
    }
    return true;
}

} // namespace

std::string SplitSchedule::to_string() const
{
    std::string s = "[";
    for (std::size_t i = 0; i < choices.size(); ++i) {
        s += (i ? "," : "") + std::to_string(choices[i]);
    }
    return s + "]";
}

std::string canonical_key(const SplitSchedule &s)
{
    const ScheduleModel model(s);
    std::vector<std::pair<int, int>> children(model.leaves.size(), {-1, -1});
    std::vector<unsigned> split_time(model.leaves.size(), 0);
    for (std::size_t t = 0; t < model.split_node.size(); ++t) {
        const auto p = static_cast<std::size_t>(model.split_node[t]);
        const int a = static_cast<int>(2 * t + 1);
        children[p] = {a, a + 1};
        split_time[p] = static_cast<unsigned>(t + 1);
    }
    return canonical_of(children, split_time, 0);
}

std::uint64_t raw_schedule_count(unsigned n)
{
    std::uint64_t c = 1;
    for (unsigned t = 2; t < n; ++t) {
        c *= t;
    }
    return c;
}

std::vector<SplitSchedule> enumerate_schedules(unsigned n, bool dedup)
{
    if (n == 0) {
        throw std::invalid_argument("schedule order must be at least 1");
    }
    std::vector<SplitSchedule> out;
    std::set<std::string> seen;
    SplitSchedule cur{n, std::vector<unsigned>(n - 1, 0)};
    while (true) {
        if (!dedup || seen.insert(canonical_key(cur)).second) {
            out.push_back(cur);
        }
        // odometer, last position fastest, digit t ranges over [0, t]
        std::size_t pos = cur.choices.size();
        while (pos > 0) {
            --pos;
            if (cur.choices[pos] < pos) {
                ++cur.choices[pos];
                break;
            }
            cur.choices[pos] = 0;
            if (pos == 0) {
                return out;
            }
        }
        if (cur.choices.empty()) {
            return out;
        }
    }
}

SplitSchedule schedule_of(const Strategy &s)
{
    SplitSchedule out{static_cast<unsigned>(s.length()), {}};
    for (const auto &sp : s.splits()) {
        out.choices.push_back(static_cast<unsigned>(sp.target));
    }
    return out;
}

SplitSchedule schedule_of(const ExactStrategy &s)
{
    SplitSchedule out{static_cast<unsigned>(s.length()), {}};
    for (const auto &sp : s.splits()) {
        out.choices.push_back(static_cast<unsigned>(sp.target));
    }
    return out;
}

std::optional<Witness> feasible(const SplitSchedule &s, double d, const FeasibilityOptions &opts)
{
    if (!(d >= 1)) {
        throw std::invalid_argument("discrepancy target must be at least 1");
    }
    const ScheduleModel model(s);
    auto w = solve_model(model, d, opts);
    if (w) {
        finish_witness(model, *w);
    }
    return w;
}

Rational replay_disc(const SplitSchedule &s, const std::vector<Rational> &leaves)
{
    return replay_model(ScheduleModel(s), leaves);
}

ScheduleResult min_disc_for_schedule(const SplitSchedule &s, double tol, const FeasibilityOptions &opts)
{
    const ScheduleModel model(s);
    auto r = evaluate(model, bisection_steps(tol), 2.0, opts);
    if (!r) {
        return ScheduleResult{infeasible_value, std::nullopt};
    }
    return *r;
}

OptimizeResult optimize(unsigned n, double tol, const OptimizeOptions &opts)
{
    if (n == 0) {
        throw std::invalid_argument("optimize needs n >= 1");
    }
    if (n > opts.cap) {
        throw optimizer_cap_exceeded("n = " + std::to_string(n) + " exceeds the optimizer cap of "
                                     + std::to_string(opts.cap) + " ((n-1)! schedules); raise the cap explicitly "
                                     "(--cap) to run it anyway");
    }
    const unsigned steps = bisection_steps(tol);
    const auto schedules = enumerate_schedules(n, true);

    // Seed the cutoff with the lex-merge schedule, which is within the bound.
    const auto lm_key = canonical_key(schedule_of(to_strategy(run(n))));
    std::size_t seed = 0;
    for (std::size_t i = 0; i < schedules.size(); ++i) {
        if (canonical_key(schedules[i]) == lm_key) {
            seed = i;
            break;
        }
    }

    std::vector<std::optional<ScheduleResult>> results(schedules.size());
    results[seed] = evaluate(ScheduleModel(schedules[seed]), steps, 2.0, opts.feasibility);
    std::atomic<double> cutoff(results[seed] ? results[seed]->value : 2.0);

    std::atomic<std::size_t> next(0);
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < schedules.size(); i = next++) {
                if (i == seed) {
                    continue;
                }
                results[i] = evaluate(ScheduleModel(schedules[i]), steps, cutoff.load(), opts.feasibility);
                if (results[i]) {
                    double cur = cutoff.load();
                    while (results[i]->value < cur && !cutoff.compare_exchange_weak(cur, results[i]->value)) {
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            error = std::current_exception();
        }
    };
    const unsigned jobs = std::max(1U, opts.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    // Schedules are in lexicographic order, so the first minimum wins ties.
    std::size_t best = schedules.size();
    for (std::size_t i = 0; i < schedules.size(); ++i) {
        if (results[i] && (best == schedules.size() || results[i]->value < results[best]->value)) {
            best = i;
        }
    }
    if (best == schedules.size()) {
        throw std::logic_error("no schedule is feasible at d = 2");
    }

    OptimizeResult out;
    out.n = n;
    out.disc = results[best]->value;
    out.best = schedules[best];
    out.witness = *results[best]->witness;
    out.raw_schedules = raw_schedule_count(n);
    out.distinct_schedules = schedules.size();
    out.splits_below_min = splits_stay_below_min(out.best, out.witness.leaf_lengths);
    return out;
}

const char *to_string(verdict v) noexcept
{
    switch (v) {
        case verdict::consistent:
            return "consistent";
        case verdict::below_conjecture:
            return "below_conjecture";
        case verdict::violates_lower_bound:
            return "violates_lower_bound";
        case verdict::exceeds_upper_bound:
            return "exceeds_upper_bound";
    }
    return "?";
}

ConjectureReport conjecture_report(unsigned n, double tol, const OptimizeOptions &opts)
{
    ConjectureReport rep;
    rep.result = optimize(n, tol, opts);
    rep.tol = tol;
    rep.lower_bound = lb(n);
    rep.conjectured = ub_lexmerge(n);
    const double v = rep.result.disc;
    if (v < rep.lower_bound - tol) {
        rep.outcome = verdict::violates_lower_bound;
    } else if (v > rep.conjectured + tol) {
        rep.outcome = verdict::exceeds_upper_bound;
    } else if (v < rep.conjectured - tol) {
        rep.outcome = verdict::below_conjecture;
    } else {
        rep.outcome = verdict::consistent;
    }
    return rep;
}

} // namespace stickbreak
