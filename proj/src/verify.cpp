#include <stickbreak/verify.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace stickbreak
{

namespace
{

CheckReport make_report(std::string name, const BasketCollection &c)
{
    CheckReport r;
    r.check = std::move(name);
    r.n = c.order();
    r.stage_first = r.stage_last = c.stage();
    return r;
}

CheckReport fail(CheckReport r, std::string witness)
{
    r.status = check_status::fail;
    r.witness = std::move(witness);
    return r;
}

CheckReport vacuous(CheckReport r, std::string why)
{
    r.status = check_status::vacuous;
    r.detail = std::move(why);
    return r;
}

bool is_power_of_two(std::size_t v) { return std::has_single_bit(v); }

// A basket viewed as a run of consecutive positions on the circle of the n
// initial singletons X_1..X_n (0-based position p holds floor(p/2)). Cyclic
// intervals have a single start; a singleton [x] can sit on either copy of x.
struct Piece {
    const Basket *basket = nullptr;
    std::vector<unsigned> starts;
    unsigned len = 0;
    int group = 0;
};

std::optional<Piece> as_piece(unsigned n, const Basket &b, int group)
{
    const unsigned m = half_order(n);
    Piece p;
    p.basket = &b;
    p.len = static_cast<unsigned>(b.size());
    p.group = group;
    const auto cls = classify(n, b);
    if (cls.kind == basket_kind::singleton) {
        const auto x = static_cast<unsigned>(b.elements().front());
        p.starts.push_back(2 * x);
        if (!(n % 2 == 1 && x == m - 1)) {
            p.starts.push_back(2 * x + 1);
        }
        return p;
    }
    if (cls.kind == basket_kind::cyclically_ordered) {
        p.starts.push_back(2 * cls.a);
        return p;
    }
    return std::nullopt;
}

// Searches for an ordering of the pieces, group 0 first then group 1, in which
// each piece starts where the previous one ends (mod n).
class ChainSearch
{
public:
    ChainSearch(unsigned n, std::vector<Piece> pieces) : n_(n), pieces_(std::move(pieces)), used_(pieces_.size(), false)
    {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            for (auto s : pieces_[i].starts) {
                by_start_[s % n_].push_back(i);
            }
            remaining_[pieces_[i].group]++;
        }
    }

    bool found()
    {
        if (pieces_.empty()) {
            return true;
        }
        const int first_group = remaining_[0] > 0 ? 0 : 1;
        std::set<std::pair<std::vector<int>, unsigned>> tried;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (pieces_[i].group != first_group) {
                continue;
            }
            for (auto s : pieces_[i].starts) {
                if (!tried.insert({pieces_[i].basket->elements(), s}).second) {
                    continue;
                }
                used_[i] = true;
                --remaining_[first_group];
                const bool ok = extend((s + pieces_[i].len) % n_, pieces_.size() - 1);
                ++remaining_[first_group];
                used_[i] = false;
                if (ok) {
                    return true;
                }
            }
        }
        return false;
    }

private:
    bool extend(unsigned pos, std::size_t left)
    {
        if (left == 0) {
            return true;
        }
        const int group = remaining_[0] > 0 ? 0 : 1;
        auto it = by_start_.find(pos);
        if (it == by_start_.end()) {
            return false;
        }
        std::vector<const Basket *> tried;
        for (auto i : it->second) {
            if (used_[i] || pieces_[i].group != group) {
                continue;
            }
            const auto *b = pieces_[i].basket;
            if (std::any_of(tried.begin(), tried.end(), [b](const Basket *t) { return *t == *b; })) {
                continue;
            }
            tried.push_back(b);
            used_[i] = true;
            --remaining_[group];
            const bool ok = extend((pos + pieces_[i].len) % n_, left - 1);
            ++remaining_[group];
            used_[i] = false;
            if (ok) {
                return true;
            }
        }
        return false;
    }

    unsigned n_;
    std::vector<Piece> pieces_;
    std::vector<bool> used_;
    std::map<unsigned, std::vector<std::size_t>> by_start_;
    std::size_t remaining_[2] = {0, 0};
};

// Empty string when the baskets form a chain, otherwise the reason.
std::string chain_failure(unsigned n, const std::vector<const Basket *> &first,
                          const std::vector<const Basket *> &second)
{
    std::vector<Piece> pieces;
    for (int g = 0; g < 2; ++g) {
        for (const auto *b : g == 0 ? first : second) {
            auto p = as_piece(n, *b, g);
            if (!p) {
                return b->to_string() + " is not cyclically ordered";
            }
            pieces.push_back(std::move(*p));
        }
    }
    if (ChainSearch(n, std::move(pieces)).found()) {
        return {};
    }
    std::string s = "no chain ordering of";
    for (const auto *b : first) {
        s += " " + b->to_string();
    }
    if (!second.empty()) {
        s += " |";
        for (const auto *b : second) {
            s += " " + b->to_string();
        }
    }
    return s;
}

std::string stage_prefix(unsigned stage) { return "stage " + std::to_string(stage) + ": "; }

} // namespace

const char *to_string(check_status s) noexcept
{
    switch (s) {
        case check_status::pass:
            return "PASS";
        case check_status::vacuous:
            return "VACUOUS";
        case check_status::fail:
            return "FAIL";
    }
    return "?";
}

std::optional<SizeClasses> size_classes(const BasketCollection &c)
{
    if (c.size() == 0) {
        return std::nullopt;
    }
    SizeClasses out;
    std::size_t smallest = c[0].size();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto sz = c[i].size();
        if (!is_power_of_two(sz)) {
            if (out.exceptional) {
                return std::nullopt;
            }
            out.exceptional = i;
            out.w = sz;
        } else {
            smallest = std::min(smallest, sz);
        }
    }
    if (out.exceptional) {
        if (!c[*out.exceptional].is_wrapped()) {
            return std::nullopt;
        }
        out.r = static_cast<unsigned>(std::bit_width(out.w) - 1);
    } else {
        out.r = static_cast<unsigned>(std::bit_width(smallest) - 1);
    }
    const std::size_t lo = std::size_t{1} << out.r;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (out.exceptional && *out.exceptional == i) {
            continue;
        }
        if (c[i].size() != lo && c[i].size() != 2 * lo) {
            return std::nullopt;
        }
    }
    return out;
}

CheckReport check_p1(const BasketCollection &c)
{
    auto r = make_report("p1", c);
    for (const auto &b : c.baskets()) {
        if (classify(c.order(), b).kind == basket_kind::not_cyclic) {
            return fail(std::move(r), b.to_string() + " is not cyclically ordered");
        }
    }
    return r;
}

CheckReport check_p2(const BasketCollection &c)
{
    auto r = make_report("p2", c);
    auto sc = size_classes(c);
    if (!sc) {
        std::string sizes;
        for (const auto &b : c.baskets()) {
            sizes += (sizes.empty() ? "" : ",") + std::to_string(b.size());
        }
        std::string why = "sizes {" + sizes + "} have no size-3-symmetry";
        for (const auto &b : c.baskets()) {
            if (!is_power_of_two(b.size()) && !b.is_wrapped()) {
                why += "; " + b.to_string() + " has exceptional size but is not wrapped";
                break;
            }
        }
        return fail(std::move(r), why);
    }
    r.detail = "r=" + std::to_string(sc->r);
    if (sc->exceptional) {
        r.detail += " w=" + std::to_string(sc->w) + " wrapped=" + c[*sc->exceptional].to_string();
    }
    return r;
}

CheckReport check_p3(const BasketCollection &c)
{
    auto r = make_report("p3", c);
    auto sc = size_classes(c);
    if (!sc) {
        return fail(std::move(r), "no size-3-symmetry, so no size classes to chain");
    }
    const std::size_t lo = std::size_t{1} << sc->r;
    std::vector<const Basket *> small, large;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (sc->exceptional && *sc->exceptional == i) {
            continue;
        }
        (c[i].size() == lo ? small : large).push_back(&c[i]);
    }
    if (auto why = chain_failure(c.order(), small, {}); !why.empty()) {
        return fail(std::move(r), "size " + std::to_string(lo) + " baskets: " + why);
    }
    if (auto why = chain_failure(c.order(), large, {}); !why.empty()) {
        return fail(std::move(r), "size " + std::to_string(2 * lo) + " baskets: " + why);
    }
    if (auto why = chain_failure(c.order(), large, small); !why.empty()) {
        return fail(std::move(r), "combined chain: " + why);
    }
    return r;
}

CheckReport check_wrapped_structure(const BasketCollection &c)
{
    auto r = make_report("wrapped_structure", c);
    auto sc = size_classes(c);
    if (!sc) {
        return fail(std::move(r), "no size-3-symmetry, so the exceptional basket is undefined");
    }
    if (!sc->exceptional) {
        return vacuous(std::move(r), "no exceptional wrapped basket");
    }
    const unsigned n = c.order();
    const std::size_t block = std::size_t{1} << sc->r;
    const std::size_t s = n % block;
    const auto &w = c[*sc->exceptional];
    if (s == 0) {
        return fail(std::move(r), w.to_string() + ": n = " + std::to_string(n) + " is a multiple of 2^r = "
                                      + std::to_string(block));
    }
    if (sc->w != block + s) {
        return fail(std::move(r), w.to_string() + " has size " + std::to_string(sc->w) + ", expected 2^r + s = "
                                      + std::to_string(block + s));
    }
    std::vector<int> expected;
    for (std::size_t j = n - (block - s) + 1; j <= n; ++j) {
        expected.push_back(initial_singleton(n, static_cast<unsigned>(j)).elements().front());
    }
    for (std::size_t j = 1; j <= 2 * s && j <= n; ++j) {
        expected.push_back(initial_singleton(n, static_cast<unsigned>(j)).elements().front());
    }
    Basket want(half_order(n), std::move(expected));
    if (!(want == w)) {
        return fail(std::move(r), w.to_string() + " differs from the expected union " + want.to_string());
    }
    r.detail = "n=" + std::to_string(n / block) + "*" + std::to_string(block) + "+" + std::to_string(s);
    return r;
}

CheckReport check_lex_length(const BasketCollection &c)
{
    auto r = make_report("lex_length", c);
    if (c.size() < 2) {
        return vacuous(std::move(r), "fewer than two baskets");
    }
    std::vector<const Basket *> order;
    for (const auto &b : c.baskets()) {
        order.push_back(&b);
    }
    std::stable_sort(order.begin(), order.end(), [](const Basket *a, const Basket *b) { return lex_compare(*a, *b) < 0; });
    auto prev = basket_length(*order[0]);
    for (std::size_t i = 1; i < order.size(); ++i) {
        auto cur = basket_length(*order[i]);
        if (compare(prev, cur) > 0) {
            return fail(std::move(r), order[i - 1]->to_string() + " precedes " + order[i]->to_string()
                                          + " but is longer (" + std::to_string(to_float(prev)) + " > "
                                          + std::to_string(to_float(cur)) + ")");
        }
        prev = std::move(cur);
    }
    return r;
}

CheckReport check_conservation(const BasketCollection &c)
{
    auto r = make_report("conservation", c);
    const unsigned n = c.order();
    if (c.size() + c.stage() != n) {
        return fail(std::move(r), std::to_string(c.size()) + " baskets at stage " + std::to_string(c.stage())
                                      + ", expected " + std::to_string(n - c.stage()));
    }
    const auto counts = c.element_counts();
    const auto want = full_multiset(n);
    for (unsigned x = 0; x < c.modulus(); ++x) {
        if (counts[x] != want.count(static_cast<int>(x))) {
            return fail(std::move(r), "element " + std::to_string(x) + " appears " + std::to_string(counts[x])
                                          + " times, expected " + std::to_string(want.count(static_cast<int>(x))));
        }
    }
    return r;
}

namespace
{

CheckReport trace_report(std::string name, const Trace &t)
{
    CheckReport r;
    r.check = std::move(name);
    r.n = t.n;
    r.stage_first = 0;
    r.stage_last = t.collections.empty() ? 0 : static_cast<unsigned>(t.collections.size() - 1);
    return r;
}

} // namespace

CheckReport check_monotonicity(const Trace &t)
{
    auto r = trace_report("monotonicity", t);
    if (t.collections.size() < 2) {
        return vacuous(std::move(r), "single stage");
    }
    auto prev = disc_exact(t.collections[0]);
    for (std::size_t i = 1; i < t.collections.size(); ++i) {
        auto cur = disc_exact(t.collections[i]);
        // l(max_{i+1}) l(min_i) <= l(max_i) l(min_{i+1})
        if (compare(cur.max_length * prev.min_length, prev.max_length * cur.min_length) > 0) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i)) + "disc rises from "
                                          + std::to_string(prev.value()) + " to " + std::to_string(cur.value()));
        }
        prev = std::move(cur);
    }
    return r;
}

CheckReport check_disc_value(const Trace &t)
{
    auto r = trace_report("disc_value", t);
    if (t.collections.empty()) {
        return fail(std::move(r), "empty trace");
    }
    const unsigned m = half_order(t.n);
    const auto target = q_power(m, m - 1);
    const auto first = disc_exact(t.collections[0]);
    if (first.ratio_vs(target) != 0) {
        return fail(std::move(r), "disc(B_0) = " + std::to_string(first.value()) + " is not 2^(1-1/"
                                      + std::to_string(m) + ")");
    }
    for (std::size_t i = 1; i < t.collections.size(); ++i) {
        if (disc_exact(t.collections[i]).ratio_vs(target) > 0) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i)) + "disc exceeds 2^(1-1/"
                                          + std::to_string(m) + ")");
        }
    }
    r.detail = "disc = q^" + std::to_string(m - 1) + " = 2^(1-1/" + std::to_string(m) + ")";
    return r;
}

CheckReport check_trace_consistency(const Trace &t)
{
    auto r = trace_report("trace_consistency", t);
    if (t.collections.size() != t.n || t.merges.size() + 1 != t.collections.size()) {
        return fail(std::move(r), "trace has " + std::to_string(t.collections.size()) + " collections and "
                                      + std::to_string(t.merges.size()) + " merges for n = " + std::to_string(t.n));
    }
    if (!(t.collections[0] == initial_collection(t.n))) {
        return fail(std::move(r), "stage 0 is not the initial collection: " + t.collections[0].to_string());
    }
    for (std::size_t i = 0; i < t.collections.size(); ++i) {
        const auto &c = t.collections[i];
        if (c.stage() != i) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i)) + "collection labelled stage "
                                          + std::to_string(c.stage()));
        }
        if (!c.is_sorted()) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i)) + "not sorted by lex order: "
                                          + c.to_string());
        }
        if (i + 1 == t.collections.size()) {
            break;
        }
        const auto &mr = t.merges[i];
        if (mr.left_index != 0 || mr.right_index != 1) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i)) + "merged indices "
                                          + std::to_string(mr.left_index) + "," + std::to_string(mr.right_index)
                                          + " are not the two smallest");
        }
        std::vector<Basket> want(c.baskets().begin() + 2, c.baskets().end());
        if (mr.result.size() != mr.left.size() + mr.right.size()) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i)) + "union of " + mr.left.to_string()
                                          + " and " + mr.right.to_string() + " is not a basket");
        }
        want.push_back(mr.result);
        std::sort(want.begin(), want.end(), lex_less{});
        if (want != t.collections[i + 1].baskets()) {
            return fail(std::move(r), stage_prefix(static_cast<unsigned>(i + 1)) + t.collections[i + 1].to_string()
                                          + " does not follow from merging " + mr.left.to_string() + " and "
                                          + mr.right.to_string());
        }
    }
    return r;
}

namespace
{

struct RatioCheckState {
    std::string witness;
    bool precondition_ok = true;
};

template <typename Length, typename Approx, typename Geq, typename DiscOk>
CheckReport ratio_lemma_impl(CheckReport r, std::size_t n, const std::vector<BasicSplit<Length>> &splits,
                             Length root, Approx approx, Geq ratio_at_least, DiscOk disc_ok)
{
    std::vector<Length> live{std::move(root)};
    std::vector<double> approx_live{approx(live[0])};
    std::string ratio_witness, pre_witness;
    bool any_pair = false;

    for (std::size_t k = 1; k <= n; ++k) {
        if (k > 1) {
            const auto &s = splits[k - 2];
            live[s.target] = s.left;
            approx_live[s.target] = approx(s.left);
            live.push_back(s.right);
            approx_live.push_back(approx(s.right));
        }
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return approx_live[a] > approx_live[b]; });
        // The float order is only a guess; confirm it exactly, else sort exactly.
        bool sorted = true;
        for (std::size_t j = 0; j + 1 < k && sorted; ++j) {
            sorted = ratio_at_least(live[idx[j]], live[idx[j + 1]], 0);
        }
        if (!sorted) {
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return !ratio_at_least(live[b], live[a], 0);
            });
        }
        if (pre_witness.empty() && !disc_ok(live[idx.front()], live[idx.back()])) {
            pre_witness = "precondition fails at partition " + std::to_string(k) + ": disc "
                          + std::to_string(approx_live[idx.front()] / approx_live[idx.back()])
                          + " exceeds 2^(1-eps)";
        }
        if (k == n) {
            break;
        }
        for (std::size_t i = 1; i < k && k + 2 * i - 1 <= n; ++i) {
            any_pair = true;
            if (!ratio_at_least(live[idx[i - 1]], live[idx[i]], 1) && ratio_witness.empty()) {
                ratio_witness = "k=" + std::to_string(k) + " i=" + std::to_string(i) + ": x_i/x_{i+1} = "
                                + std::to_string(approx_live[idx[i - 1]] / approx_live[idx[i]]) + " < 2^eps";
            }
        }
    }
    if (!pre_witness.empty() || !ratio_witness.empty()) {
        std::string w = pre_witness;
        if (!ratio_witness.empty()) {
            w += (w.empty() ? "" : "; ") + ratio_witness;
        }
        return fail(std::move(r), w);
    }
    if (!any_pair) {
        return vacuous(std::move(r), "no (k, i) with i < k < n and k + 2i - 1 <= n");
    }
    return r;
}

} // namespace

CheckReport check_ratio_lemma(const Strategy &s, double epsilon)
{
    CheckReport r;
    r.check = "ratio_lemma";
    r.n = static_cast<unsigned>(s.length());
    r.stage_first = 1;
    r.stage_last = r.n;
    if (!(epsilon > 0)) {
        return fail(std::move(r), "epsilon must be positive");
    }
    if (auto bad = s.validate()) {
        return fail(std::move(r), "invalid strategy: " + *bad);
    }
    constexpr double tol = 1e-12;
    const double ratio = std::exp2(epsilon);
    const double disc_cap = std::exp2(1 - epsilon);
    return ratio_lemma_impl<double>(
        std::move(r), s.length(), s.splits(), 1.0, [](double x) { return x; },
        [&](double a, double b, int which) { return which == 0 ? a >= b : a >= ratio * b * (1 - tol); },
        [&](double mx, double mn) { return mx <= disc_cap * mn * (1 + tol); });
}

CheckReport check_ratio_lemma(const ExactStrategy &s, unsigned eps_num)
{
    CheckReport r;
    r.check = "ratio_lemma";
    r.n = static_cast<unsigned>(s.length());
    r.stage_first = 1;
    r.stage_last = r.n;
    const unsigned m = s.modulus();
    if (eps_num == 0 || eps_num > m) {
        return fail(std::move(r), "epsilon must lie in (0, 1]");
    }
    if (auto bad = s.validate()) {
        return fail(std::move(r), "invalid strategy: " + *bad);
    }
    const auto ratio = q_power(m, eps_num);
    const auto disc_cap = q_power(m, m - eps_num);
    r.detail = "eps = " + std::to_string(eps_num) + "/" + std::to_string(m);
    return ratio_lemma_impl<QNumber>(
        std::move(r), s.length(), s.splits(), s.total(), [](const QNumber &x) { return to_float(x, 1e-12); },
        [&](const QNumber &a, const QNumber &b, int which) {
            return which == 0 ? compare(a, b) >= 0 : compare(a, ratio * b) >= 0;
        },
        [&](const QNumber &mx, const QNumber &mn) { return compare(mx, disc_cap * mn) <= 0; });
}

const std::vector<std::string> &check_names()
{
    static const std::vector<std::string> names{"conservation",     "disc_value", "lex_length",        "monotonicity",
                                                "p1",               "p2",         "p3",                "ratio_lemma",
                                                "trace_consistency", "wrapped_structure"};
    return names;
}

std::vector<CheckReport> verify_trace(const Trace &t, const std::set<std::string> &checks)
{
    for (const auto &c : checks) {
        if (std::find(check_names().begin(), check_names().end(), c) == check_names().end()) {
            throw std::invalid_argument("unknown check '" + c + "'");
        }
    }
    auto wanted = [&](const std::string &name) { return checks.empty() || checks.count(name) != 0; };

    using stage_check = CheckReport (*)(const BasketCollection &);
    const std::map<std::string, stage_check> per_stage{{"conservation", &check_conservation},
                                                       {"lex_length", &check_lex_length},
                                                       {"p1", &check_p1},
                                                       {"p2", &check_p2},
                                                       {"p3", &check_p3},
                                                       {"wrapped_structure", &check_wrapped_structure}};

    std::vector<CheckReport> out;
    for (const auto &[name, fn] : per_stage) {
        if (!wanted(name)) {
            continue;
        }
        auto agg = trace_report(name, t);
        bool all_vacuous = !t.collections.empty();
        for (const auto &c : t.collections) {
            auto rep = fn(c);
            if (rep.status == check_status::fail) {
                agg.status = check_status::fail;
                agg.witness = stage_prefix(c.stage()) + rep.witness;
                all_vacuous = false;
                break;
            }
            all_vacuous = all_vacuous && rep.status == check_status::vacuous;
        }
        if (agg.status != check_status::fail && all_vacuous) {
            agg.status = check_status::vacuous;
        }
        out.push_back(std::move(agg));
    }
    if (wanted("monotonicity")) {
        out.push_back(check_monotonicity(t));
    }
    if (wanted("disc_value")) {
        out.push_back(check_disc_value(t));
    }
    if (wanted("trace_consistency")) {
        out.push_back(check_trace_consistency(t));
    }
    if (wanted("ratio_lemma")) {
        try {
            out.push_back(check_ratio_lemma(to_strategy(t), 1));
        } catch (const std::exception &e) {
            auto r = trace_report("ratio_lemma", t);
            out.push_back(fail(std::move(r), std::string("cannot build the strategy: ") + e.what()));
        }
    }
    std::sort(out.begin(), out.end(), [](const CheckReport &a, const CheckReport &b) {
        return std::tie(a.check, a.stage_first) < std::tie(b.check, b.stage_first);
    });
    return out;
}

std::vector<CheckReport> verify_all(unsigned n, const std::set<std::string> &checks)
{
    return verify_trace(run(n), checks);
}

} // namespace stickbreak
