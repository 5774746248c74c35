#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include <stickbreak/lexmerge.hpp>
#include <stickbreak/optimizer.hpp>
#include <stickbreak/strategies.hpp>

using namespace stickbreak;

namespace
{

// Child-swap class of a schedule as the set of (split time, child, child)
// triples, children named by their own split time (0 for a leaf).
std::set<std::tuple<unsigned, unsigned, unsigned>> swap_class(const SplitSchedule &s)
{
    std::vector<std::size_t> live_node{0};
    std::vector<std::pair<std::size_t, std::size_t>> kids{{0, 0}};
    std::vector<unsigned> time{0};
    for (unsigned t = 1; t < s.n; ++t) {
        const auto c = s.choices[t - 1];
        const auto p = live_node[c];
        time[p] = t;
        kids[p] = {kids.size(), kids.size() + 1};
        kids.push_back({0, 0});
        kids.push_back({0, 0});
        time.push_back(0);
        time.push_back(0);
        live_node[c] = kids[p].first;
        live_node.push_back(kids[p].second);
    }
    std::set<std::tuple<unsigned, unsigned, unsigned>> out;
    for (std::size_t v = 0; v < kids.size(); ++v) {
        if (time[v] == 0) {
            continue;
        }
        const unsigned a = time[kids[v].first], b = time[kids[v].second];
        out.emplace(time[v], std::min(a, b), std::max(a, b));
    }
    return out;
}

// Strategy realising a schedule with the given final leaf lengths.
Strategy realise(const SplitSchedule &s, const std::vector<double> &leaves)
{
    // Build the tree forwards, sum leaf lengths upwards, then replay the splits.
    const unsigned n = s.n;
    std::vector<std::size_t> node_of_slot{0};
    std::size_t nodes = 1;
    std::vector<std::pair<std::size_t, std::size_t>> children(1, {0, 0});
    for (unsigned t = 1; t < n; ++t) {
        const auto c = s.choices[t - 1];
        const auto p = node_of_slot[c];
        children[p] = {nodes, nodes + 1};
        children.push_back({0, 0});
        children.push_back({0, 0});
        node_of_slot[c] = nodes;
        node_of_slot.push_back(nodes + 1);
        nodes += 2;
    }
    std::vector<double> len(nodes, 0);
    for (std::size_t i = 0; i < n; ++i) {
        len[node_of_slot[i]] = leaves[i];
    }
    for (std::size_t v = nodes; v-- > 0;) {
        if (children[v].first) {
            len[v] = len[children[v].first] + len[children[v].second];
        }
    }
    Strategy out;
    std::vector<std::size_t> slots{0};
    for (unsigned t = 1; t < n; ++t) {
        const auto c = s.choices[t - 1];
        const auto p = slots[c];
        out.push_split({c, len[children[p].first], len[children[p].second]});
        slots[c] = children[p].first;
        slots.push_back(children[p].second);
    }
    return out;
}

std::vector<double> as_doubles(const std::vector<Rational> &v)
{
    std::vector<double> out;
    for (const auto &x : v) {
        out.push_back(x.get_d());
    }
    return out;
}

} // namespace

TEST_CASE("schedule counts")
{
    const std::uint64_t raw[] = {1, 1, 2, 6, 24, 120, 720, 5040};
    // Increasing binary trees up to child swaps: the Euler zigzag numbers.
    const std::size_t distinct[] = {1, 1, 1, 2, 5, 16, 61, 272};
    for (unsigned n = 1; n <= 8; ++n) {
        CHECK(raw_schedule_count(n) == raw[n - 1]);
        CHECK(enumerate_schedules(n, false).size() == raw[n - 1]);
        CHECK(enumerate_schedules(n).size() == distinct[n - 1]);
    }
}

TEST_CASE("canonical keys identify exactly the child-swap classes")
{
    for (unsigned n = 1; n <= 7; ++n) {
        std::map<std::string, std::set<std::tuple<unsigned, unsigned, unsigned>>> by_key;
        std::map<std::set<std::tuple<unsigned, unsigned, unsigned>>, std::string> by_class;
        for (const auto &s : enumerate_schedules(n, false)) {
            const auto key = canonical_key(s);
            const auto cls = swap_class(s);
            auto [it, fresh] = by_key.emplace(key, cls);
            CHECK(it->second == cls);
            auto [jt, fresh2] = by_class.emplace(cls, key);
            CHECK(jt->second == key);
        }
        CHECK(by_key.size() == enumerate_schedules(n).size());
    }
}

TEST_CASE("deduplicated enumeration keeps the lexicographically first member")
{
    const auto all = enumerate_schedules(6, false);
    std::set<std::string> seen;
    std::vector<SplitSchedule> firsts;
    for (const auto &s : all) {
        if (seen.insert(canonical_key(s)).second) {
            firsts.push_back(s);
        }
    }
    CHECK(firsts == enumerate_schedules(6));
    for (std::size_t i = 1; i < all.size(); ++i) {
        CHECK(all[i - 1].choices < all[i].choices);
    }
}

TEST_CASE("bad schedules are rejected")
{
    CHECK_THROWS(feasible(SplitSchedule{3, {0, 2}}, 1.5));
    CHECK_THROWS(feasible(SplitSchedule{3, {0}}, 1.5));
    CHECK_THROWS(feasible(SplitSchedule{3, {0, 0}}, 0.5));
    CHECK_THROWS(enumerate_schedules(0));
}

TEST_CASE("three pieces: the minimum is sqrt 2 at x = 2 - sqrt 2")
{
    const auto r = min_disc_for_schedule(SplitSchedule{3, {0, 0}}, 1e-7);
    CHECK(std::fabs(r.value - std::sqrt(2.0)) <= 1e-6);
    REQUIRE(r.witness);
    const auto leaves = as_doubles(r.witness->leaf_lengths);
    // leaves: x/2, 1 - x, x/2
    CHECK(leaves[0] + leaves[2] == doctest::Approx(2 - std::sqrt(2.0)).epsilon(1e-5));
    CHECK(leaves[1] == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-5));
    CHECK_FALSE(feasible(SplitSchedule{3, {0, 0}}, 1.41));
    CHECK(feasible(SplitSchedule{3, {0, 0}}, 1.4143));
}

TEST_CASE("witnesses replay within their target")
{
    for (unsigned n = 2; n <= 6; ++n) {
        for (const auto &s : enumerate_schedules(n)) {
            for (double d : {1.3, 1.6, 1.9, 2.0}) {
                const auto w = feasible(s, d);
                if (!w) {
                    continue;
                }
                Rational sum = 0;
                for (const auto &l : w->leaf_lengths) {
                    CHECK(l > 0);
                    sum += l;
                }
                CHECK(sum == 1);
                const auto exact = replay_disc(s, w->leaf_lengths);
                CHECK(exact <= Rational(d));
                const auto strat = realise(s, as_doubles(w->leaf_lengths));
                REQUIRE_FALSE(strat.validate());
                CHECK(disc_of(strat) == doctest::Approx(exact.get_d()).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("feasibility is monotone in d")
{
    for (const auto &s : enumerate_schedules(6)) {
        bool was = false;
        for (double d = 1.0; d <= 2.0; d += 0.0625) {
            const bool now = feasible(s, d).has_value();
            CHECK((!was || now));
            was = now;
        }
    }
}

TEST_CASE("some schedules cannot reach discrepancy 2")
{
    // splitting one lineage five times starves the others
    const auto r = min_disc_for_schedule(SplitSchedule{5, {0, 0, 0, 0}}, 1e-6);
    CHECK(std::isinf(r.value));
    CHECK_FALSE(r.witness);
}

TEST_CASE("small optima")
{
    CHECK(optimize(1, 1e-7).disc == 1.0);
    CHECK(optimize(2, 1e-7).disc == 1.0);
    CHECK(std::fabs(optimize(3, 1e-7).disc - std::sqrt(2.0)) <= 1e-6);
    CHECK(std::fabs(optimize(4, 1e-7).disc - std::sqrt(2.0)) <= 1e-6);
    CHECK_THROWS_AS(optimize(9, 1e-6), optimizer_cap_exceeded);
    CHECK_THROWS(optimize(0, 1e-6));
    CHECK_THROWS(optimize(3, 0));
}

TEST_CASE("no random strategy beats the optimum")
{
    std::mt19937 rng(4242);
    for (unsigned n = 3; n <= 6; ++n) {
        const double best = optimize(n, 1e-6).disc;
        std::uniform_real_distribution<double> frac(0.2, 0.8);
        for (int trial = 0; trial < 3000; ++trial) {
            Strategy s;
            std::vector<double> live{1.0};
            for (unsigned t = 1; t < n; ++t) {
                // bias toward splitting long pieces so the search is not trivial
                const auto i = static_cast<std::size_t>(std::max_element(live.begin(), live.end()) - live.begin());
                const auto j = std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng);
                const auto c = rng() % 4 ? i : j;
                const double l = live[c] * frac(rng);
                s.push_split({c, l, live[c] - l});
                live.push_back(live[c] - l);
                live[c] = l;
            }
            CHECK(disc_of(s) >= best - 1e-6);
        }
    }
}

TEST_CASE("result does not depend on the worker count")
{
    const auto a = optimize(6, 1e-6, {.jobs = 1});
    const auto b = optimize(6, 1e-6, {.jobs = 4});
    CHECK(a.disc == b.disc);
    CHECK(a.best == b.best);
    CHECK(a.witness.leaf_lengths == b.witness.leaf_lengths);
}

TEST_CASE("the lex-merge schedule is optimal up to tolerance for small n")
{
    for (unsigned n = 2; n <= 6; ++n) {
        const auto lm = schedule_of(to_strategy(run(n)));
        const auto r = min_disc_for_schedule(lm, 1e-6);
        CHECK(r.value == doctest::Approx(ub_lexmerge(n)).epsilon(2e-6));
    }
}

TEST_CASE("requiring largest-first splits can only raise the optimum")
{
    OptimizeOptions opt;
    opt.feasibility.require_split_largest = true;
    for (unsigned n = 2; n <= 6; ++n) {
        CHECK(optimize(n, 1e-6, opt).disc >= optimize(n, 1e-6).disc);
    }
}

TEST_CASE("conjecture reports for small n")
{
    for (unsigned n = 1; n <= 6; ++n) {
        const auto rep = conjecture_report(n, 1e-6);
        CHECK(rep.outcome == verdict::consistent);
        CHECK_FALSE(rep.is_violation());
        CHECK(rep.result.disc >= rep.lower_bound - 1e-6);
        CHECK(rep.result.disc <= rep.conjectured + 1e-6);
    }
    CHECK(std::string(to_string(verdict::below_conjecture)) == "below_conjecture");
}
