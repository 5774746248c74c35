#include <stickbreak/strategies.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace stickbreak
{

namespace
{

void require_positive(unsigned n)
{
    if (n == 0) {
        throw std::invalid_argument("n must be at least 1");
    }
}

unsigned ceil_div(unsigned n, unsigned d) { return (n + d - 1) / d; }

} // namespace

double lb(unsigned n)
{
    require_positive(n);
    return std::exp2(1.0 - 1.0 / ceil_div(n, 3));
}

double ub_lexmerge(unsigned n)
{
    require_positive(n);
    return std::exp2(1.0 - 1.0 / ceil_div(n, 2));
}

double ub_dbe(unsigned n)
{
    require_positive(n);
    const double x = static_cast<double>(n);
    return std::log1p(1.0 / x) / -std::log1p(-1.0 / (2.0 * x));
}

CirclePointSet dbe_points(unsigned n)
{
    require_positive(n);
    CirclePointSet out;
    out.points.reserve(n);
    for (unsigned k = 1; k <= n; ++k) {
        const long double v = std::log2(2.0L * k - 1.0L);
        out.points.push_back(v - std::floor(v));
    }
    return out;
}

Strategy strategy_from_points(const CirclePointSet &p)
{
    if (p.points.empty()) {
        throw std::invalid_argument("strategy_from_points needs at least one point");
    }
    constexpr long double min_gap = 1e-15L;
    const std::size_t n = p.points.size();
    const long double origin = p.points.front();
    std::vector<long double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = p.points[k] - origin;
        u[k] -= std::floor(u[k]);
    }
    u[0] = 0;
    // Circular order of all points; point 0 sits at position 0.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    // Deleting points latest first, a point's neighbours at deletion time are
    // its neighbours when it was inserted. n stands for the end of the circle.
    std::vector<std::size_t> prev(n), next(n);
    for (std::size_t i = 0; i < n; ++i) {
        prev[order[i]] = i == 0 ? n : order[i - 1];
        next[order[i]] = i + 1 == n ? n : order[i + 1];
    }
    std::vector<BasicSplit<double>> splits(n - 1);
    std::size_t degenerate = 0;
    for (std::size_t k = n; k-- > 1;) {
        const std::size_t a = prev[k], b = next[k];
        const long double left = u[k] - u[a];
        const long double right = (b == n ? 1.0L : u[b]) - u[k];
        if (left < min_gap || right < min_gap) {
            degenerate = k;
        }
        // the gap starting at point a is piece a of the strategy
        splits[k - 1] = {a, static_cast<double>(left), static_cast<double>(right)};
        next[a] = b;
        if (b != n) {
            prev[b] = a;
        }
    }
    if (degenerate) {
        throw degenerate_points("point " + std::to_string(degenerate + 1) + " leaves a gap below 1e-15");
    }
    return Strategy(std::move(splits));
}

std::vector<double> stage_discs(const Strategy &s)
{
    std::vector<double> live{1.0};
    // Max-heap with lazy deletion: an entry is current iff live[idx] still holds it.
    std::priority_queue<std::pair<double, std::size_t>> longest;
    longest.push({1.0, 0});
    double shortest = 1.0;
    std::vector<double> out{1.0};
    out.reserve(s.length());
    for (const auto &sp : s.splits()) {
        const double parent = live.at(sp.target);
        live[sp.target] = sp.left;
        live.push_back(sp.right);
        longest.push({sp.left, sp.target});
        longest.push({sp.right, live.size() - 1});
        while (live[longest.top().second] != longest.top().first) {
            longest.pop();
        }
        if (parent == shortest && (sp.left > parent || sp.right > parent)) {
            // only an invalid split can lengthen a piece
            shortest = *std::min_element(live.begin(), live.end());
        } else {
            shortest = std::min({shortest, sp.left, sp.right});
        }
        out.push_back(longest.top().first / shortest);
    }
    return out;
}

double disc_prefix(const Strategy &s, std::size_t t)
{
    if (t == 0 || t > s.length()) {
        throw std::out_of_range("disc_prefix: t must lie in [1, length]");
    }
    const auto d = stage_discs(s);
    return *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(t));
}

double disc_of(const Strategy &s) { return disc_prefix(s, s.length()); }

Strategy greedy_half(unsigned n)
{
    require_positive(n);
    // (length, -index): the top is the largest piece, lowest index first.
    std::priority_queue<std::pair<double, long>> heap;
    heap.push({1.0, 0});
    Strategy s;
    for (unsigned t = 1; t < n; ++t) {
        const auto [len, neg_idx] = heap.top();
        heap.pop();
        const double half = len / 2;
        s.push_split({static_cast<std::size_t>(-neg_idx), half, half});
        heap.push({half, neg_idx});
        heap.push({half, -static_cast<long>(t)});
    }
    return s;
}

std::vector<BoundsRow> bounds_table(unsigned n_from, unsigned n_to,
                                    const std::function<std::optional<double>(unsigned)> &optimal)
{
    if (n_from == 0 || n_from > n_to) {
        throw std::invalid_argument("bounds_table needs 1 <= n_from <= n_to");
    }
    std::vector<BoundsRow> rows;
    rows.reserve(n_to - n_from + 1);
    for (unsigned n = n_from; n <= n_to; ++n) {
        BoundsRow row{n, lb(n), ub_lexmerge(n), ub_dbe(n), std::nullopt};
        if (optimal) {
            row.optimal = optimal(n);
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace stickbreak
