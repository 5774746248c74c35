#ifndef STICKBREAK_STRATEGIES_HPP
#define STICKBREAK_STRATEGIES_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <stickbreak/strategy.hpp>

namespace stickbreak
{

// disc(n) >= 2^(1 - 1/ceil(n/3)).
double lb(unsigned n);
// Value of lex-merge, 2^(1 - 1/ceil(n/2)).
double ub_lexmerge(unsigned n);
// de Bruijn-Erdos: log(1 + 1/n) / log(1 / (1 - 1/(2n))).
double ub_dbe(unsigned n);

// Points on the circle R/Z, in insertion order.
struct CirclePointSet {
    std::vector<long double> points;
};

struct degenerate_points : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// x_k = log2(2k - 1) mod 1, k = 1..n, in extended precision.
CirclePointSet dbe_points(unsigned n);

// Cuts the circle at the first point and records each later point as a split of
// the gap it lands in. Throws degenerate_points when a point repeats or leaves
// a gap shorter than 1e-15.
Strategy strategy_from_points(const CirclePointSet &p);

// max over partitions 1..t of max/min.
double disc_prefix(const Strategy &s, std::size_t t);
double disc_of(const Strategy &s);
// disc of every partition (not the running max), index t-1 for partition t.
std::vector<double> stage_discs(const Strategy &s);

// Always halves the current largest piece (lowest index on ties).
Strategy greedy_half(unsigned n);

struct BoundsRow {
    unsigned n = 0;
    double lower_bound = 0;
    double lexmerge_value = 0;
    double dbe_bound = 0;
    std::optional<double> optimal;

    // lower_bound <= lexmerge_value <= dbe_bound.
    bool ordered() const noexcept { return lower_bound <= lexmerge_value && lexmerge_value <= dbe_bound; }
};

// `optimal`, when given, supplies disc(n) for the rows it can handle.
std::vector<BoundsRow> bounds_table(unsigned n_from, unsigned n_to,
                                    const std::function<std::optional<double>(unsigned)> &optimal = {});

} // namespace stickbreak

#endif
