#ifndef STICKBREAK_EXACT_LP_HPP
#define STICKBREAK_EXACT_LP_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace stickbreak
{

using Rational = mpq_class;

// { x in Q^vars : x >= 0, rows[i] . x <= rhs[i] }
struct LinearSystem {
    std::size_t vars = 0;
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;

    void add_row(std::vector<Rational> coeffs, Rational bound);
};

// Exact phase-one simplex (auxiliary-variable form, Bland's rule). Returns a
// feasible point or nullopt when the system is empty.
std::optional<std::vector<Rational>> find_feasible_point(const LinearSystem &sys);

} // namespace stickbreak

#endif
