#ifndef STICKBREAK_VERIFY_HPP
#define STICKBREAK_VERIFY_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <stickbreak/baskets.hpp>
#include <stickbreak/lexmerge.hpp>
#include <stickbreak/strategy.hpp>

namespace stickbreak
{

enum class check_status { pass, vacuous, fail };

const char *to_string(check_status s) noexcept;

// Outcome of one checker. A failing report always carries a witness.
struct CheckReport {
    std::string check;
    unsigned n = 0;
    // First and last stage covered (equal for single-collection checks).
    unsigned stage_first = 0;
    unsigned stage_last = 0;
    check_status status = check_status::pass;
    std::string witness;
    // Extra facts worth printing, e.g. the inferred size classes.
    std::string detail;

    bool passed() const noexcept { return status != check_status::fail; }
};

// Size classes of a collection with size-3-symmetry: every size is 2^r or
// 2^(r+1), except at most one wrapped basket of size w, 2^r < w < 2^(r+1).
struct SizeClasses {
    unsigned r = 0;
    std::optional<std::size_t> exceptional; // index into the collection
    std::size_t w = 0;
};

// nullopt when the collection has no size-3-symmetry.
std::optional<SizeClasses> size_classes(const BasketCollection &c);

// Every basket is a singleton or a cyclic interval I_h(a).
CheckReport check_p1(const BasketCollection &c);
// Size-3-symmetry; detail reports r and w.
CheckReport check_p2(const BasketCollection &c);
// The 2^r baskets form a chain, the 2^(r+1) baskets form a chain, and
// (2^(r+1) chain, 2^r chain) is a chain.
CheckReport check_p3(const BasketCollection &c);
// The exceptional wrapped basket is X_{n-(2^r-s)+1} + ... + X_n + X_1 + ... + X_{2s}
// with n = a 2^r + s, and w = 2^r + s.
CheckReport check_wrapped_structure(const BasketCollection &c);
// Adjacent baskets in lex order have non-decreasing length.
CheckReport check_lex_length(const BasketCollection &c);
// n - stage baskets whose union is the multiset of B_0.
CheckReport check_conservation(const BasketCollection &c);

// disc(B_{i+1}) <= disc(B_i) at every stage, by exact cross-multiplication.
CheckReport check_monotonicity(const Trace &t);
// disc(B_0) == 2^(1-1/m) and no stage exceeds it: disc(LM_n) = 2^(1-1/m).
CheckReport check_disc_value(const Trace &t);
// Collections are sorted, and each follows from the previous one by merging
// its two lex-smallest baskets.
CheckReport check_trace_consistency(const Trace &t);

// For k < n, i < k with k + 2i - 1 <= n, the sorted lengths of partition k
// satisfy x_i / x_{i+1} >= 2^eps (relative tolerance 1e-12). Also checks the
// precondition disc(s) <= 2^(1-eps).
CheckReport check_ratio_lemma(const Strategy &s, double epsilon);
// Exact variant with eps = eps_num / m, m the strategy modulus.
CheckReport check_ratio_lemma(const ExactStrategy &s, unsigned eps_num);

// Names accepted by verify_trace / verify_all.
const std::vector<std::string> &check_names();

// Runs the selected checks (all when `checks` is empty) over every stage of the
// trace; one aggregated report per check, sorted by name. The ratio lemma runs
// exactly on to_strategy(t) with eps = 1/m.
std::vector<CheckReport> verify_trace(const Trace &t, const std::set<std::string> &checks = {});

std::vector<CheckReport> verify_all(unsigned n, const std::set<std::string> &checks = {});

} // namespace stickbreak

#endif
