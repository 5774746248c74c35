#ifndef STICKBREAK_OPTIMIZER_HPP
#define STICKBREAK_OPTIMIZER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <stickbreak/exact_lp.hpp>
#include <stickbreak/strategy.hpp>

namespace stickbreak
{

// Discrete skeleton of a strategy: at step t (t = 1..n-1) the piece at index
// choices[t-1] of the t live pieces is split. Live pieces follow the Strategy
// convention: the left child takes the parent's index, the right child is
// appended.
struct SplitSchedule {
    unsigned n = 1;
    std::vector<unsigned> choices;

    friend bool operator==(const SplitSchedule &, const SplitSchedule &) = default;
    std::string to_string() const;
};

// Leaf lengths (indexed by final live position) certifying a discrepancy.
struct Witness {
    std::vector<Rational> leaf_lengths;
    double achieved_disc = 1.0;
};

struct FeasibilityOptions {
    // Also require that every split takes a longest live piece.
    bool require_split_largest = false;
};

// Canonical form under swapping the two children of any split.
std::string canonical_key(const SplitSchedule &s);

// (n-1)!
std::uint64_t raw_schedule_count(unsigned n);

// All schedules in lexicographic order of choices; with dedup, only the first
// (lexicographically smallest) member of each child-swap class is kept.
std::vector<SplitSchedule> enumerate_schedules(unsigned n, bool dedup = true);

// Schedule realised by a strategy's split targets.
SplitSchedule schedule_of(const Strategy &s);
SplitSchedule schedule_of(const ExactStrategy &s);

// Do positive leaves (each >= 1e-9, summing to 1) exist such that every pair of
// simultaneously live pieces has ratio <= d? Decided by an exact rational LP.
std::optional<Witness> feasible(const SplitSchedule &s, double d, const FeasibilityOptions &opts = {});

// Partition lengths of every stage from the leaves, max/min taken over stages.
Rational replay_disc(const SplitSchedule &s, const std::vector<Rational> &leaves);

struct ScheduleResult {
    // Smallest feasible point of the bisection grid on [1, 2]; +inf when even
    // d = 2 is infeasible.
    double value = 1.0;
    std::optional<Witness> witness;
};

// Bisection on d with fixed step count ceil(log2(1/tol)); the returned value
// v satisfies inf{feasible d} <= v <= inf{feasible d} + tol.
ScheduleResult min_disc_for_schedule(const SplitSchedule &s, double tol, const FeasibilityOptions &opts = {});

struct optimizer_cap_exceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OptimizeOptions {
    unsigned jobs = 1;
    unsigned cap = 8;
    FeasibilityOptions feasibility;
};

struct OptimizeResult {
    unsigned n = 1;
    double disc = 1.0;
    SplitSchedule best;
    Witness witness;
    std::uint64_t raw_schedules = 1;
    std::size_t distinct_schedules = 1;
    // Whether the witness splits every piece into parts no longer than the
    // shortest live piece (x_k >= x_1' >= x_1'').
    bool splits_below_min = true;
};

// disc(n) up to tol: minimum over all schedules. Ties go to the
// lexicographically smallest choices, so the result does not depend on jobs.
OptimizeResult optimize(unsigned n, double tol, const OptimizeOptions &opts = {});

enum class verdict { consistent, below_conjecture, violates_lower_bound, exceeds_upper_bound };

const char *to_string(verdict v) noexcept;

struct ConjectureReport {
    OptimizeResult result;
    double tol = 0;
    double lower_bound = 0;
    double conjectured = 0; // 2^(1-1/ceil(n/2)), also the lex-merge upper bound
    verdict outcome = verdict::consistent;

    // Bug signals, as opposed to findings.
    bool is_violation() const noexcept
    {
        return outcome == verdict::violates_lower_bound || outcome == verdict::exceeds_upper_bound;
    }
};

ConjectureReport conjecture_report(unsigned n, double tol, const OptimizeOptions &opts = {});

} // namespace stickbreak

#endif
