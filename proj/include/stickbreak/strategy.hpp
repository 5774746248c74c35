#ifndef STICKBREAK_STRATEGY_HPP
#define STICKBREAK_STRATEGY_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <stickbreak/qnum.hpp>

namespace stickbreak
{

// One refinement step: the piece at index `target` of the current partition is
// replaced by `left`, and `right` is appended at the end.
template <typename Length>
struct BasicSplit {
    std::size_t target = 0;
    Length left;
    Length right;
};

// A strategy of length n: partition 1 is the whole interval, partition t+1
// refines partition t by one split. Stored as the list of n-1 splits so long
// strategies stay linear in memory.
class Strategy
{
public:
    using Split = BasicSplit<double>;

    Strategy() = default;
    explicit Strategy(std::vector<Split> splits) : splits_(std::move(splits)) {}

    std::size_t length() const noexcept { return splits_.size() + 1; }
    const std::vector<Split> &splits() const noexcept { return splits_; }
    void push_split(Split s) { splits_.push_back(s); }

    // Lengths of partition t (1-based), in split order.
    std::vector<double> partition(std::size_t t) const;

    // Human-readable reason when the refinement invariant fails: targets in
    // range, both parts positive, parts summing to the parent within
    // rel_tol * parent.
    std::optional<std::string> validate(double rel_tol = 1e-12) const;

private:
    std::vector<Split> splits_;
};

// Lex-merge strategies carry exact lengths: every piece is a QNumber numerator
// over the common denominator `total` (the constant L of the run).
class ExactStrategy
{
public:
    using Split = BasicSplit<QNumber>;

    explicit ExactStrategy(QNumber total) : total_(std::move(total)) {}

    unsigned modulus() const noexcept { return total_.modulus(); }
    const QNumber &total() const noexcept { return total_; }
    std::size_t length() const noexcept { return splits_.size() + 1; }
    const std::vector<Split> &splits() const noexcept { return splits_; }
    void push_split(Split s) { splits_.push_back(std::move(s)); }

    // Numerators of partition t (1-based); divide by total() for lengths.
    std::vector<QNumber> partition(std::size_t t) const;

    // Exact refinement check: left + right == parent, both positive.
    std::optional<std::string> validate() const;

    // Normalised lengths as doubles.
    Strategy to_float() const;

private:
    QNumber total_;
    std::vector<Split> splits_;
};

} // namespace stickbreak

#endif
