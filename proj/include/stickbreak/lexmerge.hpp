#ifndef STICKBREAK_LEXMERGE_HPP
#define STICKBREAK_LEXMERGE_HPP

#include <compare>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <stickbreak/baskets.hpp>
#include <stickbreak/qnum.hpp>
#include <stickbreak/strategy.hpp>

namespace stickbreak
{

// Where a freshly merged basket goes relative to identical baskets already in
// the collection. The resulting collections are the same multisets either way.
enum class tie_break { after_equal, before_equal };

struct MergeRecord {
    unsigned stage = 0;
    // Positions in the sorted collection; lex-merge always takes 0 and 1.
    std::size_t left_index = 0;
    std::size_t right_index = 1;
    Basket left;
    Basket right;
    Basket result;
};

// Exact discrepancy of one collection: the longest and shortest baskets.
struct DiscWitness {
    std::size_t max_index = 0;
    std::size_t min_index = 0;
    QNumber max_length{1};
    QNumber min_length{1};

    // Compares max/min against target by cross-multiplication:
    // l(max) <=> target * l(min).
    std::strong_ordering ratio_vs(const QNumber &target) const;
    double value() const;
};

// disc(a) <=> disc(b), exactly.
std::strong_ordering compare_disc(const DiscWitness &a, const DiscWitness &b);

DiscWitness disc_exact(const BasketCollection &c);

// Merges the two lex-smallest baskets. Throws std::invalid_argument when the
// collection has fewer than two baskets.
std::pair<BasketCollection, MergeRecord> merge_step(const BasketCollection &c,
                                                    tie_break tb = tie_break::after_equal);

// Incremental lex-merge: keeps the collection in an ordered multiset so each
// step costs O(log n) basket comparisons. Use it directly for large n where a
// full Trace would not fit.
class LexMerge
{
public:
    explicit LexMerge(unsigned n, tie_break tb = tie_break::after_equal);

    unsigned order() const noexcept { return n_; }
    unsigned stage() const noexcept { return stage_; }
    bool done() const noexcept { return baskets_.size() <= 1; }
    std::size_t size() const noexcept { return baskets_.size(); }

    MergeRecord step();
    BasketCollection snapshot() const;

    const Basket &smallest() const { return *baskets_.begin(); }
    const Basket &largest() const { return *baskets_.rbegin(); }

private:
    unsigned n_;
    unsigned stage_ = 0;
    tie_break tb_;
    std::multiset<Basket, lex_less> baskets_;
};

struct Trace {
    unsigned n = 0;
    unsigned m = 0;
    std::vector<BasketCollection> collections;
    std::vector<MergeRecord> merges;
    std::vector<DiscWitness> discs;

    // Stage holding the largest discrepancy (first one on ties).
    std::size_t max_disc_stage() const;
};

Trace run(unsigned n, tie_break tb = tie_break::after_equal);

// Rebuilds the merge records and discrepancy witnesses of a trace from its
// collections alone (used for traces read back from disk). Throws
// std::invalid_argument when the collections cannot come from merges.
Trace make_trace(unsigned n, std::vector<BasketCollection> collections,
                 std::vector<std::pair<std::size_t, std::size_t>> merge_indices);

// Reverses the run: partition t holds the normalised lengths of B_{n-t}; each
// step splits l(M)/L into l(B1)/L and l(B2)/L.
ExactStrategy to_strategy(const Trace &t);

} // namespace stickbreak

#endif
