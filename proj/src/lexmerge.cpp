#include <stickbreak/lexmerge.hpp>

#include <algorithm>

namespace stickbreak
{

std::strong_ordering DiscWitness::ratio_vs(const QNumber &target) const
{
    return compare(max_length, target * min_length);
}

double DiscWitness::value() const { return to_float(max_length) / to_float(min_length); }

std::strong_ordering compare_disc(const DiscWitness &a, const DiscWitness &b)
{
    return compare(a.max_length * b.min_length, b.max_length * a.min_length);
}

DiscWitness disc_exact(const BasketCollection &c)
{
    if (c.size() == 0) {
        throw std::invalid_argument("discrepancy of an empty collection");
    }
    DiscWitness w;
    w.max_length = basket_length(c[0]);
    w.min_length = w.max_length;
    for (std::size_t i = 1; i < c.size(); ++i) {
        auto len = basket_length(c[i]);
        if (compare(len, w.max_length) > 0) {
            w.max_index = i;
            w.max_length = len;
        } else if (compare(len, w.min_length) < 0) {
            w.min_index = i;
            w.min_length = std::move(len);
        }
    }
    return w;
}

std::pair<BasketCollection, MergeRecord> merge_step(const BasketCollection &c, tie_break tb)
{
    if (c.size() < 2) {
        throw std::invalid_argument("merge_step needs at least two baskets");
    }
    std::vector<Basket> sorted = c.baskets();
    std::stable_sort(sorted.begin(), sorted.end(), lex_less{});

    MergeRecord rec;
    rec.stage = c.stage();
    rec.left = sorted[0];
    rec.right = sorted[1];
    rec.result = merge_baskets(rec.left, rec.right);

    std::vector<Basket> next(std::make_move_iterator(sorted.begin() + 2), std::make_move_iterator(sorted.end()));
    auto pos = tb == tie_break::after_equal ? std::upper_bound(next.begin(), next.end(), rec.result, lex_less{})
                                            : std::lower_bound(next.begin(), next.end(), rec.result, lex_less{});
    next.insert(pos, rec.result);
    return {BasketCollection(c.order(), c.stage() + 1, std::move(next)), std::move(rec)};
}

LexMerge::LexMerge(unsigned n, tie_break tb) : n_(n), tb_(tb)
{
    const auto initial = initial_collection(n);
    for (const auto &b : initial.baskets()) {
        baskets_.insert(baskets_.end(), b);
    }
}

MergeRecord LexMerge::step()
{
    if (done()) {
        throw std::invalid_argument("lex-merge already finished");
    }
    MergeRecord rec;
    rec.stage = stage_;
    rec.left = baskets_.extract(baskets_.begin()).value();
    rec.right = baskets_.extract(baskets_.begin()).value();
    rec.result = merge_baskets(rec.left, rec.right);
    if (tb_ == tie_break::after_equal) {
        baskets_.insert(rec.result);
    } else {
        baskets_.insert(baskets_.lower_bound(rec.result), rec.result);
    }
    ++stage_;
    return rec;
}

BasketCollection LexMerge::snapshot() const
{
    return BasketCollection(n_, stage_, std::vector<Basket>(baskets_.begin(), baskets_.end()));
}

std::size_t Trace::max_disc_stage() const
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < discs.size(); ++i) {
        if (compare_disc(discs[i], discs[best]) > 0) {
            best = i;
        }
    }
    return best;
}

Trace run(unsigned n, tie_break tb)
{
    LexMerge lm(n, tb);
    Trace t;
    t.n = n;
    t.m = half_order(n);
    t.collections.reserve(n);
    t.collections.push_back(lm.snapshot());
    while (!lm.done()) {
        t.merges.push_back(lm.step());
        t.collections.push_back(lm.snapshot());
    }
    t.discs.reserve(n);
    for (const auto &c : t.collections) {
        t.discs.push_back(disc_exact(c));
    }
    return t;
}

Trace make_trace(unsigned n, std::vector<BasketCollection> collections,
                 std::vector<std::pair<std::size_t, std::size_t>> merge_indices)
{
    if (n == 0) {
        throw std::invalid_argument("trace order must be positive");
    }
    if (collections.size() != n) {
        throw std::invalid_argument("trace of order " + std::to_string(n) + " needs " + std::to_string(n)
                                    + " collections, got " + std::to_string(collections.size()));
    }
    if (merge_indices.size() != n - 1) {
        throw std::invalid_argument("trace of order " + std::to_string(n) + " needs " + std::to_string(n - 1)
                                    + " merges, got " + std::to_string(merge_indices.size()));
    }
    Trace t;
    t.n = n;
    t.m = half_order(n);
    for (const auto &c : collections) {
        if (c.order() != n) {
            throw std::invalid_argument("collection order does not match the trace");
        }
        if (c.size() == 0) {
            throw std::invalid_argument("empty collection in trace");
        }
        for (const auto &b : c.baskets()) {
            if (b.empty()) {
                throw std::invalid_argument("empty basket in trace");
            }
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto [li, ri] = merge_indices[i];
        const auto &c = collections[i];
        if (li >= c.size() || ri >= c.size() || li == ri) {
            throw std::invalid_argument("merge " + std::to_string(i) + " refers to invalid basket indices");
        }
        MergeRecord rec;
        rec.stage = static_cast<unsigned>(i);
        rec.left_index = li;
        rec.right_index = ri;
        rec.left = c[li];
        rec.right = c[ri];
        try {
            rec.result = merge_baskets(rec.left, rec.right);
        } catch (const invalid_basket &) {
            // Left for the consistency checker to report.
            rec.result = Basket(t.m, {});
        }
        t.merges.push_back(std::move(rec));
    }
    t.collections = std::move(collections);
    for (const auto &c : t.collections) {
        t.discs.push_back(disc_exact(c));
    }
    return t;
}

ExactStrategy to_strategy(const Trace &t)
{
    if (t.collections.empty()) {
        throw std::invalid_argument("empty trace");
    }
    ExactStrategy s(t.collections.back().total_length());
    std::vector<Basket> live(t.collections.back().baskets());
    for (auto it = t.merges.rbegin(); it != t.merges.rend(); ++it) {
        auto pos = std::find(live.begin(), live.end(), it->result);
        if (pos == live.end()) {
            throw std::invalid_argument("merge result " + it->result.to_string() + " missing from stage "
                                        + std::to_string(it->stage + 1));
        }
        const auto target = static_cast<std::size_t>(pos - live.begin());
        *pos = it->left;
        live.push_back(it->right);
        s.push_split({target, basket_length(it->left), basket_length(it->right)});
    }
    return s;
}

} // namespace stickbreak
