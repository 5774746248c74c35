#ifndef STICKBREAK_BASKETS_HPP
#define STICKBREAK_BASKETS_HPP

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <stickbreak/qnum.hpp>

namespace stickbreak
{

struct invalid_basket : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// m = ceil(n / 2), the number of distinct basket elements for order n.
constexpr unsigned half_order(unsigned n) noexcept { return (n + 1) / 2; }

// Multiset on {0, ..., m-1} with every multiplicity at most 2, kept as a
// weakly increasing listing.
class Basket
{
public:
    Basket() = default;
    Basket(unsigned m, std::vector<int> elements);

    unsigned modulus() const noexcept { return m_; }
    const std::vector<int> &elements() const noexcept { return elems_; }
    std::size_t size() const noexcept { return elems_.size(); }
    bool empty() const noexcept { return elems_.empty(); }
    bool contains(int x) const;
    unsigned count(int x) const;

    // 0 and m-1 both present.
    bool is_wrapped() const;

    friend bool operator==(const Basket &, const Basket &) = default;

    // "[0,0,3]"
    std::string to_string() const;

private:
    unsigned m_ = 0;
    std::vector<int> elems_;
};

// Multiset union; throws invalid_basket if a multiplicity would exceed 2.
Basket merge_baskets(const Basket &a, const Basket &b);

// Size first, then the usual lexicographic order on the sorted listings.
std::strong_ordering lex_compare(const Basket &a, const Basket &b);

struct lex_less {
    bool operator()(const Basket &a, const Basket &b) const { return lex_compare(a, b) < 0; }
};

// l(B) = sum over x in B of 2^(x/m).
QNumber basket_length(const Basket &b);

// I_h(a): doubled residues a, ..., a+h-1 (mod m), with m-1 appearing once when
// n is odd. Requires 1 <= h <= m.
Basket cyclic_interval(unsigned n, long a, unsigned h);

// Number of elements of I_h(a) without building it.
std::size_t cyclic_interval_size(unsigned n, long a, unsigned h);

enum class basket_kind { singleton, cyclically_ordered, not_cyclic };

struct Classification {
    basket_kind kind = basket_kind::not_cyclic;
    // Valid for cyclically_ordered: B == I_h(a), a the start of the cyclic run
    // (0 for the full circle).
    unsigned a = 0;
    unsigned h = 0;
    bool wrapped = false;
};

Classification classify(unsigned n, const Basket &b);

// j-th singleton of the initial collection, 1-based: X_j = [floor((j-1)/2)].
Basket initial_singleton(unsigned n, unsigned j);

// Union of all initial singletons: two copies of 0..m-2, and m-1 once (n odd)
// or twice (n even).
Basket full_multiset(unsigned n);

class BasketCollection
{
public:
    BasketCollection() = default;
    // Keeps the given listing; lex-merge always produces it sorted, audited
    // input may not be.
    BasketCollection(unsigned n, unsigned stage, std::vector<Basket> baskets);

    unsigned order() const noexcept { return n_; }
    unsigned modulus() const noexcept { return half_order(n_); }
    unsigned stage() const noexcept { return stage_; }
    const std::vector<Basket> &baskets() const noexcept { return baskets_; }
    std::size_t size() const noexcept { return baskets_.size(); }
    const Basket &operator[](std::size_t i) const { return baskets_[i]; }

    // Multiplicity of each element 0..m-1 over the whole collection.
    std::vector<unsigned> element_counts() const;
    bool is_sorted() const;
    QNumber total_length() const;

    friend bool operator==(const BasketCollection &, const BasketCollection &) = default;

    // "{[1],[1],[2],[2],[3],[0,0]}"
    std::string to_string() const;

private:
    unsigned n_ = 0;
    unsigned stage_ = 0;
    std::vector<Basket> baskets_;
};

// B_0 for lex-merge of order n (n >= 1).
BasketCollection initial_collection(unsigned n);

} // namespace stickbreak

#endif
