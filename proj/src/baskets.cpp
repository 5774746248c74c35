#include <stickbreak/baskets.hpp>

#include <algorithm>
#include <iterator>
#include <sstream>

namespace stickbreak
{

namespace
{

unsigned full_count(unsigned n, unsigned x)
{
    return (n % 2 == 1 && x == half_order(n) - 1) ? 1 : 2;
}

unsigned wrap(long a, unsigned m)
{
    const long r = a % static_cast<long>(m);
    return static_cast<unsigned>(r < 0 ? r + static_cast<long>(m) : r);
}

} // namespace

Basket::Basket(unsigned m, std::vector<int> elements) : m_(m), elems_(std::move(elements))
{
    if (m == 0) {
        throw invalid_basket("basket modulus must be positive");
    }
    std::sort(elems_.begin(), elems_.end());
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        const int x = elems_[i];
        if (x < 0 || x >= static_cast<int>(m)) {
            throw invalid_basket("basket element " + std::to_string(x) + " outside [0, "
                                 + std::to_string(m - 1) + "]");
        }
        if (i >= 2 && elems_[i - 2] == x) {
            throw invalid_basket("basket element " + std::to_string(x) + " appears more than twice");
        }
    }
}

bool Basket::contains(int x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

unsigned Basket::count(int x) const
{
    auto [lo, hi] = std::equal_range(elems_.begin(), elems_.end(), x);
    return static_cast<unsigned>(hi - lo);
}

bool Basket::is_wrapped() const { return contains(0) && contains(static_cast<int>(m_) - 1); }

std::string Basket::to_string() const
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i != 0) {
            os << ',';
        }
        os << elems_[i];
    }
    os << ']';
    return os.str();
}

Basket merge_baskets(const Basket &a, const Basket &b)
{
    if (a.modulus() != b.modulus()) {
        throw invalid_basket("cannot merge baskets with different moduli");
    }
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::merge(a.elements().begin(), a.elements().end(), b.elements().begin(), b.elements().end(),
               std::back_inserter(out));
    return Basket(a.modulus(), std::move(out));
}

std::strong_ordering lex_compare(const Basket &a, const Basket &b)
{
    if (auto c = a.size() <=> b.size(); c != 0) {
        return c;
    }
    return std::lexicographical_compare_three_way(a.elements().begin(), a.elements().end(),
                                                  b.elements().begin(), b.elements().end());
}

QNumber basket_length(const Basket &b)
{
    QNumber r(b.modulus());
    for (int x : b.elements()) {
        r.add_power(static_cast<unsigned long>(x));
    }
    return r;
}

std::size_t cyclic_interval_size(unsigned n, long a, unsigned h)
{
    const unsigned m = half_order(n);
    if (h == 0 || h > m) {
        throw invalid_basket("cyclic interval length must lie in [1, m]");
    }
    const bool covers_last = wrap(a, m) + h >= m;
    return (n % 2 == 1 && covers_last) ? 2 * h - 1 : 2 * h;
}

Basket cyclic_interval(unsigned n, long a, unsigned h)
{
    const unsigned m = half_order(n);
    if (n == 0) {
        throw invalid_basket("order must be positive");
    }
    if (h == 0 || h > m) {
        throw invalid_basket("cyclic interval length must lie in [1, m]");
    }
    std::vector<int> elems;
    elems.reserve(2 * h);
    const unsigned start = wrap(a, m);
    for (unsigned i = 0; i < h; ++i) {
        const unsigned x = (start + i) % m;
        for (unsigned c = 0; c < full_count(n, x); ++c) {
            elems.push_back(static_cast<int>(x));
        }
    }
    return Basket(m, std::move(elems));
}

Classification classify(unsigned n, const Basket &b)
{
    const unsigned m = half_order(n);
    Classification out;
    out.wrapped = b.is_wrapped();
    if (b.size() == 1) {
        out.kind = basket_kind::singleton;
        return out;
    }
    if (b.empty() || b.modulus() != m) {
        return out;
    }

    std::vector<unsigned> counts(m, 0);
    for (int x : b.elements()) {
        ++counts[static_cast<unsigned>(x)];
    }
    unsigned h = 0;
    for (unsigned x = 0; x < m; ++x) {
        if (counts[x] == 0) {
            continue;
        }
        if (counts[x] != full_count(n, x)) {
            return out;
        }
        ++h;
    }

    unsigned start = 0;
    if (h < m) {
        unsigned starts = 0;
        for (unsigned x = 0; x < m; ++x) {
            if (counts[x] != 0 && counts[(x + m - 1) % m] == 0) {
                start = x;
                ++starts;
            }
        }
        if (starts != 1) {
            return out;
        }
    }
    out.kind = basket_kind::cyclically_ordered;
    out.a = start;
    out.h = h;
    return out;
}

Basket initial_singleton(unsigned n, unsigned j)
{
    if (j == 0 || j > n) {
        throw invalid_basket("initial singleton index out of range");
    }
    return Basket(half_order(n), {static_cast<int>((j - 1) / 2)});
}

Basket full_multiset(unsigned n)
{
    const unsigned m = half_order(n);
    std::vector<int> elems;
    elems.reserve(n);
    for (unsigned j = 1; j <= n; ++j) {
        elems.push_back(static_cast<int>((j - 1) / 2));
    }
    return Basket(m, std::move(elems));
}

BasketCollection::BasketCollection(unsigned n, unsigned stage, std::vector<Basket> baskets)
    : n_(n), stage_(stage), baskets_(std::move(baskets))
{
    if (n == 0) {
        throw invalid_basket("order must be positive");
    }
    for (const auto &b : baskets_) {
        if (b.modulus() != half_order(n)) {
            throw invalid_basket("basket modulus does not match the collection order");
        }
    }
}

std::vector<unsigned> BasketCollection::element_counts() const
{
    std::vector<unsigned> counts(modulus(), 0);
    for (const auto &b : baskets_) {
        for (int x : b.elements()) {
            ++counts[static_cast<unsigned>(x)];
        }
    }
    return counts;
}

bool BasketCollection::is_sorted() const
{
    return std::is_sorted(baskets_.begin(), baskets_.end(), lex_less{});
}

QNumber BasketCollection::total_length() const
{
    QNumber total(modulus());
    for (const auto &b : baskets_) {
        for (int x : b.elements()) {
            total.add_power(static_cast<unsigned long>(x));
        }
    }
    return total;
}

std::string BasketCollection::to_string() const
{
    std::string s = "{";
    for (std::size_t i = 0; i < baskets_.size(); ++i) {
        if (i != 0) {
            s += ',';
        }
        s += baskets_[i].to_string();
    }
    s += '}';
    return s;
}

BasketCollection initial_collection(unsigned n)
{
    if (n == 0) {
        throw invalid_basket("lex-merge order must be at least 1");
    }
    const unsigned m = half_order(n);
    std::vector<Basket> baskets;
    baskets.reserve(n);
    for (unsigned j = 1; j <= n; ++j) {
        baskets.emplace_back(m, std::vector<int>{static_cast<int>((j - 1) / 2)});
    }
    return BasketCollection(n, 0, std::move(baskets));
}

} // namespace stickbreak
