#include <doctest.h>

#include <algorithm>

#include <stickbreak/baskets.hpp>

using namespace stickbreak;

namespace
{

// I_h(a) listed straight from the definition.
std::vector<int> interval_by_definition(unsigned n, long a, unsigned h)
{
    const long m = half_order(n);
    std::vector<int> out;
    for (unsigned i = 0; i < h; ++i) {
        const int x = static_cast<int>(((a + i) % m + m) % m);
        out.push_back(x);
        if (!(n % 2 == 1 && x == m - 1)) {
            out.push_back(x);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Basket B(unsigned m, std::vector<int> e) { return Basket(m, std::move(e)); }

} // namespace

TEST_CASE("basket validation")
{
    CHECK_THROWS_AS(B(4, {0, 0, 0}), invalid_basket);
    CHECK_THROWS_AS(B(4, {4}), invalid_basket);
    CHECK_THROWS_AS(B(4, {-1}), invalid_basket);
    CHECK(B(4, {3, 0, 0}).elements() == std::vector<int>{0, 0, 3});
    CHECK(B(4, {3, 0, 0}).to_string() == "[0,0,3]");
    CHECK(B(4, {0, 3}).is_wrapped());
    CHECK_FALSE(B(4, {1, 1, 2, 2}).is_wrapped());
    CHECK(B(4, {1, 1, 2}).count(1) == 2);
}

TEST_CASE("merging respects the multiplicity cap")
{
    CHECK(merge_baskets(B(4, {0}), B(4, {0})) == B(4, {0, 0}));
    CHECK(merge_baskets(B(4, {1, 1}), B(4, {2, 2})) == B(4, {1, 1, 2, 2}));
    CHECK_THROWS_AS(merge_baskets(B(4, {0, 0}), B(4, {0})), invalid_basket);
}

TEST_CASE("lexicographic order compares size first")
{
    const unsigned m = 4;
    CHECK(lex_less{}(B(m, {3}), B(m, {0, 0})));
    CHECK(lex_less{}(B(m, {0}), B(m, {1})));
    CHECK(lex_less{}(B(m, {0, 0}), B(m, {1, 1})));
    CHECK(lex_less{}(B(m, {2, 2}), B(m, {0, 0, 3})));
    CHECK(lex_less{}(B(m, {0, 0, 3}), B(m, {1, 1, 2, 2})));
    CHECK(lex_compare(B(m, {0, 3}), B(m, {0, 3})) == 0);
    CHECK(lex_less{}(B(m, {0, 1, 3}), B(m, {0, 2, 2})));
}

TEST_CASE("basket length is the sum of q^x")
{
    QNumber expect(4);
    expect.add_power(0, 2).add_power(3, 1);
    CHECK(basket_length(B(4, {0, 0, 3})) == expect);
    CHECK(basket_length(B(1, {0, 0})) == QNumber::from_int(1, 2));
}

TEST_CASE("cyclic intervals match their definition and cardinality")
{
    for (unsigned n = 1; n <= 50; ++n) {
        const unsigned m = half_order(n);
        for (long a = -2; a < static_cast<long>(2 * m); ++a) {
            for (unsigned h = 1; h <= m; ++h) {
                const auto got = cyclic_interval(n, a, h);
                CHECK(got.elements() == interval_by_definition(n, a, h));
                const long am = ((a % m) + m) % m;
                const std::size_t expect = (n % 2 == 1 && am + h >= m) ? 2 * h - 1 : 2 * h;
                CHECK(cyclic_interval_size(n, a, h) == expect);
                CHECK(got.size() == expect);
            }
        }
        CHECK_THROWS(cyclic_interval(n, 0, 0));
        CHECK_THROWS(cyclic_interval(n, 0, m + 1));
    }
}

TEST_CASE("classify inverts cyclic_interval")
{
    for (unsigned n = 1; n <= 30; ++n) {
        const unsigned m = half_order(n);
        for (unsigned a = 0; a < m; ++a) {
            for (unsigned h = 1; h <= m; ++h) {
                const auto b = cyclic_interval(n, a, h);
                const auto c = classify(n, b);
                INFO("n=" << n << " a=" << a << " h=" << h << " basket " << b.to_string());
                if (b.size() == 1) {
                    CHECK(c.kind == basket_kind::singleton);
                    continue;
                }
                REQUIRE(c.kind == basket_kind::cyclically_ordered);
                CHECK(c.h == h);
                CHECK(c.a == (h == m ? 0 : a));
                CHECK(c.wrapped == b.is_wrapped());
            }
        }
    }
}

TEST_CASE("classification examples")
{
    auto c = classify(7, B(4, {0, 0, 3}));
    CHECK(c.kind == basket_kind::cyclically_ordered);
    CHECK(c.a == 3);
    CHECK(c.h == 2);
    CHECK(c.wrapped);

    c = classify(7, B(4, {1, 1, 2, 2}));
    CHECK(c.kind == basket_kind::cyclically_ordered);
    CHECK(c.a == 1);
    CHECK(c.h == 2);
    CHECK_FALSE(c.wrapped);

    CHECK(classify(8, B(4, {0, 0, 2, 2})).kind == basket_kind::not_cyclic);
    // a hole in the multiplicities is not an interval either
    CHECK(classify(8, B(4, {0, 1, 1})).kind == basket_kind::not_cyclic);
    CHECK(classify(7, B(4, {2})).kind == basket_kind::singleton);
}

TEST_CASE("initial collection")
{
    const auto c = initial_collection(7);
    CHECK(c.to_string() == "{[0],[0],[1],[1],[2],[2],[3]}");
    CHECK(c.is_sorted());
    CHECK(c.element_counts() == std::vector<unsigned>{2, 2, 2, 1});
    CHECK(c.total_length() == basket_length(full_multiset(7)));
    CHECK(initial_singleton(7, 7) == B(4, {3}));
    CHECK(initial_singleton(8, 8) == B(4, {3}));
    CHECK_THROWS(initial_singleton(7, 8));
    CHECK_THROWS(initial_collection(0));
    CHECK(initial_collection(1).to_string() == "{[0]}");
}

TEST_CASE("collections keep their listing")
{
    const BasketCollection c(8, 2, {B(4, {3, 3}), B(4, {0, 0, 1})});
    CHECK(c.to_string() == "{[3,3],[0,0,1]}");
    CHECK(c.is_sorted());
    const BasketCollection d(8, 2, {B(4, {0, 0, 1}), B(4, {3, 3})});
    CHECK_FALSE(d.is_sorted());
}
