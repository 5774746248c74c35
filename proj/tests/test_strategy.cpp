#include <doctest.h>

#include <cmath>

#include <stickbreak/strategy.hpp>

using namespace stickbreak;

TEST_CASE("partitions follow replace-left, append-right")
{
    Strategy s;
    CHECK(s.length() == 1);
    CHECK(s.partition(1) == std::vector<double>{1.0});
    s.push_split({0, 0.75, 0.25});
    s.push_split({0, 0.5, 0.25});
    CHECK(s.length() == 3);
    CHECK(s.partition(2) == std::vector<double>{0.75, 0.25});
    CHECK(s.partition(3) == std::vector<double>{0.5, 0.25, 0.25});
    CHECK_FALSE(s.validate());
    CHECK_THROWS(s.partition(0));
    CHECK_THROWS(s.partition(4));
}

TEST_CASE("validation reports the first broken split")
{
    Strategy bad_sum({{0, 0.6, 0.3}});
    CHECK(bad_sum.validate());
    Strategy bad_target({{0, 0.5, 0.5}, {5, 0.25, 0.25}});
    CHECK(bad_target.validate());
    Strategy nonpositive({{0, 1.0, 0.0}});
    CHECK(nonpositive.validate());
}

TEST_CASE("exact strategies validate algebraically")
{
    const unsigned m = 2;
    const QNumber total = QNumber::from_int(m, 1) + q_power(m, 1);
    ExactStrategy s(total);
    s.push_split({0, QNumber::from_int(m, 1), q_power(m, 1)});
    CHECK_FALSE(s.validate());
    CHECK(s.partition(2).size() == 2);
    const auto f = s.to_float();
    CHECK(f.partition(2)[0] == doctest::Approx(1 / (1 + std::sqrt(2.0))));

    ExactStrategy broken(total);
    broken.push_split({0, QNumber::from_int(m, 1), QNumber::from_int(m, 1)});
    CHECK(broken.validate());
    ExactStrategy negative(total);
    negative.push_split({0, total + q_power(m, 1), -q_power(m, 1)});
    CHECK(negative.validate());
}
