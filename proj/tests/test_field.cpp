#include <doctest.h>

#include <random>

#include "bks/field.hpp"

using namespace bks;

namespace {
FieldElement fe(long a, long b = 0, long den = 1) {
    return {Rational(a, den), Rational(b, den)};
}
FieldElement fe2(long an, long ad, long bn, long bd) {
    return {Rational(an, ad), Rational(bn, bd)};
}
}  // namespace

TEST_CASE("field addition") {
    CHECK(fe2(1, 3, 0, 1) + fe2(2, 3, 0, 1) == fe(1));
    CHECK(fe(0, 1) + fe(0, -1) == fe(0));
    CHECK((fe(1, 1) + fe(1, 1)) == fe(2, 2));
}

TEST_CASE("field multiplication") {
    CHECK(fe(0, 1) * fe(0, 1) == fe(2));                 // sqrt2 * sqrt2
    CHECK(fe(1, 1) * fe(1, -1) == fe(-1));               // (1+s)(1-s) = 1-2
    CHECK(fe2(0, 1, 3, 2) * fe2(0, 1, 1, 3) == fe(1));   // 2*(3/2)*(1/3)
}

TEST_CASE("zero test needs both parts") {
    CHECK(fe(0).is_zero());
    CHECK_FALSE(fe(0, 1).is_zero());
    CHECK_FALSE(fe(1, 0).is_zero());
    CHECK_FALSE(fe(-2, 1).is_zero());   // -2 + sqrt2 != 0 exactly
}

TEST_CASE("field axioms on random elements") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4);
    auto rand_fe = [&] { return FieldElement(Rational(num(rng), den(rng)), Rational(num(rng), den(rng))); };
    for (int i = 0; i < 200; ++i) {
        FieldElement x = rand_fe(), y = rand_fe(), z = rand_fe();
        CHECK(x + y == y + x);
        CHECK(x * y == y * x);
        CHECK((x + y) + z == x + (y + z));
        CHECK((x * y) * z == x * (y * z));
        CHECK(x * (y + z) == x * y + x * z);
        if (!x.is_zero()) {
            CHECK(x * x.inverse() == fe(1));
        }
    }
    CHECK_THROWS_AS(fe(0).inverse(), std::invalid_argument);
    CHECK(fe(0, 3).inverse() * fe(0, 3) == fe(1));   // pure radical inverse
}

TEST_CASE("inner product") {
    ExactVector u({fe(1), fe(1), fe(1), fe(-1)});
    ExactVector v({fe(1), fe(-1), fe(0), fe(0)});
    CHECK(inner_product(u, v).is_zero());
    ExactVector e1({fe(1), fe(0), fe(0), fe(0)});
    CHECK(inner_product(e1, e1) == fe(1));
    // recomputed from the d=3 ray table columns: (0,1,-1).(1,-1,0) = -1
    ExactVector a({fe(0), fe(1), fe(-1)});
    ExactVector b({fe(1), fe(-1), fe(0)});
    CHECK(inner_product(a, b) == fe(-1));
    ExactVector e1_3({fe(1), fe(0), fe(0)});
    CHECK(inner_product(a, e1_3).is_zero());
    CHECK(inner_product(a, b) == inner_product(b, a));
    CHECK_THROWS_AS(inner_product(u, a), std::invalid_argument);
}

TEST_CASE("projective normal form") {
    ExactVector v({fe(0), fe(2), fe(-2), fe(4)});
    ExactVector w({fe(0), fe(1), fe(-1), fe(2)});
    CHECK(same_ray(v, w));
    ExactVector s({fe(0, 1), fe(0, 2)});   // sqrt2 * (1, 2)
    ExactVector t({fe(1), fe(2)});
    CHECK(same_ray(s, t));
    CHECK_FALSE(same_ray(w, ExactVector({fe(0), fe(1), fe(1), fe(2)})));
    CHECK_THROWS(ExactVector({fe(0), fe(0)}).projective_normal_form());
}

TEST_CASE("string round trip") {
    for (const char* s : {"0", "1", "-1", "1/3", "-3/2", "(1)sqrt2", "(-3/2)sqrt2",
                          "1/3+(-3/2)sqrt2", "-1+(1/2)sqrt2"}) {
        auto v = parse_field_element(s);
        REQUIRE(v.has_value());
        CHECK(parse_field_element(v->str()) == v);
    }
    CHECK(parse_field_element("1/3+(-3/2)sqrt2")->rat == Rational(1, 3));
    CHECK(parse_field_element("1/3+(-3/2)sqrt2")->rad == Rational(-3, 2));
    CHECK(parse_field_element("1sqrt2")->rad == 1);
    CHECK(parse_field_element("sqrt2")->rad == 1);
    CHECK_FALSE(parse_field_element("").has_value());
    CHECK_FALSE(parse_field_element("1/0").has_value());
    CHECK_FALSE(parse_field_element("2+sqrt3").has_value());
    CHECK_FALSE(parse_field_element("x").has_value());
    CHECK(fe(0).str() == "0");
    CHECK(fe2(1, 3, -3, 2).str() == "1/3+(-3/2)sqrt2");
}
