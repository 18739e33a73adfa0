#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fann/frechet.hpp"

using namespace fann;

namespace {

Curve walk(std::mt19937_64& rng, int m) {
    std::uniform_real_distribution<double> u(-1, 1);
    Curve c{{u(rng), u(rng)}};
    for (int i = 1; i < m; ++i) c.push_back({c.back()[0] + u(rng), c.back()[1] + u(rng)});
    return c;
}

} // namespace

TEST_CASE("frechet_decide examples") {
    Curve a{{0, 0}, {1, 0}}, b{{0, 1}, {1, 1}};
    CHECK(frechet_decide(a, a, 0.0));
    CHECK_FALSE(frechet_decide(a, b, 0.99));
    CHECK(frechet_decide(a, b, 1.0));
    Curve c{{0, 0}, {2, 0}}, d{{0, 0}, {1, 0.5}, {2, 0}};
    CHECK_FALSE(frechet_decide(c, d, 0.49));
    CHECK(frechet_decide(c, d, 0.5));
    CHECK_THROWS_AS(frechet_decide(a, Curve{{0, 0, 0}, {1, 0, 0}}, 1.0), Error);
}

TEST_CASE("frechet_value examples") {
    Curve a{{0, 0}, {1, 0}}, b{{0, 1}, {1, 1}};
    CHECK(frechet_value(a, a, 1e-7) <= 1e-7);
    CHECK(frechet_value(a, b, 1e-7) == doctest::Approx(1.0).epsilon(1e-6));
    // Backtracking along the second curve.
    CHECK(frechet_value({{0, 0}, {4, 0}}, {{0, 0}, {3, 0}, {1, 0}, {4, 0}}, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("frechet properties on random pairs") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 150; ++i) {
        Curve a = walk(rng, 2 + i % 4), b = walk(rng, 2 + (i / 4) % 4);
        double v = frechet_value(a, b, 1e-7);
        CHECK_FALSE(frechet_decide(a, b, v - 2e-7));
        CHECK(frechet_decide(a, b, v + 2e-7));
        CHECK(frechet_decide(b, a, v + 2e-7));
        CHECK_FALSE(frechet_decide(b, a, v - 2e-7));
        CHECK(discrete_frechet(a, b) >= v - 1e-7);
        CHECK(max_vertex_distance(a, b) >= v - 1e-7);
        for (double r = 0; r < 3; r += 0.25) {
            if (frechet_decide(a, b, r)) {
                CHECK(frechet_decide(a, b, r + 0.1));
                CHECK(dist(a.front(), b.front()) <= r);
                CHECK(dist(a.back(), b.back()) <= r);
            }
        }
        Point v2{0.3, -0.4};
        Curve t = a;
        for (auto& p : t) p = add(p, v2);
        CHECK(frechet_decide(a, t, 0.5 + 1e-12));
    }
}

TEST_CASE("segment_curve_decide agrees with the general decision") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 300; ++i) {
        Curve s = walk(rng, 2), c = walk(rng, 2 + i % 4);
        for (double r : {0.3, 0.8, 1.5}) CHECK(segment_curve_decide(s[0], s[1], c, r) == frechet_decide(s, c, r));
    }
}

TEST_CASE("subsegment_matchable") {
    CHECK(subsegment_matchable({0, 0}, {10, 0}, {{2, 0.1}, {3, 0.1}}, 0.1));
    CHECK_FALSE(subsegment_matchable({0, 0}, {10, 0}, {{2, 0.1}, {3, 0.1}}, 0.05));
    CHECK_FALSE(subsegment_matchable({0, 0}, {10, 0}, {{5, 0}, {1, 0}}, 0.5));
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        Curve s = walk(rng, 2), c = walk(rng, 3);
        if (segment_curve_decide(s[0], s[1], c, 1.0)) CHECK(subsegment_matchable(s[0], s[1], c, 1.0));
    }
}

TEST_CASE("discrete_frechet") {
    Curve a{{0, 0}, {1, 0}}, b{{0, 1}, {1, 1}};
    CHECK(discrete_frechet(a, a) == 0.0);
    CHECK(discrete_frechet(a, b) == doctest::Approx(1.0));
    CHECK_THROWS_AS(discrete_frechet(a, Curve{{0}, {1}}), Error);
}

TEST_CASE("degenerate edges") {
    Curve a{{0, 0}, {0, 0}, {1, 0}}, b{{0, 0}, {1, 0}};
    CHECK(frechet_value(a, b, 1e-9) <= 1e-8);
}
