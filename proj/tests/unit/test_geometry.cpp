#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fann/geometry.hpp"

using namespace fann;

namespace {

const Box unit{{0, 0}, {1, 1}};

// Exact box distance by per-axis clamping.
double box_dist_oracle(const Point& p, const Box& b) {
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        double e = std::max({b.lo[i] - p[i], 0.0, p[i] - b.hi[i]});
        s += e * e;
    }
    return std::sqrt(s);
}

} // namespace

TEST_CASE("param_of_point") {
    CHECK(param_of_point({0, 0}, {2, 0}, {1, 0}) == doctest::Approx(0.5));
    CHECK(param_of_point({0, 0}, {2, 0}, {0, 0}) == 0.0);
    CHECK(param_of_point({0, 0}, {2, 0}, {1.5, 1e-12}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(param_of_point({0, 0}, {2, 0}, {1, 1}), Error);
    CHECK_THROWS_AS(param_of_point({0, 0}, {2, 0, 0}, {1, 0}), Error);
}

TEST_CASE("dist_point_box") {
    CHECK(dist_point_box({2, 0}, unit) == doctest::Approx(1.0));
    CHECK(dist_point_box({0.5, 0.5}, unit) == 0.0);
    CHECK(dist_point_box({2, 2}, unit) == doctest::Approx(std::sqrt(2.0)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 1000; ++i) {
        Point p{u(rng), u(rng), u(rng)};
        Box b{{-0.5, 0, 0.2}, {0.5, 1, 0.4}};
        CHECK(dist_point_box(p, b) == doctest::Approx(box_dist_oracle(p, b)));
        CHECK((dist_point_box(p, b) == 0.0) == box_contains(b, p));
    }
}

TEST_CASE("fattened_hit_interval on a box") {
    auto d = [](const Point& p) { return dist_point_box(p, unit); };
    auto a = fattened_hit_interval({-1, 0.5}, {2, 0.5}, d, 0.0);
    REQUIRE(a);
    CHECK(a->lo == doctest::Approx(1.0 / 3).epsilon(1e-6));
    CHECK(a->hi == doctest::Approx(2.0 / 3).epsilon(1e-6));
    CHECK_FALSE(fattened_hit_interval({0, 5}, {1, 5}, d, 1.0));
    auto c = fattened_hit_interval({-1, 0}, {3, 0}, d, 0.5);
    REQUIRE(c);
    // Dense scan oracle.
    double lo = 2, hi = -1;
    for (int i = 0; i <= 10000; ++i) {
        double t = i * 1e-4;
        if (d(lerp({-1, 0}, {3, 0}, t)) <= 0.5) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    CHECK(c->lo == doctest::Approx(0.125).epsilon(1e-6));
    CHECK(c->hi == doctest::Approx(0.625).epsilon(1e-6));
    CHECK(std::fabs(c->lo - lo) <= 1e-4);
    CHECK(std::fabs(c->hi - hi) <= 1e-4);
    auto nan = [](const Point&) { return std::nan(""); };
    CHECK_THROWS_AS(fattened_hit_interval({0, 0}, {1, 0}, nan, 1.0), Error);
}

TEST_CASE("box_hit_interval matches segment_box_clip at zero radius") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 3);
    for (int i = 0; i < 300; ++i) {
        Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
        auto clip = segment_box_clip(a, b, unit);
        auto hit = box_hit_interval(a, b, unit, 0.0);
        if (clip && hit) {
            CHECK(clip->lo == doctest::Approx(hit->lo).epsilon(1e-6));
        } else if (clip && clip->hi - clip->lo > 1e-6) {
            CHECK(hit.has_value());
        }
    }
}

TEST_CASE("dist_segment_box against sampling") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
        Point a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng)};
        Box box{{0, 0, 0}, {1, 0.5, 2}};
        double best = 1e9;
        for (int s = 0; s <= 2000; ++s) best = std::min(best, box_dist_oracle(lerp(a, b, s / 2000.0), box));
        double v = dist_segment_box(a, b, box);
        CHECK(v <= best + 1e-12);
        CHECK(v >= best - 1e-2);
    }
}

TEST_CASE("f_membership") {
    Box g{{2, 2}, {3, 3}};
    CHECK(f_membership({-1, -1}, unit, g));
    CHECK_FALSE(f_membership({5, 0}, unit, g));
    CHECK(f_membership({0.5, 0.5}, unit, Box{{7, -4}, {8, -3}}));
    CHECK_THROWS_AS(f_membership({0, 0, 0}, unit, g), Error);
}

TEST_CASE("f_distance") {
    Box g{{4, 0}, {5, 1}};
    CHECK(f_distance({0.5, 0.2}, unit, g) == 0.0);
    CHECK(f_distance({2, 0}, unit, g) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f_distance({-7, 3}, unit, unit) == 0.0);
    // Sampled upper bound: distance from q to points x from which a segment toward gamma crosses c.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-4, 6);
    for (int i = 0; i < 200; ++i) {
        Point q{u(rng), u(rng)};
        double v = f_distance(q, unit, g);
        Point x{u(rng), u(rng)};
        if (f_membership(x, unit, g)) CHECK(v <= dist(q, x) + 1e-9);
    }
}

TEST_CASE("F regions are convex") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-4, 4);
    Box g{{2, -1}, {2.5, 0.5}};
    std::vector<Point> in;
    while (in.size() < 60) {
        Point x{u(rng), u(rng)};
        if (f_membership(x, unit, g)) in.push_back(x);
    }
    for (size_t i = 0; i + 1 < in.size(); ++i) {
        for (double t : {0.25, 0.5, 0.75}) CHECK(f_membership(lerp(in[i], in[i + 1], t), unit, g, 1e-9));
    }
}

TEST_CASE("min_hinge_sq") {
    // (max(0, 1 - s))^2 + (max(0, s - 3))^2 is zero on [1, 3].
    auto [v, s] = min_hinge_sq({{1, -1, 0, 0}, {-3, 1, 0, 0}}, 0, 10);
    CHECK(v == doctest::Approx(0.0));
    CHECK(s >= 1 - 1e-9);
    CHECK(s <= 3 + 1e-9);
    // (1 - s)^2 + (s - 0)^2 hinge-free region: minimum 0.5 at s = 0.5.
    auto [v2, s2] = min_hinge_sq({{1, -1, 0, 0}, {0, 1, 0, 0}}, 0, 1);
    CHECK(v2 == doctest::Approx(0.5));
    CHECK(s2 == doctest::Approx(0.5));
}

TEST_CASE("segment_ball_interval") {
    auto i = segment_ball_interval({-2, 0}, {2, 0}, {0, 0}, 1);
    REQUIRE(i);
    CHECK(i->lo == doctest::Approx(0.25));
    CHECK(i->hi == doctest::Approx(0.75));
    CHECK_FALSE(segment_ball_interval({-2, 2}, {2, 2}, {0, 0}, 1));
}
