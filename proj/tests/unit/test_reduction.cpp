#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fann/frechet.hpp"
#include "fann/reduction.hpp"

using namespace fann;

TEST_CASE("ladder scales") {
    Corpus c = make_corpus({"a"}, {{{0, 0}, {1, 0}}});
    auto s = ladder_scales(c, 0.4);
    CHECK(s.front() == doctest::Approx(0.25));
    CHECK(s.back() >= 2.0);
    CHECK(s[s.size() - 2] < 2.0);
    for (size_t i = 1; i < s.size(); ++i) CHECK(s[i] / s[i - 1] == doctest::Approx(1.4));
    CHECK(s.size() == static_cast<size_t>(std::ceil(std::log(s.back() / s.front()) / std::log(1.4) - 1e-9)) + 1);
    CHECK_THROWS_AS(ladder_scales(Corpus{}, 0.4), Error);
}

TEST_CASE("ladder indexes share the corpus") {
    Corpus c = make_corpus({"a", "b"}, {{{0, 0}, {1, 0}}, {{3, 3}, {4, 3}}});
    IndexParams p;
    p.variant = Variant::ThreeEps;
    Ladder l = Ladder::build(c, p);
    for (size_t i = 0; i < l.scales().size(); ++i) {
        CHECK(l.index_at(i).corpus().digest() == c.digest());
        CHECK(l.index_at(i).params().delta == l.scales()[i]);
    }
    CHECK(l.ann_query({{3, 3}, {4, 3}, {4, 3}}) == 1);
    CHECK(l.ann_query({{0, 0}, {1, 0}, {1, 0}}) == 0);
}

TEST_CASE("ladder with one curve") {
    Corpus c = make_corpus({"a"}, {{{0, 0}, {1, 1}}});
    IndexParams p;
    Ladder l = Ladder::build(c, p);
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 20; ++i) CHECK(l.ann_query({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}) == 0);
}

TEST_CASE("ladder bound on random instances") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-3, 3);
    IndexParams p;
    p.variant = Variant::ThreeEps;
    const double kappa = 3 + 24 * p.eps;
    for (int t = 0; t < 10; ++t) {
        std::vector<std::string> ids;
        std::vector<Curve> cs;
        for (int i = 0; i < 3; ++i) {
            ids.push_back(std::to_string(i));
            cs.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}});
        }
        Corpus c = make_corpus(ids, cs);
        Ladder l = Ladder::build(c, p);
        Curve s{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        size_t got = l.ann_query(s);
        double d_opt = frechet_value(s, c.curves[brute_force_nn(c, s)], 1e-9);
        double d_got = frechet_value(s, c.curves[got], 1e-9);
        CHECK(d_got <= kappa * (1 + p.eps) * std::max(d_opt, l.scales().front()) + 1e-6);
    }
}

TEST_CASE("brute_force_nn") {
    Corpus c = make_corpus({"a", "b", "c"}, {{{0, 2}, {1, 2}}, {{0, 1}, {1, 1}}, {{0, 0}, {1, 0}}});
    CHECK(brute_force_nn(c, c.curves[2]) == 2);
    CHECK(brute_force_nn(c, {{0, -1}, {1, -1}}) == 2);
    Corpus twins = make_corpus({"a", "b"}, {{{0, 1}, {1, 1}}, {{0, -1}, {1, -1}}});
    CHECK(brute_force_nn(twins, {{0, 0}, {1, 0}}) == 0);
    size_t w = brute_force_nn(c, {{0, 0.3}, {1, 0.2}}, 1e-7);
    double v = frechet_value({{0, 0.3}, {1, 0.2}}, c.curves[w], 1e-7);
    CHECK(frechet_decide({{0, 0.3}, {1, 0.2}}, c.curves[w], v + 2e-7));
    CHECK_THROWS_AS(brute_force_nn(Corpus{}, {{0, 0}}), Error);
}
