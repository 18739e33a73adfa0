#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "fann/encoding.hpp"

using namespace fann;

namespace {

// Brute-force partition count: assignments of vertex groups that are monotone, with the
// first vertex in group 0 and the last in group k-1.
size_t partition_count(int m, int k) {
    size_t count = 0;
    std::vector<int> g(static_cast<size_t>(m), 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == m) {
            if (g.front() == 0 && g.back() == k - 1) ++count;
            return;
        }
        for (int v = i ? g[static_cast<size_t>(i - 1)] : 0; v < k; ++v) {
            g[static_cast<size_t>(i)] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return count;
}

// Constraint checker written against the definitions rather than the generator.
void check_constraints(const CoarseEncoding& e, const Curve& sigma, const Grids& grids) {
    const int k = e.k;
    REQUIRE(e.C.front());
    REQUIRE(e.C.back());
    REQUIRE(e.B.front());
    REQUIRE(e.A.back());
    for (int j = 1; j <= k - 1; ++j) {
        bool live = e.C[static_cast<size_t>(j - 1)].has_value();
        CHECK(e.A[static_cast<size_t>(j - 1)].has_value() == live);
        CHECK(e.B[static_cast<size_t>(j - 1)].has_value() == live);
    }
    for (const auto& [r, s] : window_pairs(e)) CHECK(check_matchable_window(e, sigma, r, s, grids));
    CHECK(grids.g2.contains(*e.B.front()));
    CHECK(grids.g2.locate(sigma.front()) == e.B.front());
    CHECK(grids.g2.locate(sigma.back()) == e.A.back());
}

} // namespace

TEST_CASE("enumerate_partitions") {
    CHECK(enumerate_partitions(3, 3).size() == 3);
    CHECK(enumerate_partitions(2, 3).size() == 1);
    CHECK(enumerate_partitions(4, 3).size() == 6);
    for (int m = 2; m <= 6; ++m) {
        for (int k = 3; k <= 5; ++k) CHECK(enumerate_partitions(m, k).size() == partition_count(m, k));
    }
    CHECK_THROWS_AS(enumerate_partitions(3, 2), Error);
}

TEST_CASE("encode_key") {
    CoarseEncoding e = CoarseEncoding::empty(3);
    e.C[0] = CellPair{{0, 1}, {2, 3}};
    e.C[1] = CellPair{{-4, 5}, {6, -7}};
    e.A[0] = Lattice{1, 1};
    e.B[0] = Lattice{0, 0};
    e.A[1] = Lattice{8, 8};
    e.B[1] = Lattice{-1, -1};
    CoarseEncoding f = e;
    CHECK(encode_key(e) == encode_key(f));
    CHECK(decode_key(encode_key(e)) == e);
    f.A[0].reset();
    CHECK(encode_key(e) != encode_key(f));
    CHECK(decode_key(encode_key(f)) == f);
    CHECK(from_hex(to_hex(encode_key(e))) == encode_key(e));
    CHECK_THROWS_AS(decode_key("xyz"), Error);
}

TEST_CASE("curve_matches_encoding") {
    const double eps = 0.4, delta = 1.0;
    Curve tau{{0, 0}, {1, 0}};
    Grids g = build_grids({tau}, eps, delta);
    const double w = g.g1.width();
    CoarseEncoding e = CoarseEncoding::empty(3);
    Lattice c0 = cell_of_point({0, 0}, w), c1 = cell_of_point({1, 0}, w);
    e.C[0] = CellPair{c0, c1};
    e.C[1] = CellPair{c1, c1};
    e.B[0] = c0;
    e.A[0] = c1;
    e.B[1] = c1;
    e.A[1] = c1;
    CHECK(curve_matches_encoding(tau, e, g));

    CoarseEncoding far = e;
    Lattice f = cell_of_point({30, 30}, w);
    far.C[0] = CellPair{f, f};
    far.C[1] = CellPair{f, f};
    CHECK_FALSE(curve_matches_encoding(tau, far, g));

    CoarseEncoding bad_start = e;
    bad_start.B[0] = cell_of_point({0, 2.5}, w);
    CHECK_FALSE(curve_matches_encoding(tau, bad_start, g));

    CoarseEncoding broken = e;
    broken.C.pop_back();
    CHECK_THROWS_AS(curve_matches_encoding(tau, broken, g), Error);
}

TEST_CASE("check_matchable_window") {
    const double eps = 0.4, delta = 1.0;
    Curve tau{{0, 0}, {3, 0}};
    Grids g = build_grids({tau}, eps, delta);
    const double w = g.g1.width();
    CoarseEncoding e = CoarseEncoding::empty(3);
    e.A[0] = cell_of_point({0, 0}, w);
    e.B[1] = cell_of_point({3, 0}, w);
    Point xr = cell_corner(*e.A[0], w), xs = cell_corner(*e.B[1], w);
    // Degenerate window: the subcurve is the single vertex w_2.
    for (double y : {0.5, 1.3, 1.5}) {
        Curve sigma{{0, 0}, {1.5, y}, {3, 0}};
        bool expect = dist_point_segment(sigma[1], xr, xs) <= (1 + eps) * delta;
        CHECK(check_matchable_window(e, sigma, 1, 2, g) == expect);
    }
    CHECK_FALSE(check_matchable_window(e, {{0, 0}, {1.5, 9}, {3, 0}}, 1, 2, g));
    CoarseEncoding null_cells = CoarseEncoding::empty(3);
    CHECK_THROWS_AS(check_matchable_window(null_cells, {{0, 0}, {1, 0}, {2, 0}}, 1, 2, g), Error);
}

TEST_CASE("generate_query_encodings") {
    const double eps = 0.4, delta = 1.0;
    Curve tau{{0, 0}, {1, 0.5}, {2.5, 0}};
    Grids g = build_grids({tau}, eps, delta);
    BruteOracle oracle(g.g1);
    auto encs = generate_query_encodings(tau, g, oracle);
    CHECK(!encs.empty());
    std::set<std::string> keys;
    for (const auto& e : encs) {
        check_constraints(e, tau, g);
        keys.insert(encode_key(e));
    }
    CHECK(keys.size() == encs.size());
    bool some = false;
    for (const auto& e : encs) some = some || curve_matches_encoding(tau, e, g);
    CHECK(some);

    Curve far{{40, 40}, {41, 40}, {42, 40}};
    CHECK(generate_query_encodings(far, g, oracle).empty());
    CHECK_THROWS_AS(generate_query_encodings({{0, 0}, {1, 0}}, g, oracle), Error);

    // Generation order is fixed.
    auto again = generate_query_encodings(tau, g, oracle);
    CHECK(again == encs);
}
