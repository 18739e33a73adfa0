#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fann/frechet.hpp"
#include "fann/index.hpp"

using namespace fann;

namespace {

Grids tiny_grids(double eps, std::vector<Lattice> cells) {
    Grids g;
    g.eps = eps;
    g.delta = 1.0;
    g.dim = 2;
    g.g1 = g.g2 = g.g3 = GridSet::explicit_cells(std::move(cells), grid_width(eps, 1.0, 2), 2);
    return g;
}

} // namespace

TEST_CASE("trie") {
    Trie t;
    t.insert("a", 5);
    CHECK(t.lookup("a") == 5u);
    CHECK_FALSE(t.lookup("b"));
    t.insert("a", 2);
    CHECK(t.lookup("a") == 2u);
    t.insert("a", 7);
    CHECK(t.lookup("a") == 2u);
    CHECK(t.size() == 1);
}

TEST_CASE("corpus") {
    Corpus c = make_corpus({"a", "b"}, {{{0, 0}, {1, 0}}, {{0, 1}, {1, 1}, {2, 1}, {3, 1}}});
    CHECK(c.curves[0].size() == 4);
    CHECK(frechet_value(c.curves[0], Curve{{0, 0}, {1, 0}}, 1e-9) <= 1e-8);
    CHECK(c.digest().size() == 64);
    CHECK_THROWS_AS(make_corpus({"a", "a"}, {{{0, 0}}, {{1, 1}}}), Error);
    CHECK_THROWS_AS(make_corpus({"a", "b"}, {{{0, 0}}, {{1, 1, 1}}}), Error);
    CHECK_THROWS_AS(make_corpus({}, {}), Error);
}

TEST_CASE("params") {
    IndexParams p;
    CHECK_NOTHROW(validate(p));
    p.k = 2;
    CHECK_THROWS_AS(validate(p), Error);
    p.k = 3;
    p.eps = 0.5;
    CHECK_THROWS_AS(validate(p), Error);
    CHECK(parse_variant("three-eps") == Variant::ThreeEps);
    CHECK_THROWS_AS(parse_mode("sometimes"), Error);
}

TEST_CASE("one-eps queries") {
    Corpus c = make_corpus({"t"}, {{{0, 0}, {1, 0}}});
    IndexParams p;
    p.eps = 0.4;
    p.delta = 0.2;
    for (OracleKind o : {OracleKind::Brute, OracleKind::Canonical}) {
        p.oracle = o;
        auto idx = Index::build(c, p);
        Curve s{{0, 0.1}, {0.5, 0.1}, {1, 0.1}};
        QueryAnswer a = idx->query(s);
        CHECK(a == QueryAnswer::curve(0));
        CHECK(frechet_value(s, c.curves[0], 1e-9) <= (1 + 24 * p.eps) * p.delta);
        CHECK(idx->query(s) == a);
        Curve up = s;
        for (auto& v : up) v[1] += 10;
        CHECK(idx->query(up) == QueryAnswer::no());
        CHECK_THROWS_AS(idx->query({{0, 0}, {1, 0}, {2, 0}, {3, 0}}), Error);
    }
}

TEST_CASE("one-eps eager on explicit grids") {
    IndexParams p;
    p.eps = 0.4;
    p.mode = BuildMode::Eager;
    Grids g = tiny_grids(0.4, {{0, 0}, {1, 0}, {2, 0}, {1, 1}});
    Corpus c = make_corpus({"a", "b"}, {{{0.05, 0.05}, {0.6, 0.1}}, {{0.1, 0.3}, {0.3, 0.1}}});
    auto eager = Index::build_with_grids(c, p, g);
    p.mode = BuildMode::Lazy;
    auto lazy = Index::build_with_grids(c, p, g);
    auto entries = eager->table_entries();
    CHECK(!entries.empty());
    for (const auto& [key, idx] : entries) {
        CoarseEncoding e = decode_key(key);
        CHECK(e.k == 3);
        CHECK(e.C.front());
        CHECK(e.C.back());
        CHECK(curve_matches_encoding(c.curves[idx], e, g));
        for (std::uint32_t j = 0; j < idx; ++j) CHECK_FALSE(curve_matches_encoding(c.curves[j], e, g));
    }
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-0.2, 0.9);
    for (int i = 0; i < 50; ++i) {
        Curve s{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        CHECK(eager->query(s) == lazy->query(s));
    }
}

TEST_CASE("one-eps eager refuses real grids") {
    IndexParams p;
    p.mode = BuildMode::Eager;
    Corpus c = make_corpus({"a"}, {{{0, 0}, {0.5, 0}}});
    try {
        Index::build(c, p);
        FAIL("expected a refusal");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::FeasibilityRefused);
    }
}

TEST_CASE("three-eps queries") {
    Corpus c = make_corpus({"a", "b"}, {{{0, 0}, {2, 0}, {2, 2}}, {{5, 5}, {6, 5}}});
    IndexParams p;
    p.variant = Variant::ThreeEps;
    auto idx = Index::build(c, p);
    Curve s{{0.1, 0.2}, {2.1, -0.1}, {1.9, 2.2}};
    QueryAnswer a = idx->query(s);
    REQUIRE(a.found);
    CHECK(frechet_value(s, c.curves[a.index], 1e-9) <= (3 + 24 * p.eps) * p.delta);
    auto s0 = static_cast<const ThreeEpsIndex&>(*idx).build_sigma0(s);
    REQUIRE(s0);
    CHECK(frechet_decide(s, s0->curve, (2 + 12 * p.eps) * p.delta));
    Curve far = s;
    for (auto& v : far) v[0] -= 30;
    CHECK(idx->query(far) == QueryAnswer::no());
    CHECK_FALSE(static_cast<const ThreeEpsIndex&>(*idx).build_sigma0(far));
}

TEST_CASE("three-eps eager leaves") {
    IndexParams p;
    p.variant = Variant::ThreeEps;
    p.mode = BuildMode::Eager;
    Grids g = tiny_grids(0.4, {{0, 0}, {3, 0}, {30, 30}});
    Corpus c = make_corpus({"a", "b"}, {{{40, 40}, {41, 40}}, {{0.1, 0.1}, {1.0, 0.1}}});
    auto idx = Index::build_with_grids(c, p, g);
    const auto& three = static_cast<const ThreeEpsIndex&>(*idx);
    const double rho = (1 + 12 * p.eps) * p.delta;
    size_t count = 0;
    for (const auto& [key, i] : idx->table_entries()) {
        auto cells = decode_cell_sequence_key(key);
        Curve cc = centers_curve(cells, g.g1.width());
        CHECK(frechet_decide(cc, c.curves[i], rho));
        for (std::uint32_t j = 0; j < i; ++j) CHECK_FALSE(frechet_decide(cc, c.curves[j], rho));
        ++count;
    }
    CHECK(count == three.table_size());
    p.mode = BuildMode::Lazy;
    auto lazy = Index::build_with_grids(c, p, g);
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int i = 0; i < 50; ++i) {
        Curve s{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        CHECK(idx->query(s) == lazy->query(s));
    }
    auto runs = three.packed_runs();
    ThreeEpsIndex copy(c, p, g, false);
    copy.load_packed_runs(runs);
    CHECK(copy.table_size() == three.table_size());
}

TEST_CASE("centers_curve collapses repeats") {
    std::vector<Lattice> cells{{0, 0}, {0, 0}, {1, 0}, {1, 0}};
    Curve c = centers_curve(cells, 1.0);
    CHECK(c.size() == 2);
    CHECK(frechet_value(c, Curve{{0.5, 0.5}, {0.5, 0.5}, {1.5, 0.5}, {1.5, 0.5}}, 1e-9) <= 1e-8);
    CHECK(decode_cell_sequence_key(cell_sequence_key(cells, 2)) == cells);
}
