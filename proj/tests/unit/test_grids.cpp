#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "fann/grids.hpp"

using namespace fann;

namespace {

// Brute-force scan of a window of cells around the centre.
std::vector<Lattice> ball_scan(const Point& c, double r, double w) {
    std::vector<Lattice> out;
    int span = static_cast<int>(std::ceil(r / w)) + 2;
    Lattice base = cell_of_point(c, w);
    for (int i = -span; i <= span; ++i) {
        for (int j = -span; j <= span; ++j) {
            Lattice l{base[0] + i, base[1] + j};
            if (dist_point_box(c, cell_box(l, w)) <= r) out.push_back(l);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("cell_of_point") {
    CHECK(cell_of_point({0.7, -0.2}, 0.5) == Lattice{1, -1});
    CHECK(cell_of_point({0, 0}, 0.5) == Lattice{0, 0});
    CHECK(cell_of_point({1.0, 1.0}, 0.5) == Lattice{2, 2});
}

TEST_CASE("cells_of_ball") {
    CHECK(cells_of_ball({0.3, 0.3}, 0, 1).size() == 1);
    CHECK(cells_of_ball({0, 0}, 0.25, 1).size() == 4);
    CHECK(cells_of_ball({0.5, 0.5}, 1, 1).size() == 9);
    CHECK(cells_of_ball({0.5, 0.5}, 1, 1) == ball_scan({0.5, 0.5}, 1, 1));
    CHECK(cells_of_ball({0.13, -2.4}, 0.77, 0.3) == ball_scan({0.13, -2.4}, 0.77, 0.3));
}

TEST_CASE("build_grids") {
    Curve one{{0.1, 0.2}, {0.1, 0.2}};
    Grids g = build_grids({one}, 0.4, 1.0);
    double w = 0.4 / std::sqrt(2.0);
    CHECK(g.g1.width() == doctest::Approx(w));
    CHECK(g.g1.cells() == ball_scan({0.1, 0.2}, 1.0, w));
    Grids twice = build_grids({one, one}, 0.4, 1.0);
    CHECK(twice.g1.cells() == g.g1.cells());
    CHECK(g.g2.cells().size() >= g.g3.cells().size());
    CHECK(g.g3.cells().size() >= g.g1.cells().size());
    for (const auto& c : g.g1.cells()) {
        CHECK(g.g2.contains(c));
        CHECK(g.g3.contains(c));
    }
    CHECK_THROWS_AS(build_grids({one}, 0.5, 1.0), Error);
    CHECK_THROWS_AS(build_grids({one}, 0.0, 1.0), Error);
    CHECK_THROWS_AS(build_grids({one}, 0.4, -1.0), Error);
}

TEST_CASE("locate") {
    GridSet g = GridSet::explicit_cells({{0, 0}, {1, 0}}, 1.0, 2);
    CHECK(g.locate({0.5, 0.5}) == Lattice{0, 0});
    CHECK_FALSE(g.locate({9, 9}));
    CHECK(g.locate({1.0, 0.5}) == Lattice{1, 0});
    CHECK(g.ordinal({1, 0}) == 1u);
}

TEST_CASE("grid_vertices") {
    CHECK(grid_vertices(GridSet::explicit_cells({{0, 0}}, 1.0, 2)).size() == 4);
    CHECK(grid_vertices(GridSet::explicit_cells({{0, 0}, {1, 0}}, 1.0, 2)).size() == 6);
    CHECK(grid_vertices(GridSet::explicit_cells({{0, 0}, {5, 5}, {10, 0}}, 1.0, 2)).size() == 12);
}
