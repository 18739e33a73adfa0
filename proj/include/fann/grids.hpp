#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fann/geometry.hpp"

namespace fann {

using Lattice = std::vector<std::int64_t>;

struct LatticeHash {
    size_t operator()(const Lattice& l) const noexcept;
};

/// Lattice of the cell containing p; cells are lower-closed for point location.
Lattice cell_of_point(const Point& p, double width);
Box cell_box(const Lattice& cell, double width);
Point cell_center(const Lattice& cell, double width);
/// Lexicographically smallest vertex of the cell.
Point cell_corner(const Lattice& cell, double width);

/// Cells (as closed boxes) within distance r of center, lexicographically sorted.
std::vector<Lattice> cells_of_ball(const Point& center, double r, double width);
/// Cells (as closed boxes) within distance r of a box, lexicographically sorted.
std::vector<Lattice> cells_near_box(const Box& box, double r, double width);

/// A set of grid cells. Either the union of cells meeting balls of a common radius
/// around a list of centres (membership decided by distance), or an explicit list.
class GridSet {
public:
    GridSet() = default;
    static GridSet ball_union(std::vector<Point> centers, double radius, double width);
    static GridSet explicit_cells(std::vector<Lattice> cells, double width, int dim);

    double width() const { return width_; }
    int dim() const { return dim_; }
    double radius() const { return radius_; }
    bool is_explicit() const { return explicit_; }
    const std::vector<Point>& centers() const { return centers_; }

    bool contains(const Lattice& cell) const;
    std::optional<Lattice> locate(const Point& p) const;
    Box box(const Lattice& cell) const { return cell_box(cell, width_); }

    /// Sorted cell list; materialized on first use.
    const std::vector<Lattice>& cells() const;
    /// Position of a cell in cells(), if present.
    std::optional<size_t> ordinal(const Lattice& cell) const;

private:
    double width_ = 1.0;
    int dim_ = 0;
    double radius_ = 0.0;
    bool explicit_ = false;
    std::vector<Point> centers_;
    struct Cache {
        bool built = false;
        std::vector<Lattice> cells;
        std::unordered_map<Lattice, size_t, LatticeHash> index;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
    void materialize() const;
};

struct GridParams {
    double eps;
    double delta;
};

void validate_params(double eps, double delta);

/// The three grids over the corpus vertices: cell width eps*delta/sqrt(d), radii
/// delta, (2+12eps)delta and (1+6eps)delta.
struct Grids {
    double eps = 0.0;
    double delta = 0.0;
    int dim = 0;
    GridSet g1, g2, g3;
};

Grids build_grids(const std::vector<Curve>& curves, double eps, double delta);
double grid_width(double eps, double delta, int dim);

/// Distinct cell corners of a materialized grid set, lexicographically sorted.
std::vector<Point> grid_vertices(const GridSet& set);

std::string lattice_str(const Lattice& l);

} // namespace fann
