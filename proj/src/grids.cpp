#include "fann/grids.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fann {

size_t LatticeHash::operator()(const Lattice& l) const noexcept {
    size_t h = 1469598103934665603ull;
    for (auto v : l) {
        h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

Lattice cell_of_point(const Point& p, double width) {
    Lattice l(p.size());
    for (size_t i = 0; i < p.size(); ++i) l[i] = static_cast<std::int64_t>(std::floor(p[i] / width));
    return l;
}

Box cell_box(const Lattice& cell, double width) {
    Box b{Point(cell.size()), Point(cell.size())};
    for (size_t i = 0; i < cell.size(); ++i) {
        b.lo[i] = static_cast<double>(cell[i]) * width;
        b.hi[i] = static_cast<double>(cell[i] + 1) * width;
    }
    return b;
}

Point cell_center(const Lattice& cell, double width) {
    Point c(cell.size());
    for (size_t i = 0; i < cell.size(); ++i) c[i] = (static_cast<double>(cell[i]) + 0.5) * width;
    return c;
}

Point cell_corner(const Lattice& cell, double width) { return cell_box(cell, width).lo; }

namespace {

template <class Keep>
std::vector<Lattice> scan_range(const Lattice& lo, const Lattice& hi, Keep keep) {
    std::vector<Lattice> out;
    const size_t d = lo.size();
    if (d == 0) return out;
    for (size_t i = 0; i < d; ++i) {
        if (lo[i] > hi[i]) return out;
    }
    Lattice cur = lo;
    while (true) {
        if (keep(cur)) out.push_back(cur);
        size_t i = d;
        while (i > 0) {
            --i;
            if (cur[i] < hi[i]) {
                ++cur[i];
                break;
            }
            cur[i] = lo[i];
            if (i == 0) return out;
        }
    }
}

} // namespace

std::vector<Lattice> cells_of_ball(const Point& center, double r, double width) {
    const size_t d = center.size();
    Lattice lo(d), hi(d);
    for (size_t i = 0; i < d; ++i) {
        lo[i] = static_cast<std::int64_t>(std::floor((center[i] - r) / width)) - 1;
        hi[i] = static_cast<std::int64_t>(std::floor((center[i] + r) / width));
    }
    return scan_range(lo, hi, [&](const Lattice& l) { return dist_point_box(center, cell_box(l, width)) <= r; });
}

std::vector<Lattice> cells_near_box(const Box& box, double r, double width) {
    const size_t d = box.lo.size();
    Lattice lo(d), hi(d);
    for (size_t i = 0; i < d; ++i) {
        lo[i] = static_cast<std::int64_t>(std::floor((box.lo[i] - r) / width)) - 1;
        hi[i] = static_cast<std::int64_t>(std::floor((box.hi[i] + r) / width));
    }
    return scan_range(lo, hi, [&](const Lattice& l) { return dist_box_box(box, cell_box(l, width)) <= r; });
}

GridSet GridSet::ball_union(std::vector<Point> centers, double radius, double width) {
    GridSet g;
    std::sort(centers.begin(), centers.end(), lex_less);
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    g.dim_ = centers.empty() ? 0 : static_cast<int>(centers.front().size());
    g.centers_ = std::move(centers);
    g.radius_ = radius;
    g.width_ = width;
    return g;
}

GridSet GridSet::explicit_cells(std::vector<Lattice> cells, double width, int dim) {
    GridSet g;
    g.explicit_ = true;
    g.width_ = width;
    g.dim_ = dim;
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (const auto& c : cells) {
        if (static_cast<int>(c.size()) != dim) throw Error(Errc::DimensionMismatch, "cell of wrong dimension");
    }
    g.cache_->cells = std::move(cells);
    for (size_t i = 0; i < g.cache_->cells.size(); ++i) g.cache_->index.emplace(g.cache_->cells[i], i);
    g.cache_->built = true;
    return g;
}

void GridSet::materialize() const {
    if (cache_->built) return;
    std::vector<Lattice> all;
    for (const auto& c : centers_) {
        auto part = cells_of_ball(c, radius_, width_);
        all.insert(all.end(), part.begin(), part.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    cache_->cells = std::move(all);
    cache_->index.clear();
    for (size_t i = 0; i < cache_->cells.size(); ++i) cache_->index.emplace(cache_->cells[i], i);
    cache_->built = true;
}

bool GridSet::contains(const Lattice& cell) const {
    if (static_cast<int>(cell.size()) != dim_) return false;
    if (cache_->built) return cache_->index.count(cell) > 0;
    Box b = box(cell);
    for (const auto& c : centers_) {
        if (dist_point_box(c, b) <= radius_) return true;
    }
    return false;
}

std::optional<Lattice> GridSet::locate(const Point& p) const {
    if (static_cast<int>(p.size()) != dim_) throw Error(Errc::DimensionMismatch, "point dimension differs from grid");
    Lattice l = cell_of_point(p, width_);
    if (contains(l)) return l;
    return std::nullopt;
}

const std::vector<Lattice>& GridSet::cells() const {
    materialize();
    return cache_->cells;
}

std::optional<size_t> GridSet::ordinal(const Lattice& cell) const {
    materialize();
    auto it = cache_->index.find(cell);
    if (it == cache_->index.end()) return std::nullopt;
    return it->second;
}

void validate_params(double eps, double delta) {
    if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::BadEpsilon, "eps must lie in (0, 1/2)");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(Errc::BadDelta, "delta must be positive and finite");
}

double grid_width(double eps, double delta, int dim) { return eps * delta / std::sqrt(static_cast<double>(dim)); }

Grids build_grids(const std::vector<Curve>& curves, double eps, double delta) {
    validate_params(eps, delta);
    std::vector<Point> verts;
    for (const auto& c : curves) verts.insert(verts.end(), c.begin(), c.end());
    if (verts.empty()) throw Error(Errc::EmptyCorpus, "no vertices to build grids from");
    Grids g;
    g.eps = eps;
    g.delta = delta;
    g.dim = static_cast<int>(verts.front().size());
    for (const auto& v : verts) {
        if (static_cast<int>(v.size()) != g.dim) throw Error(Errc::DimensionMismatch, "mixed vertex dimensions");
    }
    double w = grid_width(eps, delta, g.dim);
    g.g1 = GridSet::ball_union(verts, delta, w);
    g.g2 = GridSet::ball_union(verts, (2.0 + 12.0 * eps) * delta, w);
    g.g3 = GridSet::ball_union(verts, (1.0 + 6.0 * eps) * delta, w);
    g.g1.cells();
    return g;
}

std::vector<Point> grid_vertices(const GridSet& set) {
    std::set<Lattice> corners;
    const int d = set.dim();
    for (const auto& c : set.cells()) {
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Lattice k = c;
            for (int i = 0; i < d; ++i) {
                if (mask & (1u << i)) ++k[i];
            }
            corners.insert(std::move(k));
        }
    }
    std::vector<Point> out;
    out.reserve(corners.size());
    for (const auto& k : corners) out.push_back(cell_corner(k, set.width()));
    return out;
}

std::string lattice_str(const Lattice& l) {
    std::string s = "(";
    for (size_t i = 0; i < l.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(l[i]);
    }
    return s + ")";
}

} // namespace fann
