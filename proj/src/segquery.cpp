#include "fann/segquery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fann {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kIterationCap = 200;

} // namespace

SegAnswer brute_segment_query(const GridSet& cells, const Point& p, const Point& q) {
    require_same_dim(p, q);
    double best = kInf;
    const Lattice* hit = nullptr;
    for (const auto& c : cells.cells()) {
        auto iv = segment_box_clip(p, q, cells.box(c));
        if (iv && iv->lo < best) {
            best = iv->lo;
            hit = &c;
        }
    }
    if (!hit) return SegAnswer::null();
    return SegAnswer::of(*hit);
}

bool answer_valid(const GridSet& cells, const Point& p, const Point& q, double lambda, const SegAnswer& ans,
                  double tol) {
    if (ans.kind == SegAnswer::Kind::NoForAnn) return false;
    SegAnswer first = brute_segment_query(cells, p, q);
    if (ans.kind == SegAnswer::Kind::Null) return first.kind == SegAnswer::Kind::Null;
    if (!cells.contains(ans.cell)) return false;
    Box b = cells.box(ans.cell);
    if (first.kind == SegAnswer::Kind::Null) return dist_segment_box(p, q, b) <= lambda + tol;
    double t = segment_box_clip(p, q, cells.box(first.cell))->lo;
    return dist_segment_box(p, lerp(p, q, t), b) <= lambda + tol;
}

std::vector<Point> orthogonal_basis(const Point& u) {
    const size_t d = u.size();
    std::vector<Point> basis;
    size_t seed = 0;
    for (size_t i = 1; i < d; ++i) {
        if (std::abs(u[i]) < std::abs(u[seed])) seed = i;
    }
    std::vector<size_t> order{seed};
    for (size_t i = 0; i < d; ++i) {
        if (i != seed) order.push_back(i);
    }
    for (size_t i : order) {
        if (basis.size() + 1 >= d) break;
        Point v(d, 0.0);
        v[i] = 1.0;
        v = sub(v, scaled(u, dot(v, u)));
        for (const auto& b : basis) v = sub(v, scaled(b, dot(v, b)));
        double n = norm(v);
        if (n > 1e-9) basis.push_back(scaled(v, 1.0 / n));
    }
    return basis;
}

std::vector<Line> build_lines(const std::vector<Curve>& curves, double eps, double delta) {
    validate_params(eps, delta);
    std::vector<Line> lines;
    for (size_t i = 0; i < curves.size(); ++i) {
        const Curve& c = curves[i];
        if (c.empty()) continue;
        const size_t d = c.front().size();
        std::vector<std::pair<int, Point>> edges; // (edge index, unit direction)
        for (size_t a = 0; a + 1 < c.size(); ++a) {
            Point u = sub(c[a + 1], c[a]);
            double n = norm(u);
            if (n > 0.0) edges.emplace_back(static_cast<int>(a), scaled(u, 1.0 / n));
        }
        if (edges.empty()) {
            // A curve that is a single point still needs lines through it.
            Point u(d, 0.0);
            u[0] = 1.0;
            edges.emplace_back(0, u);
        }
        const double reach = (1.0 + 2.0 * eps) * delta;
        for (const auto& [a, u] : edges) {
            const Point& v = c[static_cast<size_t>(a)];
            if (d == 1) {
                lines.push_back({v, u, static_cast<int>(i), a});
                continue;
            }
            auto basis = orthogonal_basis(u);
            const double g = eps * delta / std::sqrt(static_cast<double>(d - 1));
            const auto k = static_cast<std::int64_t>(std::floor(reach / g + 1e-12));
            Lattice lo(d - 1, -k), hi(d - 1, k);
            Lattice z = lo;
            while (true) {
                double r2 = 0.0;
                for (auto zi : z) r2 += static_cast<double>(zi * zi);
                if (std::sqrt(r2) * g <= reach * (1.0 + 1e-12)) {
                    Point o = v;
                    for (size_t b = 0; b < basis.size(); ++b) o = add(o, scaled(basis[b], g * static_cast<double>(z[b])));
                    lines.push_back({o, u, static_cast<int>(i), a});
                }
                size_t pos = z.size();
                bool done = true;
                while (pos > 0) {
                    --pos;
                    if (z[pos] < hi[pos]) {
                        ++z[pos];
                        done = false;
                        break;
                    }
                    z[pos] = lo[pos];
                }
                if (done) break;
            }
        }
    }
    return lines;
}

size_t nearest_point_to_line(const std::vector<Point>& points, const Point& origin, const Point& unit_dir) {
    if (points.empty()) throw Error(Errc::EmptySet, "no points to search");
    size_t best = 0;
    double bd = kInf;
    for (size_t i = 0; i < points.size(); ++i) {
        double d = dist_point_line(points[i], origin, unit_dir);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

size_t nearest_line_to_point(const std::vector<Line>& lines, const Point& p) {
    if (lines.empty()) throw Error(Errc::EmptySet, "no lines to search");
    size_t best = 0;
    double bd = kInf;
    for (size_t i = 0; i < lines.size(); ++i) {
        double d = dist_point_line(p, lines[i].origin, lines[i].dir);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

std::optional<Interval> f_interval_on_line(const Line& line, const Box& c, const Box& gamma, double r,
                                           double t_max, double tol) {
    if (boxes_intersect(c, gamma)) return Interval{-kInf, kInf};
    auto g = [&](double t) { return f_distance(line.at(t), c, gamma); };

    double a = -t_max, b = t_max;
    double fa = g(a), fb = g(b);
    double best_t = fa <= fb ? a : b;
    double best_v = std::min(fa, fb);
    auto note = [&](double t, double v) {
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    };

    if (best_v > r) {
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
        double f1 = g(x1), f2 = g(x2);
        note(x1, f1);
        note(x2, f2);
        auto line_min = [](double t0, double v0, double t1, double v1, double lo, double hi) {
            double s = (v1 - v0) / (t1 - t0);
            return std::min(v0 + s * (lo - t0), v0 + s * (hi - t0));
        };
        int iters = 0;
        while (b - a > tol && best_v > r) {
            if (++iters > kIterationCap) throw Error(Errc::IterationCap, "line minimum search did not converge");
            // Convexity: outside a sampled pair the function lies above their secant.
            double lb_left = line_min(x1, f1, x2, f2, a, x1);
            double lb_right = line_min(x1, f1, x2, f2, x2, b);
            double sl = (f1 - fa) / (x1 - a), sr = (fb - f2) / (b - x2);
            double m1 = std::max(f1, f2 + sr * (x1 - x2));
            double m2 = std::max(f1 + sl * (x2 - x1), f2);
            double mid = std::min(m1, m2);
            if (sl < sr) {
                double tc = (f2 - f1 + sl * x1 - sr * x2) / (sl - sr);
                if (tc > x1 && tc < x2) mid = std::min(mid, f1 + sl * (tc - x1));
            }
            if (std::min({lb_left, lb_right, mid}) > r + tol) break;
            if (f1 <= f2) {
                b = x2;
                fb = f2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = g(x1);
                note(x1, f1);
            } else {
                a = x1;
                fa = f1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = g(x2);
                note(x2, f2);
            }
        }
    }
    if (best_v > r + tol) return std::nullopt;
    if (best_v > r) return Interval{best_t, best_t};

    auto bisect = [&](double outside, double inside) {
        int iters = 0;
        while (std::abs(inside - outside) > tol) {
            if (++iters > kIterationCap) throw Error(Errc::IterationCap, "line boundary search did not converge");
            double mid = 0.5 * (outside + inside);
            if (g(mid) <= r) inside = mid;
            else outside = mid;
        }
        return inside;
    };
    double lo = g(-t_max) <= r ? -kInf : bisect(-t_max, best_t);
    double hi = g(t_max) <= r ? kInf : bisect(t_max, best_t);
    return Interval{lo, hi};
}

size_t CanonicalPartition::locate(double t) const {
    return static_cast<size_t>(std::upper_bound(cuts.begin(), cuts.end(), t) - cuts.begin());
}

Interval CanonicalPartition::piece(size_t i) const {
    double lo = i == 0 ? -kInf : cuts[i - 1];
    double hi = i == cuts.size() ? kInf : cuts[i];
    return {lo, hi};
}

double CanonicalPartition::anchor(size_t i, double width) const {
    Interval iv = piece(i);
    bool lo_inf = std::isinf(iv.lo), hi_inf = std::isinf(iv.hi);
    if (lo_inf && hi_inf) return 0.0;
    if (lo_inf) return iv.hi - width;
    if (hi_inf) return iv.lo + width;
    return 0.5 * (iv.lo + iv.hi);
}

namespace {

CanonicalPartition make_partition(std::vector<double> ends, double tol) {
    std::sort(ends.begin(), ends.end());
    CanonicalPartition part;
    for (double e : ends) {
        if (part.cuts.empty() || e - part.cuts.back() > tol) part.cuts.push_back(e);
    }
    return part;
}

void collect_ends(const std::vector<std::pair<size_t, Interval>>& list, std::vector<double>& ends) {
    for (const auto& [c, iv] : list) {
        if (!std::isinf(iv.lo)) ends.push_back(iv.lo);
        if (!std::isinf(iv.hi)) ends.push_back(iv.hi);
    }
}

} // namespace

CanonicalStructure::CanonicalStructure(const std::vector<Curve>& curves, const Grids& grids, CanonicalMode mode)
    : grids_(grids), mode_(mode) {
    lines_ = build_lines(curves, grids.eps, grids.delta);
    vertices_ = grid_vertices(grids_.g1);
    lists_.resize(lines_.size());
    lazy_parts_.resize(lines_.size());

    Point lo, hi;
    for (const auto& c : curves) {
        for (const auto& v : c) {
            if (lo.empty()) {
                lo = v;
                hi = v;
            }
            for (size_t i = 0; i < v.size(); ++i) {
                lo[i] = std::min(lo[i], v[i]);
                hi[i] = std::max(hi[i], v[i]);
            }
        }
    }
    t_max_ = 10.0 * (dist(lo, hi) + 10.0 * grids.delta);

    if (mode_ == CanonicalMode::Eager) {
        eager_parts_.resize(lines_.size());
        const double tol = 1e-9 * grids_.delta;
        for (size_t li = 0; li < lines_.size(); ++li) {
            std::vector<double> ends;
            for (const auto& gamma : grids_.g3.cells()) collect_ends(intervals_for(li, gamma), ends);
            eager_parts_[li] = make_partition(std::move(ends), tol);
        }
    }
}

const CanonicalStructure::IntervalList& CanonicalStructure::intervals_for(size_t li, const Lattice& gamma) const {
    auto& m = lists_.at(li);
    auto it = m.find(gamma);
    if (it != m.end()) return it->second;
    IntervalList list;
    const double r = 2.0 * grids_.eps * grids_.delta;
    const double tol = 1e-9 * grids_.delta;
    Box gb = grids_.g3.box(gamma);
    const auto& g1 = grids_.g1.cells();
    for (size_t k = 0; k < g1.size(); ++k) {
        auto iv = f_interval_on_line(lines_[li], grids_.g1.box(g1[k]), gb, r, t_max_, tol);
        if (iv) list.emplace_back(k, *iv);
    }
    return m.emplace(gamma, std::move(list)).first->second;
}

const CanonicalPartition& CanonicalStructure::partition(size_t li) const {
    if (mode_ != CanonicalMode::Eager) throw Error(Errc::StructureMismatch, "global partitions exist only in eager mode");
    return eager_parts_.at(li);
}

const CanonicalPartition& CanonicalStructure::partition_for(size_t li, const Lattice& gamma) const {
    if (mode_ == CanonicalMode::Eager) return eager_parts_.at(li);
    auto& m = lazy_parts_.at(li);
    auto it = m.find(gamma);
    if (it != m.end()) return it->second;
    std::vector<double> ends;
    collect_ends(intervals_for(li, gamma), ends);
    return m.emplace(gamma, make_partition(std::move(ends), 1e-9 * grids_.delta)).first->second;
}

std::optional<Interval> CanonicalStructure::interval(size_t li, const Lattice& c, const Lattice& gamma) const {
    auto k = grids_.g1.ordinal(c);
    if (!k) return std::nullopt;
    for (const auto& [ord, iv] : intervals_for(li, gamma)) {
        if (ord == *k) return iv;
    }
    return std::nullopt;
}

size_t CanonicalStructure::piece_for(size_t li, const Lattice& gamma, double t) const {
    return partition_for(li, gamma).locate(t);
}

Interval CanonicalStructure::piece_interval(size_t li, const Lattice& gamma, size_t piece) const {
    return partition_for(li, gamma).piece(piece);
}

Point CanonicalStructure::anchor_point(size_t li, const Lattice& gamma, size_t piece) const {
    return lines_.at(li).at(partition_for(li, gamma).anchor(piece, grids_.g1.width()));
}

std::vector<Lattice> CanonicalStructure::candidate_cells(size_t li, const Lattice& gamma, size_t piece) const {
    Interval xi = piece_interval(li, gamma, piece);
    const double tol = 1e-9 * grids_.delta;
    std::vector<Lattice> out;
    const auto& g1 = grids_.g1.cells();
    for (const auto& [k, iv] : intervals_for(li, gamma)) {
        if (iv.lo <= xi.lo + tol && iv.hi >= xi.hi - tol) out.push_back(g1[k]);
    }
    return out;
}

std::optional<Lattice> CanonicalStructure::chosen_cell(size_t li, const Lattice& gamma, size_t piece) const {
    auto key = std::make_tuple(li, gamma, piece);
    auto it = chosen_.find(key);
    if (it != chosen_.end()) return it->second;
    Point from = anchor_point(li, gamma, piece);
    Point to = cell_center(gamma, grids_.g1.width());
    const double r = 5.0 * grids_.eps * grids_.delta;
    std::optional<Lattice> best;
    double best_t = kInf;
    for (const auto& c : candidate_cells(li, gamma, piece)) {
        auto iv = box_hit_interval(from, to, grids_.g1.box(c), r, 1e-9 * grids_.delta);
        if (iv && iv->lo < best_t) {
            best_t = iv->lo;
            best = c;
        }
    }
    chosen_.emplace(key, best);
    return best;
}

SegAnswer CanonicalStructure::fallback(const Point& p, const Point& q) const {
    ++fallbacks_;
    return brute_segment_query(grids_.g1, p, q);
}

SegAnswer CanonicalStructure::query(const Point& p, const Point& q) const {
    require_same_dim(p, q);
    if (static_cast<int>(p.size()) != grids_.dim) throw Error(Errc::DimensionMismatch, "query dimension differs");
    const double ed = grids_.eps * grids_.delta;
    if (lines_.empty() || vertices_.empty()) return brute_segment_query(grids_.g1, p, q);

    size_t lp = nearest_line_to_point(lines_, p);
    size_t lq = nearest_line_to_point(lines_, q);
    Point u = sub(q, p);
    double len = norm(u);
    if (len == 0.0) {
        if (dist_point_line(p, lines_[lp].origin, lines_[lp].dir) > 2.0 * ed) return SegAnswer::no_for_ann();
        return brute_segment_query(grids_.g1, p, q);
    }
    Point dir = scaled(u, 1.0 / len);

    const Point& x = vertices_[nearest_point_to_line(vertices_, p, dir)];
    if (dist_point_line(x, p, dir) > (1.0 + grids_.eps) * ed) return SegAnswer::null();
    if (dist_point_line(p, lines_[lp].origin, lines_[lp].dir) > 2.0 * ed) return SegAnswer::no_for_ann();
    if (dist_point_line(q, lines_[lq].origin, lines_[lq].dir) > 2.0 * ed) return SegAnswer::no_for_ann();

    for (const auto& gamma : cells_of_ball(x, 2.0 * ed, grids_.g1.width())) {
        if (line_box_clip(p, u, grids_.g1.box(gamma))) return finish(p, q, lp, lq, gamma, true);
    }
    return fallback(p, q);
}

SegAnswer CanonicalStructure::finish(const Point& p, const Point& q, size_t lp, size_t lq, const Lattice& gamma,
                                     bool allow_redirect) const {
    const double ed = grids_.eps * grids_.delta;
    const double w = grids_.g1.width();
    Point u = sub(q, p);
    auto on_line = line_box_clip(p, u, grids_.g1.box(gamma));
    if (!on_line) return fallback(p, q);

    std::optional<Lattice> ans;
    if (on_line->lo <= 0.0 && on_line->hi >= 0.0) {
        for (const auto& c : cells_of_ball(p, 7.0 * ed, w)) {
            if (grids_.g1.contains(c)) {
                ans = c;
                break;
            }
        }
        if (!ans) return fallback(p, q);
    } else if (on_line->lo > 0.0) {
        size_t piece = piece_for(lp, gamma, lines_[lp].param(p));
        ans = chosen_cell(lp, gamma, piece);
        if (!ans) return fallback(p, q);
    } else {
        if (!allow_redirect) return fallback(p, q);
        size_t piece = piece_for(lq, gamma, lines_[lq].param(q));
        auto c = chosen_cell(lq, gamma, piece);
        if (!c) return fallback(p, q);
        for (const auto& g : cells_near_box(grids_.g1.box(*c), 5.0 * ed, w)) {
            if (segment_box_clip(p, q, grids_.g1.box(g))) return finish(p, q, lp, lq, g, false);
        }
        return fallback(p, q);
    }
    // A candidate farther than lambda from the whole segment certifies that the segment meets no cell.
    if (dist_segment_box(p, q, grids_.g1.box(*ans)) > 11.0 * ed + 1e-9 * grids_.delta) return SegAnswer::null();
    return SegAnswer::of(*ans);
}

} // namespace fann
