#include "fann/frechet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fann {

namespace {

constexpr double kEmpty = std::numeric_limits<double>::infinity();

// Free interval of edge uv against point p, or {kEmpty, kEmpty}.
Interval free_interval(const Point& u, const Point& v, const Point& p, double eps) {
    auto iv = segment_ball_interval(u, v, p, eps);
    if (!iv) return {kEmpty, kEmpty};
    return *iv;
}

bool empty(const Interval& iv) { return iv.lo > iv.hi || std::isinf(iv.lo); }

void check_curves(const Curve& a, const Curve& b) {
    if (a.empty() || b.empty()) throw Error(Errc::EmptySet, "curve without vertices");
    size_t d = a.front().size();
    for (const auto& p : a) {
        if (p.size() != d) throw Error(Errc::DimensionMismatch, "mixed dimensions in curve");
    }
    for (const auto& p : b) {
        if (p.size() != d) throw Error(Errc::DimensionMismatch, "mixed dimensions in curve");
    }
}

double max_dist_to(const Point& p, const Curve& c) {
    double m = 0.0;
    for (const auto& q : c) m = std::max(m, dist(p, q));
    return m;
}

} // namespace

double max_vertex_distance(const Curve& a, const Curve& b) {
    double m = 0.0;
    for (const auto& p : a) m = std::max(m, max_dist_to(p, b));
    return m;
}

bool frechet_decide(const Curve& a, const Curve& b, double eps) {
    check_curves(a, b);
    if (dist(a.front(), b.front()) > eps || dist(a.back(), b.back()) > eps) return false;
    if (a.size() == 1) return max_dist_to(a.front(), b) <= eps;
    if (b.size() == 1) return max_dist_to(b.front(), a) <= eps;

    const size_t n = a.size() - 1; // edges of a, indexed by i
    const size_t m = b.size() - 1; // edges of b, indexed by j

    // left[j]: reachable part of the vertical boundary at the current vertex a[i] over edge j of b.
    // bottom: reachable part of the horizontal boundary at b[j] over edge i of a.
    std::vector<Interval> left(m);
    bool reach = true;
    for (size_t j = 0; j < m; ++j) {
        Interval f = free_interval(b[j], b[j + 1], a[0], eps);
        if (reach && !empty(f) && f.lo == 0.0) {
            left[j] = f;
            reach = f.hi >= 1.0;
        } else {
            left[j] = {kEmpty, kEmpty};
            reach = false;
        }
    }
    bool bottom_reach = true;
    for (size_t i = 0; i < n; ++i) {
        Interval bottom;
        Interval fb = free_interval(a[i], a[i + 1], b[0], eps);
        if (bottom_reach && !empty(fb) && fb.lo == 0.0) {
            bottom = fb;
            bottom_reach = fb.hi >= 1.0;
        } else {
            bottom = {kEmpty, kEmpty};
            bottom_reach = false;
        }
        std::vector<Interval> right(m);
        for (size_t j = 0; j < m; ++j) {
            Interval fr = free_interval(b[j], b[j + 1], a[i + 1], eps);
            Interval ft = free_interval(a[i], a[i + 1], b[j + 1], eps);
            const Interval& l = left[j];
            Interval r{kEmpty, kEmpty};
            Interval t{kEmpty, kEmpty};
            if (!empty(fr)) {
                if (!empty(bottom)) r = fr;
                else if (!empty(l) && fr.hi >= l.lo) r = {std::max(fr.lo, l.lo), fr.hi};
            }
            if (!empty(ft)) {
                if (!empty(l)) t = ft;
                else if (!empty(bottom) && ft.hi >= bottom.lo) t = {std::max(ft.lo, bottom.lo), ft.hi};
            }
            right[j] = r;
            bottom = t;
        }
        left = std::move(right);
    }
    return !empty(left[m - 1]) && left[m - 1].hi >= 1.0;
}

bool segment_curve_decide(const Point& p, const Point& q, const Curve& c, double eps) {
    if (c.empty()) throw Error(Errc::EmptySet, "curve without vertices");
    require_same_dim(p, q);
    require_same_dim(p, c.front());
    if (dist(p, c.front()) > eps || dist(q, c.back()) > eps) return false;
    if (c.size() == 1) {
        return dist(p, c.front()) <= eps && dist(q, c.front()) <= eps;
    }
    // Free space in each cell is convex, so the reachable set on the boundary at c[j]
    // is the free interval clipped from below by the previous lowest reachable parameter.
    double reach = 0.0;
    for (size_t j = 1; j < c.size(); ++j) {
        auto fv = segment_ball_interval(p, q, c[j], eps);
        if (!fv || fv->hi < reach) return false;
        reach = std::max(reach, fv->lo);
    }
    return true;
}

double frechet_value(const Curve& a, const Curve& b, double tol) {
    check_curves(a, b);
    double lo = std::max(dist(a.front(), b.front()), dist(a.back(), b.back()));
    double hi = std::max(max_vertex_distance(a, b), lo);
    if (frechet_decide(a, b, lo)) return lo;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (frechet_decide(a, b, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

double discrete_frechet(const Curve& a, const Curve& b) {
    check_curves(a, b);
    const size_t n = a.size(), m = b.size();
    std::vector<double> prev(m), cur(m);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) {
            double d = dist(a[i], b[j]);
            double best;
            if (i == 0 && j == 0) best = d;
            else if (i == 0) best = std::max(cur[j - 1], d);
            else if (j == 0) best = std::max(prev[j], d);
            else best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

bool subsegment_matchable(const Point& x, const Point& y, const Curve& c, double r) {
    if (c.empty()) throw Error(Errc::EmptySet, "curve without vertices");
    auto first = segment_ball_interval(x, y, c.front(), r);
    auto last = segment_ball_interval(x, y, c.back(), r);
    if (!first || !last) return false;
    // Start as early as possible and sweep the vertex intervals in parameter space.
    double reach = first->lo;
    for (size_t j = 1; j < c.size(); ++j) {
        auto fv = segment_ball_interval(x, y, c[j], r);
        if (!fv || fv->hi < reach) return false;
        reach = std::max(reach, fv->lo);
    }
    return true;
}

} // namespace fann
