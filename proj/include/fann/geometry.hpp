#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fann/errors.hpp"

namespace fann {

using Point = std::vector<double>;
using Curve = std::vector<Point>;

/// Closed axis-parallel box.
struct Box {
    Point lo;
    Point hi;
};

/// Closed parameter interval; bounds may be infinite.
struct Interval {
    double lo;
    double hi;
};

void require_same_dim(const Point& a, const Point& b);

Point sub(const Point& a, const Point& b);
Point add(const Point& a, const Point& b);
Point scaled(const Point& a, double s);
Point lerp(const Point& a, const Point& b, double t);
Point midpoint(const Point& a, const Point& b);
double dot(const Point& a, const Point& b);
double norm(const Point& a);
double dist(const Point& a, const Point& b);
double dist_sq(const Point& a, const Point& b);
bool lex_less(const Point& a, const Point& b);

/// Parameter of p on segment ab; throws PointOffSegment if p is farther than tol.
double param_of_point(const Point& a, const Point& b, const Point& p, double tol = 1e-9);

double dist_point_segment(const Point& p, const Point& a, const Point& b);
double dist_point_line(const Point& p, const Point& origin, const Point& unit_dir);

bool box_contains(const Box& box, const Point& p, double tol = 0.0);
bool boxes_intersect(const Box& a, const Box& b);
Point box_center(const Box& box);
double dist_point_box(const Point& p, const Box& box);
double dist_box_box(const Box& a, const Box& b);
double dist_segment_box(const Point& a, const Point& b, const Box& box);

/// Parameters t in [0,1] with a + t(b-a) inside the closed box.
std::optional<Interval> segment_box_clip(const Point& a, const Point& b, const Box& box);
/// Same for the infinite line origin + t*dir.
std::optional<Interval> line_box_clip(const Point& origin, const Point& dir, const Box& box);
/// Parameters t in [0,1] with |a + t(b-a) - c| <= r.
std::optional<Interval> segment_ball_interval(const Point& a, const Point& b, const Point& c, double r);

/// Term max(0, a + b*s, c + d*s); its square is convex in s.
struct HingeTerm {
    double a, b, c, d;
};

/// Exact minimum of the sum of squared hinge terms over [lo, hi] (hi may be +inf).
/// Returns {minimum value of the sum, argmin}.
std::pair<double, double> min_hinge_sq(const std::vector<HingeTerm>& terms, double lo, double hi);

/// {t in [0,1] : dist_fn(a + t(b-a)) <= r} for a convex distance function.
/// Absent if the minimum exceeds r + tol.
std::optional<Interval> fattened_hit_interval(const Point& a, const Point& b,
                                              const std::function<double(const Point&)>& dist_fn,
                                              double r, double tol = 1e-9);

/// fattened_hit_interval against c + B_r for a box c.
std::optional<Interval> box_hit_interval(const Point& a, const Point& b, const Box& c, double r,
                                         double tol = 1e-9);

// Region of points x for which some segment xy with y in gamma meets c.
bool f_membership(const Point& x, const Box& c, const Box& gamma, double tol = 1e-12);
double f_distance(const Point& q, const Box& c, const Box& gamma);

} // namespace fann
