#pragma once

#include "fann/geometry.hpp"

namespace fann {

/// Continuous Frechet decision d_F(a, b) <= eps via free-space reachability.
bool frechet_decide(const Curve& a, const Curve& b, double eps);

/// frechet_decide for the two-vertex curve pq against c, as a single-row sweep.
bool segment_curve_decide(const Point& p, const Point& q, const Curve& c, double eps);

/// Bisection value v with frechet_decide(a, b, v) true and d_F >= v - tol.
double frechet_value(const Curve& a, const Curve& b, double tol = 1e-7);

double discrete_frechet(const Curve& a, const Curve& b);

/// Whether some subsegment x'y' of xy (x' not after y') has d_F(x'y', c) <= r.
bool subsegment_matchable(const Point& x, const Point& y, const Curve& c, double r);

/// Largest vertex-to-vertex distance between the two curves; an upper bound on d_F.
double max_vertex_distance(const Curve& a, const Curve& b);

} // namespace fann
