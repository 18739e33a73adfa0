#include "fann/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fann {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kIterationCap = 200;

} // namespace

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::PointOffSegment: return "PointOffSegment";
    case Errc::NonFiniteDistance: return "NonFiniteDistance";
    case Errc::BadEpsilon: return "BadEpsilon";
    case Errc::BadDelta: return "BadDelta";
    case Errc::IterationCap: return "IterationCap";
    case Errc::EmptySet: return "EmptySet";
    case Errc::InvalidEncoding: return "InvalidEncoding";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::BadArity: return "BadArity";
    case Errc::NullCells: return "NullCells";
    case Errc::FeasibilityRefused: return "FeasibilityRefused";
    case Errc::BadParams: return "BadParams";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::StructureMismatch: return "StructureMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    }
    return "Unknown";
}

void require_same_dim(const Point& a, const Point& b) {
    if (a.size() != b.size()) {
        throw Error(Errc::DimensionMismatch,
                    "dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
}

Point sub(const Point& a, const Point& b) {
    require_same_dim(a, b);
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Point add(const Point& a, const Point& b) {
    require_same_dim(a, b);
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

Point scaled(const Point& a, double s) {
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
    return r;
}

Point lerp(const Point& a, const Point& b, double t) {
    require_same_dim(a, b);
    Point r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
}

Point midpoint(const Point& a, const Point& b) { return lerp(a, b, 0.5); }

double dot(const Point& a, const Point& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Point& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

double dist_sq(const Point& a, const Point& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double dist(const Point& a, const Point& b) { return std::sqrt(dist_sq(a, b)); }

bool lex_less(const Point& a, const Point& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double param_of_point(const Point& a, const Point& b, const Point& p, double tol) {
    require_same_dim(a, b);
    require_same_dim(a, p);
    Point u = sub(b, a);
    double l2 = dot(u, u);
    if (l2 == 0.0) {
        if (dist(a, p) <= tol) return 0.0;
        throw Error(Errc::PointOffSegment, "point is not on the degenerate segment");
    }
    double t = dot(sub(p, a), u) / l2;
    double tc = std::clamp(t, 0.0, 1.0);
    if (dist(lerp(a, b, tc), p) > tol) {
        throw Error(Errc::PointOffSegment, "point is farther than tolerance from the segment");
    }
    return tc;
}

double dist_point_segment(const Point& p, const Point& a, const Point& b) {
    Point u = sub(b, a);
    double l2 = dot(u, u);
    if (l2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(sub(p, a), u) / l2, 0.0, 1.0);
    return dist(p, lerp(a, b, t));
}

double dist_point_line(const Point& p, const Point& origin, const Point& unit_dir) {
    Point w = sub(p, origin);
    double t = dot(w, unit_dir);
    double s = dot(w, w) - t * t;
    return std::sqrt(std::max(0.0, s));
}

bool box_contains(const Box& box, const Point& p, double tol) {
    require_same_dim(box.lo, p);
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] < box.lo[i] - tol || p[i] > box.hi[i] + tol) return false;
    }
    return true;
}

bool boxes_intersect(const Box& a, const Box& b) {
    require_same_dim(a.lo, b.lo);
    for (size_t i = 0; i < a.lo.size(); ++i) {
        if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
    }
    return true;
}

Point box_center(const Box& box) { return midpoint(box.lo, box.hi); }

double dist_point_box(const Point& p, const Box& box) {
    require_same_dim(p, box.lo);
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        double d = 0.0;
        if (p[i] < box.lo[i]) d = box.lo[i] - p[i];
        else if (p[i] > box.hi[i]) d = p[i] - box.hi[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double dist_box_box(const Box& a, const Box& b) {
    require_same_dim(a.lo, b.lo);
    double s = 0.0;
    for (size_t i = 0; i < a.lo.size(); ++i) {
        double d = std::max({0.0, b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]});
        s += d * d;
    }
    return std::sqrt(s);
}

double dist_segment_box(const Point& a, const Point& b, const Box& box) {
    require_same_dim(a, b);
    require_same_dim(a, box.lo);
    std::vector<HingeTerm> terms;
    terms.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        double u = b[i] - a[i];
        terms.push_back({box.lo[i] - a[i], -u, a[i] - box.hi[i], u});
    }
    return std::sqrt(min_hinge_sq(terms, 0.0, 1.0).first);
}

namespace {

std::optional<Interval> clip(const Point& a, const Point& dir, const Box& box, double t0, double t1) {
    require_same_dim(a, dir);
    require_same_dim(a, box.lo);
    for (size_t i = 0; i < a.size(); ++i) {
        double u = dir[i];
        if (u == 0.0) {
            if (a[i] < box.lo[i] || a[i] > box.hi[i]) return std::nullopt;
            continue;
        }
        double s0 = (box.lo[i] - a[i]) / u;
        double s1 = (box.hi[i] - a[i]) / u;
        if (s0 > s1) std::swap(s0, s1);
        t0 = std::max(t0, s0);
        t1 = std::min(t1, s1);
        if (t0 > t1) return std::nullopt;
    }
    return Interval{t0, t1};
}

} // namespace

std::optional<Interval> segment_box_clip(const Point& a, const Point& b, const Box& box) {
    return clip(a, sub(b, a), box, 0.0, 1.0);
}

std::optional<Interval> line_box_clip(const Point& origin, const Point& dir, const Box& box) {
    return clip(origin, dir, box, -kInf, kInf);
}

std::optional<Interval> segment_ball_interval(const Point& a, const Point& b, const Point& c, double r) {
    require_same_dim(a, b);
    require_same_dim(a, c);
    Point u = sub(b, a);
    Point w = sub(a, c);
    double A = dot(u, u);
    double B = dot(u, w);
    double C = dot(w, w) - r * r;
    if (A == 0.0) {
        if (C <= 0.0) return Interval{0.0, 1.0};
        return std::nullopt;
    }
    double disc = B * B - A * C;
    if (disc < 0.0) {
        if (disc < -1e-14 * (B * B + std::abs(A * C))) return std::nullopt;
        disc = 0.0;
    }
    double sq = std::sqrt(disc);
    double t0 = (-B - sq) / A;
    double t1 = (-B + sq) / A;
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, 1.0);
    if (t0 > t1) return std::nullopt;
    return Interval{t0, t1};
}

std::pair<double, double> min_hinge_sq(const std::vector<HingeTerm>& terms, double lo, double hi) {
    std::vector<double> cuts;
    auto add_root = [&](double p, double q) {
        if (q == 0.0) return;
        double s = -p / q;
        if (s > lo && s < hi) cuts.push_back(s);
    };
    for (const auto& h : terms) {
        add_root(h.a, h.b);
        add_root(h.c, h.d);
        add_root(h.a - h.c, h.b - h.d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto value = [&](double s) {
        double v = 0.0;
        for (const auto& h : terms) {
            double m = std::max({0.0, h.a + h.b * s, h.c + h.d * s});
            v += m * m;
        }
        return v;
    };

    double best_s = lo;
    double best_v = value(lo);
    double x0 = lo;
    for (size_t k = 0; k <= cuts.size(); ++k) {
        double x1 = k < cuts.size() ? cuts[k] : hi;
        double probe = std::isinf(x1) ? x0 + std::max(1.0, std::abs(x0)) : 0.5 * (x0 + x1);
        double qa = 0.0, qb = 0.0;
        for (const auto& h : terms) {
            double f1 = h.a + h.b * probe;
            double f2 = h.c + h.d * probe;
            if (f1 <= 0.0 && f2 <= 0.0) continue;
            double p = f1 >= f2 ? h.a : h.c;
            double q = f1 >= f2 ? h.b : h.d;
            qa += q * q;
            qb += 2.0 * p * q;
        }
        double s = x0;
        if (qa > 0.0) s = std::clamp(-qb / (2.0 * qa), x0, x1);
        double v = value(s);
        if (v < best_v) {
            best_v = v;
            best_s = s;
        }
        if (!std::isinf(x1)) {
            double ve = value(x1);
            if (ve < best_v) {
                best_v = ve;
                best_s = x1;
            }
        }
        x0 = x1;
    }
    return {best_v, best_s};
}

std::optional<Interval> fattened_hit_interval(const Point& a, const Point& b,
                                              const std::function<double(const Point&)>& dist_fn,
                                              double r, double tol) {
    require_same_dim(a, b);
    auto g = [&](double t) {
        double v = dist_fn(lerp(a, b, t));
        if (!std::isfinite(v)) throw Error(Errc::NonFiniteDistance, "distance callback returned a non-finite value");
        return v;
    };
    double len = dist(a, b);
    if (len == 0.0) {
        if (g(0.0) <= r + tol) return Interval{0.0, 1.0};
        return std::nullopt;
    }
    double tt = std::max(tol / len, 1e-15);

    double best_t = 0.0;
    double best_v = g(0.0);
    auto note = [&](double t, double v) {
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    };
    note(1.0, g(1.0));

    if (best_v > r) {
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double lo = 0.0, hi = 1.0;
        double x1 = hi - invphi * (hi - lo);
        double x2 = lo + invphi * (hi - lo);
        double f1 = g(x1), f2 = g(x2);
        note(x1, f1);
        note(x2, f2);
        int iters = 0;
        while (hi - lo > tt && best_v > r) {
            if (++iters > kIterationCap) throw Error(Errc::IterationCap, "minimum search did not converge");
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - invphi * (hi - lo);
                f1 = g(x1);
                note(x1, f1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + invphi * (hi - lo);
                f2 = g(x2);
                note(x2, f2);
            }
        }
    }
    if (best_v > r + tol) return std::nullopt;
    if (best_v > r) return Interval{best_t, best_t};

    auto bisect = [&](double outside, double inside) {
        int iters = 0;
        while (std::abs(inside - outside) > tt) {
            if (++iters > kIterationCap) throw Error(Errc::IterationCap, "boundary search did not converge");
            double mid = 0.5 * (outside + inside);
            if (g(mid) <= r) inside = mid;
            else outside = mid;
        }
        return inside;
    };
    double left = g(0.0) <= r ? 0.0 : bisect(0.0, best_t);
    double right = g(1.0) <= r ? 1.0 : bisect(1.0, best_t);
    return Interval{left, right};
}

std::optional<Interval> box_hit_interval(const Point& a, const Point& b, const Box& c, double r, double tol) {
    return fattened_hit_interval(a, b, [&](const Point& p) { return dist_point_box(p, c); }, r, tol);
}

bool f_membership(const Point& x, const Box& c, const Box& gamma, double tol) {
    require_same_dim(x, c.lo);
    require_same_dim(x, gamma.lo);
    if (boxes_intersect(c, gamma)) return true;
    double s_lo = 0.0, s_hi = kInf;
    auto constrain = [&](double p, double q) {
        // p + q*s <= tol
        if (q == 0.0) {
            if (p > tol) s_hi = -1.0;
        } else if (q > 0.0) {
            s_hi = std::min(s_hi, (tol - p) / q);
        } else {
            s_lo = std::max(s_lo, (tol - p) / q);
        }
    };
    for (size_t i = 0; i < x.size(); ++i) {
        constrain(c.lo[i] - x[i], c.lo[i] - gamma.hi[i]);
        constrain(x[i] - c.hi[i], gamma.lo[i] - c.hi[i]);
    }
    return s_lo <= s_hi;
}

double f_distance(const Point& q, const Box& c, const Box& gamma) {
    require_same_dim(q, c.lo);
    require_same_dim(q, gamma.lo);
    if (boxes_intersect(c, gamma)) return 0.0;
    std::vector<HingeTerm> terms;
    terms.reserve(q.size());
    for (size_t i = 0; i < q.size(); ++i) {
        terms.push_back({c.lo[i] - q[i], c.lo[i] - gamma.hi[i], q[i] - c.hi[i], gamma.lo[i] - c.hi[i]});
    }
    return std::sqrt(min_hinge_sq(terms, 0.0, kInf).first);
}

} // namespace fann
