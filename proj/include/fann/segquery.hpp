#pragma once

#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "fann/grids.hpp"

namespace fann {

/// Outcome of a lambda-segment query.
struct SegAnswer {
    enum class Kind { Null, Cell, NoForAnn };
    Kind kind = Kind::Null;
    Lattice cell;

    static SegAnswer null() { return {}; }
    static SegAnswer no_for_ann() { return {Kind::NoForAnn, {}}; }
    static SegAnswer of(Lattice c) { return {Kind::Cell, std::move(c)}; }
    bool is_cell() const { return kind == Kind::Cell; }
    bool operator==(const SegAnswer& o) const { return kind == o.kind && cell == o.cell; }
};

/// Exact first cell of `cells` hit when walking p -> q; ties go to the smaller lattice tuple.
SegAnswer brute_segment_query(const GridSet& cells, const Point& p, const Point& q);

/// Contract of a lambda-segment query answer for walk p -> q.
bool answer_valid(const GridSet& cells, const Point& p, const Point& q, double lambda, const SegAnswer& ans,
                  double tol = 1e-9);

struct Line {
    Point origin;
    Point dir; // unit
    int curve = 0;
    int edge = 0;
    Point at(double t) const { return add(origin, scaled(dir, t)); }
    double param(const Point& p) const { return dot(sub(p, origin), dir); }
};

/// Lines parallel to each edge through a (d-1)-grid of spacing eps*delta/sqrt(d-1)
/// in the orthogonal hyperplane at its first vertex, kept within (1+2eps)delta.
std::vector<Line> build_lines(const std::vector<Curve>& curves, double eps, double delta);

/// Orthonormal basis of the hyperplane orthogonal to the unit vector u.
std::vector<Point> orthogonal_basis(const Point& u);

/// Index of the point nearest to the line (exact scan; first index wins ties).
size_t nearest_point_to_line(const std::vector<Point>& points, const Point& origin, const Point& unit_dir);
/// Index of the line nearest to the point (exact scan; first index wins ties).
size_t nearest_line_to_point(const std::vector<Line>& lines, const Point& p);

/// {t : f_distance(line(t), c, gamma) <= r}; infinite bounds mark unbounded sides
/// (detected at |t| = t_max).
std::optional<Interval> f_interval_on_line(const Line& line, const Box& c, const Box& gamma, double r,
                                           double t_max, double tol = 1e-9);

class SegmentOracle {
public:
    virtual ~SegmentOracle() = default;
    virtual SegAnswer query(const Point& p, const Point& q) const = 0;
};

class BruteOracle : public SegmentOracle {
public:
    explicit BruteOracle(const GridSet& g1) : g1_(g1) {}
    SegAnswer query(const Point& p, const Point& q) const override { return brute_segment_query(g1_, p, q); }

private:
    const GridSet& g1_;
};

/// Canonical segments of one line for a fixed set of F-intervals.
struct CanonicalPartition {
    std::vector<double> cuts; // sorted distinct finite endpoints
    size_t count() const { return cuts.size() + 1; }
    size_t locate(double t) const;
    Interval piece(size_t i) const;
    /// Representative point parameter of piece i.
    double anchor(size_t i, double width) const;
};

enum class CanonicalMode { Eager, Lazy };

/// Segment-query structure over G1 built from canonical segments of the line packing.
/// Eager refines every line by the intervals of all (c, gamma) in G1 x G3. Lazy refines
/// a line only by the intervals of the requested gamma, on demand.
class CanonicalStructure {
public:
    CanonicalStructure(const std::vector<Curve>& curves, const Grids& grids, CanonicalMode mode);

    const std::vector<Line>& lines() const { return lines_; }
    const std::vector<Point>& vertices() const { return vertices_; }
    const Grids& grids() const { return grids_; }
    CanonicalMode mode() const { return mode_; }
    double t_max() const { return t_max_; }

    /// Eager only: partition of line li.
    const CanonicalPartition& partition(size_t li) const;
    /// F-interval of (c, gamma) on line li, memoized.
    std::optional<Interval> interval(size_t li, const Lattice& c, const Lattice& gamma) const;
    /// Cells of G1 whose F-interval on li contains piece (of the partition used for gamma).
    std::vector<Lattice> candidate_cells(size_t li, const Lattice& gamma, size_t piece) const;
    /// Canonical segment containing parameter t, for gamma.
    size_t piece_for(size_t li, const Lattice& gamma, double t) const;
    Interval piece_interval(size_t li, const Lattice& gamma, size_t piece) const;
    Point anchor_point(size_t li, const Lattice& gamma, size_t piece) const;
    /// The selected cell c_{gamma, xi}, or nullopt if no cell qualifies.
    std::optional<Lattice> chosen_cell(size_t li, const Lattice& gamma, size_t piece) const;

    /// Query steps in the order of the construction; falls back to the brute scan
    /// when a floating-point precondition fails and counts it.
    SegAnswer query(const Point& p, const Point& q) const;
    size_t fallbacks() const { return fallbacks_; }

private:
    const CanonicalPartition& partition_for(size_t li, const Lattice& gamma) const;
    SegAnswer finish(const Point& p, const Point& q, size_t lp, size_t lq, const Lattice& gamma,
                     bool allow_redirect) const;
    SegAnswer fallback(const Point& p, const Point& q) const;

    Grids grids_;
    CanonicalMode mode_;
    std::vector<Line> lines_;
    std::vector<Point> vertices_;
    double t_max_ = 0.0;

    using IntervalList = std::vector<std::pair<size_t, Interval>>; // (G1 ordinal, interval), non-empty only
    const IntervalList& intervals_for(size_t li, const Lattice& gamma) const;

    // Caches; the structure is not safe for concurrent queries.
    mutable std::vector<std::unordered_map<Lattice, IntervalList, LatticeHash>> lists_; // per line
    std::vector<CanonicalPartition> eager_parts_;                                     // per line
    mutable std::vector<std::unordered_map<Lattice, CanonicalPartition, LatticeHash>> lazy_parts_;
    mutable std::map<std::tuple<size_t, Lattice, size_t>, std::optional<Lattice>> chosen_;
    mutable size_t fallbacks_ = 0;
};

class CanonicalOracle : public SegmentOracle {
public:
    explicit CanonicalOracle(const CanonicalStructure& s) : s_(s) {}
    SegAnswer query(const Point& p, const Point& q) const override { return s_.query(p, q); }

private:
    const CanonicalStructure& s_;
};

} // namespace fann
