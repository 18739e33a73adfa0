#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fann/segquery.hpp"

namespace fann {

using CellPair = std::pair<Lattice, Lattice>;

/// Coarse encoding (A, B, C) of a query with k vertices. Entries are indexed by
/// j - 1 for j in 1..k-1.
struct CoarseEncoding {
    int k = 0;
    std::vector<std::optional<CellPair>> C;
    std::vector<std::optional<Lattice>> A;
    std::vector<std::optional<Lattice>> B;

    static CoarseEncoding empty(int k);
    bool operator==(const CoarseEncoding& o) const { return k == o.k && C == o.C && A == o.A && B == o.B; }
};

/// Byte key: k and the dimension as 4-byte little-endian integers, then for each j the
/// entries C, A, B as a presence byte followed by the lattice coordinates (two cells
/// for C) as 4-byte little-endian signed integers.
std::string encode_key(const CoarseEncoding& e);
CoarseEncoding decode_key(const std::string& key);
std::string to_hex(const std::string& bytes);
std::string from_hex(const std::string& hex);

/// Pairs (r, s), r < s, of non-null C entries with only null entries between them (1-based).
std::vector<std::pair<int, int>> window_pairs(const CoarseEncoding& e);

/// Ordered partitions of vertex indices 0..m-1 into k contiguous groups, the first and
/// last non-empty. Each partition is given by group end indices b_0 <= ... <= b_{k-2}
/// (group j holds indices b_{j-1}+1 .. b_j, 0-based, with b_{-1} = -1).
std::vector<std::vector<int>> enumerate_partitions(int m, int k);

/// The four preprocessing tests for one curve against an encoding.
bool curve_matches_encoding(const Curve& tau, const CoarseEncoding& e, const Grids& grids);

/// Constraint on the window (r, s) of a query: a subsegment of x_r x_s (smallest vertices
/// of A[r] and B[s]) within Frechet distance (1+eps)delta of sigma[w_{r+1} .. w_s].
bool check_matchable_window(const CoarseEncoding& e, const Curve& sigma, int r, int s, const Grids& grids);

/// Per-edge results of the two (11 eps delta)-segment queries after the ordering reset.
struct EdgePairs {
    bool no_for_ann = false;
    std::vector<std::optional<CellPair>> pairs; // index j-1
};
EdgePairs compute_edge_pairs(const Curve& sigma, const Grids& grids, const SegmentOracle& oracle);

enum class Generation { Completed, Stopped, NoForAnn };

/// Calls visit for every encoding of sigma satisfying the query constraints, in a
/// fixed lattice-lexicographic order, until visit returns false. An optional filter
/// restricts the A/B candidate cells; cells it rejects are skipped.
Generation for_each_query_encoding(const Curve& sigma, const Grids& grids, const SegmentOracle& oracle,
                                   const std::function<bool(const CoarseEncoding&)>& visit,
                                   const std::function<bool(const Lattice&)>& cell_filter = nullptr);

std::vector<CoarseEncoding> generate_query_encodings(const Curve& sigma, const Grids& grids,
                                                     const SegmentOracle& oracle);

} // namespace fann
