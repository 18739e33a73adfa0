#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fann/encoding.hpp"

namespace fann {

struct Corpus {
    std::vector<std::string> ids;
    std::vector<Curve> curves;
    int dim = 0;

    size_t size() const { return curves.size(); }
    /// SHA-256 over ids and coordinates, hex encoded.
    std::string digest() const;
};

/// Validates curves, checks ids, and pads every curve to the largest vertex count
/// (at least 2) by repeating its last vertex.
Corpus make_corpus(std::vector<std::string> ids, std::vector<Curve> curves);

enum class Variant { OneEps, ThreeEps };
enum class BuildMode { Lazy, Eager };
enum class OracleKind { Brute, Canonical };

const char* to_string(Variant v);
const char* to_string(BuildMode m);
const char* to_string(OracleKind o);
Variant parse_variant(const std::string& s);
BuildMode parse_mode(const std::string& s);
OracleKind parse_oracle(const std::string& s);

struct IndexParams {
    double eps = 0.4;
    double delta = 1.0;
    int k = 3;
    Variant variant = Variant::OneEps;
    BuildMode mode = BuildMode::Lazy;
    OracleKind oracle = OracleKind::Brute;
    double budget = 1e8;
};

void validate(const IndexParams& p);

struct QueryAnswer {
    bool found = false;
    size_t index = 0;

    static QueryAnswer no() { return {}; }
    static QueryAnswer curve(size_t i) { return {true, i}; }
    bool operator==(const QueryAnswer& o) const { return found == o.found && (!found || index == o.index); }
};

/// Map from byte keys to the smallest curve index inserted under that key.
class Trie {
public:
    void insert(const std::string& key, std::uint32_t index);
    std::optional<std::uint32_t> lookup(const std::string& key) const;
    size_t size() const { return map_.size(); }
    std::vector<std::pair<std::string, std::uint32_t>> entries() const;

private:
    std::unordered_map<std::string, std::uint32_t> map_;
};

/// Estimated number of curve tests for an eager build.
double one_eps_eager_cost(const Grids& grids, int k, size_t n);
double three_eps_eager_cost(const Grids& grids, int k, size_t n);

struct Sigma0 {
    std::vector<Lattice> cells; // c_{j,1}, c_{j,2} for each non-null pair, in order
    Curve curve;                // their centres, consecutive duplicates collapsed
};

/// Cell sequence key: count and dimension as 4-byte little-endian integers, then the
/// lattice coordinates as 4-byte little-endian signed integers.
std::string cell_sequence_key(const std::vector<Lattice>& cells, int dim);
std::vector<Lattice> decode_cell_sequence_key(const std::string& key);
Curve centers_curve(const std::vector<Lattice>& cells, double width);

class Index {
public:
    virtual ~Index() = default;

    /// Builds with grids over the corpus. Throws FeasibilityRefused if an eager build
    /// exceeds the budget.
    static std::unique_ptr<Index> build(const Corpus& corpus, const IndexParams& params);
    /// Builds over the given grids (which need not come from the corpus).
    static std::unique_ptr<Index> build_with_grids(const Corpus& corpus, const IndexParams& params, Grids grids);

    /// Answer for a query with exactly k vertices.
    virtual QueryAnswer query(const Curve& sigma) const = 0;

    const Corpus& corpus() const { return corpus_; }
    const IndexParams& params() const { return params_; }
    const Grids& grids() const { return grids_; }
    const SegmentOracle& oracle() const { return *oracle_; }
    const CanonicalStructure* canonical() const { return canon_.get(); }

    /// Eager table as (key bytes, index) pairs sorted by key; empty for lazy indexes.
    virtual std::vector<std::pair<std::string, std::uint32_t>> table_entries() const = 0;
    virtual void load_table(const std::vector<std::pair<std::string, std::uint32_t>>& entries) = 0;

protected:
    Index(const Corpus& corpus, const IndexParams& params, Grids grids);
    void check_query(const Curve& sigma) const;

    Corpus corpus_;
    IndexParams params_;
    Grids grids_;
    std::unique_ptr<CanonicalStructure> canon_;
    std::unique_ptr<SegmentOracle> oracle_;
};

/// Index with approximation ratio 1 + O(eps) built on coarse encodings.
class OneEpsIndex : public Index {
public:
    OneEpsIndex(const Corpus& corpus, const IndexParams& params, Grids grids, bool populate);
    QueryAnswer query(const Curve& sigma) const override;
    std::vector<std::pair<std::string, std::uint32_t>> table_entries() const override;
    void load_table(const std::vector<std::pair<std::string, std::uint32_t>>& entries) override;

    /// Smallest index of a curve passing the four tests for e, if any.
    std::optional<std::uint32_t> matching_curve(const CoarseEncoding& e) const;
    const Trie& trie() const { return trie_; }

private:
    void build_eager();
    bool touches_corpus(const Lattice& cell) const;

    Trie trie_;
    mutable std::unordered_map<std::string, std::optional<std::uint32_t>> memo_;
    mutable std::unordered_map<Lattice, bool, LatticeHash> touch_;
};

/// Index with approximation ratio 3 + O(eps) built on cell-centre curves.
class ThreeEpsIndex : public Index {
public:
    ThreeEpsIndex(const Corpus& corpus, const IndexParams& params, Grids grids, bool populate);
    QueryAnswer query(const Curve& sigma) const override;
    std::vector<std::pair<std::string, std::uint32_t>> table_entries() const override;
    void load_table(const std::vector<std::pair<std::string, std::uint32_t>>& entries) override;

    /// Cell-centre curve for sigma; absent when a boundary pair is null or a segment
    /// query certifies that no curve is within delta.
    std::optional<Sigma0> build_sigma0(const Curve& sigma) const;
    std::optional<std::uint32_t> matching_curve(const std::vector<Lattice>& cells) const;
    size_t table_size() const { return table_.size(); }

    /// Eager table as runs (first code, run length, curve index) of consecutive packed
    /// codes sharing a curve index. Codes are mixed-radix over G1 ordinals plus one.
    std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>> packed_runs() const;
    void load_packed_runs(const std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>>& runs);

private:
    void build_eager();
    std::optional<std::uint64_t> pack(const std::vector<Lattice>& cells) const;

    // Eager table over G1 ordinals packed into one integer, sorted by key.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> table_;
    mutable std::unordered_map<std::string, std::optional<std::uint32_t>> memo_;
};

} // namespace fann
