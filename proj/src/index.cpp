#include "fann/index.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "fann/frechet.hpp"

namespace fann {

std::string Corpus::digest() const {
    std::string text;
    char buf[64];
    for (size_t i = 0; i < curves.size(); ++i) {
        text += ids[i];
        text.push_back('\n');
        for (const auto& p : curves[i]) {
            for (double x : p) {
                std::snprintf(buf, sizeof buf, "%.17g,", x);
                text += buf;
            }
            text.push_back(';');
        }
        text.push_back('\n');
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    return to_hex(std::string(reinterpret_cast<const char*>(md), len));
}

Corpus make_corpus(std::vector<std::string> ids, std::vector<Curve> curves) {
    if (curves.empty()) throw Error(Errc::EmptyCorpus, "no curves");
    if (ids.size() != curves.size()) throw Error(Errc::BadParams, "id count differs from curve count");
    std::set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) throw Error(Errc::DuplicateId, "duplicate id " + id);
    }
    Corpus c;
    size_t m = 2;
    for (const auto& curve : curves) {
        if (curve.empty()) throw Error(Errc::EmptySet, "curve without vertices");
        m = std::max(m, curve.size());
        for (const auto& p : curve) {
            if (c.dim == 0) c.dim = static_cast<int>(p.size());
            if (static_cast<int>(p.size()) != c.dim || p.empty()) {
                throw Error(Errc::DimensionMismatch, "curves of mixed dimension");
            }
            for (double x : p) {
                if (!std::isfinite(x)) throw Error(Errc::ParseError, "non-finite coordinate");
            }
        }
    }
    for (auto& curve : curves) {
        while (curve.size() < m) curve.push_back(curve.back());
    }
    c.ids = std::move(ids);
    c.curves = std::move(curves);
    return c;
}

const char* to_string(Variant v) { return v == Variant::OneEps ? "one-eps" : "three-eps"; }
const char* to_string(BuildMode m) { return m == BuildMode::Lazy ? "lazy" : "eager"; }
const char* to_string(OracleKind o) { return o == OracleKind::Brute ? "brute" : "canonical"; }

Variant parse_variant(const std::string& s) {
    if (s == "one-eps") return Variant::OneEps;
    if (s == "three-eps") return Variant::ThreeEps;
    throw Error(Errc::BadParams, "unknown variant " + s);
}

BuildMode parse_mode(const std::string& s) {
    if (s == "lazy") return BuildMode::Lazy;
    if (s == "eager") return BuildMode::Eager;
    throw Error(Errc::BadParams, "unknown mode " + s);
}

OracleKind parse_oracle(const std::string& s) {
    if (s == "brute") return OracleKind::Brute;
    if (s == "canonical") return OracleKind::Canonical;
    throw Error(Errc::BadParams, "unknown oracle " + s);
}

void validate(const IndexParams& p) {
    validate_params(p.eps, p.delta);
    if (p.k < 3) throw Error(Errc::BadParams, "k must be at least 3");
    if (!(p.budget > 0.0)) throw Error(Errc::BadParams, "budget must be positive");
}

void Trie::insert(const std::string& key, std::uint32_t index) {
    auto [it, fresh] = map_.emplace(key, index);
    if (!fresh) it->second = std::min(it->second, index);
}

std::optional<std::uint32_t> Trie::lookup(const std::string& key) const {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::pair<std::string, std::uint32_t>> Trie::entries() const {
    std::vector<std::pair<std::string, std::uint32_t>> out(map_.begin(), map_.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

size_t near_count(const Grids& grids, const Lattice& c, double rho) {
    size_t n = 0;
    for (const auto& x : cells_near_box(grids.g1.box(c), rho, grids.g1.width())) {
        if (grids.g2.contains(x)) ++n;
    }
    return n;
}

} // namespace

double one_eps_eager_cost(const Grids& grids, int k, size_t n) {
    const double rho = (1.0 + 11.0 * grids.eps) * grids.delta;
    double sum = 0.0;
    for (const auto& c : grids.g1.cells()) sum += static_cast<double>(near_count(grids, c, rho));
    const double s = sum * sum; // choices for one non-null j: (c1, c2, A, B)
    double total = 0.0;
    const int free = k - 3;
    for (int t = 0; t <= free; ++t) {
        total += std::tgamma(free + 1.0) / (std::tgamma(t + 1.0) * std::tgamma(free - t + 1.0)) * std::pow(s, t + 2);
    }
    return total * static_cast<double>(n);
}

double three_eps_eager_cost(const Grids& grids, int k, size_t n) {
    const double g = static_cast<double>(grids.g1.cells().size());
    double total = 0.0;
    for (int l = 2; l <= k - 1; ++l) total += std::pow(g, 2 * l);
    return total * static_cast<double>(n);
}

std::string cell_sequence_key(const std::vector<Lattice>& cells, int dim) {
    std::string out;
    auto put = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    put(static_cast<std::uint32_t>(cells.size()));
    put(static_cast<std::uint32_t>(dim));
    for (const auto& c : cells) {
        if (static_cast<int>(c.size()) != dim) throw Error(Errc::DimensionMismatch, "cell of wrong dimension");
        for (auto v : c) put(static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));
    }
    return out;
}

std::vector<Lattice> decode_cell_sequence_key(const std::string& key) {
    size_t pos = 0;
    auto get = [&]() {
        if (pos + 4 > key.size()) throw Error(Errc::InvalidEncoding, "truncated key");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(key[pos + i])) << (8 * i);
        pos += 4;
        return v;
    };
    std::uint32_t count = get();
    std::uint32_t dim = get();
    if (key.size() != 8 + static_cast<size_t>(count) * dim * 4) throw Error(Errc::InvalidEncoding, "key length");
    std::vector<Lattice> cells(count, Lattice(dim));
    for (auto& c : cells) {
        for (auto& v : c) v = static_cast<std::int32_t>(get());
    }
    return cells;
}

Curve centers_curve(const std::vector<Lattice>& cells, double width) {
    Curve out;
    for (const auto& c : cells) {
        Point p = cell_center(c, width);
        if (out.empty() || out.back() != p) out.push_back(std::move(p));
    }
    return out;
}

Index::Index(const Corpus& corpus, const IndexParams& params, Grids grids)
    : corpus_(corpus), params_(params), grids_(std::move(grids)) {
    validate(params_);
    if (corpus_.curves.empty()) throw Error(Errc::EmptyCorpus, "no curves");
    if (grids_.dim != corpus_.dim) throw Error(Errc::DimensionMismatch, "grid and corpus dimensions differ");
    if (params_.oracle == OracleKind::Canonical) {
        canon_ = std::make_unique<CanonicalStructure>(corpus_.curves, grids_, CanonicalMode::Lazy);
        oracle_ = std::make_unique<CanonicalOracle>(*canon_);
    } else {
        oracle_ = std::make_unique<BruteOracle>(grids_.g1);
    }
}

std::unique_ptr<Index> Index::build(const Corpus& corpus, const IndexParams& params) {
    validate(params);
    if (corpus.curves.empty()) throw Error(Errc::EmptyCorpus, "no curves");
    return build_with_grids(corpus, params, build_grids(corpus.curves, params.eps, params.delta));
}

std::unique_ptr<Index> Index::build_with_grids(const Corpus& corpus, const IndexParams& params, Grids grids) {
    if (params.variant == Variant::OneEps) return std::make_unique<OneEpsIndex>(corpus, params, std::move(grids), true);
    return std::make_unique<ThreeEpsIndex>(corpus, params, std::move(grids), true);
}

void Index::check_query(const Curve& sigma) const {
    if (static_cast<int>(sigma.size()) != params_.k) {
        throw Error(Errc::ArityMismatch, "query has " + std::to_string(sigma.size()) + " vertices, expected " +
                                             std::to_string(params_.k));
    }
    for (const auto& p : sigma) {
        if (static_cast<int>(p.size()) != corpus_.dim) throw Error(Errc::DimensionMismatch, "query dimension");
    }
}

// ---------------------------------------------------------------------------

OneEpsIndex::OneEpsIndex(const Corpus& corpus, const IndexParams& params, Grids grids, bool populate)
    : Index(corpus, params, std::move(grids)) {
    if (populate && params_.mode == BuildMode::Eager) build_eager();
}

std::optional<std::uint32_t> OneEpsIndex::matching_curve(const CoarseEncoding& e) const {
    for (size_t i = 0; i < corpus_.curves.size(); ++i) {
        if (curve_matches_encoding(corpus_.curves[i], e, grids_)) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
}

bool OneEpsIndex::touches_corpus(const Lattice& cell) const {
    auto it = touch_.find(cell);
    if (it != touch_.end()) return it->second;
    Box b = grids_.g2.box(cell);
    bool hit = false;
    for (const auto& c : corpus_.curves) {
        for (size_t a = 0; a + 1 < c.size() && !hit; ++a) hit = segment_box_clip(c[a], c[a + 1], b).has_value();
        if (hit) break;
    }
    touch_.emplace(cell, hit);
    return hit;
}

QueryAnswer OneEpsIndex::query(const Curve& sigma) const {
    check_query(sigma);
    QueryAnswer ans = QueryAnswer::no();
    // A and B cells must meet an edge of a matching curve, so others cannot lead to a hit.
    auto filter = [this](const Lattice& c) { return touches_corpus(c); };
    auto visit = [&](const CoarseEncoding& e) {
        std::string key = encode_key(e);
        std::optional<std::uint32_t> hit;
        if (params_.mode == BuildMode::Eager) {
            hit = trie_.lookup(key);
        } else {
            auto it = memo_.find(key);
            if (it != memo_.end()) {
                hit = it->second;
            } else {
                hit = matching_curve(e);
                memo_.emplace(std::move(key), hit);
            }
        }
        if (hit) {
            ans = QueryAnswer::curve(*hit);
            return false;
        }
        return true;
    };
    for_each_query_encoding(sigma, grids_, *oracle_, visit, filter);
    return ans;
}

void OneEpsIndex::build_eager() {
    double cost = one_eps_eager_cost(grids_, params_.k, corpus_.size());
    if (cost > params_.budget) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "eager one-eps build needs about %.3g curve tests, budget is %.3g", cost,
                      params_.budget);
        throw Error(Errc::FeasibilityRefused, buf);
    }
    const int k = params_.k;
    const double rho = (1.0 + 11.0 * grids_.eps) * grids_.delta;
    const auto& g1 = grids_.g1.cells();
    std::vector<std::vector<Lattice>> near(g1.size());
    for (size_t i = 0; i < g1.size(); ++i) {
        for (auto& x : cells_near_box(grids_.g1.box(g1[i]), rho, grids_.g1.width())) {
            if (grids_.g2.contains(x)) near[i].push_back(std::move(x));
        }
    }
    CoarseEncoding e = CoarseEncoding::empty(k);
    std::function<void(int)> rec = [&](int j) {
        if (j == k) {
            if (auto hit = matching_curve(e)) trie_.insert(encode_key(e), *hit);
            return;
        }
        const size_t at = static_cast<size_t>(j - 1);
        if (j != 1 && j != k - 1) {
            e.C[at].reset();
            e.A[at].reset();
            e.B[at].reset();
            rec(j + 1);
        }
        for (size_t c1 = 0; c1 < g1.size(); ++c1) {
            for (size_t c2 = 0; c2 < g1.size(); ++c2) {
                e.C[at] = CellPair{g1[c1], g1[c2]};
                for (const auto& a : near[c2]) {
                    e.A[at] = a;
                    for (const auto& b : near[c1]) {
                        e.B[at] = b;
                        rec(j + 1);
                    }
                }
            }
        }
        e.C[at].reset();
        e.A[at].reset();
        e.B[at].reset();
    };
    rec(1);
}

std::vector<std::pair<std::string, std::uint32_t>> OneEpsIndex::table_entries() const {
    if (params_.mode != BuildMode::Eager) return {};
    return trie_.entries();
}

void OneEpsIndex::load_table(const std::vector<std::pair<std::string, std::uint32_t>>& entries) {
    for (const auto& [key, idx] : entries) {
        decode_key(key);
        if (idx >= corpus_.size()) throw Error(Errc::StructureMismatch, "table index out of range");
        trie_.insert(key, idx);
    }
}

// ---------------------------------------------------------------------------

ThreeEpsIndex::ThreeEpsIndex(const Corpus& corpus, const IndexParams& params, Grids grids, bool populate)
    : Index(corpus, params, std::move(grids)) {
    if (populate && params_.mode == BuildMode::Eager) build_eager();
}

std::optional<Sigma0> ThreeEpsIndex::build_sigma0(const Curve& sigma) const {
    EdgePairs ep = compute_edge_pairs(sigma, grids_, *oracle_);
    if (ep.no_for_ann || ep.pairs.empty() || !ep.pairs.front() || !ep.pairs.back()) return std::nullopt;
    Sigma0 s;
    for (const auto& p : ep.pairs) {
        if (!p) continue;
        s.cells.push_back(p->first);
        s.cells.push_back(p->second);
    }
    s.curve = centers_curve(s.cells, grids_.g1.width());
    return s;
}

std::optional<std::uint64_t> ThreeEpsIndex::pack(const std::vector<Lattice>& cells) const {
    const std::uint64_t base = grids_.g1.cells().size() + 1;
    std::uint64_t code = 0;
    for (const auto& c : cells) {
        auto o = grids_.g1.ordinal(c);
        if (!o) return std::nullopt;
        code = code * base + (*o + 1);
    }
    return code;
}

std::optional<std::uint32_t> ThreeEpsIndex::matching_curve(const std::vector<Lattice>& cells) const {
    if (params_.mode == BuildMode::Eager) {
        auto code = pack(cells);
        if (!code) return std::nullopt;
        auto it = std::lower_bound(table_.begin(), table_.end(), std::make_pair(*code, std::uint32_t{0}));
        if (it == table_.end() || it->first != *code) return std::nullopt;
        return it->second;
    }
    std::string key = cell_sequence_key(cells, grids_.dim);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Curve c = centers_curve(cells, grids_.g1.width());
    const double rho = (1.0 + 12.0 * grids_.eps) * grids_.delta;
    std::optional<std::uint32_t> hit;
    for (size_t i = 0; i < corpus_.curves.size(); ++i) {
        if (frechet_decide(c, corpus_.curves[i], rho)) {
            hit = static_cast<std::uint32_t>(i);
            break;
        }
    }
    memo_.emplace(std::move(key), hit);
    return hit;
}

QueryAnswer ThreeEpsIndex::query(const Curve& sigma) const {
    check_query(sigma);
    auto s0 = build_sigma0(sigma);
    if (!s0) return QueryAnswer::no();
    if (!frechet_decide(sigma, s0->curve, (2.0 + 12.0 * grids_.eps) * grids_.delta)) return QueryAnswer::no();
    auto hit = matching_curve(s0->cells);
    if (!hit) return QueryAnswer::no();
    return QueryAnswer::curve(*hit);
}

void ThreeEpsIndex::build_eager() {
    double cost = three_eps_eager_cost(grids_, params_.k, corpus_.size());
    const double g = static_cast<double>(grids_.g1.cells().size());
    if (cost > params_.budget || std::pow(g + 1.0, 2.0 * (params_.k - 1)) > 1.8e19) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "eager three-eps build needs about %.3g curve tests, budget is %.3g", cost,
                      params_.budget);
        throw Error(Errc::FeasibilityRefused, buf);
    }
    const auto& g1 = grids_.g1.cells();
    const size_t n = g1.size();
    const std::uint64_t base = n + 1;
    std::vector<Point> centers;
    centers.reserve(n);
    for (const auto& c : g1) centers.push_back(cell_center(c, grids_.g1.width()));
    const double rho = (1.0 + 12.0 * grids_.eps) * grids_.delta;

    Curve buf;
    for (int l = 2; l <= params_.k - 1; ++l) {
        const size_t len = static_cast<size_t>(2 * l);
        std::vector<size_t> pick(len, 0);
        while (true) {
            buf.clear();
            std::uint64_t code = 0;
            for (size_t i = 0; i < len; ++i) {
                code = code * base + (pick[i] + 1);
                if (i == 0 || pick[i] != pick[i - 1]) buf.push_back(centers[pick[i]]);
            }
            for (size_t t = 0; t < corpus_.curves.size(); ++t) {
                if (frechet_decide(buf, corpus_.curves[t], rho)) {
                    table_.emplace_back(code, static_cast<std::uint32_t>(t));
                    break;
                }
            }
            size_t i = len;
            bool done = true;
            while (i > 0) {
                --i;
                if (++pick[i] < n) {
                    done = false;
                    break;
                }
                pick[i] = 0;
            }
            if (done) break;
        }
    }
    std::sort(table_.begin(), table_.end());
}

std::vector<std::pair<std::string, std::uint32_t>> ThreeEpsIndex::table_entries() const {
    std::vector<std::pair<std::string, std::uint32_t>> out;
    if (params_.mode != BuildMode::Eager) return out;
    const auto& g1 = grids_.g1.cells();
    const std::uint64_t base = g1.size() + 1;
    out.reserve(table_.size());
    for (const auto& [code, idx] : table_) {
        std::vector<Lattice> cells;
        std::uint64_t c = code;
        while (c) {
            cells.push_back(g1[static_cast<size_t>(c % base) - 1]);
            c /= base;
        }
        std::reverse(cells.begin(), cells.end());
        out.emplace_back(cell_sequence_key(cells, grids_.dim), idx);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void ThreeEpsIndex::load_table(const std::vector<std::pair<std::string, std::uint32_t>>& entries) {
    table_.clear();
    for (const auto& [key, idx] : entries) {
        auto code = pack(decode_cell_sequence_key(key));
        if (!code) throw Error(Errc::StructureMismatch, "table key names a cell outside G1");
        if (idx >= corpus_.size()) throw Error(Errc::StructureMismatch, "table index out of range");
        table_.emplace_back(*code, idx);
    }
    std::sort(table_.begin(), table_.end());
}

std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>> ThreeEpsIndex::packed_runs() const {
    std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>> runs;
    for (const auto& [code, idx] : table_) {
        if (!runs.empty()) {
            auto& [first, len, ri] = runs.back();
            if (ri == idx && first + len == code) {
                ++len;
                continue;
            }
        }
        runs.emplace_back(code, 1, idx);
    }
    return runs;
}

void ThreeEpsIndex::load_packed_runs(const std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>>& runs) {
    const std::uint64_t base = grids_.g1.cells().size() + 1;
    auto valid = [&](std::uint64_t c) {
        if (c == 0) return false;
        for (; c; c /= base) {
            if (c % base == 0) return false;
        }
        return true;
    };
    table_.clear();
    for (const auto& [first, len, idx] : runs) {
        if (idx >= corpus_.size()) throw Error(Errc::StructureMismatch, "table index out of range");
        for (std::uint64_t c = first; c < first + len; ++c) {
            if (!valid(c)) throw Error(Errc::StructureMismatch, "table code names a cell outside G1");
            table_.emplace_back(c, idx);
        }
    }
    std::sort(table_.begin(), table_.end());
}

} // namespace fann
