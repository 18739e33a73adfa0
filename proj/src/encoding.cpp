#include "fann/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include "fann/frechet.hpp"

namespace fann {

CoarseEncoding CoarseEncoding::empty(int k) {
    CoarseEncoding e;
    e.k = k;
    size_t n = k > 1 ? static_cast<size_t>(k - 1) : 0;
    e.C.assign(n, std::nullopt);
    e.A.assign(n, std::nullopt);
    e.B.assign(n, std::nullopt);
    return e;
}

namespace {

void validate(const CoarseEncoding& e) {
    if (e.k < 3) throw Error(Errc::InvalidEncoding, "encodings need k >= 3");
    size_t n = static_cast<size_t>(e.k - 1);
    if (e.C.size() != n || e.A.size() != n || e.B.size() != n) {
        throw Error(Errc::InvalidEncoding, "entry count differs from k - 1");
    }
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, size_t& pos) {
    if (pos + 4 > in.size()) throw Error(Errc::InvalidEncoding, "truncated key");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += 4;
    return v;
}

void put_lattice(std::string& out, const Lattice& l, size_t dim) {
    if (l.size() != dim) throw Error(Errc::InvalidEncoding, "cell of wrong dimension");
    for (auto v : l) {
        if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
            throw Error(Errc::InvalidEncoding, "lattice coordinate out of 32-bit range");
        }
        put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));
    }
}

Lattice get_lattice(const std::string& in, size_t& pos, size_t dim) {
    Lattice l(dim);
    for (size_t i = 0; i < dim; ++i) l[i] = static_cast<std::int32_t>(get_u32(in, pos));
    return l;
}

size_t encoding_dim(const CoarseEncoding& e) {
    for (size_t j = 0; j < e.C.size(); ++j) {
        if (e.C[j]) return e.C[j]->first.size();
        if (e.A[j]) return e.A[j]->size();
        if (e.B[j]) return e.B[j]->size();
    }
    return 0;
}

} // namespace

std::string encode_key(const CoarseEncoding& e) {
    validate(e);
    size_t dim = encoding_dim(e);
    std::string out;
    put_u32(out, static_cast<std::uint32_t>(e.k));
    put_u32(out, static_cast<std::uint32_t>(dim));
    for (size_t j = 0; j < e.C.size(); ++j) {
        out.push_back(e.C[j] ? 1 : 0);
        if (e.C[j]) {
            put_lattice(out, e.C[j]->first, dim);
            put_lattice(out, e.C[j]->second, dim);
        }
        out.push_back(e.A[j] ? 1 : 0);
        if (e.A[j]) put_lattice(out, *e.A[j], dim);
        out.push_back(e.B[j] ? 1 : 0);
        if (e.B[j]) put_lattice(out, *e.B[j], dim);
    }
    return out;
}

CoarseEncoding decode_key(const std::string& key) {
    size_t pos = 0;
    int k = static_cast<int>(get_u32(key, pos));
    size_t dim = get_u32(key, pos);
    if (k < 3 || k > 1 << 20) throw Error(Errc::InvalidEncoding, "bad k in key");
    CoarseEncoding e = CoarseEncoding::empty(k);
    auto flag = [&]() {
        if (pos >= key.size()) throw Error(Errc::InvalidEncoding, "truncated key");
        char f = key[pos++];
        if (f != 0 && f != 1) throw Error(Errc::InvalidEncoding, "bad presence byte");
        return f == 1;
    };
    for (size_t j = 0; j < e.C.size(); ++j) {
        if (flag()) {
            Lattice a = get_lattice(key, pos, dim);
            Lattice b = get_lattice(key, pos, dim);
            e.C[j] = CellPair{std::move(a), std::move(b)};
        }
        if (flag()) e.A[j] = get_lattice(key, pos, dim);
        if (flag()) e.B[j] = get_lattice(key, pos, dim);
    }
    if (pos != key.size()) throw Error(Errc::InvalidEncoding, "trailing bytes in key");
    return e;
}

std::string to_hex(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

std::string from_hex(const std::string& hex) {
    if (hex.size() % 2) throw Error(Errc::ParseError, "odd-length hex string");
    auto val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(Errc::ParseError, "bad hex digit");
    };
    std::string out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) out.push_back(static_cast<char>(val(hex[i]) * 16 + val(hex[i + 1])));
    return out;
}

std::vector<std::pair<int, int>> window_pairs(const CoarseEncoding& e) {
    std::vector<std::pair<int, int>> out;
    int prev = 0;
    for (int j = 1; j <= static_cast<int>(e.C.size()); ++j) {
        if (!e.C[j - 1]) continue;
        if (prev) out.emplace_back(prev, j);
        prev = j;
    }
    return out;
}

std::vector<std::vector<int>> enumerate_partitions(int m, int k) {
    std::vector<std::vector<int>> out;
    if (k < 3) throw Error(Errc::BadArity, "partitions need k >= 3");
    if (m < 2) return out;
    std::vector<int> b(static_cast<size_t>(k - 1), 0);
    const int top = m - 2;
    while (true) {
        out.push_back(b);
        int i = k - 2;
        while (i >= 0 && b[static_cast<size_t>(i)] == top) --i;
        if (i < 0) break;
        int v = b[static_cast<size_t>(i)] + 1;
        for (int t = i; t <= k - 2; ++t) b[static_cast<size_t>(t)] = v;
    }
    return out;
}

bool curve_matches_encoding(const Curve& tau, const CoarseEncoding& e, const Grids& grids) {
    validate(e);
    if (tau.empty()) throw Error(Errc::EmptySet, "curve without vertices");
    if (static_cast<int>(tau.front().size()) != grids.dim) throw Error(Errc::DimensionMismatch, "curve dimension");
    const int k = e.k;
    const int m = static_cast<int>(tau.size());
    const double delta = grids.delta;
    const double w = grids.g1.width();
    const auto& B1 = e.B.front();
    const auto& Ak = e.A.back();
    if (!B1 || !Ak) return false;
    const Box b1 = cell_box(*B1, w);
    if (dist_point_box(tau.back(), cell_box(*Ak, w)) > delta) return false;
    if (dist_point_box(tau.front(), b1) > delta) return false;

    const auto J = window_pairs(e);
    const double rho = (1.0 + 12.0 * grids.eps) * delta;

    for (const auto& ends : enumerate_partitions(m, k)) {
        auto start = [&](int j) { return j == 0 ? 0 : ends[static_cast<size_t>(j - 1)] + 1; };
        auto stop = [&](int j) { return j == k - 1 ? m - 1 : ends[static_cast<size_t>(j)]; };
        auto is_empty = [&](int j) { return start(j) > stop(j); };

        bool ok = true;
        for (int j = 2; j <= k - 1 && ok; ++j) ok = is_empty(j) == !e.C[static_cast<size_t>(j - 1)];
        if (!ok) continue;

        for (int a = 0; a <= stop(0) && ok; ++a) ok = dist_point_box(tau[static_cast<size_t>(a)], b1) <= delta;
        if (!ok) continue;

        for (const auto& [r, s] : J) {
            const auto& Ar = e.A[static_cast<size_t>(r - 1)];
            const auto& Bs = e.B[static_cast<size_t>(s - 1)];
            if (!Ar || !Bs) {
                ok = false;
                break;
            }
            // last vertex before the group of s; the edge leaving it carries the window
            const int b = start(s) - 1;
            if (b < 0 || b + 1 >= m) {
                ok = false;
                break;
            }
            const Point& p = tau[static_cast<size_t>(b)];
            const Point& q = tau[static_cast<size_t>(b + 1)];
            auto ca = segment_box_clip(p, q, cell_box(*Ar, w));
            auto cb = segment_box_clip(p, q, cell_box(*Bs, w));
            if (!ca || !cb || ca->lo > cb->lo) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        for (int j = 1; j <= k - 1 && ok; ++j) {
            if (is_empty(j)) continue;
            const auto& c = e.C[static_cast<size_t>(j - 1)];
            if (!c) {
                ok = false;
                break;
            }
            Curve sub(tau.begin() + start(j), tau.begin() + stop(j) + 1);
            ok = subsegment_matchable(cell_corner(c->first, w), cell_corner(c->second, w), sub, rho);
        }
        if (ok) return true;
    }
    return false;
}

bool check_matchable_window(const CoarseEncoding& e, const Curve& sigma, int r, int s, const Grids& grids) {
    validate(e);
    if (r < 1 || s <= r || s > e.k - 1 || static_cast<int>(sigma.size()) != e.k) {
        throw Error(Errc::InvalidEncoding, "window out of range");
    }
    const auto& Ar = e.A[static_cast<size_t>(r - 1)];
    const auto& Bs = e.B[static_cast<size_t>(s - 1)];
    if (!Ar || !Bs) throw Error(Errc::NullCells, "window cells are null");
    const double w = grids.g1.width();
    Curve sub(sigma.begin() + r, sigma.begin() + s);
    return subsegment_matchable(cell_corner(*Ar, w), cell_corner(*Bs, w), sub, (1.0 + grids.eps) * grids.delta);
}

EdgePairs compute_edge_pairs(const Curve& sigma, const Grids& grids, const SegmentOracle& oracle) {
    EdgePairs out;
    if (sigma.size() < 2) return out;
    const double lambda = 11.0 * grids.eps * grids.delta;
    const double w = grids.g1.width();
    for (size_t j = 0; j + 1 < sigma.size(); ++j) {
        const Point& a = sigma[j];
        const Point& b = sigma[j + 1];
        SegAnswer u1 = oracle.query(a, b);
        SegAnswer u2 = oracle.query(b, a);
        if (u1.kind == SegAnswer::Kind::NoForAnn || u2.kind == SegAnswer::Kind::NoForAnn) {
            out.no_for_ann = true;
            out.pairs.clear();
            return out;
        }
        std::optional<CellPair> pair;
        if (u1.is_cell() && u2.is_cell()) {
            auto i1 = box_hit_interval(a, b, cell_box(u1.cell, w), lambda, 1e-9 * grids.delta);
            auto i2 = box_hit_interval(a, b, cell_box(u2.cell, w), lambda, 1e-9 * grids.delta);
            if (i1 && i2 && i1->lo <= i2->hi) pair = CellPair{u1.cell, u2.cell};
        }
        out.pairs.push_back(std::move(pair));
    }
    return out;
}

Generation for_each_query_encoding(const Curve& sigma, const Grids& grids, const SegmentOracle& oracle,
                                   const std::function<bool(const CoarseEncoding&)>& visit,
                                   const std::function<bool(const Lattice&)>& cell_filter) {
    const int k = static_cast<int>(sigma.size());
    if (k < 3) throw Error(Errc::ArityMismatch, "queries need at least 3 vertices");
    for (const auto& p : sigma) {
        if (static_cast<int>(p.size()) != grids.dim) throw Error(Errc::DimensionMismatch, "query dimension");
    }
    EdgePairs ep = compute_edge_pairs(sigma, grids, oracle);
    if (ep.no_for_ann) return Generation::NoForAnn;
    const auto& pairs = ep.pairs;
    if (!pairs.front() || !pairs.back()) return Generation::Completed;

    auto B1 = grids.g2.locate(sigma.front());
    auto Ak = grids.g2.locate(sigma.back());
    if (!B1 || !Ak) return Generation::Completed;
    const double w = grids.g1.width();
    const double rho = (1.0 + 11.0 * grids.eps) * grids.delta;
    if (dist_box_box(cell_box(pairs.front()->first, w), cell_box(*B1, w)) > rho) return Generation::Completed;
    if (dist_box_box(cell_box(pairs.back()->second, w), cell_box(*Ak, w)) > rho) return Generation::Completed;

    auto candidates = [&](const Lattice& near) {
        std::vector<Lattice> out;
        for (auto& c : cells_near_box(cell_box(near, w), rho, w)) {
            if (grids.g2.contains(c) && (!cell_filter || cell_filter(c))) out.push_back(std::move(c));
        }
        return out;
    };

    // Valid (A[r], B[s]) choices per window, in lexicographic order.
    std::map<std::pair<int, int>, std::vector<std::pair<Lattice, Lattice>>> windows;
    auto window = [&](int r, int s) -> const std::vector<std::pair<Lattice, Lattice>>& {
        auto it = windows.find({r, s});
        if (it != windows.end()) return it->second;
        std::vector<std::pair<Lattice, Lattice>> valid;
        auto as = candidates(pairs[static_cast<size_t>(r - 1)]->second);
        auto bs = candidates(pairs[static_cast<size_t>(s - 1)]->first);
        Curve sub(sigma.begin() + r, sigma.begin() + s);
        const double r1 = (1.0 + grids.eps) * grids.delta;
        for (const auto& a : as) {
            Point xa = cell_corner(a, w);
            for (const auto& b : bs) {
                if (subsegment_matchable(xa, cell_corner(b, w), sub, r1)) valid.emplace_back(a, b);
            }
        }
        return windows.emplace(std::make_pair(r, s), std::move(valid)).first->second;
    };

    std::vector<int> middle;
    for (int j = 2; j <= k - 2; ++j) {
        if (pairs[static_cast<size_t>(j - 1)]) middle.push_back(j);
    }
    const size_t masks = size_t{1} << middle.size();
    for (size_t mask = 0; mask < masks; ++mask) {
        std::vector<int> live{1};
        for (size_t i = 0; i < middle.size(); ++i) {
            if (mask & (size_t{1} << i)) live.push_back(middle[i]);
        }
        live.push_back(k - 1);

        std::vector<const std::vector<std::pair<Lattice, Lattice>>*> lists;
        bool feasible = true;
        for (size_t i = 0; i + 1 < live.size(); ++i) {
            const auto& l = window(live[i], live[i + 1]);
            if (l.empty()) {
                feasible = false;
                break;
            }
            lists.push_back(&l);
        }
        if (!feasible) continue;

        CoarseEncoding e = CoarseEncoding::empty(k);
        for (int j : live) e.C[static_cast<size_t>(j - 1)] = pairs[static_cast<size_t>(j - 1)];
        e.B[0] = *B1;
        e.A[static_cast<size_t>(k - 2)] = *Ak;

        std::vector<size_t> pick(lists.size(), 0);
        while (true) {
            for (size_t i = 0; i < lists.size(); ++i) {
                const auto& [a, b] = (*lists[i])[pick[i]];
                e.A[static_cast<size_t>(live[i] - 1)] = a;
                e.B[static_cast<size_t>(live[i + 1] - 1)] = b;
            }
            if (!visit(e)) return Generation::Stopped;
            size_t i = lists.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++pick[i] < lists[i]->size()) {
                    done = false;
                    break;
                }
                pick[i] = 0;
            }
            if (done) break;
        }
    }
    return Generation::Completed;
}

std::vector<CoarseEncoding> generate_query_encodings(const Curve& sigma, const Grids& grids,
                                                     const SegmentOracle& oracle) {
    std::vector<CoarseEncoding> out;
    for_each_query_encoding(sigma, grids, oracle, [&](const CoarseEncoding& e) {
        out.push_back(e);
        return true;
    });
    return out;
}

} // namespace fann
