#include "fann/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "fann/frechet.hpp"
#include "fann/io.hpp"
#include "fann/reduction.hpp"

namespace fann::acceptance {

namespace {

using Rng = std::mt19937_64;

constexpr double kTol = 1e-8;

std::uint64_t suite_seed(std::uint64_t seed, int id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double uni(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uni_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Point rand_point(Rng& rng, int d, double lo, double hi) {
    Point p(d);
    for (auto& x : p) x = uni(rng, lo, hi);
    return p;
}

// Uniform in the ball of radius r.
Point rand_in_ball(Rng& rng, int d, double r) {
    std::normal_distribution<double> g;
    Point p(d);
    for (auto& x : p) x = g(rng);
    double n = norm(p);
    double s = r * std::pow(uni(rng, 0.0, 1.0), 1.0 / d) / (n > 0 ? n : 1.0);
    return scaled(p, s);
}

Point rand_in_box(Rng& rng, const Box& b) {
    Point p(b.lo.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = uni(rng, b.lo[i], b.hi[i]);
    return p;
}

Curve random_walk(Rng& rng, int d, int m, double spread) {
    Curve c;
    Point p = rand_point(rng, d, -spread, spread);
    for (int j = 0; j < m; ++j) {
        c.push_back(p);
        p = add(p, rand_point(rng, d, -1.0, 1.0));
    }
    return c;
}

Corpus random_corpus(Rng& rng, int d, int n, int m) {
    std::vector<std::string> ids;
    std::vector<Curve> curves;
    for (int i = 0; i < n; ++i) {
        ids.push_back("c" + std::to_string(i));
        curves.push_back(random_walk(rng, d, m, 3.0));
    }
    return make_corpus(std::move(ids), std::move(curves));
}

// Point at arc-length fraction f of the curve.
Point along(const Curve& c, double f) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < c.size(); ++i) total += dist(c[i], c[i + 1]);
    if (total == 0.0) return c.front();
    double want = f * total;
    for (size_t i = 0; i + 1 < c.size(); ++i) {
        double l = dist(c[i], c[i + 1]);
        if (want <= l && l > 0.0) return lerp(c[i], c[i + 1], want / l);
        want -= l;
    }
    return c.back();
}

// k-vertex curve whose exact distance to tau is at most limit.
std::optional<Curve> plant_near(Rng& rng, const Curve& tau, int k, double jitter, double limit) {
    const int d = static_cast<int>(tau.front().size());
    for (int attempt = 0; attempt < 40; ++attempt) {
        double jj = jitter * (1.0 - attempt / 40.0);
        std::vector<double> f{0.0, 1.0};
        for (int j = 0; j < k - 2; ++j) f.push_back(uni(rng, 0.0, 1.0));
        std::sort(f.begin(), f.end());
        Curve s;
        for (double x : f) s.push_back(add(along(tau, x), rand_in_ball(rng, d, jj)));
        if (frechet_value(s, tau, kTol) <= limit) return s;
    }
    return std::nullopt;
}

Curve shifted(const Curve& c, double by) {
    Curve out = c;
    for (auto& p : out) p[0] += by;
    return out;
}

double min_distance(const Corpus& corpus, const Curve& s) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : corpus.curves) best = std::min(best, frechet_value(s, t, kTol));
    return best;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Counter {
    size_t checks = 0;
    size_t failures = 0;
    std::string first;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok && failures++ == 0) first = what;
    }
    std::string summary() const {
        std::string s = std::to_string(checks) + " checks, " + std::to_string(failures) + " failures";
        if (failures) s += "; first: " + first;
        return s;
    }
};

struct Shared {
    Corpus micro;
    std::unique_ptr<Index> micro_eager;
    std::unique_ptr<Index> micro_lazy;
};

const Corpus& micro_corpus(Shared& sh) {
    if (sh.micro.curves.empty()) sh.micro = make_corpus({"m0"}, {{{0.0, 0.0}, {1.3, 0.4}}});
    return sh.micro;
}

IndexParams micro_params(BuildMode mode, double budget) {
    IndexParams p;
    p.eps = 0.45;
    p.delta = 1.0;
    p.k = 3;
    p.variant = Variant::ThreeEps;
    p.mode = mode;
    p.budget = budget;
    return p;
}

const Index& micro_eager(Shared& sh, double budget) {
    if (!sh.micro_eager) sh.micro_eager = Index::build(micro_corpus(sh), micro_params(BuildMode::Eager, budget));
    return *sh.micro_eager;
}

const Index& micro_lazy(Shared& sh) {
    if (!sh.micro_lazy) sh.micro_lazy = Index::build(micro_corpus(sh), micro_params(BuildMode::Lazy, 1e8));
    return *sh.micro_lazy;
}

int run_command(const std::string& cmd, std::string* out) {
    FILE* f = popen(cmd.c_str(), "r");
    if (!f) return -1;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, f)) > 0) {
        if (out) out->append(buf, got);
    }
    int status = pclose(f);
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

// ---------------------------------------------------------------------------

std::string canary(const Config& cfg, Counter& ct) {
    struct Case {
        Curve a, b;
        double value;
    };
    std::vector<Case> cases{
        {{{0, 0}, {1, 0.7}, {2, 0}}, {{0, 0}, {2, 0}}, 0.7},
        {{{0, 0}, {1, 0.3}, {2, 0}}, {{0, 0}, {2, 0}}, 0.3},
        {{{0, 0}, {4, 0}}, {{0, 0}, {3, 0}, {1, 0}, {4, 0}}, 1.0},
        {{{0, 0, 0}, {1, 1, 1}, {2, 0, 0}}, {{0, 0, 0}, {2, 0, 0}}, std::sqrt(2.0)},
    };
    for (const auto& c : cases) {
        double v = frechet_value(c.a, c.b, 1e-7 * cfg.tol_scale);
        ct.expect(std::fabs(v - c.value) <= 1e-6, "value " + fmt("%.9g", v) + " vs " + fmt("%.9g", c.value));
    }
    return "";
}

void planted_family(Rng& rng, int count, const std::function<void(const Corpus&, const Curve&, bool)>& visit) {
    int done = 0;
    while (done < count) {
        int n = uni_int(rng, 1, 3);
        int m = uni_int(rng, 2, 4);
        Corpus corpus = random_corpus(rng, 2, n, m);
        size_t j = static_cast<size_t>(uni_int(rng, 0, n - 1));
        auto s = plant_near(rng, corpus.curves[j], 3, 0.35, 0.85);
        if (!s) continue;
        bool positive = done % 2 == 0;
        if (positive) {
            visit(corpus, *s, true);
        } else {
            Curve far = shifted(*s, 10.0);
            if (min_distance(corpus, far) <= 1.05) continue;
            visit(corpus, far, false);
        }
        ++done;
    }
}

std::string ann_variant(Variant variant, std::uint64_t seed, double kappa, Counter& ct) {
    Rng rng(seed);
    IndexParams params;
    params.eps = 0.4;
    params.delta = 1.0;
    params.k = 3;
    params.variant = variant;
    size_t yes = 0, no = 0;
    double worst = 0.0;
    const double bound = (kappa + 24.0 * params.eps) * params.delta + 1e-6;
    planted_family(rng, 200, [&](const Corpus& corpus, const Curve& s, bool positive) {
        auto index = Index::build(corpus, params);
        QueryAnswer a = index->query(s);
        if (positive) {
            ct.expect(a.found, "planted query answered no");
            if (a.found) {
                double v = frechet_value(s, corpus.curves[a.index], kTol);
                worst = std::max(worst, v);
                ct.expect(v <= bound, "answer at distance " + fmt("%.6g", v));
                ++yes;
            }
        } else {
            ct.expect(!a.found, "far query answered a curve");
            if (!a.found) ++no;
        }
    });
    return std::to_string(yes) + " positives, " + std::to_string(no) + " negatives, worst distance " +
           fmt("%.4f", worst) + " (bound " + fmt("%.2f", bound) + ")";
}

std::string sigma0_check(std::uint64_t seed, Counter& ct) {
    Rng rng(seed);
    IndexParams params;
    params.eps = 0.4;
    params.variant = Variant::ThreeEps;
    const double bound = (2.0 + 12.0 * params.eps) * params.delta + 1e-6;
    int done = 0;
    while (done < 100) {
        Corpus corpus = random_corpus(rng, 2, uni_int(rng, 1, 3), uni_int(rng, 2, 4));
        size_t j = static_cast<size_t>(uni_int(rng, 0, static_cast<int>(corpus.size()) - 1));
        auto s = plant_near(rng, corpus.curves[j], 3, 0.35, 0.85);
        if (!s) continue;
        ++done;
        auto index = Index::build(corpus, params);
        auto s0 = static_cast<const ThreeEpsIndex&>(*index).build_sigma0(*s);
        ct.expect(s0.has_value(), "no cell-centre curve for a planted query");
        if (s0) ct.expect(frechet_decide(*s, s0->curve, bound), "cell-centre curve too far");
    }
    return "100 planted queries";
}

std::string segment_contract(std::uint64_t seed, Counter& ct) {
    Rng rng(seed);
    const double eps = 0.4, delta = 1.0;
    const double lambda = 11.0 * eps * delta;
    size_t cells = 0, nulls = 0, nos = 0, fallbacks = 0;
    int pairs = 0;
    for (int d : {2, 3, 4}) {
        const int quota = d == 4 ? 166 : 167;
        const int per_instance = d == 2 ? 8 : 24;
        int made = 0;
        while (made < quota) {
            Corpus corpus = random_corpus(rng, d, 1, 2);
            Grids grids = build_grids(corpus.curves, eps, delta);
            CanonicalStructure canon(corpus.curves, grids, CanonicalMode::Lazy);
            std::vector<Point> verts = corpus.curves.front();
            for (int s = 0; s < per_instance && made < quota; ++s, ++made) {
                Point p, q;
                if (s % 6 == 5) {
                    p = rand_point(rng, d, -8.0, 8.0);
                    q = rand_point(rng, d, -8.0, 8.0);
                } else {
                    p = add(verts[uni_int(rng, 0, 1)], rand_in_ball(rng, d, 2.0 * delta));
                    q = add(verts[uni_int(rng, 0, 1)], rand_in_ball(rng, d, 2.0 * delta));
                }
                SegAnswer b = brute_segment_query(grids.g1, p, q);
                ct.expect(b.kind != SegAnswer::Kind::NoForAnn && answer_valid(grids.g1, p, q, lambda, b),
                          "exact scan answer invalid");
                SegAnswer c = canon.query(p, q);
                if (c.kind == SegAnswer::Kind::NoForAnn) {
                    ++nos;
                    double dp = std::numeric_limits<double>::infinity(), dq = dp;
                    for (const auto& l : canon.lines()) {
                        dp = std::min(dp, dist_point_line(p, l.origin, l.dir));
                        dq = std::min(dq, dist_point_line(q, l.origin, l.dir));
                    }
                    ct.expect(dp > eps * delta || dq > eps * delta, "'no' without distance evidence");
                } else {
                    (c.is_cell() ? cells : nulls)++;
                    ct.expect(answer_valid(grids.g1, p, q, lambda, c), "canonical answer invalid in d=" +
                                                                         std::to_string(d));
                }
                ++pairs;
            }
            fallbacks += canon.fallbacks();
        }
    }
    return std::to_string(pairs) + " segments: " + std::to_string(cells) + " cell, " + std::to_string(nulls) +
           " null, " + std::to_string(nos) + " no; " + std::to_string(fallbacks) + " exact-scan fallbacks";
}

std::string canonical_properties(std::uint64_t seed, Counter& ct) {
    Rng rng(seed);
    const double eps = 0.45, delta = 1.0;
    const double ed = eps * delta;
    const double guard = 1e-6 * delta;
    size_t nonempty = 0, hits = 0;
    for (int inst = 0; inst < 20; ++inst) {
        Corpus corpus = random_corpus(rng, 2, 1, 2);
        Grids grids = build_grids(corpus.curves, eps, delta);
        CanonicalStructure s(corpus.curves, grids, CanonicalMode::Eager);
        const auto& g3 = grids.g3.cells();
        const auto& g1 = grids.g1.cells();
        for (int trial = 0; trial < 100; ++trial) {
            size_t li = 0, piece = 0;
            Lattice gamma;
            std::vector<Lattice> cset;
            double t = 0.0;
            // Prefer triples whose cell set is non-empty; give up after a few tries.
            for (int tries = 0; tries < 30; ++tries) {
                li = static_cast<size_t>(uni_int(rng, 0, static_cast<int>(s.lines().size()) - 1));
                const Line& line = s.lines()[li];
                const Curve& c = corpus.curves[static_cast<size_t>(line.curve)];
                double a = line.param(c.front()), b = line.param(c.back());
                t = uni(rng, std::min(a, b) - 2.0 * delta, std::max(a, b) + 2.0 * delta);
                gamma = g3[static_cast<size_t>(uni_int(rng, 0, static_cast<int>(g3.size()) - 1))];
                piece = s.piece_for(li, gamma, t);
                cset = s.candidate_cells(li, gamma, piece);
                if (!cset.empty()) break;
            }
            const Line& line = s.lines()[li];
            Interval xi = s.piece_interval(li, gamma, piece);
            double lo = std::isfinite(xi.lo) ? xi.lo : t - 3.0 * delta;
            double hi = std::isfinite(xi.hi) ? xi.hi : t + 3.0 * delta;
            if (hi - lo <= 2.0 * guard) continue;
            double tx = uni(rng, lo + guard, hi - guard);
            Point off = rand_in_ball(rng, 1, 2.0 * ed * (1.0 - 1e-6));
            Point x = line.at(tx);
            auto basis = orthogonal_basis(line.dir);
            x = add(x, scaled(basis.front(), off[0]));
            Point y = rand_in_box(rng, grids.g3.box(gamma));
            if (!cset.empty()) ++nonempty;

            // Every G1 cell met by xy belongs to the set.
            for (const auto& c : g1) {
                if (!segment_box_clip(x, y, grids.g1.box(c))) continue;
                ++hits;
                ct.expect(std::binary_search(cset.begin(), cset.end(), c), "hit cell outside the candidate set");
            }
            // Every candidate comes within 5 eps delta of xy.
            for (const auto& c : cset) {
                ct.expect(dist_segment_box(x, y, grids.g1.box(c)) <= 5.0 * ed + 1e-9, "candidate too far");
            }
            if (cset.empty()) continue;
            auto chosen = s.chosen_cell(li, gamma, piece);
            ct.expect(chosen && std::binary_search(cset.begin(), cset.end(), *chosen), "chosen cell not a candidate");
            if (!chosen) continue;
            auto first = box_hit_interval(x, y, grids.g1.box(*chosen), 11.0 * ed);
            ct.expect(first.has_value(), "chosen cell fattening missed");
            if (!first) continue;
            for (const auto& c : cset) {
                auto in = segment_box_clip(x, y, grids.g1.box(c));
                if (in) ct.expect(in->lo >= first->lo - 1e-9, "candidate entered before the chosen fattening");
            }
        }
    }
    return "2000 samples, " + std::to_string(nonempty) + " with candidates, " + std::to_string(hits) +
           " cell crossings";
}

std::string eager_lazy(const Config& cfg, std::uint64_t seed, Shared& sh, Counter& ct) {
    Rng rng(seed);
    const Index& eager = micro_eager(sh, cfg.budget);
    const Index& lazy = micro_lazy(sh);
    const Corpus& corpus = eager.corpus();
    const double eps = eager.params().eps;
    const double bound = (3.0 + 24.0 * eps) + 1e-6;
    size_t found = 0;
    for (int i = 0; i < 50; ++i) {
        Curve s;
        bool planted = i % 5 != 4;
        if (planted) {
            auto p = plant_near(rng, corpus.curves[0], 3, 0.6, 0.85);
            s = p ? *p : corpus.curves[0];
            if (!p) s.insert(s.begin() + 1, midpoint(s[0], s[1]));
        } else {
            s = {rand_point(rng, 2, -4, 4), rand_point(rng, 2, -4, 4), rand_point(rng, 2, -4, 4)};
        }
        QueryAnswer a = eager.query(s), b = lazy.query(s);
        ct.expect(a == b, "eager and lazy answers differ");
        for (const QueryAnswer& ans : {a, b}) {
            if (ans.found) ct.expect(frechet_value(s, corpus.curves[ans.index], kTol) <= bound, "answer too far");
            else ct.expect(min_distance(corpus, s) > 1.0, "no answer although a curve is within delta");
        }
        if (a.found) ++found;
    }
    std::string out = std::to_string(static_cast<const ThreeEpsIndex&>(eager).table_size()) + " table entries; " +
                      std::to_string(found) + "/50 answered with a curve";

    // One-eps eager on real grids is refused; on tiny explicit grids it is built and compared.
    IndexParams p1;
    p1.eps = 0.4;
    p1.variant = Variant::OneEps;
    p1.mode = BuildMode::Eager;
    p1.budget = cfg.budget;
    Corpus sub = make_corpus({"s0"}, {{{0.0, 0.0}, {0.5, 0.0}}});
    bool refused = false;
    try {
        Index::build(sub, p1);
    } catch (const Error& e) {
        refused = e.code() == Errc::FeasibilityRefused;
    }
    ct.expect(refused, "one-eps eager build on real grids was not refused");
    if (!cfg.cli.empty()) {
        std::string path = "/tmp/fann_sub_" + std::to_string(seed) + ".jsonl";
        if (FILE* f = std::fopen(path.c_str(), "w")) {
            std::fputs("{\"id\":\"s0\",\"points\":[[0,0],[0.5,0]]}\n", f);
            std::fclose(f);
        }
        int rc = run_command(cfg.cli + " build " + path + " --variant one-eps --mode eager --eps 0.4 --delta 1 --out " +
                                 path + ".idx >/dev/null 2>&1",
                             nullptr);
        std::remove(path.c_str());
        ct.expect(rc == 3, "cli exit code " + std::to_string(rc) + " for a refused build");
    }

    Grids tiny;
    tiny.eps = 0.4;
    tiny.delta = 1.0;
    tiny.dim = 2;
    double w = grid_width(0.4, 1.0, 2);
    std::vector<Lattice> cells{{0, 0}, {1, 0}, {2, 0}};
    tiny.g1 = GridSet::explicit_cells(cells, w, 2);
    tiny.g2 = GridSet::explicit_cells(cells, w, 2);
    tiny.g3 = GridSet::explicit_cells(cells, w, 2);
    Corpus tc = make_corpus({"t0", "t1"}, {{{0.05, 0.05}, {0.6, 0.1}}, {{0.1, 0.1}, {0.2, 0.15}}});
    auto e1 = Index::build_with_grids(tc, p1, tiny);
    p1.mode = BuildMode::Lazy;
    auto l1 = Index::build_with_grids(tc, p1, tiny);
    for (int i = 0; i < 20; ++i) {
        Curve s{rand_point(rng, 2, -0.2, 0.9), rand_point(rng, 2, -0.2, 0.9), rand_point(rng, 2, -0.2, 0.9)};
        ct.expect(e1->query(s) == l1->query(s), "one-eps eager and lazy answers differ");
    }
    out += "; one-eps eager refused on real grids, " + std::to_string(e1->table_entries().size()) +
           " keys on explicit grids";
    return out;
}

std::vector<Point> resample(const Curve& c, double h) {
    Curve out{c.front()};
    for (size_t i = 0; i + 1 < c.size(); ++i) {
        int pieces = std::max(1, static_cast<int>(std::ceil(dist(c[i], c[i + 1]) / h)));
        for (int j = 1; j <= pieces; ++j) out.push_back(lerp(c[i], c[i + 1], static_cast<double>(j) / pieces));
    }
    return out;
}

bool dense_matchable(const Point& x, const Point& y, const Curve& c, double r) {
    const int steps = 1000;
    for (int i = 0; i <= steps; ++i) {
        Point a = lerp(x, y, static_cast<double>(i) / steps);
        if (dist(a, c.front()) > r) continue;
        for (int j = i; j <= steps; ++j) {
            Point b = lerp(x, y, static_cast<double>(j) / steps);
            if (dist(b, c.back()) > r) continue;
            if (segment_curve_decide(a, b, c, r)) return true;
        }
    }
    return false;
}

std::string frechet_engine(std::uint64_t seed, Counter& ct) {
    Rng rng(seed);
    const double tol = 1e-7;
    for (int i = 0; i < 200; ++i) {
        int d = uni_int(rng, 1, 3);
        Curve a = random_walk(rng, d, uni_int(rng, 2, 5), 1.0);
        Curve b = random_walk(rng, d, uni_int(rng, 2, 5), 1.0);
        double v = frechet_value(a, b, tol);
        ct.expect(!frechet_decide(a, b, v - 2 * tol) && frechet_decide(a, b, v + 2 * tol), "decide and value disagree");
        ct.expect(discrete_frechet(a, b) >= v - tol, "discrete below continuous");
    }
    const double h = 0.05;
    for (int i = 0; i < 100; ++i) {
        int d = uni_int(rng, 1, 3);
        Curve a = random_walk(rng, d, uni_int(rng, 2, 4), 1.0);
        Curve b = random_walk(rng, d, uni_int(rng, 2, 4), 1.0);
        double v = frechet_value(a, b, 1e-9);
        double dv = discrete_frechet(resample(a, h), resample(b, h));
        ct.expect(std::fabs(dv - v) <= h, "resampled discrete distance off by " + fmt("%.4g", dv - v));
    }
    size_t yes = 0;
    for (int i = 0; i < 200; ++i) {
        Point x = rand_point(rng, 2, -2, 2), y = rand_point(rng, 2, -2, 2);
        Curve c = random_walk(rng, 2, uni_int(rng, 2, 4), 1.5);
        double r = uni(rng, 0.3, 2.5);
        bool exact = subsegment_matchable(x, y, c, r);
        double slack = 1e-3 * dist(x, y) + 1e-9;
        if (exact) {
            ++yes;
            ct.expect(dense_matchable(x, y, c, r + slack), "dense search finds no subsegment");
        } else {
            ct.expect(!dense_matchable(x, y, c, r), "dense search finds a subsegment");
        }
    }
    return "200 value pairs, 100 resampled pairs, 200 subsegment cases (" + std::to_string(yes) + " matchable)";
}

// Feasible t in [0,1] with the segment from x toward gamma crossing c, constraints relaxed by eta.
bool t_form(const Point& x, const Box& c, const Box& g, double eta) {
    double lo = 0.0, hi = 1.0;
    auto cut = [&](double a, double b) { // a + b t <= 0
        if (b == 0.0) {
            if (a > 0.0) hi = -1.0;
        } else if (b > 0.0) {
            hi = std::min(hi, -a / b);
        } else {
            lo = std::max(lo, -a / b);
        }
    };
    for (size_t i = 0; i < x.size(); ++i) {
        cut(x[i] - c.hi[i] - eta, g.lo[i] - x[i]);
        cut(c.lo[i] - eta - x[i], x[i] - g.hi[i]);
    }
    return lo <= hi;
}

Box rand_box(Rng& rng, int d, double spread) {
    Box b{Point(d), Point(d)};
    for (int i = 0; i < d; ++i) {
        double c = uni(rng, -spread, spread), w = uni(rng, 0.1, 1.0);
        b.lo[i] = c - w / 2;
        b.hi[i] = c + w / 2;
    }
    return b;
}

std::string f_region(std::uint64_t seed, Counter& ct) {
    Rng rng(seed);
    const double tol = 1e-9;
    size_t members = 0, witnessed = 0, banded = 0;
    for (int i = 0; i < 10000; ++i) {
        int d = uni_int(rng, 2, 3);
        Box c = rand_box(rng, d, 2.0), g = rand_box(rng, d, 2.0);
        Point x = rand_point(rng, d, -4.0, 4.0);
        bool in = f_membership(x, c, g, tol);
        members += in;
        bool witness = false;
        for (int s = 0; s < 32 && !witness; ++s) witness = segment_box_clip(x, rand_in_box(rng, g), c).has_value();
        witnessed += witness;
        ct.expect(!witness || in, "witnessed point reported outside");
        bool outer = t_form(x, c, g, 10 * tol), inner = t_form(x, c, g, -10 * tol);
        if (outer != inner) {
            ++banded;
            continue;
        }
        ct.expect(in == inner, "membership disagrees with the exact parametric test");
    }
    size_t both = 0, samples = 0;
    for (int i = 0; i < 1000; ++i) {
        int d = uni_int(rng, 2, 3);
        Box c = rand_box(rng, d, 2.0), g = rand_box(rng, d, 2.0);
        int axis = uni_int(rng, 0, d - 1);
        double gap = uni(rng, 0.05, 1.0);
        double shift = c.hi[axis] + gap - g.lo[axis];
        g.lo[axis] += shift;
        g.hi[axis] += shift;
        for (int s = 0; s < 50; ++s) {
            Point x = rand_point(rng, d, -5.0, 5.0);
            ++samples;
            if (f_membership(x, g, c) && f_membership(x, c, g)) ++both;
        }
    }
    ct.expect(both == 0, std::to_string(both) + " points in both regions of a disjoint pair");
    return "10000 membership cases (" + std::to_string(members) + " inside, " + std::to_string(witnessed) +
           " witnessed, " + std::to_string(banded) + " in the band); " + std::to_string(samples) +
           " disjoint-pair samples";
}

std::string ladder_check(std::uint64_t seed, Counter& ct) {
    Rng rng(seed);
    IndexParams params;
    params.eps = 0.4;
    params.variant = Variant::ThreeEps;
    const double kappa = 3.0 + 24.0 * params.eps;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        Corpus corpus = random_corpus(rng, 2, uni_int(rng, 1, 3), uni_int(rng, 2, 4));
        Ladder ladder = Ladder::build(corpus, params);
        const Curve& tau = corpus.curves[static_cast<size_t>(uni_int(rng, 0, static_cast<int>(corpus.size()) - 1))];
        Curve s{add(tau.front(), rand_in_ball(rng, 2, 1.0)), add(along(tau, uni(rng, 0.2, 0.8)), rand_in_ball(rng, 2, 1.0)),
                add(tau.back(), rand_in_ball(rng, 2, 1.0))};
        double scale = std::pow(10.0, uni(rng, -1.0, 0.5));
        for (auto& p : s) p = add(tau.front(), scaled(sub(p, tau.front()), scale));
        size_t got = ladder.ann_query(s);
        size_t best = brute_force_nn(corpus, s, kTol);
        double d_opt = frechet_value(s, corpus.curves[best], kTol);
        double d_got = frechet_value(s, corpus.curves[got], kTol);
        double bound = kappa * (1.0 + params.eps) * std::max(d_opt, ladder.scales().front()) + 1e-6;
        worst = std::max(worst, d_got / std::max(d_opt, ladder.scales().front()));
        ct.expect(d_got <= bound, "ladder answer at " + fmt("%.6g", d_got) + " exceeds " + fmt("%.6g", bound));
    }
    return "50 instances, worst ratio " + fmt("%.3f", worst) + " (bound " + fmt("%.2f", kappa * (1.0 + params.eps)) +
           ")";
}

std::vector<Curve> probe_queries(Rng& rng, const Corpus& corpus, int k, int count) {
    std::vector<Curve> out;
    const int d = corpus.dim;
    for (int i = 0; i < count; ++i) {
        const Curve& tau = corpus.curves[static_cast<size_t>(i) % corpus.size()];
        Curve s;
        double f = i % 3 == 2 ? 3.0 : 0.5;
        for (int j = 0; j < k; ++j) s.push_back(add(along(tau, static_cast<double>(j) / (k - 1)), rand_in_ball(rng, d, f)));
        out.push_back(std::move(s));
    }
    return out;
}

Config sub_config(const Config& cfg) {
    Config c = cfg;
    c.cli.clear();
    c.only = {7, 8};
    return c;
}

std::vector<Result> run_selected(const Config& cfg, std::ostream* log, Shared& sh);

std::string determinism_roundtrip(const Config& cfg, std::uint64_t seed, Shared& sh, Counter& ct) {
    Rng rng(seed);
    // Determinism of the report.
    Config sub = sub_config(cfg);
    Shared none;
    std::string r1 = report_json(sub, run_selected(sub, nullptr, none));
    std::string r2 = report_json(sub, run_selected(sub, nullptr, none));
    ct.expect(r1 == r2, "reports differ between identical runs");
    if (!cfg.cli.empty()) {
        std::string cmd = cfg.cli + " selftest --only 7,8 --seed " + std::to_string(cfg.seed) + " 2>/dev/null";
        std::string o1, o2;
        int a = run_command(cmd, &o1), b = run_command(cmd, &o2);
        ct.expect(a == 0 && b == 0 && !o1.empty() && o1 == o2, "cli selftest reports differ");
    }

    // Round trips.
    size_t compared = 0;
    auto roundtrip = [&](const Index& index, int k, const std::string& what) {
        auto loaded = index_from_string(index_to_string(index));
        for (const auto& q : probe_queries(rng, index.corpus(), k, 50)) {
            ct.expect(index.query(q) == loaded->query(q), what + " answer changed after reload");
            ++compared;
        }
    };
    for (Variant v : {Variant::OneEps, Variant::ThreeEps}) {
        IndexParams p;
        p.variant = v;
        Corpus corpus = random_corpus(rng, 2, 3, 3);
        roundtrip(*Index::build(corpus, p), p.k, std::string(to_string(v)) + " lazy");
    }
    roundtrip(micro_eager(sh, cfg.budget), 3, "three-eps eager");

    IndexParams p1;
    p1.variant = Variant::OneEps;
    p1.mode = BuildMode::Eager;
    Grids tiny;
    tiny.eps = p1.eps;
    tiny.delta = 1.0;
    tiny.dim = 2;
    std::vector<Lattice> cells{{0, 0}, {1, 0}, {1, 1}};
    double w = grid_width(p1.eps, 1.0, 2);
    tiny.g1 = tiny.g2 = tiny.g3 = GridSet::explicit_cells(cells, w, 2);
    Corpus tc = make_corpus({"t0"}, {{{0.05, 0.05}, {0.4, 0.4}}});
    roundtrip(*Index::build_with_grids(tc, p1, tiny), 3, "one-eps eager");
    return "report bytes stable; " + std::to_string(compared) + " answers compared after reload";
}

struct Suite {
    int id;
    const char* name;
    double budget;
};

const std::vector<Suite>& suites() {
    static const std::vector<Suite> s{
        {0, "tolerance canary", 5},
        {1, "one-eps soundness and completeness", 180},
        {2, "three-eps soundness and completeness", 60},
        {3, "cell-centre curve distance", 30},
        {4, "segment query contract", 120},
        {5, "canonical segment properties", 120},
        {6, "eager and lazy equivalence", 240},
        {7, "frechet engine", 60},
        {8, "f-region geometry", 30},
        {9, "scale ladder", 120},
        {10, "determinism and round trip", 240},
    };
    return s;
}

std::vector<Result> run_selected(const Config& cfg, std::ostream* log, Shared& sh) {
    std::vector<Result> out;
    for (const auto& s : suites()) {
        if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), s.id) == cfg.only.end()) continue;
        Result r;
        r.id = s.id;
        r.name = s.name;
        r.budget_seconds = s.budget;
        Counter ct;
        std::uint64_t seed = suite_seed(cfg.seed, s.id);
        auto t0 = std::chrono::steady_clock::now();
        try {
            switch (s.id) {
            case 0: r.detail = canary(cfg, ct); break;
            case 1: r.detail = ann_variant(Variant::OneEps, seed, 1.0, ct); break;
            case 2: r.detail = ann_variant(Variant::ThreeEps, seed, 3.0, ct); break;
            case 3: r.detail = sigma0_check(seed, ct); break;
            case 4: r.detail = segment_contract(seed, ct); break;
            case 5: r.detail = canonical_properties(seed, ct); break;
            case 6: r.detail = eager_lazy(cfg, seed, sh, ct); break;
            case 7: r.detail = frechet_engine(seed, ct); break;
            case 8: r.detail = f_region(seed, ct); break;
            case 9: r.detail = ladder_check(seed, ct); break;
            case 10: r.detail = determinism_roundtrip(cfg, seed, sh, ct); break;
            }
        } catch (const std::exception& e) {
            ct.expect(false, std::string("exception: ") + e.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = r.seconds <= r.budget_seconds;
        r.pass = ct.failures == 0 && ct.checks > 0 && in_time;
        r.detail = (r.detail.empty() ? "" : r.detail + "; ") + ct.summary();
        if (!in_time) r.detail += "; over the time budget";
        if (log) {
            *log << (r.pass ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << " (" << fmt("%.1f", r.seconds)
                 << " s of " << fmt("%.0f", r.budget_seconds) << ") " << r.detail << "\n";
            log->flush();
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace

std::vector<Result> run(const Config& config, std::ostream* log) {
    Shared sh;
    return run_selected(config, log, sh);
}

std::string report_json(const Config& config, const std::vector<Result>& results) {
    nlohmann::json j;
    j["seed"] = config.seed;
    j["tol_scale"] = config.tol_scale;
    j["passed"] = all_passed(results);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    j["suites"] = std::move(arr);
    return j.dump(2) + "\n";
}

bool all_passed(const std::vector<Result>& results) {
    return std::all_of(results.begin(), results.end(), [](const Result& r) { return r.pass; });
}

} // namespace fann::acceptance
