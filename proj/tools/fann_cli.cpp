// fann: build and query approximate nearest-neighbour indexes over polygonal curves.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fann/acceptance.hpp"
#include "fann/frechet.hpp"
#include "fann/io.hpp"
#include "fann/reduction.hpp"

using namespace fann;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 2;
constexpr int kRefused = 3;
constexpr int kArity = 4;

struct Options {
    double eps = 0.4;
    std::optional<double> delta;
    int k = 3;
    std::string variant = "one-eps";
    std::string mode = "lazy";
    std::string oracle = "brute";
    std::uint64_t seed = 20240611;
    double budget = 1e8;
    bool verify = false;
    std::string out;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IndexParams params_of(const Options& o) {
    IndexParams p;
    p.eps = o.eps;
    p.delta = o.delta.value_or(1.0);
    p.k = o.k;
    p.variant = parse_variant(o.variant);
    p.mode = parse_mode(o.mode);
    p.oracle = parse_oracle(o.oracle);
    p.budget = o.budget;
    if (const char* env = std::getenv("FANN_BUDGET")) p.budget = parse_decimal(env);
    validate(p);
    return p;
}

void emit(const Options& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw Error(Errc::ParseError, "cannot write " + o.out);
    f << text;
}

// Cell count of a grid set, or an estimate when materializing it would be expensive.
json grid_count(const GridSet& g, size_t centers) {
    if (g.is_explicit()) return g.cells().size();
    const int d = g.dim();
    const double r = g.radius() + g.width() * std::sqrt(static_cast<double>(d));
    const double ball = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
    const double est = static_cast<double>(centers) * ball / std::pow(g.width(), d);
    if (est <= 2e6) return g.cells().size();
    return "~" + format_decimal(std::round(est));
}

json index_stats(const Index& index) {
    const Grids& g = index.grids();
    size_t verts = 0;
    for (const auto& c : index.corpus().curves) verts += c.size();
    json j{{"delta", format_decimal(g.delta)},
           {"g1", g.g1.cells().size()},
           {"g2", grid_count(g.g2, verts)},
           {"g3", grid_count(g.g3, verts)}};
    if (auto* t = dynamic_cast<const ThreeEpsIndex*>(&index)) j["keys"] = t->table_size();
    else j["keys"] = static_cast<const OneEpsIndex&>(index).trie().size();
    return j;
}

int cmd_ingest(const std::string& path, const Options& o) {
    Corpus c = load_corpus(path);
    size_t m = c.curves.front().size();
    json summary{{"curves", c.size()}, {"dim", c.dim}, {"vertices_per_curve", m}, {"digest", c.digest()}};
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        for (size_t i = 0; i < c.size(); ++i) f << json{{"id", c.ids[i]}, {"points", c.curves[i]}}.dump() << "\n";
    }
    std::cout << summary.dump() << "\n";
    return kOk;
}

int cmd_build(const std::string& path, const Options& o) {
    if (o.out.empty()) throw Error(Errc::BadParams, "--out is required");
    IndexParams p = params_of(o);
    Corpus c = load_corpus(path);
    auto t0 = std::chrono::steady_clock::now();
    json report;
    if (o.delta) {
        auto index = Index::build(c, p);
        save_index(*index, o.out);
        report = index_stats(*index);
    } else {
        Ladder ladder = Ladder::build(c, p);
        save_ladder(ladder, o.out);
        json scales = json::array();
        for (size_t i = 0; i < ladder.scales().size(); ++i) scales.push_back(index_stats(ladder.index_at(i)));
        report["scales"] = std::move(scales);
    }
    report["variant"] = to_string(p.variant);
    report["mode"] = to_string(p.mode);
    report["seconds"] = seconds_since(t0);
    std::cout << report.dump() << "\n";
    return kOk;
}

Curve pad_query(Curve q, int k) {
    if (q.empty()) throw Error(Errc::ParseError, "query without vertices");
    if (static_cast<int>(q.size()) > k) {
        throw Error(Errc::ArityMismatch, "query has " + std::to_string(q.size()) + " vertices, k is " + std::to_string(k));
    }
    while (static_cast<int>(q.size()) < k) q.push_back(q.back());
    return q;
}

double kappa_of(const IndexParams& p) {
    return (p.variant == Variant::OneEps ? 1.0 : 3.0) + 24.0 * p.eps;
}

int cmd_query(const std::string& index_path, const std::string& query_path, const Options& o) {
    Dataset queries = read_dataset(query_path);
    std::ostringstream out;
    auto report = [&](const std::string& id, const Corpus& corpus, std::optional<size_t> ans, const Curve& q,
                      double bound, double no_bound) {
        json line{{"id", id}, {"answer", ans ? json(corpus.ids[*ans]) : json("no")}};
        if (o.verify) {
            if (ans) {
                double d = frechet_value(q, corpus.curves[*ans]);
                line["distance"] = d;
                line["bound"] = bound;
                line["ok"] = d <= bound + 1e-6;
            } else {
                size_t best = brute_force_nn(corpus, q);
                double d = frechet_value(q, corpus.curves[best]);
                line["distance"] = d;
                line["bound"] = no_bound;
                line["ok"] = d > no_bound;
            }
        }
        out << line.dump() << "\n";
    };
    if (is_ladder_file(index_path)) {
        Ladder ladder = load_ladder(index_path);
        const IndexParams& p = ladder.params();
        for (size_t i = 0; i < queries.curves.size(); ++i) {
            Curve q = pad_query(queries.curves[i], p.k);
            size_t ans = ladder.ann_query(q);
            double bound = 0.0;
            if (o.verify) {
                double d_opt = frechet_value(q, ladder.corpus().curves[brute_force_nn(ladder.corpus(), q)]);
                bound = kappa_of(p) * (1.0 + p.eps) * std::max(d_opt, ladder.scales().front());
            }
            report(queries.ids[i], ladder.corpus(), ans, q, bound, 0.0);
        }
    } else {
        auto index = load_index(index_path);
        const IndexParams& p = index->params();
        for (size_t i = 0; i < queries.curves.size(); ++i) {
            Curve q = pad_query(queries.curves[i], p.k);
            QueryAnswer a = index->query(q);
            report(queries.ids[i], index->corpus(), a.found ? std::optional<size_t>(a.index) : std::nullopt, q,
                   kappa_of(p) * p.delta, p.delta);
        }
    }
    emit(o, out.str());
    return kOk;
}

int cmd_bench(const std::string& path, int count, const Options& o) {
    IndexParams p = params_of(o);
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Corpus c;
    if (path.empty()) {
        std::vector<std::string> ids;
        std::vector<Curve> curves;
        for (int i = 0; i < 3; ++i) {
            Curve cv{{3 * u(rng), 3 * u(rng)}};
            for (int j = 1; j < 3; ++j) cv.push_back({cv.back()[0] + u(rng), cv.back()[1] + u(rng)});
            ids.push_back("b" + std::to_string(i));
            curves.push_back(cv);
        }
        c = make_corpus(ids, curves);
    } else {
        c = load_corpus(path);
    }
    auto t0 = std::chrono::steady_clock::now();
    auto index = Index::build(c, p);
    double build = seconds_since(t0);
    double total = 0.0, worst = 0.0;
    size_t found = 0;
    for (int i = 0; i < count; ++i) {
        const Curve& tau = c.curves[static_cast<size_t>(i) % c.size()];
        Curve q;
        for (int j = 0; j < p.k; ++j) {
            Point x = lerp(tau.front(), tau.back(), static_cast<double>(j) / (p.k - 1));
            for (auto& v : x) v += 0.3 * u(rng);
            q.push_back(x);
        }
        auto t1 = std::chrono::steady_clock::now();
        found += index->query(q).found;
        double s = seconds_since(t1);
        total += s;
        worst = std::max(worst, s);
    }
    json report = index_stats(*index);
    report["build_seconds"] = build;
    report["queries"] = count;
    report["answered"] = found;
    report["mean_query_seconds"] = count ? total / count : 0.0;
    report["max_query_seconds"] = worst;
    emit(o, report.dump(2) + "\n");
    return kOk;
}

int cmd_selftest(const Options& o, double tol_scale, const std::vector<int>& only) {
    acceptance::Config cfg;
    cfg.seed = o.seed;
    cfg.tol_scale = tol_scale;
    cfg.budget = o.budget;
    if (const char* env = std::getenv("FANN_BUDGET")) cfg.budget = parse_decimal(env);
    cfg.only = only;
    std::error_code ec;
    auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (!ec) cfg.cli = self.string();
    auto results = acceptance::run(cfg, &std::cerr);
    emit(o, acceptance::report_json(cfg, results));
    return acceptance::all_passed(results) ? kOk : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Approximate nearest-neighbour search over polygonal curves under the Frechet distance"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--eps", o.eps, "Approximation parameter in (0, 0.5)");
        sub->add_option("--delta", o.delta, "Query radius; omitted builds a scale ladder");
        sub->add_option("--k", o.k, "Query vertex count");
        sub->add_option("--variant", o.variant, "one-eps or three-eps");
        sub->add_option("--mode", o.mode, "lazy or eager");
        sub->add_option("--oracle", o.oracle, "brute or canonical");
        sub->add_option("--seed", o.seed, "Random seed");
        sub->add_option("--budget", o.budget, "Curve-test budget for eager builds");
        sub->add_option("--out", o.out, "Output path");
    };

    std::string data, index_path, query_path;
    auto* ingest = app.add_subcommand("ingest", "Parse a dataset and print a summary");
    ingest->add_option("dataset", data, "JSON lines or CSV file")->required();
    common(ingest);

    auto* build = app.add_subcommand("build", "Build an index file");
    build->add_option("dataset", data, "JSON lines or CSV file")->required();
    common(build);

    auto* query = app.add_subcommand("query", "Answer queries against an index file");
    query->add_option("index", index_path, "Index or ladder file")->required();
    query->add_option("queries", query_path, "Query curves")->required();
    query->add_flag("--verify", o.verify, "Check each answer against exact distances");
    common(query);

    int count = 100;
    auto* bench = app.add_subcommand("bench", "Time a build and a batch of queries");
    bench->add_option("dataset", data, "Optional dataset; a random one is generated otherwise");
    bench->add_option("--queries", count, "Number of queries");
    common(bench);

    double tol_scale = 1.0;
    std::vector<int> only;
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance suites");
    selftest->add_option("--tol-scale", tol_scale, "Multiplier on the bisection tolerance");
    selftest->add_option("--only", only, "Suite ids to run")->delimiter(',');
    common(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kBadInput;
    }

    try {
        if (*ingest) return cmd_ingest(data, o);
        if (*build) return cmd_build(data, o);
        if (*query) return cmd_query(index_path, query_path, o);
        if (*bench) return cmd_bench(data, count, o);
        if (*selftest) return cmd_selftest(o, tol_scale, only);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == Errc::FeasibilityRefused) return kRefused;
        if (e.code() == Errc::ArityMismatch) return kArity;
        return kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadInput;
    }
    return kOk;
}
