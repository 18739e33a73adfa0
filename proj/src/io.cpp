#include "fann/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fann {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void parse_fail(size_t line, const std::string& what) {
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::ParseError, "cannot write " + path);
    out << text;
}

json lattice_json(const Lattice& l) { return json(l); }

Lattice lattice_from(const json& j) { return j.get<Lattice>(); }

json gridset_json(const GridSet& g, bool with_cells) {
    json j;
    if (g.is_explicit()) {
        j["kind"] = "cells";
        with_cells = true;
    } else {
        j["kind"] = "balls";
        j["radius"] = format_decimal(g.radius());
    }
    if (with_cells) {
        json cells = json::array();
        for (const auto& c : g.cells()) cells.push_back(lattice_json(c));
        j["cells"] = std::move(cells);
    }
    return j;
}

GridSet gridset_from(const json& j, const std::vector<Point>& centers, double width, int dim) {
    if (j.at("kind") == "cells") {
        std::vector<Lattice> cells;
        for (const auto& c : j.at("cells")) cells.push_back(lattice_from(c));
        return GridSet::explicit_cells(std::move(cells), width, dim);
    }
    GridSet g = GridSet::ball_union(centers, parse_decimal(j.at("radius").get<std::string>()), width);
    if (j.contains("cells")) {
        std::vector<Lattice> stored;
        for (const auto& c : j.at("cells")) stored.push_back(lattice_from(c));
        if (stored != g.cells()) throw Error(Errc::StructureMismatch, "stored grid cells differ from rebuilt grid");
    }
    return g;
}

json params_json(const IndexParams& p) {
    return json{{"eps", format_decimal(p.eps)},   {"delta", format_decimal(p.delta)},
                {"k", p.k},                       {"variant", to_string(p.variant)},
                {"mode", to_string(p.mode)},      {"oracle", to_string(p.oracle)},
                {"budget", format_decimal(p.budget)}};
}

IndexParams params_from(const json& j) {
    IndexParams p;
    p.eps = parse_decimal(j.at("eps").get<std::string>());
    p.delta = parse_decimal(j.at("delta").get<std::string>());
    p.k = j.at("k").get<int>();
    p.variant = parse_variant(j.at("variant").get<std::string>());
    p.mode = parse_mode(j.at("mode").get<std::string>());
    p.oracle = parse_oracle(j.at("oracle").get<std::string>());
    p.budget = parse_decimal(j.at("budget").get<std::string>());
    return p;
}

json corpus_json(const Corpus& c) {
    json curves = json::array();
    for (const auto& curve : c.curves) curves.push_back(curve);
    return json{{"digest", c.digest()}, {"dim", c.dim}, {"ids", c.ids}, {"curves", std::move(curves)}};
}

Corpus corpus_from(const json& j) {
    Corpus c = make_corpus(j.at("ids").get<std::vector<std::string>>(), j.at("curves").get<std::vector<Curve>>());
    if (c.digest() != j.at("digest").get<std::string>()) {
        throw Error(Errc::StructureMismatch, "corpus digest does not match");
    }
    return c;
}

json index_json(const Index& index) {
    const Grids& g = index.grids();
    json grids{{"width", format_decimal(g.g1.width())},
               {"dim", g.dim},
               {"eps", format_decimal(g.eps)},
               {"delta", format_decimal(g.delta)},
               {"g1", gridset_json(g.g1, true)},
               {"g2", gridset_json(g.g2, false)},
               {"g3", gridset_json(g.g3, false)}};
    json j{{"format", "fann-index"},
           {"version", kFormatVersion},
           {"params", params_json(index.params())},
           {"corpus", corpus_json(index.corpus())},
           {"grids", std::move(grids)}};
    if (auto* three = dynamic_cast<const ThreeEpsIndex*>(&index)) {
        json runs = json::array();
        for (const auto& [first, len, idx] : three->packed_runs()) runs.push_back(json::array({first, len, idx}));
        j["runs"] = std::move(runs);
    } else {
        json table = json::array();
        for (const auto& [key, idx] : index.table_entries()) table.push_back(json::array({to_hex(key), idx}));
        j["table"] = std::move(table);
    }
    return j;
}

std::unique_ptr<Index> index_from(const json& j) {
    if (j.value("format", "") != "fann-index") throw Error(Errc::StructureMismatch, "not an index file");
    if (j.value("version", 0) != kFormatVersion) throw Error(Errc::StructureMismatch, "unsupported index version");
    IndexParams p = params_from(j.at("params"));
    validate(p);
    Corpus corpus = corpus_from(j.at("corpus"));
    const json& gj = j.at("grids");
    std::vector<Point> verts;
    for (const auto& c : corpus.curves) verts.insert(verts.end(), c.begin(), c.end());
    Grids g;
    g.eps = parse_decimal(gj.at("eps").get<std::string>());
    g.delta = parse_decimal(gj.at("delta").get<std::string>());
    g.dim = gj.at("dim").get<int>();
    double width = parse_decimal(gj.at("width").get<std::string>());
    g.g1 = gridset_from(gj.at("g1"), verts, width, g.dim);
    g.g2 = gridset_from(gj.at("g2"), verts, width, g.dim);
    g.g3 = gridset_from(gj.at("g3"), verts, width, g.dim);

    const bool eager = p.mode == BuildMode::Eager;
    if (p.variant == Variant::ThreeEps) {
        auto index = std::make_unique<ThreeEpsIndex>(corpus, p, std::move(g), false);
        std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t>> runs;
        for (const auto& r : j.at("runs")) {
            runs.emplace_back(r.at(0).get<std::uint64_t>(), r.at(1).get<std::uint64_t>(), r.at(2).get<std::uint32_t>());
        }
        if (!eager && !runs.empty()) throw Error(Errc::StructureMismatch, "lazy index carries a table");
        index->load_packed_runs(runs);
        return index;
    }
    auto index = std::make_unique<OneEpsIndex>(corpus, p, std::move(g), false);
    std::vector<std::pair<std::string, std::uint32_t>> entries;
    for (const auto& e : j.at("table")) entries.emplace_back(from_hex(e.at(0).get<std::string>()), e.at(1).get<std::uint32_t>());
    if (!eager && !entries.empty()) throw Error(Errc::StructureMismatch, "lazy index carries a table");
    if (eager) index->load_table(entries);
    return index;
}

} // namespace

Dataset parse_jsonl(std::istream& in) {
    Dataset d;
    std::string line;
    size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            parse_fail(no, e.what());
        }
        if (!j.is_object() || !j.contains("points")) parse_fail(no, "expected an object with \"points\"");
        std::string id;
        if (j.contains("id")) id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
        else id = std::to_string(d.ids.size());
        Curve c;
        try {
            c = j["points"].get<Curve>();
        } catch (const json::exception& e) {
            parse_fail(no, e.what());
        }
        d.ids.push_back(std::move(id));
        d.curves.push_back(std::move(c));
    }
    return d;
}

Dataset parse_csv(std::istream& in) {
    Dataset d;
    std::string line;
    size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) parse_fail(no, "missing id field");
        std::string id = line.substr(0, comma);
        Curve c;
        std::stringstream pts(line.substr(comma + 1));
        std::string pt;
        while (std::getline(pts, pt, ';')) {
            if (blank(pt)) continue;
            Point p;
            std::stringstream coords(pt);
            std::string x;
            while (std::getline(coords, x, ',')) {
                size_t a = x.find_first_not_of(" \t"), b = x.find_last_not_of(" \t");
                if (a == std::string::npos) parse_fail(no, "empty coordinate");
                std::string t = x.substr(a, b - a + 1);
                double v = 0.0;
                auto res = std::from_chars(t.data(), t.data() + t.size(), v);
                if (res.ec != std::errc() || res.ptr != t.data() + t.size()) parse_fail(no, "bad number '" + t + "'");
                p.push_back(v);
            }
            c.push_back(std::move(p));
        }
        if (c.empty()) parse_fail(no, "curve without points");
        d.ids.push_back(std::move(id));
        d.curves.push_back(std::move(c));
    }
    return d;
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path);
    if (std::filesystem::path(path).extension() == ".csv") return parse_csv(in);
    return parse_jsonl(in);
}

Corpus load_corpus(const std::string& path) {
    Dataset d = read_dataset(path);
    return make_corpus(std::move(d.ids), std::move(d.curves));
}

std::string format_decimal(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_decimal(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(Errc::ParseError, "bad decimal " + s);
    return v;
}

std::string index_to_string(const Index& index) { return index_json(index).dump(); }

std::unique_ptr<Index> index_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    try {
        return index_from(j);
    } catch (const json::exception& e) {
        throw Error(Errc::StructureMismatch, e.what());
    }
}

void save_index(const Index& index, const std::string& path) { write_file(path, index_to_string(index)); }

std::unique_ptr<Index> load_index(const std::string& path) { return index_from_string(read_file(path)); }

void save_ladder(const Ladder& ladder, const std::string& path) {
    namespace fs = std::filesystem;
    fs::path base(path);
    json files = json::array();
    json scales = json::array();
    for (size_t i = 0; i < ladder.scales().size(); ++i) {
        std::string name = base.filename().string() + ".scale" + std::to_string(i) + ".json";
        save_index(ladder.index_at(i), (base.parent_path() / name).string());
        files.push_back(name);
        scales.push_back(format_decimal(ladder.scales()[i]));
    }
    json j{{"format", "fann-ladder"},
           {"version", kFormatVersion},
           {"params", params_json(ladder.params())},
           {"corpus_digest", ladder.corpus().digest()},
           {"scales", std::move(scales)},
           {"files", std::move(files)}};
    write_file(path, j.dump(1));
}

bool is_ladder_file(const std::string& path) {
    try {
        json j = json::parse(read_file(path));
        return j.value("format", "") == "fann-ladder";
    } catch (const std::exception&) {
        return false;
    }
}

Ladder load_ladder(const std::string& path) {
    namespace fs = std::filesystem;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
    if (j.value("format", "") != "fann-ladder") throw Error(Errc::StructureMismatch, "not a ladder manifest");
    IndexParams p = params_from(j.at("params"));
    std::vector<double> scales;
    std::vector<std::unique_ptr<Index>> indexes;
    fs::path dir = fs::path(path).parent_path();
    for (size_t i = 0; i < j.at("files").size(); ++i) {
        scales.push_back(parse_decimal(j["scales"][i].get<std::string>()));
        indexes.push_back(load_index((dir / j["files"][i].get<std::string>()).string()));
    }
    if (indexes.empty()) throw Error(Errc::StructureMismatch, "ladder without scales");
    Corpus corpus = indexes.front()->corpus();
    if (corpus.digest() != j.at("corpus_digest").get<std::string>()) {
        throw Error(Errc::StructureMismatch, "corpus digest does not match");
    }
    return Ladder::from_parts(corpus, p, std::move(scales), std::move(indexes));
}

} // namespace fann
