#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(FANN_CLI) + " " + args + " 2>/dev/null";
    FILE* f = popen(cmd.c_str(), "r");
    REQUIRE(f);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    int status = pclose(f);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("fann_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text = "") const {
        fs::path p = path / name;
        if (!text.empty()) std::ofstream(p) << text;
        return p.string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kCorpus = "{\"id\":\"a\",\"points\":[[0,0],[1,0]]}\n{\"id\":\"b\",\"points\":[[5,5],[6,5],[6,6]]}\n";

} // namespace

TEST_CASE("ingest") {
    TempDir t;
    Run r = run("ingest " + t.file("one.jsonl", "{\"id\":\"a\",\"points\":[[0,0],[1,0]]}\n"));
    CHECK(r.code == 0);
    CHECK(r.out.find("\"curves\":1") != std::string::npos);
    CHECK(r.out.find("\"dim\":2") != std::string::npos);
    Run csv = run("ingest " + t.file("c.csv", "a,0,0;1,0\nb,1,1;2,2;3,3\n"));
    CHECK(csv.code == 0);
    CHECK(csv.out.find("\"vertices_per_curve\":3") != std::string::npos);
    CHECK(run("ingest " + t.file("mixed.jsonl", "{\"id\":\"a\",\"points\":[[0,0]]}\n{\"id\":\"b\",\"points\":[[0,0,0]]}\n")).code == 2);
    CHECK(run("ingest " + t.file("dup.jsonl", "{\"id\":\"a\",\"points\":[[0,0]]}\n{\"id\":\"a\",\"points\":[[1,0]]}\n")).code == 2);
}

TEST_CASE("build and query") {
    TempDir t;
    std::string data = t.file("corpus.jsonl", kCorpus);
    std::string idx = t.file("index.json");
    CHECK(run("build " + t.file("empty.jsonl", "\n") + " --delta 1 --out " + idx).code == 2);
    CHECK(run("build " + data + " --delta 1 --eps 0.7 --out " + idx).code == 2);
    REQUIRE(run("build " + data + " --delta 0.5 --out " + idx).code == 0);
    std::string before = slurp(idx);

    std::string q = t.file("q.jsonl", "{\"id\":\"near\",\"points\":[[0,0.1],[0.5,0.1],[1,0.1]]}\n"
                                      "{\"id\":\"far\",\"points\":[[30,30],[31,30],[32,30]]}\n"
                                      "{\"id\":\"short\",\"points\":[[0,0.1],[1,0.1]]}\n");
    Run r = run("query " + idx + " " + q + " --verify");
    CHECK(r.code == 0);
    CHECK(r.out.find("{\"answer\":\"a\",\"bound\"") != std::string::npos);
    CHECK(r.out.find("\"id\":\"far\"") != std::string::npos);
    CHECK(r.out.find("\"answer\":\"no\"") != std::string::npos);
    CHECK(r.out.find("\"ok\":false") == std::string::npos);
    CHECK(slurp(idx) == before);

    std::string long_q = t.file("long.jsonl", "{\"id\":\"x\",\"points\":[[0,0],[1,0],[2,0],[3,0]]}\n");
    CHECK(run("query " + idx + " " + long_q).code == 4);

    CHECK(run("build " + data + " --delta 1 --mode eager --out " + idx).code == 3);
}

TEST_CASE("ladder build without delta") {
    TempDir t;
    std::string data = t.file("corpus.jsonl", kCorpus);
    std::string lad = t.file("ladder.json");
    REQUIRE(run("build " + data + " --variant three-eps --out " + lad).code == 0);
    Run r = run("query " + lad + " " + t.file("q.jsonl", "{\"id\":\"q\",\"points\":[[5,5.1],[6,5],[6,6.1]]}\n") +
                " --verify");
    CHECK(r.code == 0);
    CHECK(r.out.find("\"answer\":\"b\"") != std::string::npos);
    CHECK(r.out.find("\"ok\":true") != std::string::npos);
}

TEST_CASE("micro eager three-eps file round trip") {
    TempDir t;
    std::string data = t.file("micro.jsonl", "{\"id\":\"m\",\"points\":[[0,0],[1.3,0.4]]}\n");
    std::string eager = t.file("eager.json"), lazy = t.file("lazy.json");
    REQUIRE(run("build " + data + " --variant three-eps --mode eager --eps 0.45 --delta 1 --out " + eager).code == 0);
    REQUIRE(run("build " + data + " --variant three-eps --eps 0.45 --delta 1 --out " + lazy).code == 0);
    std::string q = t.file("q.jsonl", "{\"id\":\"1\",\"points\":[[0,0.2],[0.7,0.1],[1.3,0.3]]}\n"
                                      "{\"id\":\"2\",\"points\":[[9,9],[9,8],[8,8]]}\n"
                                      "{\"id\":\"3\",\"points\":[[0.5,-0.5],[1.5,1.5],[2,0]]}\n");
    Run a = run("query " + eager + " " + q), b = run("query " + lazy + " " + q);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("bench") {
    Run r = run("bench --queries 5 --delta 1");
    CHECK(r.code == 0);
    CHECK(r.out.find("mean_query_seconds") != std::string::npos);
}

TEST_CASE("selftest canary and determinism") {
    Run ok = run("selftest --only 0");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("\"passed\": true") != std::string::npos);
    Run tripped = run("selftest --only 0 --tol-scale 1e6");
    CHECK(tripped.code != 0);
    CHECK(tripped.out.find("\"passed\": false") != std::string::npos);
    Run again = run("selftest --only 0,8 --seed 7");
    Run twice = run("selftest --only 0,8 --seed 7");
    CHECK(again.out == twice.out);
}
