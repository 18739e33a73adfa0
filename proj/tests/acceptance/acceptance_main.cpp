// Acceptance runner: one line per criterion, nonzero exit on any failure.
#include <cstdlib>
#include <iostream>
#include <string>

#include "fann/acceptance.hpp"

int main(int argc, char** argv) {
    fann::acceptance::Config cfg;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--cli" && i + 1 < argc) cfg.cli = argv[++i];
        else if (a == "--seed" && i + 1 < argc) cfg.seed = std::stoull(argv[++i]);
        else if (a == "--only" && i + 1 < argc) cfg.only.push_back(std::stoi(argv[++i]));
    }
    auto results = fann::acceptance::run(cfg, &std::cout);
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << results.size() - failed << "/" << results.size() << "\n";
    return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
