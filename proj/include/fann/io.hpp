#pragma once

#include <istream>
#include <memory>
#include <string>

#include "fann/reduction.hpp"

namespace fann {

struct Dataset {
    std::vector<std::string> ids;
    std::vector<Curve> curves;
};

/// One JSON object per line: {"id": ..., "points": [[x, y, ...], ...]}.
Dataset parse_jsonl(std::istream& in);
/// One curve per line: id,x1,y1;x2,y2;...
Dataset parse_csv(std::istream& in);
/// Chooses the parser by extension (.csv, otherwise JSON lines).
Dataset read_dataset(const std::string& path);
Corpus load_corpus(const std::string& path);

/// Shortest decimal string that reads back to the same double.
std::string format_decimal(double x);
double parse_decimal(const std::string& s);

std::string index_to_string(const Index& index);
std::unique_ptr<Index> index_from_string(const std::string& text);
void save_index(const Index& index, const std::string& path);
std::unique_ptr<Index> load_index(const std::string& path);

/// Manifest at path plus one index file per scale next to it.
void save_ladder(const Ladder& ladder, const std::string& path);
Ladder load_ladder(const std::string& path);
bool is_ladder_file(const std::string& path);

} // namespace fann
