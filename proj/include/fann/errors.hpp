#pragma once

#include <stdexcept>
#include <string>

namespace fann {

enum class Errc {
    DimensionMismatch,
    PointOffSegment,
    NonFiniteDistance,
    BadEpsilon,
    BadDelta,
    IterationCap,
    EmptySet,
    InvalidEncoding,
    ArityMismatch,
    BadArity,
    NullCells,
    FeasibilityRefused,
    BadParams,
    EmptyCorpus,
    StructureMismatch,
    ParseError,
    DuplicateId,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace fann
