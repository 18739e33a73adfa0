#pragma once

#include <memory>
#include <vector>

#include "fann/index.hpp"

namespace fann {

/// Geometric sequence of scales with one index per scale, used when no delta is given.
class Ladder {
public:
    /// Scales start at a quarter of the smallest positive vertex distance (floored at
    /// 1e-12 times the diameter) and grow by 1 + eps until they reach twice the largest
    /// vertex distance. params.delta is ignored.
    static Ladder build(const Corpus& corpus, const IndexParams& params);

    const std::vector<double>& scales() const { return scales_; }
    const Index& index_at(size_t i) const { return *indexes_.at(i); }
    const Corpus& corpus() const { return corpus_; }
    const IndexParams& params() const { return params_; }

    /// Binary search for the lowest scale whose query reports a curve. If even the top
    /// scale reports none, every curve is within 1.5 times the optimum and curve 0 is
    /// returned.
    size_t ann_query(const Curve& sigma) const;

    static Ladder from_parts(const Corpus& corpus, const IndexParams& params, std::vector<double> scales,
                             std::vector<std::unique_ptr<Index>> indexes);

private:
    Corpus corpus_;
    IndexParams params_;
    std::vector<double> scales_;
    std::vector<std::unique_ptr<Index>> indexes_;
};

std::vector<double> ladder_scales(const Corpus& corpus, double eps);

/// Index of the curve with the smallest Frechet value; ties go to the smaller index.
size_t brute_force_nn(const Corpus& corpus, const Curve& sigma, double tol = 1e-7);

} // namespace fann
