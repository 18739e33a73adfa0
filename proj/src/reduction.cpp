#include "fann/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fann/frechet.hpp"

namespace fann {

std::vector<double> ladder_scales(const Corpus& corpus, double eps) {
    if (corpus.curves.empty()) throw Error(Errc::EmptyCorpus, "no curves");
    validate_params(eps, 1.0);
    std::vector<Point> verts;
    for (const auto& c : corpus.curves) verts.insert(verts.end(), c.begin(), c.end());
    double min_pos = std::numeric_limits<double>::infinity();
    double diam = 0.0;
    for (size_t i = 0; i < verts.size(); ++i) {
        for (size_t j = i + 1; j < verts.size(); ++j) {
            double d = dist(verts[i], verts[j]);
            diam = std::max(diam, d);
            if (d > 0.0) min_pos = std::min(min_pos, d);
        }
    }
    if (diam == 0.0) return {1.0};
    double d0 = std::max(min_pos / 4.0, 1e-12 * diam);
    double top = 2.0 * diam;
    auto count = static_cast<size_t>(std::ceil(std::log(top / d0) / std::log1p(eps))) + 1;
    std::vector<double> scales;
    scales.reserve(count);
    for (size_t i = 0; i < count; ++i) scales.push_back(d0 * std::pow(1.0 + eps, static_cast<double>(i)));
    return scales;
}

Ladder Ladder::build(const Corpus& corpus, const IndexParams& params) {
    std::vector<double> scales = ladder_scales(corpus, params.eps);
    std::vector<std::unique_ptr<Index>> indexes;
    for (double s : scales) {
        IndexParams p = params;
        p.delta = s;
        indexes.push_back(Index::build(corpus, p));
    }
    return from_parts(corpus, params, std::move(scales), std::move(indexes));
}

Ladder Ladder::from_parts(const Corpus& corpus, const IndexParams& params, std::vector<double> scales,
                          std::vector<std::unique_ptr<Index>> indexes) {
    if (scales.size() != indexes.size() || scales.empty()) throw Error(Errc::StructureMismatch, "ladder parts differ");
    Ladder l;
    l.corpus_ = corpus;
    l.params_ = params;
    l.scales_ = std::move(scales);
    l.indexes_ = std::move(indexes);
    return l;
}

size_t Ladder::ann_query(const Curve& sigma) const {
    const size_t top = scales_.size() - 1;
    QueryAnswer at_top = indexes_[top]->query(sigma);
    if (!at_top.found) return 0;
    // Invariant: scale hi reports a curve; scale lo (if lo >= 0) reports none.
    long lo = -1;
    size_t hi = top;
    QueryAnswer best = at_top;
    while (static_cast<long>(hi) - lo > 1) {
        size_t mid = static_cast<size_t>((lo + static_cast<long>(hi)) / 2);
        QueryAnswer a = indexes_[mid]->query(sigma);
        if (a.found) {
            hi = mid;
            best = a;
        } else {
            lo = static_cast<long>(mid);
        }
    }
    return best.index;
}

size_t brute_force_nn(const Corpus& corpus, const Curve& sigma, double tol) {
    if (corpus.curves.empty()) throw Error(Errc::EmptyCorpus, "no curves");
    size_t best = 0;
    double bv = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < corpus.curves.size(); ++i) {
        double v = frechet_value(sigma, corpus.curves[i], tol);
        if (v < bv) {
            bv = v;
            best = i;
        }
    }
    return best;
}

} // namespace fann
