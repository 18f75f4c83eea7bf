#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "bqfl/core_model.hpp"
#include "bqfl/distance.hpp"

namespace bqfl {

struct KrumScores {
    std::vector<double> scores;
    std::size_t neighbor_count = 0;  // n - f - 2
};

/// Normalized separation between the best rejected and worst selected score.
struct GapResult {
    double delta = 0.0;
    bool degenerate = false;  // score spread was zero; delta is +infinity

    static GapResult unanimous() { return {std::numeric_limits<double>::infinity(), true}; }
};

/// s_i = sum of squared Euclidean distances to the n-f-2 nearest other vectors.
KrumScores krum_scores(const VectorSet& vectors, std::size_t f);

/// Same neighbor rule, summing the given pairwise costs as they are (no squaring).
KrumScores krum_scores(const DistanceMatrix& pairwise, std::size_t f);

/// Indices of the m lowest scores in increasing index order; ties go to the lower index.
std::vector<std::size_t> multikrum_select(const KrumScores& scores, std::size_t m);

GapResult krum_gap(const KrumScores& scores, std::size_t m);

/// Population standard deviation.
double population_stddev(std::span<const double> values);

}  // namespace bqfl
