#include "bqfl/krum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bqfl {

namespace {

KrumScores score_pairwise(std::span<const double> cost, std::size_t n, std::size_t f) {
    if (n < f + 3) {
        throw std::invalid_argument("insufficient clients for Krum");
    }
    KrumScores out;
    out.neighbor_count = n - f - 2;
    out.scores.resize(n);
    std::vector<double> others;
    others.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                others.push_back(cost[i * n + j]);
            }
        }
        std::sort(others.begin(), others.end());
        double s = 0.0;
        for (std::size_t r = 0; r < out.neighbor_count; ++r) {
            s += others[r];
        }
        out.scores[i] = s;
    }
    return out;
}

// Score order with the lower index winning ties.
std::vector<std::size_t> ranked(const KrumScores& scores) {
    std::vector<std::size_t> order(scores.scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores.scores[a] < scores.scores[b]; });
    return order;
}

}  // namespace

KrumScores krum_scores(const VectorSet& vectors, std::size_t f) {
    const auto sq = squared_euclidean(vectors);
    return score_pairwise(sq, vectors.rows(), f);
}

KrumScores krum_scores(const DistanceMatrix& pairwise, std::size_t f) {
    const std::size_t n = pairwise.size();
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cost[i * n + j] = pairwise(i, j);
        }
    }
    return score_pairwise(cost, n, f);
}

std::vector<std::size_t> multikrum_select(const KrumScores& scores, std::size_t m) {
    const std::size_t n = scores.scores.size();
    if (m < 1 || m > n) {
        throw std::invalid_argument("MultiKrum selection size must lie in [1, n]");
    }
    auto order = ranked(scores);
    order.resize(m);
    std::sort(order.begin(), order.end());
    return order;
}

double population_stddev(std::span<const double> values) {
    if (values.empty()) {
        return 0.0;
    }
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(values.size()));
}

GapResult krum_gap(const KrumScores& scores, std::size_t m) {
    const std::size_t n = scores.scores.size();
    if (m < 1 || m >= n) {
        throw std::invalid_argument("Krum gap needs 1 <= m < n");
    }
    const double spread = population_stddev(scores.scores);
    if (!(spread > 0.0)) {
        return GapResult::unanimous();
    }
    const auto order = ranked(scores);
    const double worst_selected = scores.scores[order[m - 1]];
    const double best_rejected = scores.scores[order[m]];
    return {(best_rejected - worst_selected) / spread, false};
}

}  // namespace bqfl
