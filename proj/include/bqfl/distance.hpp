#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "bqfl/core_model.hpp"

namespace bqfl {

enum class Metric { cosine, euclidean, euclidean_norm, dual };

std::string_view to_string(Metric metric);

/*
 * Symmetric n x n matrix of nonnegative finite distances with a zero
 * diagonal, tagged with the metric that produced it. Construction validates
 * the invariants, including the per-metric range bounds.
 */
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(std::size_t n, std::vector<double> entries, Metric metric);

    std::size_t size() const { return n_; }
    Metric metric() const { return metric_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }

    double max_entry() const;
    double row_sum(std::size_t i) const;
    /// Entries strictly above the diagonal, row by row.
    std::vector<double> upper_triangle() const;

private:
    std::size_t n_ = 0;
    std::vector<double> entries_;
    Metric metric_ = Metric::euclidean;
};

struct BlendConfig {
    double alpha = 0.5;
    double epsilon = 1e-8;
};

/// D_ij = 1 - <p_i, p_j> / (|p_i| |p_j| + epsilon), clamped to [0, 2], zero diagonal.
DistanceMatrix cosine_matrix(const VectorSet& vectors, double epsilon = 1e-8);

/// D_ij = |p_i - p_j|_2.
DistanceMatrix euclidean_matrix(const VectorSet& vectors);

/// Divides by the largest off-diagonal entry; an all-zero input stays zero.
DistanceMatrix normalize_euclidean(const DistanceMatrix& euclidean);

/// alpha * De + (1 - alpha) * Dc.
DistanceMatrix dual_blend(const DistanceMatrix& euclidean_norm, const DistanceMatrix& cosine, double alpha);

/// Row-major squared Euclidean distances (not range-checked; used for Krum scoring).
std::vector<double> squared_euclidean(const VectorSet& vectors);

}  // namespace bqfl
