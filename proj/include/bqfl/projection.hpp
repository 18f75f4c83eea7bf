#pragma once

#include <cstddef>
#include <vector>

#include "bqfl/core_model.hpp"

namespace bqfl {

struct ProjectionConfig {
    std::size_t k = 1000;
};

/*
 * Gradients restricted to a shared coordinate subset. `coordinate_indices`
 * is strictly increasing and identical for every row of `values`.
 */
struct ProjectedSet {
    VectorSet values;
    std::vector<std::size_t> coordinate_indices;
    bool clamped = false;  // k exceeded d and was reduced to d
};

/// Per-coordinate population variance across the rows of `gradients`.
std::vector<double> coordinate_variance(const VectorSet& gradients);

/*
 * Keeps the k coordinates with the largest cross-client variance. Ties are
 * resolved toward the lower coordinate index; the kept coordinates appear in
 * their original order.
 */
ProjectedSet importance_project(const VectorSet& gradients, const ProjectionConfig& config);

}  // namespace bqfl
