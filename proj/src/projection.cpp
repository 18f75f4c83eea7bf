#include "bqfl/projection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bqfl {

std::vector<double> coordinate_variance(const VectorSet& gradients) {
    const std::size_t n = gradients.rows();
    const std::size_t d = gradients.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = gradients.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += row[j];
        }
    }
    for (auto& m : mean) {
        m /= static_cast<double>(n);
    }
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = gradients.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = row[j] - mean[j];
            var[j] += diff * diff;
        }
    }
    for (auto& v : var) {
        v /= static_cast<double>(n);
    }
    return var;
}

ProjectedSet importance_project(const VectorSet& gradients, const ProjectionConfig& config) {
    if (gradients.rows() < 2) {
        throw std::invalid_argument("projection needs at least 2 gradients");
    }
    if (config.k == 0) {
        throw std::invalid_argument("projection dimension k must be positive");
    }
    const std::size_t d = gradients.dim();
    ProjectedSet out;
    out.clamped = config.k > d;
    const std::size_t k = std::min(config.k, d);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (k < d) {
        const auto var = coordinate_variance(gradients);
        auto by_variance = [&var](std::size_t a, std::size_t b) {
            if (var[a] != var[b]) {
                return var[a] > var[b];
            }
            return a < b;
        };
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), by_variance);
        order.resize(k);
        std::sort(order.begin(), order.end());
    }
    out.coordinate_indices = std::move(order);

    out.values = VectorSet(gradients.rows(), k);
    for (std::size_t i = 0; i < gradients.rows(); ++i) {
        const auto src = gradients.row(i);
        auto dst = out.values.row(i);
        for (std::size_t c = 0; c < k; ++c) {
            dst[c] = src[out.coordinate_indices[c]];
        }
    }
    return out;
}

}  // namespace bqfl
