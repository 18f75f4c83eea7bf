#include "bqfl/core_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bqfl {

GradientVector::GradientVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("gradient must have positive length");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("gradient entry " + std::to_string(i) + " is not finite");
        }
    }
}

VectorSet::VectorSet(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}

VectorSet VectorSet::from_gradients(std::span<const GradientVector> gradients) {
    if (gradients.empty()) {
        return {};
    }
    VectorSet out(gradients.size(), gradients.front().size());
    for (std::size_t i = 0; i < gradients.size(); ++i) {
        if (gradients[i].size() != out.dim()) {
            throw std::invalid_argument("gradient dimensions differ within a round");
        }
        std::copy(gradients[i].values().begin(), gradients[i].values().end(), out.row(i).begin());
    }
    return out;
}

VectorSet VectorSet::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    VectorSet out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != out.dim()) {
            throw std::invalid_argument("row dimensions differ");
        }
        std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
    }
    return out;
}

HonestStats compute_honest_stats(std::span<const GradientVector> honest) {
    if (honest.size() < 2) {
        throw std::invalid_argument("insufficient honest population");
    }
    const std::size_t d = honest.front().size();
    for (const auto& g : honest) {
        if (g.size() != d) {
            throw std::invalid_argument("gradient dimensions differ within a round");
        }
    }
    const double count = static_cast<double>(honest.size());
    HonestStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    for (const auto& g : honest) {
        for (std::size_t j = 0; j < d; ++j) {
            stats.mu[j] += g[j];
        }
    }
    for (auto& m : stats.mu) {
        m /= count;
    }
    // Two-pass population variance.
    for (const auto& g : honest) {
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = g[j] - stats.mu[j];
            stats.sigma[j] += diff * diff;
        }
    }
    for (auto& s : stats.sigma) {
        s = std::sqrt(s / count);
    }
    return stats;
}

HonestStats compute_honest_stats(std::span<const ClientUpdate> updates) {
    std::vector<GradientVector> honest;
    for (const auto& u : updates) {
        if (!u.is_byzantine) {
            honest.push_back(u.gradient);
        }
    }
    return compute_honest_stats(honest);
}

GlobalModel apply_update(const GlobalModel& model, std::span<const GradientVector> selected) {
    if (selected.empty()) {
        throw std::invalid_argument("empty aggregate");
    }
    const std::size_t d = model.weights.size();
    std::vector<double> mean(d, 0.0);
    for (const auto& g : selected) {
        if (g.size() != d) {
            throw std::invalid_argument("selected gradient dimension does not match the model");
        }
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += g[j];
        }
    }
    const double scale = model.eta / static_cast<double>(selected.size());
    GlobalModel next = model;
    for (std::size_t j = 0; j < d; ++j) {
        next.weights[j] += scale * mean[j];
        if (!std::isfinite(next.weights[j])) {
            throw std::runtime_error("global model weight became non-finite");
        }
    }
    return next;
}

}  // namespace bqfl
