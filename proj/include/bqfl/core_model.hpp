#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bqfl {

/// A client's flattened model delta. Every entry is finite and the length is positive.
class GradientVector {
public:
    GradientVector() = default;
    explicit GradientVector(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::vector<double>& data() const { return values_; }

    friend bool operator==(const GradientVector&, const GradientVector&) = default;

private:
    std::vector<double> values_;
};

struct ClientUpdate {
    int client_id = 0;
    GradientVector gradient;
    bool is_byzantine = false;  // ground truth; read by metrics and the attacker only
};

/// Coordinate-wise mean and population standard deviation of honest gradients.
struct HonestStats {
    std::vector<double> mu;
    std::vector<double> sigma;

    std::size_t dimension() const { return mu.size(); }
};

struct GlobalModel {
    std::vector<double> weights;
    double eta = 1.0;
};

/*
 * Dense row-major set of equal-length vectors. This is the working
 * representation handed to projection, distance and Krum routines.
 */
class VectorSet {
public:
    VectorSet() = default;
    VectorSet(std::size_t rows, std::size_t dim);

    static VectorSet from_gradients(std::span<const GradientVector> gradients);
    static VectorSet from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

HonestStats compute_honest_stats(std::span<const GradientVector> honest);

/// Uses only the updates whose ground-truth flag is honest.
HonestStats compute_honest_stats(std::span<const ClientUpdate> updates);

/// W_{t+1} = W_t + eta * mean(selected).
GlobalModel apply_update(const GlobalModel& model, std::span<const GradientVector> selected);

}  // namespace bqfl
