#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "bqfl/distance.hpp"

namespace bqfl {

using Assignment = std::vector<std::uint8_t>;

/*
 * Upper-triangular binary quadratic model
 *
 *     E(x) = sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j
 *
 * together with the cardinality target m and the penalty weight lambda used
 * to build it. Couplings are kept in a dense symmetric array so the annealer
 * can update local fields in O(n).
 */
class QuboModel {
public:
    QuboModel() = default;
    QuboModel(std::size_t n, std::size_t m, double lambda);
    QuboModel(std::vector<double> linear, const std::map<std::pair<std::size_t, std::size_t>, double>& quadratic,
              std::size_t m, double lambda);

    std::size_t size() const { return n_; }
    std::size_t target() const { return m_; }
    double lambda() const { return lambda_; }

    double linear(std::size_t i) const { return linear_[i]; }
    std::span<const double> linear() const { return linear_; }
    double quadratic(std::size_t i, std::size_t j) const { return coupling_[i * n_ + j]; }
    /// Row i of the symmetric coupling matrix (zero on the diagonal).
    std::span<const double> coupling_row(std::size_t i) const { return {coupling_.data() + i * n_, n_}; }

    std::map<std::pair<std::size_t, std::size_t>, double> quadratic_terms() const;

    void set_linear(std::size_t i, double value) { linear_[i] = value; }
    void set_quadratic(std::size_t i, std::size_t j, double value);

private:
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    double lambda_ = 0.0;
    std::vector<double> linear_;
    std::vector<double> coupling_;
};

struct SuspicionConfig {
    double percentile_p = 10.0;
    double suspicion_weight_ws = 10.0;
};

struct SuspicionQubo {
    QuboModel model;
    double tau_s = 0.0;  // p-th percentile of the upper-triangular distances
};

/// lambda = 10 * max D, floored at 1 when every distance is zero.
double penalty_weight(const DistanceMatrix& distances);

/// Q_ii = rowsum_i + lambda (1 - 2m); Q_ij = -2 D_ij + 2 lambda.
QuboModel build_selection_qubo(const DistanceMatrix& distances, std::size_t m);

/// As above with w_s * max(0, tau_s - D_ij) added to every coupling.
SuspicionQubo build_suspicion_qubo(const DistanceMatrix& dual, std::size_t m, const SuspicionConfig& config);

double energy(const QuboModel& model, std::span<const std::uint8_t> x);

/// Selection objective without the penalty: sum_i rowsum_i x_i - 2 sum_{i<j} D_ij x_i x_j.
double selection_objective(const DistanceMatrix& distances, std::span<const std::uint8_t> x);

/*
 * Forces |S| = m: drops the selected client farthest (by summed distance) from
 * the rest of the selection, or adds the unselected client closest to it,
 * one at a time. Ties pick the lower index. Returns sorted indices.
 */
std::vector<std::size_t> repair_cardinality(std::span<const std::uint8_t> x, const DistanceMatrix& distances,
                                            std::size_t m);

/// Linear-interpolation percentile (p in [0,100]) of an unsorted sample.
double percentile(std::vector<double> values, double p);

/// Text form: "n m lambda", then "i i Q_ii" and "i j Q_ij" lines.
void write_qubo(std::ostream& out, const QuboModel& model);
QuboModel read_qubo(std::istream& in);

}  // namespace bqfl
