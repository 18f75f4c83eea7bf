#include "bqfl/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace bqfl {

QuboModel::QuboModel(std::size_t n, std::size_t m, double lambda)
    : n_(n), m_(m), lambda_(lambda), linear_(n, 0.0), coupling_(n * n, 0.0) {}

QuboModel::QuboModel(std::vector<double> linear, const std::map<std::pair<std::size_t, std::size_t>, double>& quadratic,
                     std::size_t m, double lambda)
    : QuboModel(linear.size(), m, lambda) {
    linear_ = std::move(linear);
    for (const auto& [key, value] : quadratic) {
        set_quadratic(key.first, key.second, value);
    }
}

void QuboModel::set_quadratic(std::size_t i, std::size_t j, double value) {
    if (i >= j || j >= n_) {
        throw std::invalid_argument("quadratic keys must satisfy i < j < n");
    }
    coupling_[i * n_ + j] = value;
    coupling_[j * n_ + i] = value;
}

std::map<std::pair<std::size_t, std::size_t>, double> QuboModel::quadratic_terms() const {
    std::map<std::pair<std::size_t, std::size_t>, double> out;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            out.emplace(std::make_pair(i, j), quadratic(i, j));
        }
    }
    return out;
}

double penalty_weight(const DistanceMatrix& distances) {
    const double max_d = distances.max_entry();
    return max_d > 0.0 ? 10.0 * max_d : 1.0;
}

namespace {

void check_target(const DistanceMatrix& distances, std::size_t m) {
    if (distances.size() < 2) {
        throw std::invalid_argument("selection QUBO needs n >= 2");
    }
    if (m < 1 || m > distances.size()) {
        throw std::invalid_argument("selection target m must lie in [1, n]");
    }
}

QuboModel constrained_model(const DistanceMatrix& distances, std::size_t m, double lambda) {
    const std::size_t n = distances.size();
    QuboModel q(n, m, lambda);
    const double cardinality_term = lambda * (1.0 - 2.0 * static_cast<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        q.set_linear(i, distances.row_sum(i) + cardinality_term);
        for (std::size_t j = i + 1; j < n; ++j) {
            q.set_quadratic(i, j, -2.0 * distances(i, j) + 2.0 * lambda);
        }
    }
    return q;
}

}  // namespace

QuboModel build_selection_qubo(const DistanceMatrix& distances, std::size_t m) {
    check_target(distances, m);
    return constrained_model(distances, m, penalty_weight(distances));
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) {
        throw std::invalid_argument("percentile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = (p / 100.0) * static_cast<double>(values.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(pos));
    if (lower + 1 >= values.size()) {
        return values.back();
    }
    const double frac = pos - static_cast<double>(lower);
    return values[lower] + frac * (values[lower + 1] - values[lower]);
}

SuspicionQubo build_suspicion_qubo(const DistanceMatrix& dual, std::size_t m, const SuspicionConfig& config) {
    check_target(dual, m);
    if (!(config.percentile_p > 0.0 && config.percentile_p < 100.0)) {
        throw std::invalid_argument("suspicion percentile must lie in (0, 100)");
    }
    if (!(config.suspicion_weight_ws > 0.0)) {
        throw std::invalid_argument("suspicion weight must be positive");
    }
    SuspicionQubo out;
    out.tau_s = percentile(dual.upper_triangle(), config.percentile_p);
    out.model = constrained_model(dual, m, penalty_weight(dual));
    const std::size_t n = dual.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double penalty = config.suspicion_weight_ws * std::max(0.0, out.tau_s - dual(i, j));
            if (penalty > 0.0) {
                out.model.set_quadratic(i, j, out.model.quadratic(i, j) + penalty);
            }
        }
    }
    return out;
}

double energy(const QuboModel& model, std::span<const std::uint8_t> x) {
    const std::size_t n = model.size();
    if (x.size() != n) {
        throw std::invalid_argument("assignment length does not match the model");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!x[i]) {
            continue;
        }
        e += model.linear(i);
        const auto row = model.coupling_row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x[j]) {
                e += row[j];
            }
        }
    }
    return e;
}

double selection_objective(const DistanceMatrix& distances, std::span<const std::uint8_t> x) {
    const std::size_t n = distances.size();
    if (x.size() != n) {
        throw std::invalid_argument("assignment length does not match the matrix");
    }
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!x[i]) {
            continue;
        }
        value += distances.row_sum(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x[j]) {
                value -= 2.0 * distances(i, j);
            }
        }
    }
    return value;
}

std::vector<std::size_t> repair_cardinality(std::span<const std::uint8_t> x, const DistanceMatrix& distances,
                                            std::size_t m) {
    const std::size_t n = distances.size();
    if (x.size() != n) {
        throw std::invalid_argument("assignment length does not match the matrix");
    }
    if (m > n) {
        throw std::invalid_argument("repair target exceeds the client count");
    }
    std::vector<std::uint8_t> selected(x.begin(), x.end());
    std::size_t count = static_cast<std::size_t>(std::count_if(selected.begin(), selected.end(), [](auto v) { return v != 0; }));

    // Summed distance from i to the currently selected clients (excluding i).
    auto sum_to_selected = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && selected[j]) {
                s += distances(i, j);
            }
        }
        return s;
    };

    while (count > m) {
        std::size_t worst = n;
        double worst_sum = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            if (!selected[i]) {
                continue;
            }
            const double s = sum_to_selected(i);
            if (s > worst_sum) {
                worst_sum = s;
                worst = i;
            }
        }
        selected[worst] = 0;
        --count;
    }
    while (count < m) {
        std::size_t best = n;
        double best_sum = INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            if (selected[i]) {
                continue;
            }
            const double s = sum_to_selected(i);
            if (s < best_sum) {
                best_sum = s;
                best = i;
            }
        }
        selected[best] = 1;
        ++count;
    }

    std::vector<std::size_t> out;
    out.reserve(m);
    for (std::size_t i = 0; i < n; ++i) {
        if (selected[i]) {
            out.push_back(i);
        }
    }
    return out;
}

void write_qubo(std::ostream& out, const QuboModel& model) {
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << model.size() << ' ' << model.target() << ' ' << model.lambda() << '\n';
    for (std::size_t i = 0; i < model.size(); ++i) {
        out << i << ' ' << i << ' ' << model.linear(i) << '\n';
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
        for (std::size_t j = i + 1; j < model.size(); ++j) {
            out << i << ' ' << j << ' ' << model.quadratic(i, j) << '\n';
        }
    }
    out.precision(old_precision);
}

QuboModel read_qubo(std::istream& in) {
    std::string line;
    std::size_t n = 0, m = 0;
    double lambda = 0.0;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    {
        std::istringstream header(line);
        if (!(header >> n >> m >> lambda)) {
            throw std::runtime_error("qubo header must be 'n m lambda'");
        }
    }
    QuboModel model(n, m, lambda);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream row(line);
        std::size_t i = 0, j = 0;
        double value = 0.0;
        if (!(row >> i >> j >> value) || i >= n || j >= n) {
            throw std::runtime_error("malformed qubo term on line " + std::to_string(line_no));
        }
        if (i == j) {
            model.set_linear(i, value);
        } else {
            model.set_quadratic(std::min(i, j), std::max(i, j), value);
        }
    }
    return model;
}

}  // namespace bqfl
