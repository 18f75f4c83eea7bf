#include "bqfl/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bqfl {

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::cosine: return "cosine";
        case Metric::euclidean: return "euclidean";
        case Metric::euclidean_norm: return "euclidean_norm";
        case Metric::dual: return "dual";
    }
    return "unknown";
}

namespace {

double upper_bound_for(Metric metric) {
    switch (metric) {
        // alpha * [0,1] + (1 - alpha) * [0,2] keeps the blend inside [0,2].
        case Metric::cosine:
        case Metric::dual: return 2.0;
        case Metric::euclidean_norm: return 1.0;
        case Metric::euclidean: break;
    }
    return INFINITY;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void require_rows(const VectorSet& vectors) {
    if (vectors.rows() < 2) {
        throw std::invalid_argument("distance matrix needs at least 2 vectors");
    }
}

}  // namespace

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries, Metric metric)
    : n_(n), entries_(std::move(entries)), metric_(metric) {
    if (entries_.size() != n_ * n_) {
        throw std::invalid_argument("distance matrix entry count does not match n*n");
    }
    const double hi = upper_bound_for(metric_) * (1.0 + 1e-12);
    for (std::size_t i = 0; i < n_; ++i) {
        if (entries_[i * n_ + i] != 0.0) {
            throw std::invalid_argument("distance matrix diagonal must be zero");
        }
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = entries_[i * n_ + j];
            if (!std::isfinite(v) || v < 0.0 || v > hi) {
                throw std::invalid_argument("distance entry (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") out of range for metric " + std::string(to_string(metric_)));
            }
            if (v != entries_[j * n_ + i]) {
                throw std::invalid_argument("distance matrix must be symmetric");
            }
        }
    }
}

double DistanceMatrix::max_entry() const {
    double best = 0.0;
    for (double v : entries_) {
        best = std::max(best, v);
    }
    return best;
}

double DistanceMatrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (double v : row(i)) {
        s += v;
    }
    return s;
}

std::vector<double> DistanceMatrix::upper_triangle() const {
    std::vector<double> out;
    out.reserve(n_ * (n_ - 1) / 2);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            out.push_back((*this)(i, j));
        }
    }
    return out;
}

DistanceMatrix cosine_matrix(const VectorSet& vectors, double epsilon) {
    require_rows(vectors);
    const std::size_t n = vectors.rows();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        norms[i] = std::sqrt(dot(vectors.row(i), vectors.row(i)));
    }
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sim = dot(vectors.row(i), vectors.row(j)) / (norms[i] * norms[j] + epsilon);
            const double v = std::clamp(1.0 - sim, 0.0, 2.0);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    return {n, std::move(d), Metric::cosine};
}

std::vector<double> squared_euclidean(const VectorSet& vectors) {
    const std::size_t n = vectors.rows();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = vectors.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto b = vectors.row(j);
            double s = 0.0;
            for (std::size_t c = 0; c < a.size(); ++c) {
                const double diff = a[c] - b[c];
                s += diff * diff;
            }
            d[i * n + j] = s;
            d[j * n + i] = s;
        }
    }
    return d;
}

DistanceMatrix euclidean_matrix(const VectorSet& vectors) {
    require_rows(vectors);
    auto d = squared_euclidean(vectors);
    for (auto& v : d) {
        v = std::sqrt(v);
    }
    return {vectors.rows(), std::move(d), Metric::euclidean};
}

DistanceMatrix normalize_euclidean(const DistanceMatrix& euclidean) {
    const std::size_t n = euclidean.size();
    if (n < 2) {
        throw std::invalid_argument("normalization needs n >= 2");
    }
    const double max_d = euclidean.max_entry();
    std::vector<double> d(n * n, 0.0);
    if (max_d > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i * n + j] = std::min(1.0, euclidean(i, j) / max_d);
            }
        }
    }
    return {n, std::move(d), Metric::euclidean_norm};
}

DistanceMatrix dual_blend(const DistanceMatrix& euclidean_norm, const DistanceMatrix& cosine, double alpha) {
    if (euclidean_norm.size() != cosine.size()) {
        throw std::invalid_argument("dual blend needs matrices of the same size");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("blend alpha must lie in [0, 1]");
    }
    const std::size_t n = cosine.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d[i * n + j] = alpha * euclidean_norm(i, j) + (1.0 - alpha) * cosine(i, j);
        }
    }
    return {n, std::move(d), Metric::dual};
}

}  // namespace bqfl
