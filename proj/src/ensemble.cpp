#include "bqfl/ensemble.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace bqfl {

void RoutingConfig::validate() const {
    if (!(tau_E > 0.0) || !(tau_C > 0.0) || !(cascade_tau > 0.0)) {
        throw std::invalid_argument("routing thresholds must be positive");
    }
}

void VoteConfig::validate() const {
    if (agreed_accept_bonus < 0.0 || agreed_reject_penalty < 0.0 || classical_only_penalty < 0.0 ||
        qubo_only_bonus < 0.0) {
        throw std::invalid_argument("vote weights must be nonnegative");
    }
}

std::string_view to_string(Regime regime) {
    switch (regime) {
    case Regime::outlier:
        return "outlier";
    case Regime::clustered:
        return "clustered";
    case Regime::magnitude:
        return "magnitude";
    case Regime::evasion:
        return "evasion";
    }
    return "unknown";
}

std::string_view to_string(SelectionMethod method) {
    switch (method) {
    case SelectionMethod::classical:
        return "classical";
    case SelectionMethod::qubo:
        return "qubo";
    case SelectionMethod::cascade_qubo:
        return "cascade_qubo";
    case SelectionMethod::vote:
        return "vote";
    }
    return "unknown";
}

Regime route_regime(const GapResult& delta_E, const GapResult& delta_C, const RoutingConfig& config) {
    const double e = delta_E.delta;
    const double c = delta_C.delta;
    if (e > config.tau_E && c > config.tau_E) {
        return Regime::outlier;
    }
    if (e <= config.tau_E && c > config.tau_C) {
        return Regime::clustered;
    }
    if (e > config.tau_E && c <= config.tau_E) {
        return Regime::magnitude;
    }
    return Regime::evasion;
}

KrumScores cosine_krum(const VectorSet& projected, std::size_t f, double epsilon) {
    return krum_scores(cosine_matrix(projected, epsilon), f);
}

DistanceMatrix dual_distance(const VectorSet& projected, const BlendConfig& blend) {
    return dual_blend(normalize_euclidean(euclidean_matrix(projected)), cosine_matrix(projected, blend.epsilon),
                      blend.alpha);
}

std::vector<std::size_t> qubo_select(const DistanceMatrix& distances, std::size_t m, const AnnealConfig& anneal) {
    const auto q = build_selection_qubo(distances, m);
    const auto samples = simulated_anneal(q, anneal);
    return repair_cardinality(samples.best_assignment, distances, m);
}

namespace {

std::vector<std::size_t> all_clients(std::size_t n) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

}  // namespace

SelectionResult cascaded_dual_qubo(const VectorSet& krum_space, const VectorSet& projected, std::size_t m,
                                   std::size_t f, const CascadeConfig& config) {
    config.routing.validate();
    const std::size_t n = krum_space.rows();
    if (projected.rows() != n) {
        throw std::invalid_argument("projected and full gradient sets differ in size");
    }
    SelectionResult result;
    result.method = SelectionMethod::classical;
    const auto scores = krum_scores(krum_space, f);
    if (m == n) {
        result.selected = all_clients(n);
        result.delta_E = GapResult::unanimous();
        return result;
    }
    result.delta_E = krum_gap(scores, m);
    if (result.delta_E->delta > config.routing.cascade_tau) {
        result.selected = multikrum_select(scores, m);
        return result;
    }
    result.method = SelectionMethod::cascade_qubo;
    result.selected = qubo_select(dual_distance(projected, config.blend), m, config.anneal);
    return result;
}

AgreementCounts agreement_counts(const std::vector<std::size_t>& classical, const std::vector<std::size_t>& qubo,
                                 std::size_t n) {
    std::vector<std::uint8_t> in_c(n, 0), in_q(n, 0);
    for (const auto i : classical) {
        in_c.at(i) = 1;
    }
    for (const auto i : qubo) {
        in_q.at(i) = 1;
    }
    AgreementCounts counts;
    for (std::size_t i = 0; i < n; ++i) {
        if (in_c[i] && in_q[i]) {
            ++counts.agreed_accept;
        } else if (in_c[i]) {
            ++counts.classical_only;
        } else if (in_q[i]) {
            ++counts.qubo_only;
        } else {
            ++counts.agreed_reject;
        }
    }
    return counts;
}

std::vector<std::size_t> agreement_vote(const std::vector<std::size_t>& classical,
                                        const std::vector<std::size_t>& qubo, const KrumScores& cosine_scores,
                                        std::size_t m, const VoteConfig& config) {
    config.validate();
    const auto& s = cosine_scores.scores;
    const std::size_t n = s.size();
    if (classical.size() != m || qubo.size() != m || m == 0 || m > n) {
        throw std::invalid_argument("agreement vote needs two selections of size m");
    }
    std::vector<std::uint8_t> in_c(n, 0), in_q(n, 0);
    for (const auto i : classical) {
        in_c.at(i) = 1;
    }
    for (const auto i : qubo) {
        in_q.at(i) = 1;
    }

    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    const double range = *hi - *lo;
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double r = range > 0.0 ? (s[i] - *lo) / range : 0.0;
        if (in_c[i] && in_q[i]) {
            r -= config.agreed_accept_bonus;
        } else if (in_c[i]) {
            r += config.classical_only_penalty;
        } else if (in_q[i]) {
            r -= config.qubo_only_bonus;
        } else {
            r += config.agreed_reject_penalty;
        }
        rank[i] = r;
    }

    std::vector<std::size_t> order = all_clients(n);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
    order.resize(m);
    std::sort(order.begin(), order.end());
    return order;
}

SelectionResult multisignal_aggregate(const VectorSet& full, const VectorSet& projected, std::size_t m,
                                      std::size_t f, const MultiSignalConfig& config) {
    config.routing.validate();
    const std::size_t n = full.rows();
    if (projected.rows() != n) {
        throw std::invalid_argument("projected and full gradient sets differ in size");
    }
    SelectionResult result;
    const auto euclid_scores = krum_scores(full, f);
    const auto cos_scores = cosine_krum(projected, f, config.blend.epsilon);
    if (m == n) {
        result.selected = all_clients(n);
        result.delta_E = GapResult::unanimous();
        result.delta_C = GapResult::unanimous();
        result.regime = route_regime(*result.delta_E, *result.delta_C, config.routing);
        return result;
    }
    result.delta_E = krum_gap(euclid_scores, m);
    result.delta_C = krum_gap(cos_scores, m);
    result.regime = route_regime(*result.delta_E, *result.delta_C, config.routing);

    auto classical = multikrum_select(euclid_scores, m);
    if (*result.regime != Regime::evasion) {
        result.method = SelectionMethod::classical;
        result.selected = std::move(classical);
        return result;
    }

    const auto dual = dual_distance(projected, config.blend);
    const auto suspicion = build_suspicion_qubo(dual, m, config.suspicion);
    const auto samples = simulated_anneal(suspicion.model, config.anneal);
    const auto qubo = repair_cardinality(samples.best_assignment, dual, m);

    result.method = SelectionMethod::vote;
    result.agreement = agreement_counts(classical, qubo, n);
    result.selected = agreement_vote(classical, qubo, cos_scores, m, config.vote);
    return result;
}

}  // namespace bqfl
