#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "bqfl/anneal.hpp"
#include "bqfl/core_model.hpp"
#include "bqfl/distance.hpp"
#include "bqfl/krum.hpp"
#include "bqfl/qubo.hpp"

namespace bqfl {

struct RoutingConfig {
    double tau_E = 0.2;
    double tau_C = 0.5;
    double cascade_tau = 0.2;

    void validate() const;
};

enum class Regime { outlier, clustered, magnitude, evasion };

std::string_view to_string(Regime regime);

/*
 * Agreement-vote weights. The rank score of client i is its min-max
 * normalized cosine Krum score, shifted by
 *   -agreed_accept_bonus    if both selections keep i
 *   +agreed_reject_penalty  if neither keeps i
 *   +classical_only_penalty if only the classical selection keeps i
 *   -qubo_only_bonus        if only the QUBO selection keeps i
 */
struct VoteConfig {
    double agreed_accept_bonus = 0.5;
    double agreed_reject_penalty = 0.5;
    double classical_only_penalty = 0.25;
    double qubo_only_bonus = 0.5;

    void validate() const;
};

enum class SelectionMethod { classical, qubo, cascade_qubo, vote };

std::string_view to_string(SelectionMethod method);

struct AgreementCounts {
    std::size_t agreed_accept = 0;
    std::size_t agreed_reject = 0;
    std::size_t qubo_only = 0;
    std::size_t classical_only = 0;
};

struct SelectionResult {
    std::vector<std::size_t> selected;
    std::optional<Regime> regime;  // set by the MultiSignal router only
    SelectionMethod method = SelectionMethod::classical;
    std::optional<GapResult> delta_E;
    std::optional<GapResult> delta_C;
    AgreementCounts agreement;
};

/// Checked in order: Outlier, Clustered, Magnitude, else Evasion. +inf exceeds every threshold.
Regime route_regime(const GapResult& delta_E, const GapResult& delta_C, const RoutingConfig& config);

/// Krum scoring over unsquared pairwise cosine distances.
KrumScores cosine_krum(const VectorSet& projected, std::size_t f, double epsilon = 1e-8);

/// alpha * normalized Euclidean + (1 - alpha) * cosine, both on `projected`.
DistanceMatrix dual_distance(const VectorSet& projected, const BlendConfig& blend);

/// Builds the selection QUBO on D, anneals it and repairs the result to m clients.
std::vector<std::size_t> qubo_select(const DistanceMatrix& distances, std::size_t m, const AnnealConfig& anneal);

struct CascadeConfig {
    RoutingConfig routing;
    BlendConfig blend;
    AnnealConfig anneal;
};

/*
 * Classical MultiKrum over `krum_space` when its Euclidean Krum gap exceeds
 * cascade_tau; otherwise the selection QUBO on the dual distance of
 * `projected`.
 */
SelectionResult cascaded_dual_qubo(const VectorSet& krum_space, const VectorSet& projected, std::size_t m,
                                   std::size_t f, const CascadeConfig& config);

AgreementCounts agreement_counts(const std::vector<std::size_t>& classical, const std::vector<std::size_t>& qubo,
                                 std::size_t n);

std::vector<std::size_t> agreement_vote(const std::vector<std::size_t>& classical,
                                        const std::vector<std::size_t>& qubo, const KrumScores& cosine_scores,
                                        std::size_t m, const VoteConfig& config);

struct MultiSignalConfig {
    RoutingConfig routing;
    VoteConfig vote;
    SuspicionConfig suspicion;
    BlendConfig blend;
    AnnealConfig anneal;
};

/*
 * Routes on the Euclidean gap of the full gradients and the cosine gap of the
 * projected ones. Non-evasion regimes keep the classical MultiKrum selection;
 * the evasion regime merges it with the suspicion QUBO selection by vote.
 */
SelectionResult multisignal_aggregate(const VectorSet& full, const VectorSet& projected, std::size_t m,
                                      std::size_t f, const MultiSignalConfig& config);

}  // namespace bqfl
