#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bqfl/core_model.hpp"

namespace bqfl {

/// Confusion counts with Byzantine as the positive class; "rejected" means flagged.
struct RoundMetrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    double detection_accuracy = 0.0;
    double f1 = 0.0;
    double byzantine_rejection_rate = 0.0;
    double honest_retention_rate = 0.0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

/*
 * Rates from counts. F1 is 1 when there is nothing to detect and nothing was
 * flagged; the rejection rate is 1 when there are no Byzantine clients.
 */
RoundMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

/// `selected` holds positions into `updates`.
RoundMetrics score_round(std::span<const std::size_t> selected, std::span<const ClientUpdate> updates);

/// Mean of each rate; counts are summed.
RoundMetrics aggregate_metrics(std::span<const RoundMetrics> rounds);

}  // namespace bqfl
