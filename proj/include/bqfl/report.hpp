#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bqfl/harness.hpp"

namespace bqfl {

/// One row per round: round, attack, aggregator, regime, delta_E, delta_C, tp, fp,
/// tn, fn, detection_accuracy, f1, byz_rejection, honest_retention, solver_method, wall_ms.
void write_round_csv(std::ostream& out, const ExperimentReport& report);

/// Resolved configuration. The anneal worker count is left out: it never changes results.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

nlohmann::ordered_json metrics_to_json(const RoundMetrics& metrics);

/// Aggregate metrics, per-round decision log and resolved configuration.
nlohmann::ordered_json summary_json(const ExperimentReport& report);

/// Formats a real for CSV output: fixed significant digits, "inf" for +infinity.
std::string format_real(double value);

/// Writes via a temporary file and rename so readers never see partial output.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace bqfl
