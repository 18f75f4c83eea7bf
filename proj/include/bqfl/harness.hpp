#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bqfl/anneal.hpp"
#include "bqfl/attacks.hpp"
#include "bqfl/config.hpp"
#include "bqfl/core_model.hpp"
#include "bqfl/distance.hpp"
#include "bqfl/ensemble.hpp"
#include "bqfl/metrics.hpp"
#include "bqfl/projection.hpp"
#include "bqfl/qubo.hpp"
#include "bqfl/synthetic.hpp"
#include "bqfl/trainer.hpp"

namespace bqfl {

enum class GradientSource { synthetic, trainer };
enum class Aggregator { classical, qubo, cascade, multisignal };
/// Vectors the classical and cascade Krum scoring run on.
enum class KrumSpace { projected, full };

std::string_view to_string(GradientSource source);
std::string_view to_string(Aggregator aggregator);
std::string_view to_string(KrumSpace space);
Aggregator parse_aggregator(std::string_view name);
GradientSource parse_gradient_source(std::string_view name);
KrumSpace parse_krum_space(std::string_view name);

struct ExperimentConfig {
    std::size_t n = 15;
    std::size_t f = 3;
    std::size_t m = 0;  // 0 selects n - f
    std::size_t rounds = 30;
    std::size_t projection_k = 1000;
    double learning_rate = 1.0;  // server step eta on the mean selected update
    GradientSource gradient_source = GradientSource::synthetic;
    Aggregator aggregator = Aggregator::multisignal;
    KrumSpace krum_space = KrumSpace::projected;
    AttackSpec attack;
    RoutingConfig routing;
    VoteConfig vote;
    SuspicionConfig suspicion;
    BlendConfig blend;
    AnnealConfig anneal;
    SyntheticSourceConfig synthetic;
    TrainerConfig trainer;
    std::uint64_t seed = 0;
    std::string output_path;
    bool record_timing = false;

    std::size_t selection_size() const { return m ? m : n - f; }
    void validate() const;
};

/// Applies every recognised key of `doc` on top of `base`; unknown keys are an error.
ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig base = {});

struct RoundRecord {
    std::size_t round = 0;  // 1-based
    SelectionResult selection;
    std::vector<int> selected_clients;  // client ids, ascending
    RoundMetrics metrics;
    double wall_ms = 0.0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<RoundRecord> rounds;
    RoundMetrics aggregate;
    std::uint64_t model_hash = 0;  // FNV-1a over the final weight bytes
};

/// What the aggregator saw in one round; positions are a per-round permutation of client ids.
struct RoundInputs {
    std::vector<ClientUpdate> updates;
    VectorSet full;
    ProjectedSet projected;
};

using RoundObserver = std::function<void(std::size_t round, const RoundInputs&, const SelectionResult&)>;

/// Runs the configured aggregator on one round's inputs.
SelectionResult aggregate_round(const ExperimentConfig& config, const RoundInputs& inputs, std::size_t round);

/// Deterministic in (config, seed); worker count only affects speed.
ExperimentReport run_experiment(const ExperimentConfig& config, const RoundObserver& observer = {});

std::uint64_t fnv1a(const std::vector<double>& values);

}  // namespace bqfl
