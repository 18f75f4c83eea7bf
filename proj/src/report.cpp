#include "bqfl/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace bqfl {

namespace {

std::string gap_text(const std::optional<GapResult>& gap) { return gap ? format_real(gap->delta) : ""; }

nlohmann::ordered_json gap_json(const std::optional<GapResult>& gap) {
    if (!gap) {
        return nullptr;
    }
    if (gap->degenerate || std::isinf(gap->delta)) {
        return "inf";
    }
    return gap->delta;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::string format_real(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

void write_round_csv(std::ostream& out, const ExperimentReport& report) {
    const auto& c = report.config;
    out << "round,attack,aggregator,regime,delta_E,delta_C,tp,fp,tn,fn,detection_accuracy,f1,byz_rejection,"
           "honest_retention,solver_method,wall_ms\n";
    for (const auto& r : report.rounds) {
        const auto& s = r.selection;
        const auto& m = r.metrics;
        out << r.round << ',' << to_string(c.attack.kind) << ',' << to_string(c.aggregator) << ','
            << (s.regime ? std::string(to_string(*s.regime)) : std::string()) << ',' << gap_text(s.delta_E) << ','
            << gap_text(s.delta_C) << ',' << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn << ','
            << format_real(m.detection_accuracy) << ',' << format_real(m.f1) << ','
            << format_real(m.byzantine_rejection_rate) << ',' << format_real(m.honest_retention_rate) << ','
            << to_string(s.method) << ',' << format_real(r.wall_ms) << '\n';
    }
}

nlohmann::ordered_json metrics_to_json(const RoundMetrics& m) {
    return {
        {"tp", m.tp},
        {"fp", m.fp},
        {"tn", m.tn},
        {"fn", m.fn},
        {"detection_accuracy", m.detection_accuracy},
        {"f1", m.f1},
        {"byz_rejection", m.byzantine_rejection_rate},
        {"honest_retention", m.honest_retention_rate},
    };
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    using nlohmann::ordered_json;
    const auto& a = c.attack;
    auto range = [](const Range& r) { return ordered_json::array({r.lo, r.hi}); };
    ordered_json j;
    j["experiment"] = {
        {"n", c.n},
        {"f", c.f},
        {"m", c.selection_size()},
        {"rounds", c.rounds},
        {"projection_k", c.projection_k},
        {"learning_rate", c.learning_rate},
        {"gradient_source", to_string(c.gradient_source)},
        {"aggregator", to_string(c.aggregator)},
        {"krum_space", to_string(c.krum_space)},
        {"seed", c.seed},
        {"output_path", c.output_path},
        {"record_timing", c.record_timing},
    };
    j["attack"] = {
        {"kind", to_string(a.kind)},
        {"gaussian_alpha", a.gaussian_alpha},
        {"scale_alpha", a.scale_alpha},
        {"scale_noise_std", a.scale_noise_std},
        {"z_max", a.z_max},
        {"z_large_range", range(a.z_large_range)},
        {"negative_prob", a.negative_prob},
        {"alie_modify_prob", a.alie_modify_prob},
        {"targeted_modify_prob", a.targeted_modify_prob},
        {"targeted_shift", a.targeted_shift},
        {"sparse_fraction", a.sparse_fraction},
        {"z_ext_range", range(a.z_ext_range)},
        {"blatant_z_range", range(a.blatant_z_range)},
        {"blatant_eta_range", range(a.blatant_eta_range)},
        {"stealthy_std", a.stealthy_std},
        {"same_value_shift", a.same_value_shift},
        {"clustered_mult", a.clustered_mult},
        {"seed", a.seed},
    };
    j["routing"] = {{"tau_E", c.routing.tau_E}, {"tau_C", c.routing.tau_C}, {"cascade_tau", c.routing.cascade_tau}};
    j["vote"] = {
        {"agreed_accept_bonus", c.vote.agreed_accept_bonus},
        {"agreed_reject_penalty", c.vote.agreed_reject_penalty},
        {"classical_only_penalty", c.vote.classical_only_penalty},
        {"qubo_only_bonus", c.vote.qubo_only_bonus},
    };
    j["suspicion"] = {
        {"percentile_p", c.suspicion.percentile_p},
        {"percentile_method", "linear"},
        {"suspicion_weight_ws", c.suspicion.suspicion_weight_ws},
    };
    j["blend"] = {{"alpha", c.blend.alpha}, {"epsilon", c.blend.epsilon}};
    j["anneal"] = {
        {"reads", c.anneal.reads},
        {"sweeps_per_read", c.anneal.sweeps_per_read},
        {"beta_start", c.anneal.beta_start},
        {"beta_end", c.anneal.beta_end},
        {"schedule", "geometric"},
        {"seed", c.anneal.seed},
    };
    if (c.gradient_source == GradientSource::synthetic) {
        const auto& s = c.synthetic;
        j["synthetic"] = {
            {"d", s.d},
            {"center_scale", s.center_scale},
            {"center_bias", s.center_bias},
            {"honest_center_drift", s.honest_center_drift},
            {"honest_noise_std", s.honest_noise_std},
            {"magnitude_spread", s.magnitude_spread},
            {"noise_spread", s.noise_spread},
            {"client_offset_std", s.client_offset_std},
        };
    } else {
        const auto& t = c.trainer;
        j["trainer"] = {
            {"layers", t.layers},
            {"dataset", t.dataset == DatasetKind::synthetic_blobs ? "synthetic_blobs" : "idx_files"},
            {"batch_size", t.batch_size},
            {"epochs", t.epochs},
            {"learning_rate", t.learning_rate},
            {"weight_decay", t.weight_decay},
            {"grad_clip_norm", t.grad_clip_norm},
            {"samples_per_client", t.samples_per_client},
            {"blob_spread", t.blob_spread},
            {"idx_images", t.idx_images},
            {"idx_labels", t.idx_labels},
        };
    }
    return j;
}

nlohmann::ordered_json summary_json(const ExperimentReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["attack"] = to_string(report.config.attack.kind);
    j["aggregator"] = to_string(report.config.aggregator);
    j["rounds"] = report.rounds.size();
    j["aggregate"] = metrics_to_json(report.aggregate);
    j["final_model_hash"] = hex64(report.model_hash);
    ordered_json log = ordered_json::array();
    for (const auto& r : report.rounds) {
        const auto& s = r.selection;
        log.push_back({
            {"round", r.round},
            {"regime", s.regime ? ordered_json(to_string(*s.regime)) : ordered_json(nullptr)},
            {"delta_E", gap_json(s.delta_E)},
            {"delta_C", gap_json(s.delta_C)},
            {"method", to_string(s.method)},
            {"selected", r.selected_clients},
            {"agreement",
             {{"agreed_accept", s.agreement.agreed_accept},
              {"agreed_reject", s.agreement.agreed_reject},
              {"qubo_only", s.agreement.qubo_only},
              {"classical_only", s.agreement.classical_only}}},
            {"metrics", metrics_to_json(r.metrics)},
        });
    }
    j["decision_log"] = std::move(log);
    j["config"] = config_to_json(report.config);
    return j;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << contents;
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

}  // namespace bqfl
