#include "bqfl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "bqfl/rng.hpp"

namespace bqfl {

namespace {

constexpr std::uint64_t kAttackSalt = 0xa7;
constexpr std::uint64_t kPermSalt = 0x9e;
constexpr std::uint64_t kAnnealSalt = 0x5a;
constexpr std::uint64_t kSourceSalt = 0x50;
constexpr std::uint64_t kInitSalt = 0x11;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const std::pair<Enum, std::string_view> (&table)[N], const char* what) {
    std::string valid;
    for (const auto& [value, text] : table) {
        if (text == name) {
            return value;
        }
        valid += valid.empty() ? "" : ", ";
        valid += text;
    }
    throw std::invalid_argument("unknown " + std::string(what) + " '" + std::string(name) + "'; valid: " + valid);
}

constexpr std::pair<Aggregator, std::string_view> kAggregators[] = {
    {Aggregator::classical, "classical"},
    {Aggregator::qubo, "qubo"},
    {Aggregator::cascade, "cascade"},
    {Aggregator::multisignal, "multisignal"},
};
constexpr std::pair<GradientSource, std::string_view> kSources[] = {
    {GradientSource::synthetic, "synthetic"},
    {GradientSource::trainer, "trainer"},
};
constexpr std::pair<KrumSpace, std::string_view> kSpaces[] = {
    {KrumSpace::projected, "projected"},
    {KrumSpace::full, "full"},
};

template <typename Enum, std::size_t N>
std::string_view lookup(Enum value, const std::pair<Enum, std::string_view> (&table)[N]) {
    for (const auto& [v, text] : table) {
        if (v == value) {
            return text;
        }
    }
    return "unknown";
}

}  // namespace

std::string_view to_string(GradientSource source) { return lookup(source, kSources); }
std::string_view to_string(Aggregator aggregator) { return lookup(aggregator, kAggregators); }
std::string_view to_string(KrumSpace space) { return lookup(space, kSpaces); }
Aggregator parse_aggregator(std::string_view name) { return parse_enum(name, kAggregators, "aggregator"); }
GradientSource parse_gradient_source(std::string_view name) { return parse_enum(name, kSources, "gradient source"); }
KrumSpace parse_krum_space(std::string_view name) { return parse_enum(name, kSpaces, "krum space"); }

void ExperimentConfig::validate() const {
    if (rounds == 0) {
        throw std::invalid_argument("experiment.rounds must be at least 1");
    }
    if (n < f + 3) {
        throw std::invalid_argument("experiment.n must be at least f + 3");
    }
    if (n - f < 2) {
        throw std::invalid_argument("experiment needs at least two honest clients");
    }
    const std::size_t sel = selection_size();
    if (sel < 1 || sel > n) {
        throw std::invalid_argument("experiment.m must lie in [1, n]");
    }
    if (projection_k == 0) {
        throw std::invalid_argument("experiment.projection_k must be positive");
    }
    if (!(learning_rate > 0.0)) {
        throw std::invalid_argument("experiment.learning_rate must be positive");
    }
    if (!(blend.alpha >= 0.0 && blend.alpha <= 1.0) || !(blend.epsilon > 0.0)) {
        throw std::invalid_argument("blend.alpha must lie in [0, 1] and blend.epsilon must be positive");
    }
    if (!(suspicion.percentile_p > 0.0 && suspicion.percentile_p < 100.0) || !(suspicion.suspicion_weight_ws > 0.0)) {
        throw std::invalid_argument("suspicion.percentile_p must lie in (0, 100) and suspicion_weight_ws > 0");
    }
    attack.validate();
    routing.validate();
    vote.validate();
    anneal.validate();
    if (gradient_source == GradientSource::synthetic) {
        synthetic.validate();
        if (attack.kind == AttackKind::label_flip && f > 0) {
            throw std::invalid_argument("label flip requires trainer backend");
        }
    } else {
        trainer.validate();
    }
}

namespace {

template <typename T>
void read_size(const ConfigDocument& doc, const std::string& key, T& out) {
    if (const auto v = doc.get_int(key)) {
        if (*v < 0) {
            throw std::runtime_error("config field '" + key + "' must be nonnegative");
        }
        out = static_cast<T>(*v);
    }
}

void read_real(const ConfigDocument& doc, const std::string& key, double& out) {
    if (const auto v = doc.get_double(key)) {
        out = *v;
    }
}

void read_range(const ConfigDocument& doc, const std::string& key, Range& out) {
    if (const auto v = doc.get_list(key)) {
        if (v->size() != 2) {
            throw std::runtime_error("config field '" + key + "' expects [lo, hi]");
        }
        try {
            out = Range{std::stod((*v)[0]), std::stod((*v)[1])};
        } catch (const std::exception&) {
            throw std::runtime_error("config field '" + key + "' expects two numbers");
        }
    }
}

template <typename Fn>
void with_field(const std::string& key, Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("config field '" + key + "': " + e.what());
    }
}

}  // namespace

ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig c) {
    read_size(doc, "experiment.n", c.n);
    read_size(doc, "experiment.f", c.f);
    read_size(doc, "experiment.m", c.m);
    read_size(doc, "experiment.rounds", c.rounds);
    read_size(doc, "experiment.projection_k", c.projection_k);
    read_real(doc, "experiment.learning_rate", c.learning_rate);
    if (const auto v = doc.get_string("experiment.gradient_source")) {
        with_field("experiment.gradient_source", [&] { c.gradient_source = parse_gradient_source(*v); });
    }
    if (const auto v = doc.get_string("experiment.aggregator")) {
        with_field("experiment.aggregator", [&] { c.aggregator = parse_aggregator(*v); });
    }
    if (const auto v = doc.get_string("experiment.krum_space")) {
        with_field("experiment.krum_space", [&] { c.krum_space = parse_krum_space(*v); });
    }
    read_size(doc, "experiment.seed", c.seed);
    if (const auto v = doc.get_string("experiment.output_path")) {
        c.output_path = *v;
    }
    if (const auto v = doc.get_bool("experiment.record_timing")) {
        c.record_timing = *v;
    }

    auto& a = c.attack;
    if (const auto v = doc.get_string("attack.kind")) {
        with_field("attack.kind", [&] { a.kind = parse_attack(*v); });
    }
    read_real(doc, "attack.gaussian_alpha", a.gaussian_alpha);
    read_real(doc, "attack.scale_alpha", a.scale_alpha);
    read_real(doc, "attack.scale_noise_std", a.scale_noise_std);
    read_real(doc, "attack.z_max", a.z_max);
    read_range(doc, "attack.z_large_range", a.z_large_range);
    read_real(doc, "attack.negative_prob", a.negative_prob);
    read_real(doc, "attack.alie_modify_prob", a.alie_modify_prob);
    read_real(doc, "attack.targeted_modify_prob", a.targeted_modify_prob);
    read_real(doc, "attack.targeted_shift", a.targeted_shift);
    read_real(doc, "attack.sparse_fraction", a.sparse_fraction);
    read_range(doc, "attack.z_ext_range", a.z_ext_range);
    read_range(doc, "attack.blatant_z_range", a.blatant_z_range);
    read_range(doc, "attack.blatant_eta_range", a.blatant_eta_range);
    read_real(doc, "attack.stealthy_std", a.stealthy_std);
    read_real(doc, "attack.same_value_shift", a.same_value_shift);
    read_real(doc, "attack.clustered_mult", a.clustered_mult);
    read_size(doc, "attack.seed", a.seed);

    read_real(doc, "routing.tau_E", c.routing.tau_E);
    read_real(doc, "routing.tau_C", c.routing.tau_C);
    read_real(doc, "routing.cascade_tau", c.routing.cascade_tau);
    read_real(doc, "vote.agreed_accept_bonus", c.vote.agreed_accept_bonus);
    read_real(doc, "vote.agreed_reject_penalty", c.vote.agreed_reject_penalty);
    read_real(doc, "vote.classical_only_penalty", c.vote.classical_only_penalty);
    read_real(doc, "vote.qubo_only_bonus", c.vote.qubo_only_bonus);
    read_real(doc, "suspicion.percentile_p", c.suspicion.percentile_p);
    read_real(doc, "suspicion.suspicion_weight_ws", c.suspicion.suspicion_weight_ws);
    read_real(doc, "blend.alpha", c.blend.alpha);
    read_real(doc, "blend.epsilon", c.blend.epsilon);

    read_size(doc, "anneal.reads", c.anneal.reads);
    read_size(doc, "anneal.sweeps_per_read", c.anneal.sweeps_per_read);
    read_real(doc, "anneal.beta_start", c.anneal.beta_start);
    read_real(doc, "anneal.beta_end", c.anneal.beta_end);
    read_size(doc, "anneal.seed", c.anneal.seed);
    read_size(doc, "anneal.workers", c.anneal.workers);

    auto& s = c.synthetic;
    read_size(doc, "synthetic.d", s.d);
    read_real(doc, "synthetic.center_scale", s.center_scale);
    read_real(doc, "synthetic.center_bias", s.center_bias);
    read_real(doc, "synthetic.honest_center_drift", s.honest_center_drift);
    read_real(doc, "synthetic.honest_noise_std", s.honest_noise_std);
    read_real(doc, "synthetic.magnitude_spread", s.magnitude_spread);
    read_real(doc, "synthetic.noise_spread", s.noise_spread);
    read_real(doc, "synthetic.client_offset_std", s.client_offset_std);

    auto& t = c.trainer;
    if (const auto v = doc.get_list("trainer.layers")) {
        t.layers.clear();
        for (const auto& item : *v) {
            try {
                t.layers.push_back(static_cast<std::size_t>(std::stoul(item)));
            } catch (const std::exception&) {
                throw std::runtime_error("config field 'trainer.layers' expects positive integers");
            }
        }
    }
    if (const auto v = doc.get_string("trainer.dataset")) {
        if (*v == "synthetic_blobs") {
            t.dataset = DatasetKind::synthetic_blobs;
        } else if (*v == "idx_files") {
            t.dataset = DatasetKind::idx_files;
        } else {
            throw std::runtime_error("config field 'trainer.dataset' expects synthetic_blobs or idx_files");
        }
    }
    read_size(doc, "trainer.batch_size", t.batch_size);
    read_size(doc, "trainer.epochs", t.epochs);
    read_real(doc, "trainer.learning_rate", t.learning_rate);
    read_real(doc, "trainer.weight_decay", t.weight_decay);
    read_real(doc, "trainer.grad_clip_norm", t.grad_clip_norm);
    read_size(doc, "trainer.samples_per_client", t.samples_per_client);
    read_real(doc, "trainer.blob_spread", t.blob_spread);
    if (const auto v = doc.get_string("trainer.idx_images")) {
        t.idx_images = *v;
    }
    if (const auto v = doc.get_string("trainer.idx_labels")) {
        t.idx_labels = *v;
    }

    for (const auto& key : doc.keys()) {
        if (key.rfind("sweep.", 0) == 0) {
            doc.touch(key);
        }
    }
    const auto unknown = doc.unknown_keys();
    if (!unknown.empty()) {
        throw std::runtime_error("unknown config field '" + unknown.front() + "'");
    }
    return c;
}

std::uint64_t fnv1a(const std::vector<double>& values) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const double v : values) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (const unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

SelectionResult aggregate_round(const ExperimentConfig& config, const RoundInputs& inputs, std::size_t round) {
    const std::size_t m = config.selection_size();
    const std::size_t f = config.f;
    const VectorSet& projected = inputs.projected.values;
    const VectorSet& krum_space = config.krum_space == KrumSpace::full ? inputs.full : projected;
    AnnealConfig anneal = config.anneal;
    anneal.seed = derive_seed(config.seed, {kAnnealSalt, round, config.anneal.seed});

    switch (config.aggregator) {
    case Aggregator::classical: {
        SelectionResult r;
        r.method = SelectionMethod::classical;
        r.selected = multikrum_select(krum_scores(krum_space, f), m);
        return r;
    }
    case Aggregator::qubo: {
        SelectionResult r;
        r.method = SelectionMethod::qubo;
        r.selected = qubo_select(cosine_matrix(projected, config.blend.epsilon), m, anneal);
        return r;
    }
    case Aggregator::cascade:
        return cascaded_dual_qubo(krum_space, projected, m, f, CascadeConfig{config.routing, config.blend, anneal});
    case Aggregator::multisignal:
        return multisignal_aggregate(inputs.full, projected, m, f,
                                     MultiSignalConfig{config.routing, config.vote, config.suspicion, config.blend,
                                                       anneal});
    }
    throw std::logic_error("unhandled aggregator");
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RoundObserver& observer) {
    config.validate();
    const std::size_t n = config.n;
    const std::size_t f = config.f;
    const std::size_t honest_count = n - f;

    ExperimentReport report;
    report.config = config;

    const bool synthetic = config.gradient_source == GradientSource::synthetic;
    std::optional<SyntheticSource> source;
    std::vector<DataShard> shards;
    GlobalModel model;
    model.eta = config.learning_rate;
    if (synthetic) {
        source.emplace(config.synthetic, derive_seed(config.seed, {kSourceSalt}));
        model.weights.assign(config.synthetic.d, 0.0);
    } else {
        shards = make_client_shards(config.trainer, n, derive_seed(config.seed, {kSourceSalt}));
        model.weights = init_parameters(config.trainer.layers, derive_seed(config.seed, {kInitSalt}));
    }

    std::vector<RoundMetrics> metrics;
    for (std::size_t round = 0; round < config.rounds; ++round) {
        const auto start = std::chrono::steady_clock::now();

        std::vector<GradientVector> honest;
        if (synthetic) {
            honest = source->honest_gradients(round, honest_count);
        } else {
            honest.reserve(honest_count);
            for (std::size_t i = 0; i < honest_count; ++i) {
                honest.push_back(local_train_step(model, config.trainer, shards[i], false));
            }
        }
        const auto stats = compute_honest_stats(std::span<const GradientVector>(honest));

        std::vector<GradientVector> byzantine;
        if (f > 0) {
            if (config.attack.kind == AttackKind::label_flip) {
                for (std::size_t b = 0; b < f; ++b) {
                    byzantine.push_back(local_train_step(model, config.trainer, shards[honest_count + b], true));
                }
            } else {
                AttackSpec spec = config.attack;
                spec.seed = derive_seed(config.seed, {kAttackSalt, round, config.attack.seed});
                byzantine = generate(spec, stats, f, honest);
            }
        }

        // Client ids 0..n-f-1 are honest; positions are shuffled every round.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        RandomStream perm(derive_seed(config.seed, {kPermSalt, round}));
        perm.shuffle(order);

        RoundInputs inputs;
        inputs.updates.resize(n);
        for (std::size_t pos = 0; pos < n; ++pos) {
            const std::size_t id = order[pos];
            auto& u = inputs.updates[pos];
            u.client_id = static_cast<int>(id);
            u.is_byzantine = id >= honest_count;
            u.gradient = u.is_byzantine ? byzantine[id - honest_count] : honest[id];
        }
        std::vector<GradientVector> gradients;
        gradients.reserve(n);
        for (const auto& u : inputs.updates) {
            gradients.push_back(u.gradient);
        }
        inputs.full = VectorSet::from_gradients(gradients);
        inputs.projected = importance_project(inputs.full, ProjectionConfig{config.projection_k});

        RoundRecord record;
        record.round = round + 1;
        record.selection = aggregate_round(config, inputs, round);
        if (record.selection.selected.size() != config.selection_size()) {
            throw std::logic_error("aggregator returned the wrong number of clients");
        }
        if (observer) {
            observer(round, inputs, record.selection);
        }

        std::vector<GradientVector> chosen;
        for (const auto pos : record.selection.selected) {
            chosen.push_back(inputs.updates[pos].gradient);
            record.selected_clients.push_back(inputs.updates[pos].client_id);
        }
        std::sort(record.selected_clients.begin(), record.selected_clients.end());
        model = apply_update(model, chosen);

        record.metrics = score_round(record.selection.selected, inputs.updates);
        metrics.push_back(record.metrics);
        if (config.record_timing) {
            record.wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
        report.rounds.push_back(std::move(record));
    }
    report.aggregate = aggregate_metrics(metrics);
    report.model_hash = fnv1a(model.weights);
    return report;
}

}  // namespace bqfl
