#include "bqfl/attacks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bqfl/rng.hpp"

namespace bqfl {

namespace {

constexpr std::array<std::pair<AttackKind, std::string_view>, kAttackCount> kNames{{
    {AttackKind::gaussian_noise, "gaussian_noise"},
    {AttackKind::sign_flip, "sign_flip"},
    {AttackKind::scale, "scale"},
    {AttackKind::targeted, "targeted"},
    {AttackKind::clustered, "clustered"},
    {AttackKind::same_value, "same_value"},
    {AttackKind::lie, "lie"},
    {AttackKind::blatant_lie, "blatant_lie"},
    {AttackKind::alie, "alie"},
    {AttackKind::sparse_lie, "sparse_lie"},
    {AttackKind::label_flip, "label_flip"},
    {AttackKind::shuffle, "shuffle"},
    {AttackKind::stealthy, "stealthy"},
}};

void check_range(const Range& r, const char* name) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw std::invalid_argument(std::string("attack range ") + name + " is empty");
    }
}

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string("attack probability ") + name + " must lie in [0, 1]");
    }
}

}  // namespace

std::string_view to_string(AttackKind kind) {
    for (const auto& [k, name] : kNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

std::vector<AttackKind> all_attacks() {
    std::vector<AttackKind> out;
    for (const auto& entry : kNames) {
        out.push_back(entry.first);
    }
    return out;
}

std::string attack_names(std::string_view separator) {
    std::string out;
    for (const auto& entry : kNames) {
        if (!out.empty()) {
            out += separator;
        }
        out += entry.second;
    }
    return out;
}

AttackKind parse_attack(std::string_view name) {
    if (name == "scaling") {
        return AttackKind::scale;
    }
    for (const auto& [k, n] : kNames) {
        if (n == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown attack '" + std::string(name) + "'; valid names: " + attack_names());
}

void AttackSpec::validate() const {
    check_range(z_large_range, "z_large_range");
    check_range(z_ext_range, "z_ext_range");
    check_range(blatant_z_range, "blatant_z_range");
    check_range(blatant_eta_range, "blatant_eta_range");
    check_prob(negative_prob, "negative_prob");
    check_prob(alie_modify_prob, "alie_modify_prob");
    check_prob(targeted_modify_prob, "targeted_modify_prob");
    if (!(sparse_fraction > 0.0 && sparse_fraction <= 1.0)) {
        throw std::invalid_argument("sparse_fraction must lie in (0, 1]");
    }
    if (!(stealthy_std >= 0.0) || !(scale_noise_std >= 0.0) || !(gaussian_alpha >= 0.0)) {
        throw std::invalid_argument("attack noise scales must be nonnegative");
    }
}

std::vector<std::size_t> sparse_lie_support(std::span<const double> sigma, double fraction) {
    const std::size_t d = sigma.size();
    const auto count = std::min(d, std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d)))));
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<GradientVector> generate(const AttackSpec& spec, const HonestStats& stats, std::size_t f,
                                     std::span<const GradientVector> honest_pool) {
    spec.validate();
    const std::size_t d = stats.dimension();
    if (d == 0 || stats.sigma.size() != d) {
        throw std::invalid_argument("honest statistics are empty or inconsistent");
    }
    if (spec.kind == AttackKind::label_flip) {
        throw std::invalid_argument("label flip requires trainer backend");
    }
    if (spec.kind == AttackKind::shuffle && honest_pool.empty()) {
        throw std::invalid_argument("shuffle attack needs a nonempty honest pool");
    }
    const auto& mu = stats.mu;
    const auto& sigma = stats.sigma;

    std::vector<std::size_t> sparse_support;
    if (spec.kind == AttackKind::sparse_lie) {
        sparse_support = sparse_lie_support(sigma, spec.sparse_fraction);
    }
    double mean_sigma = 0.0;
    if (spec.kind == AttackKind::blatant_lie) {
        mean_sigma = std::accumulate(sigma.begin(), sigma.end(), 0.0) / static_cast<double>(d);
    }

    std::vector<GradientVector> out;
    out.reserve(f);
    for (std::size_t b = 0; b < f; ++b) {
        RandomStream rng(derive_seed(spec.seed, {b}));
        std::vector<double> g(d);
        switch (spec.kind) {
        case AttackKind::gaussian_noise:
            for (auto& v : g) {
                v = spec.gaussian_alpha * rng.normal();
            }
            break;
        case AttackKind::sign_flip:
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = -mu[j];
            }
            break;
        case AttackKind::scale:
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = spec.scale_alpha * mu[j] + spec.scale_noise_std * rng.normal();
            }
            break;
        case AttackKind::targeted:
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = rng.bernoulli(spec.targeted_modify_prob) ? mu[j] + spec.targeted_shift * sigma[j] : mu[j];
            }
            break;
        case AttackKind::clustered: {
            const double shift = spec.clustered_mult * static_cast<double>(f);
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = mu[j] + shift * sigma[j];
            }
            break;
        }
        case AttackKind::same_value:
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = mu[j] + spec.same_value_shift * sigma[j];
            }
            break;
        case AttackKind::lie:
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = mu[j] - spec.z_max * sigma[j];
            }
            break;
        case AttackKind::blatant_lie: {
            const double direction = rng.bernoulli(0.5) ? 1.0 : -1.0;
            const double z = rng.uniform(spec.blatant_z_range.lo, spec.blatant_z_range.hi);
            const double eta = rng.uniform(spec.blatant_eta_range.lo, spec.blatant_eta_range.hi) * mean_sigma;
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = mu[j] + direction * z * sigma[j] + eta * rng.normal();
            }
            break;
        }
        case AttackKind::alie: {
            const double z = rng.uniform(spec.z_large_range.lo, spec.z_large_range.hi);
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = mu[j];
                if (rng.bernoulli(spec.alie_modify_prob)) {
                    const double sign = rng.bernoulli(spec.negative_prob) ? -1.0 : 1.0;
                    g[j] += sign * z * sigma[j];
                }
            }
            break;
        }
        case AttackKind::sparse_lie: {
            const double z = rng.uniform(spec.z_ext_range.lo, spec.z_ext_range.hi);
            g.assign(mu.begin(), mu.end());
            for (const std::size_t j : sparse_support) {
                g[j] = mu[j] - z * sigma[j];
            }
            break;
        }
        case AttackKind::shuffle: {
            const auto& source = honest_pool[rng.index(honest_pool.size())];
            if (source.size() != d) {
                throw std::invalid_argument("honest pool dimension mismatch");
            }
            g.assign(source.data().begin(), source.data().end());
            rng.shuffle(g);
            break;
        }
        case AttackKind::stealthy:
            for (std::size_t j = 0; j < d; ++j) {
                g[j] = mu[j] + spec.stealthy_std * rng.normal();
            }
            break;
        case AttackKind::label_flip:
            break;
        }
        out.emplace_back(std::move(g));
    }
    return out;
}

}  // namespace bqfl
