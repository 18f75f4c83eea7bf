#include "bqfl/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace bqfl {

namespace {

constexpr std::uint64_t kCenterSalt = 0xc3;
constexpr std::uint64_t kDriftSalt = 0xd1;
constexpr std::uint64_t kClientSalt = 0xe7;
constexpr std::uint64_t kOffsetSalt = 0x0f;

}  // namespace

void SyntheticSourceConfig::validate() const {
    if (d == 0) {
        throw std::invalid_argument("synthetic.d must be positive");
    }
    if (!(honest_noise_std > 0.0)) {
        throw std::invalid_argument("synthetic.honest_noise_std must be positive");
    }
    if (center_scale < 0.0 || honest_center_drift < 0.0 || magnitude_spread < 0.0 || noise_spread < 0.0 ||
        client_offset_std < 0.0) {
        throw std::invalid_argument("synthetic scales must be nonnegative");
    }
}

std::vector<GradientVector> synthetic_honest_gradients(const SyntheticSourceConfig& config,
                                                       const std::vector<double>& center, std::size_t n_honest,
                                                       RandomStream& stream) {
    std::vector<GradientVector> out;
    out.reserve(n_honest);
    for (std::size_t i = 0; i < n_honest; ++i) {
        std::vector<double> g(center.size());
        for (std::size_t j = 0; j < g.size(); ++j) {
            g[j] = center[j] + config.honest_noise_std * stream.normal();
        }
        out.emplace_back(std::move(g));
    }
    return out;
}

SyntheticSource::SyntheticSource(SyntheticSourceConfig config, std::uint64_t seed)
    : config_(config), seed_(seed), center_(config.d) {
    config_.validate();
    RandomStream stream(derive_seed(seed_, {kCenterSalt}));
    for (auto& c : center_) {
        c = config_.center_scale * (config_.center_bias + stream.normal());
    }
}

std::vector<GradientVector> SyntheticSource::honest_gradients(std::size_t round, std::size_t n_honest) {
    if (round < round_) {
        throw std::logic_error("synthetic rounds must be requested in order");
    }
    for (; round_ < round; ++round_) {
        RandomStream drift(derive_seed(seed_, {kDriftSalt, round_}));
        for (auto& c : center_) {
            c += config_.honest_center_drift * drift.normal();
        }
    }

    std::vector<GradientVector> out;
    out.reserve(n_honest);
    for (std::size_t i = 0; i < n_honest; ++i) {
        RandomStream stream(derive_seed(seed_, {kClientSalt, round, i}));
        const double a = config_.magnitude_spread > 0.0 ? std::exp(config_.magnitude_spread * stream.normal()) : 1.0;
        const double s = config_.honest_noise_std *
                         (config_.noise_spread > 0.0 ? std::exp(config_.noise_spread * stream.normal()) : 1.0);
        std::vector<double> g(config_.d);
        for (std::size_t j = 0; j < g.size(); ++j) {
            g[j] = a * center_[j] + s * stream.normal();
        }
        if (config_.client_offset_std > 0.0) {
            RandomStream offset(derive_seed(seed_, {kOffsetSalt, i}));
            for (auto& v : g) {
                v += config_.client_offset_std * offset.normal();
            }
        }
        out.emplace_back(std::move(g));
    }
    return out;
}

}  // namespace bqfl
