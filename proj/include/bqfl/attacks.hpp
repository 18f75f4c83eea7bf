#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bqfl/core_model.hpp"

namespace bqfl {

enum class AttackKind {
    gaussian_noise,
    sign_flip,
    scale,
    targeted,
    clustered,
    same_value,
    lie,
    blatant_lie,
    alie,
    sparse_lie,
    label_flip,
    shuffle,
    stealthy,
};

inline constexpr std::size_t kAttackCount = 13;

std::string_view to_string(AttackKind kind);
/// Accepts the lower-snake-case names above plus "scaling"; the error lists valid names.
AttackKind parse_attack(std::string_view name);
std::vector<AttackKind> all_attacks();
std::string attack_names(std::string_view separator = ", ");

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct AttackSpec {
    AttackKind kind = AttackKind::gaussian_noise;
    double gaussian_alpha = 10.0;
    double scale_alpha = 10.0;
    double scale_noise_std = 0.1;
    double z_max = 1.0;
    Range z_large_range{3.0, 8.0};
    double negative_prob = 0.7;
    double alie_modify_prob = 0.2;
    double targeted_modify_prob = 0.1;
    double targeted_shift = 5.0;
    double sparse_fraction = 0.05;
    Range z_ext_range{5.0, 15.0};
    Range blatant_z_range{1.75, 3.25};
    Range blatant_eta_range{0.1, 0.4};
    double stealthy_std = 0.05;
    double same_value_shift = 3.0;
    double clustered_mult = 2.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/*
 * Produces f Byzantine gradients from the honest statistics. Byzantine client
 * b draws from its own stream derived from (seed, b), so each client redraws
 * its scalars and masks independently. `honest_pool` feeds the shuffle attack.
 */
std::vector<GradientVector> generate(const AttackSpec& spec, const HonestStats& stats, std::size_t f,
                                     std::span<const GradientVector> honest_pool);

/// Coordinates attacked by sparse_lie: the max(1, floor(fraction d)) largest sigma, ties to lower index.
std::vector<std::size_t> sparse_lie_support(std::span<const double> sigma, double fraction);

}  // namespace bqfl
