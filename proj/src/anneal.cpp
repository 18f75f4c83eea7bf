#include "bqfl/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "bqfl/rng.hpp"

namespace bqfl {

void AnnealConfig::validate() const {
    if (reads == 0) {
        throw std::invalid_argument("anneal reads must be positive");
    }
    if (sweeps_per_read == 0) {
        throw std::invalid_argument("anneal sweeps_per_read must be positive");
    }
    if (!(beta_start > 0.0) || !(beta_end > beta_start)) {
        throw std::invalid_argument("anneal schedule requires beta_end > beta_start > 0");
    }
}

namespace {

std::vector<double> beta_ladder(const AnnealConfig& config) {
    std::vector<double> betas(config.sweeps_per_read);
    if (betas.size() == 1) {
        betas[0] = config.beta_end;
        return betas;
    }
    const double ratio = std::log(config.beta_end / config.beta_start);
    const double steps = static_cast<double>(betas.size() - 1);
    for (std::size_t s = 0; s < betas.size(); ++s) {
        betas[s] = config.beta_start * std::exp(ratio * static_cast<double>(s) / steps);
    }
    return betas;
}

// Above this, exp(-beta * dE) underflows any 53-bit uniform draw.
constexpr double kRejectExponent = 40.0;

// xoshiro256** for the inner Metropolis loop; seeded through splitmix64.
class FastStream {
public:
    explicit FastStream(std::uint64_t seed) {
        for (auto& word : state_) {
            seed = mix_seed(seed, 0x9e3779b97f4a7c15ULL);
            word = seed;
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

Assignment anneal_read(const QuboModel& q, const std::vector<double>& betas, std::uint64_t seed) {
    const std::size_t n = q.size();
    FastStream stream(seed);
    Assignment x(n);
    for (auto& v : x) {
        v = static_cast<std::uint8_t>(stream.next() >> 63);
    }

    // field[i] = Q_ii + sum_j Q_ij x_j. With flip[i] = +1 when x_i = 0 and -1
    // otherwise, flipping i changes E by flip[i] * field[i].
    std::vector<double> field(q.linear().begin(), q.linear().end());
    std::vector<double> flip(n);
    for (std::size_t i = 0; i < n; ++i) {
        flip[i] = x[i] ? -1.0 : 1.0;
        if (x[i]) {
            const auto row = q.coupling_row(i);
            for (std::size_t j = 0; j < n; ++j) {
                field[j] += row[j];
            }
        }
    }

    for (const double beta : betas) {
        bool frozen = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = flip[i] * field[i];
            if (delta > 0.0) {
                const double exponent = beta * delta;
                if (exponent >= kRejectExponent) {
                    continue;
                }
                frozen = false;
                // 1 - t <= exp(-t) <= 1 / (1 + t + t^2 / 2) settles most draws without exp.
                const double u = stream.uniform();
                if (u >= 1.0 - exponent &&
                    (u * (1.0 + exponent + 0.5 * exponent * exponent) >= 1.0 || u >= std::exp(-exponent))) {
                    continue;
                }
            }
            frozen = false;
            const double sign = flip[i];
            flip[i] = -sign;
            const double* row = q.coupling_row(i).data();
            for (std::size_t j = 0; j < n; ++j) {
                field[j] += sign * row[j];
            }
        }
        // Every flip was rejected without a draw; beta only grows, so nothing
        // can change in the remaining sweeps.
        if (frozen) {
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = flip[i] < 0.0 ? 1 : 0;
    }
    return x;
}

}  // namespace

SampleSet simulated_anneal(const QuboModel& q, const AnnealConfig& config) {
    config.validate();
    if (q.size() == 0) {
        throw std::invalid_argument("cannot anneal an empty model");
    }
    const auto betas = beta_ladder(config);
    const std::size_t reads = config.reads;
    std::vector<Assignment> samples(reads);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            samples[r] = anneal_read(q, betas, derive_seed(config.seed, {0x5a, r}));
        }
    };

    std::size_t workers = config.workers ? config.workers : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min(workers, reads);
    if (workers <= 1) {
        run_range(0, reads);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (reads + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(reads, begin + chunk);
            if (begin < end) {
                pool.emplace_back(run_range, begin, end);
            }
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    SampleSet out;
    out.all_read_energies.resize(reads);
    std::size_t best = 0;
    for (std::size_t r = 0; r < reads; ++r) {
        out.all_read_energies[r] = energy(q, samples[r]);
        if (out.all_read_energies[r] < out.all_read_energies[best]) {
            best = r;
        }
    }
    out.best_assignment = samples[best];
    out.best_energy = out.all_read_energies[best];
    return out;
}

namespace {

// Walks all 2^n assignments in Gray-code order (one flip per step, O(n) field
// update) and calls visit(mask, energy) for each, starting with all zeros.
template <typename Visit>
void gray_walk(const QuboModel& q, Visit&& visit) {
    const std::size_t n = q.size();
    Assignment x(n, 0);
    std::vector<double> field(q.linear().begin(), q.linear().end());
    double e = 0.0;
    std::uint32_t mask = 0;
    visit(mask, e);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < total; ++k) {
        const auto i = static_cast<std::size_t>(__builtin_ctzll(k));
        e += x[i] ? -field[i] : field[i];
        const double sign = x[i] ? -1.0 : 1.0;
        x[i] ^= 1U;
        mask ^= (std::uint32_t{1} << i);
        const auto row = q.coupling_row(i);
        for (std::size_t j = 0; j < n; ++j) {
            field[j] += sign * row[j];
        }
        visit(mask, e);
    }
}

Assignment unpack(std::uint32_t mask, std::size_t n) {
    Assignment x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    }
    return x;
}

// Lexicographic order on (x_0, x_1, ...): the lowest differing bit decides.
bool lex_less(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    const std::uint32_t low = diff & (~diff + 1U);
    return (a & low) == 0;
}

}  // namespace

ExactSolution brute_force_solve(const QuboModel& q) {
    const std::size_t n = q.size();
    if (n > kMaxExactVariables) {
        throw std::invalid_argument("instance too large for exact solve");
    }
    if (n == 0) {
        return {};
    }

    double best = 0.0;
    double scale = 0.0;
    gray_walk(q, [&](std::uint32_t, double e) {
        best = std::min(best, e);
        scale = std::max(scale, std::abs(e));
    });

    // Incremental sums drift by a few ulps, so every assignment near the
    // running minimum is re-scored from scratch before choosing.
    const double band = 1e-9 * std::max(1.0, scale);
    std::vector<std::uint32_t> candidates;
    gray_walk(q, [&](std::uint32_t mask, double e) {
        if (e <= best + band) {
            candidates.push_back(mask);
        }
    });

    ExactSolution out;
    std::uint32_t chosen = 0;
    bool have = false;
    for (const std::uint32_t mask : candidates) {
        const double e = energy(q, unpack(mask, n));
        if (!have || e < out.energy || (e == out.energy && lex_less(mask, chosen))) {
            out.energy = e;
            chosen = mask;
            have = true;
        }
    }
    out.assignment = unpack(chosen, n);
    return out;
}

}  // namespace bqfl
