#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bqfl/qubo.hpp"

namespace bqfl {

struct AnnealConfig {
    std::size_t reads = 1000;
    std::size_t sweeps_per_read = 1000;
    double beta_start = 0.1;
    double beta_end = 10.0;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 = hardware concurrency; never affects results

    void validate() const;
};

struct SampleSet {
    Assignment best_assignment;
    double best_energy = 0.0;
    std::vector<double> all_read_energies;
};

/*
 * Single-flip Metropolis annealing. Each read starts from a uniformly random
 * assignment and sweeps all variables in index order at each rung of a
 * geometric inverse-temperature ladder. Read r draws from a stream derived
 * from (seed, r), so the result does not depend on how reads are scheduled.
 */
SampleSet simulated_anneal(const QuboModel& q, const AnnealConfig& config);

struct ExactSolution {
    Assignment assignment;
    double energy = 0.0;
};

inline constexpr std::size_t kMaxExactVariables = 24;

/// Exhaustive minimum; ties go to the lexicographically smallest assignment.
ExactSolution brute_force_solve(const QuboModel& q);

}  // namespace bqfl
