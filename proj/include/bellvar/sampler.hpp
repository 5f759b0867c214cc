#pragma once

#include <array>
#include <cstdint>

#include "bellvar/bell.hpp"

namespace bellvar {

struct SampleEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long n_trials = 0;
    std::uint64_t rng_seed = 0;
};

/// Joint outcome probabilities for (A, B) in the order (+,+), (+,-), (-,+), (-,-),
/// from the projectors (I +- A)/2 (x) (I +- B)/2.
std::array<double, 4> joint_outcome_probabilities(const QubitPairState& state, const Observable& first,
                                                  const Observable& second);

/// Monte Carlo estimate of <A (x) B> from simulated +-1 outcome pairs.
/// Trials are split into fixed-size blocks with per-block seeds derived
/// from rng_seed, so the estimate does not depend on `jobs`.
/// Throws DomainError for an invalid state or n_trials < 1.
SampleEstimate sample_correlation(const QubitPairState& state, const Observable& first, const Observable& second,
                                  long long n_trials, std::uint64_t rng_seed, unsigned jobs = 1);

} // namespace bellvar
