#include "bellvar/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "parallel.hpp"

namespace bellvar {

namespace {

constexpr long long kBlockTrials = 1 << 16;

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block)
{
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (block + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// library implementations, unlike uniform_real_distribution.
double uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Matrix4c outcome_projector(const Observable& first, int first_sign, const Observable& second, int second_sign)
{
    const Matrix2c p = 0.5 * (Matrix2c::Identity() + static_cast<double>(first_sign) * first.matrix());
    const Matrix2c q = 0.5 * (Matrix2c::Identity() + static_cast<double>(second_sign) * second.matrix());
    Matrix4c out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = p(i, j) * q;
        }
    }
    return out;
}

} // namespace

std::array<double, 4> joint_outcome_probabilities(const QubitPairState& state, const Observable& first,
                                                  const Observable& second)
{
    constexpr int signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    std::array<double, 4> p{};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Matrix4c proj = outcome_projector(first, signs[k][0], second, signs[k][1]);
        p[k] = std::max(0.0, (state.matrix() * proj).trace().real());
        total += p[k];
    }
    for (double& v : p) {
        v /= total;
    }
    return p;
}

SampleEstimate sample_correlation(const QubitPairState& state, const Observable& first, const Observable& second,
                                  long long n_trials, std::uint64_t rng_seed, unsigned jobs)
{
    if (n_trials < 1) {
        throw DomainError("n_trials must be >= 1");
    }
    const StateCheck check = state.check();
    if (!check.ok()) {
        throw DomainError("cannot sample from an invalid density matrix: " + check.describe());
    }

    const auto p = joint_outcome_probabilities(state, first, second);
    const double c0 = p[0];
    const double c1 = c0 + p[1];
    const double c2 = c1 + p[2];

    const std::size_t blocks = static_cast<std::size_t>((n_trials + kBlockTrials - 1) / kBlockTrials);
    std::vector<long long> positive(blocks, 0);
    detail::parallel_for(blocks, jobs, [&](std::size_t b) {
        std::mt19937_64 rng(block_seed(rng_seed, b));
        const long long begin = static_cast<long long>(b) * kBlockTrials;
        const long long count = std::min(kBlockTrials, n_trials - begin);
        long long plus = 0; // outcome pairs with product +1
        for (long long t = 0; t < count; ++t) {
            const double u = uniform(rng);
            const int outcome = u < c0 ? 0 : u < c1 ? 1 : u < c2 ? 2 : 3;
            plus += (outcome == 0 || outcome == 3) ? 1 : 0;
        }
        positive[b] = plus;
    });

    long long plus = 0;
    for (long long v : positive) {
        plus += v;
    }
    SampleEstimate e;
    e.n_trials = n_trials;
    e.rng_seed = rng_seed;
    const double n = static_cast<double>(n_trials);
    e.mean = (2.0 * static_cast<double>(plus) - n) / n;
    if (n_trials > 1) {
        // Products are +-1, so the sample variance is n/(n-1) (1 - mean^2).
        const double variance = std::max(0.0, n / (n - 1.0) * (1.0 - e.mean * e.mean));
        e.std_error = std::sqrt(variance / n);
    }
    return e;
}

} // namespace bellvar
