#include "doctest.h"

#include <cmath>
#include <random>

#include "bellvar/sampler.hpp"
#include "oracles.hpp"

using namespace bellvar;
using oracle::pi;

TEST_CASE("joint probabilities reproduce the correlation")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    for (int k = 0; k < 50; ++k) {
        const QubitPairState s = werner_state(0.1 + 0.018 * k, u(rng));
        const Observable a = Observable::spherical(u(rng), u(rng));
        const Observable b = Observable::plane(u(rng));
        const auto p = joint_outcome_probabilities(s, a, b);
        CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs((p[0] - p[1] - p[2] + p[3]) - correlation(s, a, b)) <= 1e-12);
    }
}

TEST_CASE("sampling examples")
{
    const QubitPairState phi = QubitPairState::from_pure(basis::phi_plus());
    const SampleEstimate perfect = sample_correlation(phi, Observable::plane(0), Observable::plane(0), 100000, 0);
    CHECK(perfect.mean == 1.0);
    CHECK(perfect.std_error == 0.0);
    CHECK(perfect.n_trials == 100000);

    const QubitPairState noise(0.25 * Matrix4c::Identity());
    const SampleEstimate zero = sample_correlation(noise, Observable::plane(0), Observable::plane(pi / 2), 100000, 1);
    CHECK(std::abs(zero.mean) <= 5 * zero.std_error);
    CHECK(zero.std_error == doctest::Approx(1.0 / std::sqrt(100000.0)).epsilon(1e-3));

    const SampleEstimate w =
        sample_correlation(werner_state(0.6, pi / 4), Observable::plane(0.3), Observable::plane(1.1), 1000000, 2);
    CHECK(std::abs(w.mean - 0.6 * std::cos(0.8)) <= 5 * w.std_error);
}

TEST_CASE("estimate does not depend on the worker count and is seeded")
{
    const QubitPairState s = mems_state(0.4);
    const Observable a = Observable::plane(0.7), b = Observable::plane(2.0);
    const SampleEstimate one = sample_correlation(s, a, b, 300001, 9, 1);
    const SampleEstimate four = sample_correlation(s, a, b, 300001, 9, 4);
    CHECK(one.mean == four.mean);
    CHECK(one.std_error == four.std_error);
    const SampleEstimate other = sample_correlation(s, a, b, 300001, 10, 1);
    CHECK(other.mean != one.mean);
    CHECK(other.rng_seed == 10);
}

TEST_CASE("std_error is the sample standard deviation over sqrt(n)")
{
    const QubitPairState s = werner_state(0.5, 0.2);
    const SampleEstimate e = sample_correlation(s, Observable::plane(0.1), Observable::plane(0.9), 1000, 3);
    const double n = 1000.0;
    const double sd = std::sqrt(n / (n - 1) * (1 - e.mean * e.mean));
    CHECK(e.std_error == doctest::Approx(sd / std::sqrt(n)).epsilon(1e-12));
    CHECK(std::abs(e.mean) <= 1.0);
    const SampleEstimate single = sample_correlation(s, Observable::plane(0.1), Observable::plane(0.9), 1, 3);
    CHECK(std::abs(single.mean) == 1.0);
}

TEST_CASE("sampler agrees with the analytic engine on random configurations")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2 * pi);
    int outside = 0;
    for (int k = 0; k < 50; ++k) {
        const auto w = oracle::random_weights(rng, 3);
        Matrix4c m = Matrix4c::Zero();
        for (double p : w) {
            const Vector4c v = oracle::random_pure(rng);
            m += p * v * v.adjoint();
        }
        const QubitPairState s(m);
        const Observable a = Observable::spherical(u(rng), u(rng)), b = Observable::spherical(u(rng), u(rng));
        const SampleEstimate e = sample_correlation(s, a, b, 200000, 100 + k);
        if (std::abs(e.mean - correlation(s, a, b)) > 5 * e.std_error) {
            ++outside;
        }
    }
    CHECK(outside == 0);
}

TEST_CASE("sampler rejects bad input")
{
    const QubitPairState s = mems_state(0.4);
    CHECK_THROWS_AS(sample_correlation(s, Observable::plane(0), Observable::plane(0), 0, 1), DomainError);
    Matrix4c bad = Matrix4c::Zero();
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(sample_correlation(QubitPairState::unchecked(bad), Observable::plane(0), Observable::plane(0), 10, 1),
                    DomainError);
}
