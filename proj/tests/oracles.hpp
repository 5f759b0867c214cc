#pragma once

// Test-only reference computations. These deliberately avoid the library's
// correlation code paths (no Eigen Kronecker products, no correlation
// tensors) so they can serve as independent checks.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "bellvar/qstate.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat2 = std::array<std::array<cd, 2>, 2>;

inline constexpr double pi = std::numbers::pi;

inline Mat2 plane_observable(double theta)
{
    return {{{std::cos(theta), std::sin(theta)}, {std::sin(theta), -std::cos(theta)}}};
}

// tr[rho (A (x) B)] = sum rho_{(kl),(ij)} A_{ik} B_{jl}, indices spelled out.
inline double mixed_correlation(const bellvar::Matrix4c& rho, const Mat2& a, const Mat2& b)
{
    cd sum = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    sum += rho(2 * k + l, 2 * i + j) * a[i][k] * b[j][l];
    return sum.real();
}

// <phi| A (x) B |phi> = sum conj(phi_ij) A_ik B_jl phi_kl.
inline double pure_correlation(const bellvar::Vector4c& phi, const Mat2& a, const Mat2& b)
{
    cd sum = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    sum += std::conj(phi(2 * i + j)) * a[i][k] * b[j][l] * phi(2 * k + l);
    return sum.real();
}

// Plane-mode correlation table t[u][v], u, v in {z, x}, from four explicit
// evaluations; <A(t1) B(t2)> = sum n_u(t1) n_v(t2) t[u][v].
struct PlaneTable {
    double zz, zx, xz, xx;

    double operator()(double t1, double t2) const
    {
        const double c1 = std::cos(t1), s1 = std::sin(t1), c2 = std::cos(t2), s2 = std::sin(t2);
        return zz * c1 * c2 + zx * c1 * s2 + xz * s1 * c2 + xx * s1 * s2;
    }
};

template <class F>
PlaneTable plane_table(F&& corr)
{
    const double h = pi / 2.0;
    return {corr(plane_observable(0), plane_observable(0)), corr(plane_observable(0), plane_observable(h)),
            corr(plane_observable(h), plane_observable(0)), corr(plane_observable(h), plane_observable(h))};
}

inline PlaneTable plane_table(const bellvar::Matrix4c& rho)
{
    return plane_table([&](const Mat2& a, const Mat2& b) { return mixed_correlation(rho, a, b); });
}

inline PlaneTable plane_table(const bellvar::Vector4c& phi)
{
    return plane_table([&](const Mat2& a, const Mat2& b) { return pure_correlation(phi, a, b); });
}

// <B> for plane settings, from explicit tables.
struct BFunctional {
    PlaneTable full;
    std::vector<std::pair<double, PlaneTable>> terms;

    explicit BFunctional(const bellvar::Decomposition& d) : full(plane_table(d.source().matrix()))
    {
        for (const auto& t : d.terms()) {
            terms.emplace_back(t.weight, plane_table(t.state.amplitudes()));
        }
    }

    double operator()(double a, double b, double c, double d) const
    {
        double v = std::abs(full(a, b) - full(a, c));
        for (const auto& [p, t] : terms) {
            v += p * std::abs(t(d, b) + t(d, c));
        }
        return v;
    }
};

// Dense brute-force maximum over an n^4 grid on [0, 2pi).
inline double grid_max(const bellvar::Decomposition& d, int n)
{
    const BFunctional f(d);
    double best = -1.0;
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) {
        t[k] = 2.0 * pi * k / n;
    }
    for (double a : t)
        for (double b : t)
            for (double c : t)
                for (double dd : t)
                    best = std::max(best, f(a, b, c, dd));
    return best;
}

// Closed-form witnesses.
inline double mems_witness(double gamma) { return 2.0 * std::sqrt(1.0 + gamma * gamma); }
inline double werner_witness(double gamma) { return 2.0 * std::sqrt(1.0 + gamma * gamma); }
inline double bell_witness(double x) { return std::sqrt(4.0 + 64.0 * x * x); }

// Wootters concurrence through the textbook route: eigenvalues of the
// non-Hermitian rho (sy sy) rho* (sy sy). Reliable for full-rank states.
inline double wootters_direct(const bellvar::Matrix4c& rho)
{
    bellvar::Matrix4c flip = bellvar::Matrix4c::Zero();
    flip(0, 3) = flip(3, 0) = -1.0;
    flip(1, 2) = flip(2, 1) = 1.0;
    const bellvar::Matrix4c r = rho * flip * rho.conjugate() * flip;
    Eigen::ComplexEigenSolver<bellvar::Matrix4c> solver(r);
    std::array<double, 4> l{};
    for (int k = 0; k < 4; ++k) {
        l[k] = std::sqrt(std::max(0.0, solver.eigenvalues()(k).real()));
    }
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

// Random generators.

inline bellvar::Vector4c random_pure(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    bellvar::Vector4c v;
    for (int k = 0; k < 4; ++k) {
        v(k) = cd(g(rng), g(rng));
    }
    return v / v.norm();
}

inline bellvar::Vector2c random_qubit(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    bellvar::Vector2c v(cd(g(rng), g(rng)), cd(g(rng), g(rng)));
    return v / v.norm();
}

inline std::vector<double> random_weights(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) {
        x = u(rng);
        sum += x;
    }
    for (double& x : w) {
        x /= sum;
    }
    return w;
}

inline bellvar::Matrix2c random_unitary(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    bellvar::Matrix2c m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            m(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<bellvar::Matrix2c> qr(m);
    return qr.householderQ();
}

inline bellvar::Matrix4c kron(const bellvar::Matrix2c& a, const bellvar::Matrix2c& b)
{
    bellvar::Matrix4c out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

} // namespace oracle

namespace oracle {

inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    return qr.householderQ();
}

// Another ensemble for the same state: w'_k = sum_i U_ki sqrt(p_i) |phi_i>.
inline std::vector<bellvar::DecompositionTerm> unitary_remix(const std::vector<bellvar::DecompositionTerm>& terms,
                                                             const Eigen::MatrixXcd& u)
{
    std::vector<bellvar::DecompositionTerm> out;
    for (Eigen::Index k = 0; k < u.rows(); ++k) {
        bellvar::Vector4c w = bellvar::Vector4c::Zero();
        for (std::size_t i = 0; i < terms.size(); ++i) {
            w += u(k, static_cast<Eigen::Index>(i)) * std::sqrt(terms[i].weight) * terms[i].state.amplitudes();
        }
        const double p = w.squaredNorm();
        if (p > 1e-14) {
            out.push_back({p, bellvar::PureState(w / std::sqrt(p))});
        }
    }
    return out;
}

} // namespace oracle
