#include "bellvar/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bellvar {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Builder ensembles drop terms whose weight vanishes (up to roundoff in
// the weight formulas) so per-term sums carry no 0 * |...| artifacts.
constexpr double kDroppedWeight = 1e-15;

Decomposition builder_ensemble(std::vector<DecompositionTerm> terms, QubitPairState source,
                               std::string label)
{
    std::erase_if(terms, [](const DecompositionTerm& t) { return std::abs(t.weight) <= kDroppedWeight; });
    return Decomposition(std::move(terms), std::move(source), std::move(label));
}

void require_unit_interval(double value, const char* name)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        std::ostringstream msg;
        msg << name << " must lie in [0, 1], got " << value;
        throw DomainError(msg.str());
    }
}

void require_separable_range(double x)
{
    if (!(std::abs(x) <= 0.25)) {
        std::ostringstream msg;
        msg << "x must satisfy |x| <= 1/4 for a positive semidefinite state, got " << x;
        throw DomainError(msg.str());
    }
}

Vector4c kron(const Vector2c& first, const Vector2c& second)
{
    Vector4c out;
    out << first(0) * second(0), first(0) * second(1), first(1) * second(0), first(1) * second(1);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(const Vector4c& amplitudes) : amplitudes_(amplitudes)
{
    if (norm_error() > tolerance::norm) {
        std::ostringstream msg;
        msg << "pure state is not normalized: | |v|^2 - 1 | = " << norm_error();
        throw DomainError(msg.str());
    }
}

PureState PureState::unchecked(const Vector4c& amplitudes)
{
    return PureState(amplitudes, Unchecked{});
}

PureState PureState::product(const Vector2c& first, const Vector2c& second)
{
    return PureState(kron(first, second));
}

double PureState::norm_error() const
{
    return std::abs(amplitudes_.squaredNorm() - 1.0);
}

Matrix4c PureState::projector() const
{
    return amplitudes_ * amplitudes_.adjoint();
}

namespace basis {

PureState phi_plus()
{
    return PureState(Vector4c(kInvSqrt2, 0.0, 0.0, kInvSqrt2));
}

PureState phi_minus()
{
    return PureState(Vector4c(kInvSqrt2, 0.0, 0.0, -kInvSqrt2));
}

PureState psi_plus()
{
    return PureState(Vector4c(0.0, kInvSqrt2, kInvSqrt2, 0.0));
}

PureState psi_minus()
{
    return PureState(Vector4c(0.0, kInvSqrt2, -kInvSqrt2, 0.0));
}

PureState computational(int index)
{
    if (index < 0 || index > 3) {
        throw DomainError("computational basis index must be in [0, 4)");
    }
    Vector4c v = Vector4c::Zero();
    v(index) = 1.0;
    return PureState(v);
}

PureState nonmaximal(double xi)
{
    return PureState(Vector4c(std::cos(xi), 0.0, 0.0, std::sin(xi)));
}

Vector2c plus()
{
    return Vector2c(kInvSqrt2, kInvSqrt2);
}

Vector2c minus()
{
    return Vector2c(kInvSqrt2, -kInvSqrt2);
}

} // namespace basis

// ---------------------------------------------------------------------------
// QubitPairState

std::string StateCheck::describe() const
{
    std::ostringstream out;
    out << "hermitian_error=" << hermitian_error << " trace_error=" << trace_error
        << " min_eigenvalue=" << min_eigenvalue;
    return out.str();
}

StateCheck check_density_matrix(const Matrix4c& m)
{
    StateCheck c;
    c.hermitian_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));
    // Eigenvalues of the Hermitian part; a non-Hermitian input already fails above.
    const Matrix4c hermitian_part = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(hermitian_part, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = solver.eigenvalues().minCoeff();
    return c;
}

QubitPairState::QubitPairState(const Matrix4c& matrix) : matrix_(matrix)
{
    const StateCheck c = check();
    if (!c.ok()) {
        throw DomainError("not a valid density matrix: " + c.describe());
    }
}

QubitPairState QubitPairState::unchecked(const Matrix4c& matrix)
{
    return QubitPairState(matrix, Unchecked{});
}

QubitPairState QubitPairState::from_pure(const PureState& state)
{
    return QubitPairState(state.projector());
}

// ---------------------------------------------------------------------------
// Decomposition

Decomposition::Decomposition(std::vector<DecompositionTerm> terms, QubitPairState source,
                             std::string label)
    : terms_(std::move(terms)), source_(std::move(source)), label_(std::move(label))
{
}

Decomposition Decomposition::from_terms(std::vector<DecompositionTerm> terms, std::string label)
{
    Matrix4c m = Matrix4c::Zero();
    for (const auto& t : terms) {
        m += t.weight * t.state.projector();
    }
    return Decomposition(std::move(terms), QubitPairState::unchecked(m), std::move(label));
}

Matrix4c Decomposition::mixture() const
{
    Matrix4c m = Matrix4c::Zero();
    for (const auto& t : terms_) {
        m += t.weight * t.state.projector();
    }
    return m;
}

DecompositionReport validate_decomposition(const Decomposition& d)
{
    DecompositionReport r;
    double sum = 0.0;
    r.min_weight = d.terms().empty() ? 0.0 : d.terms().front().weight;
    for (const auto& t : d.terms()) {
        sum += t.weight;
        r.min_weight = std::min(r.min_weight, t.weight);
        r.norm_errors.push_back(t.state.norm_error());
    }
    r.weight_sum_error = std::abs(sum - 1.0);
    r.reconstruction_error = (d.mixture() - d.source().matrix()).norm();
    r.source_check = d.source().check();

    const bool norms_ok = std::all_of(r.norm_errors.begin(), r.norm_errors.end(),
                                      [](double e) { return e <= tolerance::norm; });
    r.passed = !d.terms().empty() && r.min_weight >= 0.0 &&
               r.weight_sum_error <= tolerance::weight_sum &&
               r.reconstruction_error <= tolerance::reconstruction && norms_ok && r.source_check.ok();
    return r;
}

void require_valid(const Decomposition& d)
{
    const DecompositionReport r = validate_decomposition(d);
    if (r.passed) {
        return;
    }
    std::ostringstream msg;
    msg << "invalid decomposition '" << d.label() << "': terms=" << d.size()
        << " min_weight=" << r.min_weight << " weight_sum_error=" << r.weight_sum_error
        << " reconstruction_error=" << r.reconstruction_error;
    double worst_norm = 0.0;
    for (double e : r.norm_errors) {
        worst_norm = std::max(worst_norm, e);
    }
    msg << " worst_norm_error=" << worst_norm << " source: " << r.source_check.describe();
    throw DomainError(msg.str());
}

// ---------------------------------------------------------------------------
// State families

double mems_g(double gamma)
{
    return gamma >= 2.0 / 3.0 ? gamma / 2.0 : 1.0 / 3.0;
}

QubitPairState mems_state(double gamma)
{
    require_unit_interval(gamma, "gamma");
    const double g = mems_g(gamma);
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = g;
    m(0, 3) = gamma / 2.0;
    m(1, 1) = 1.0 - 2.0 * g;
    m(3, 0) = gamma / 2.0;
    m(3, 3) = g;
    return QubitPairState(m);
}

Decomposition mems_decomposition(double gamma)
{
    require_unit_interval(gamma, "gamma");
    const double g = mems_g(gamma);
    return builder_ensemble({{g + gamma / 2.0, basis::phi_plus()},
                             {g - gamma / 2.0, basis::phi_minus()},
                             {1.0 - 2.0 * g, basis::computational(1)}},
                            mems_state(gamma), "mems");
}

QubitPairState werner_state(double gamma, double xi)
{
    require_unit_interval(gamma, "gamma");
    const Matrix4c m = (1.0 - gamma) / 4.0 * Matrix4c::Identity() +
                       gamma * basis::nonmaximal(xi).projector();
    return QubitPairState(m);
}

Decomposition werner_decomposition(double gamma, double xi)
{
    require_unit_interval(gamma, "gamma");
    const double noise = (1.0 - gamma) / 4.0;
    return builder_ensemble({{noise, basis::phi_plus()},
                             {noise, basis::psi_plus()},
                             {noise, basis::phi_minus()},
                             {noise, basis::psi_minus()},
                             {gamma, basis::nonmaximal(xi)}},
                            werner_state(gamma, xi), "werner");
}

QubitPairState separable_state(double x)
{
    require_separable_range(x);
    Matrix4c m = 0.25 * Matrix4c::Identity();
    m(0, 3) = m(3, 0) = x;
    m(1, 2) = m(2, 1) = x;
    return QubitPairState(m);
}

Decomposition product_decomposition(double x)
{
    require_separable_range(x);
    const Vector2c p = basis::plus();
    const Vector2c q = basis::minus();
    return builder_ensemble({{0.25 + x, PureState::product(p, p)},
                             {0.25 - x, PureState::product(p, q)},
                             {0.25 - x, PureState::product(q, p)},
                             {0.25 + x, PureState::product(q, q)}},
                            separable_state(x), "product");
}

Decomposition bell_decomposition(double x)
{
    require_separable_range(x);
    return builder_ensemble({{0.25 + x, basis::phi_plus()},
                             {0.25 + x, basis::psi_plus()},
                             {0.25 - x, basis::phi_minus()},
                             {0.25 - x, basis::psi_minus()}},
                            separable_state(x), "bell");
}

// ---------------------------------------------------------------------------
// Concurrence

double concurrence(const QubitPairState& state)
{
    const StateCheck c = state.check();
    if (!c.ok()) {
        throw DomainError("concurrence requires a valid density matrix: " + c.describe());
    }

    // The square roots of the eigenvalues of rho (Y rho* Y), Y = sy (x) sy, are
    // the singular values of sqrt(rho) Y sqrt(rho)*. Working with the SVD avoids
    // square roots of roundoff-level eigenvalues of a non-Hermitian product,
    // which would otherwise leak ~1e-8 into rank-deficient states.
    const Matrix4c rho = 0.5 * (state.matrix() + state.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(rho);
    Eigen::Vector4d roots = solver.eigenvalues();
    for (Eigen::Index k = 0; k < 4; ++k) {
        // Eigenvalues at roundoff level are treated as exact zeros (clamped).
        roots(k) = roots(k) > 1e-13 ? std::sqrt(roots(k)) : 0.0;
    }
    const Matrix4c sqrt_rho = solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();

    Matrix4c flip = Matrix4c::Zero();
    flip(0, 3) = flip(3, 0) = -1.0;
    flip(1, 2) = flip(2, 1) = 1.0;

    const Matrix4c m = sqrt_rho * flip * sqrt_rho.conjugate();
    Eigen::JacobiSVD<Matrix4c> svd(m);
    const Eigen::Vector4d s = svd.singularValues(); // decreasing
    return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

} // namespace bellvar
