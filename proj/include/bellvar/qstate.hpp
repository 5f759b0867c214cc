#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellvar/errors.hpp"

namespace bellvar {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;

namespace tolerance {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double norm = 1e-12;
inline constexpr double weight_sum = 1e-12;
inline constexpr double reconstruction = 1e-10;
} // namespace tolerance

/// Two-qubit pure state, amplitudes in the basis |00>, |01>, |10>, |11>.
class PureState {
public:
    /// Throws DomainError unless the vector has unit norm.
    explicit PureState(const Vector4c& amplitudes);

    /// Skips the norm check. Used for imported data that is validated later.
    static PureState unchecked(const Vector4c& amplitudes);

    /// |first> (x) |second>; both factors must be normalized.
    static PureState product(const Vector2c& first, const Vector2c& second);

    const Vector4c& amplitudes() const { return amplitudes_; }
    double norm_error() const;
    Matrix4c projector() const;

private:
    struct Unchecked {};
    PureState(const Vector4c& amplitudes, Unchecked) : amplitudes_(amplitudes) {}

    Vector4c amplitudes_;
};

namespace basis {
PureState phi_plus();
PureState phi_minus();
PureState psi_plus();
PureState psi_minus();
/// Computational basis state |index>, index in [0, 4).
PureState computational(int index);
/// cos(xi)|00> + sin(xi)|11>
PureState nonmaximal(double xi);
/// (|0> + |1>)/sqrt2 and (|0> - |1>)/sqrt2
Vector2c plus();
Vector2c minus();
} // namespace basis

struct StateCheck {
    double hermitian_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;

    bool ok() const
    {
        return hermitian_error <= tolerance::hermitian && trace_error <= tolerance::trace &&
               min_eigenvalue >= -tolerance::psd;
    }
    std::string describe() const;
};

StateCheck check_density_matrix(const Matrix4c& m);

/// Density matrix of a two-qubit system.
class QubitPairState {
public:
    /// Throws DomainError unless the matrix is Hermitian, unit-trace and PSD.
    explicit QubitPairState(const Matrix4c& matrix);

    static QubitPairState unchecked(const Matrix4c& matrix);
    static QubitPairState from_pure(const PureState& state);

    const Matrix4c& matrix() const { return matrix_; }
    StateCheck check() const { return check_density_matrix(matrix_); }

private:
    struct Unchecked {};
    QubitPairState(const Matrix4c& matrix, Unchecked) : matrix_(matrix) {}

    Matrix4c matrix_;
};

struct DecompositionTerm {
    double weight;
    PureState state;
};

/// An ensemble {p_i, |Phi_i>} together with the density matrix it claims to
/// realize. Construction does not validate; see validate_decomposition().
class Decomposition {
public:
    Decomposition(std::vector<DecompositionTerm> terms, QubitPairState source,
                  std::string label = "custom");

    /// Source is taken to be the mixture of the terms.
    static Decomposition from_terms(std::vector<DecompositionTerm> terms,
                                    std::string label = "custom");

    const std::vector<DecompositionTerm>& terms() const { return terms_; }
    const QubitPairState& source() const { return source_; }
    const std::string& label() const { return label_; }
    std::size_t size() const { return terms_.size(); }

    /// sum_i p_i |Phi_i><Phi_i|
    Matrix4c mixture() const;

private:
    std::vector<DecompositionTerm> terms_;
    QubitPairState source_;
    std::string label_;
};

struct DecompositionReport {
    double weight_sum_error = 0.0;
    double min_weight = 0.0;
    double reconstruction_error = 0.0;
    std::vector<double> norm_errors;
    StateCheck source_check;
    bool passed = false;
};

DecompositionReport validate_decomposition(const Decomposition& d);

/// Throws DomainError with the failing report fields if d is not valid.
void require_valid(const Decomposition& d);

// Named state families. All throw DomainError for parameters outside
// their domain.

/// Piecewise g of the maximally entangled mixed state: gamma/2 above 2/3,
/// 1/3 below.
double mems_g(double gamma);
QubitPairState mems_state(double gamma);
/// Weights (g + gamma/2, g - gamma/2, 1 - 2g) on |Phi+>, |Phi->, |01>.
Decomposition mems_decomposition(double gamma);

/// (1 - gamma)/4 I + gamma |Psi_non><Psi_non|, |Psi_non> = cos xi|00> + sin xi|11>.
QubitPairState werner_state(double gamma, double xi);
/// (1 - gamma)/4 on each Bell state plus gamma on |Psi_non>.
Decomposition werner_decomposition(double gamma, double xi);

/// Diagonal 1/4 with anti-diagonal entries x; |x| <= 1/4.
QubitPairState separable_state(double x);
/// Product-state ensemble over |++>, |+->, |-+>, |-->.
Decomposition product_decomposition(double x);
/// Bell-state ensemble: 1/4 + x on Phi+, Psi+ and 1/4 - x on Phi-, Psi-.
Decomposition bell_decomposition(double x);

/// Wootters concurrence. Throws DomainError for non-physical input.
double concurrence(const QubitPairState& state);

} // namespace bellvar
