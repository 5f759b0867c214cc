#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellvar/qstate.hpp"

namespace bellvar {

using Vector3 = Eigen::Vector3d;
/// T(u, v) = tr[rho sigma_u (x) sigma_v], u, v in (x, y, z).
using CorrelationMatrix = Eigen::Matrix3d;

enum class ObservableMode { plane, bloch };

const char* to_string(ObservableMode mode);
ObservableMode parse_observable_mode(const std::string& name);

/// Dichotomic single-qubit observable n . sigma.
///
/// plane(theta) is cos(theta) sigma_z + sin(theta) sigma_x, the x-z family
/// used for all of the built-in figures. bloch() allows the full sphere;
/// spherical(polar, azimuth) with azimuth 0 coincides with plane(polar).
class Observable {
public:
    /// plane(0), i.e. sigma_z.
    Observable() : mode_(ObservableMode::plane), theta_(0.0), azimuth_(0.0), direction_(0.0, 0.0, 1.0) {}

    static Observable plane(double theta);
    /// Throws DomainError unless |n| = 1 within 1e-12.
    static Observable bloch(const Vector3& direction);
    static Observable spherical(double polar, double azimuth);

    ObservableMode mode() const { return mode_; }
    /// Plane angle, or polar angle from +z in bloch mode.
    double theta() const { return theta_; }
    /// Azimuth from +x in bloch mode; 0 in plane mode.
    double azimuth() const { return azimuth_; }
    const Vector3& direction() const { return direction_; }
    Matrix2c matrix() const;

private:
    Observable(ObservableMode mode, double theta, double azimuth, const Vector3& direction)
        : mode_(mode), theta_(theta), azimuth_(azimuth), direction_(direction)
    {
    }

    ObservableMode mode_;
    double theta_;
    double azimuth_;
    Vector3 direction_;
};

/// a and d act on particle one, b and c on particle two.
struct MeasurementSettings {
    Observable a;
    Observable b;
    Observable c;
    Observable d;

    static MeasurementSettings plane(double theta_a, double theta_b, double theta_c, double theta_d);
};

/// tr[rho (A (x) B)] by direct matrix products.
double correlation(const QubitPairState& state, const Observable& first, const Observable& second);
/// <Phi| A (x) B |Phi>
double correlation_pure(const PureState& state, const Observable& first, const Observable& second);

CorrelationMatrix correlation_matrix(const Matrix4c& rho);
CorrelationMatrix correlation_matrix(const QubitPairState& state);
CorrelationMatrix correlation_matrix(const PureState& state);

struct TermContribution {
    double weight;
    double value; // |<db>_i + <dc>_i|
};

struct InequalityReport {
    double lhs = 0.0;   // |<ab> - <ac>|
    double bound = 2.0;
    double b_value = 0.0;
    bool violated = false;
    std::vector<TermContribution> per_term;
    std::optional<MeasurementSettings> settings;
    std::string decomposition;
    std::string provenance;
};

inline constexpr double kLocalBound = 2.0;
inline constexpr double kViolationSlack = 1e-12;
inline constexpr double kConsistencyTolerance = 1e-10;

/// Variable-bound inequality |<ab> - <ac>| <= 2 - sum_i p_i |<db>_i + <dc>_i|
/// evaluated for one decomposition and one set of settings. b_value is the
/// left side moved over: lhs + sum_i p_i |<db>_i + <dc>_i|, compared to 2.
///
/// Full-state correlators are computed on decomp.source() and checked
/// against the weighted per-term sums; a mismatch above 1e-10 throws
/// DomainError. Invalid decompositions also throw DomainError.
InequalityReport evaluate_eq6(const Decomposition& decomp, const MeasurementSettings& settings);

/// Precomputed correlation tensors for fast repeated evaluation of <B>.
/// Used by the optimizer; evaluate_eq6 stays on the matrix-product route.
class ViolationFunctional {
public:
    explicit ViolationFunctional(const Decomposition& decomp);

    double operator()(const Vector3& a, const Vector3& b, const Vector3& c, const Vector3& d) const;

    const CorrelationMatrix& full() const { return full_; }
    std::size_t terms() const { return weights_.size(); }

private:
    CorrelationMatrix full_;
    std::vector<double> weights_;
    std::vector<CorrelationMatrix> per_term_;
};

// Special case d = c with the first `split` terms (after `ordering`)
// treated as the perfectly-correlated group.

struct CorrelatedTerm {
    std::size_t index; // position in the decomposition
    double weight;
    double bb;        // <bb>_j: b on both particles
    double bc;        // <bc>_j: b on particle one, c on particle two
    double double_bc; // <bb>_j - <bc>_j
    int sign;         // +1 if double_bc > 0, else -1
};

struct Eq7Report {
    double lhs = 0.0;
    double remainder = 0.0; // |sum_{i > n} p_i (<ab>_i - <ac>_i)|
    double rhs = 0.0;
    bool violated = false;
    std::size_t split = 0;
    std::vector<std::size_t> ordering;
    std::vector<CorrelatedTerm> correlated;
    MeasurementSettings settings;
    bool experimental = true;
};

/// Throws PreconditionError if d != c, split is outside [1, N], or ordering
/// is not a permutation of [0, N). An empty ordering means identity.
Eq7Report evaluate_eq7(const Decomposition& decomp, const MeasurementSettings& settings,
                       std::size_t split, std::span<const std::size_t> ordering = {});

/// <ab> + <ac> + <db> - <dc> on the full state.
double chsh_value(const QubitPairState& state, const MeasurementSettings& settings);

/// Largest CHSH value over all qubit observables: 2 sqrt(m1 + m2), m1, m2 the
/// two largest eigenvalues of T^T T.
double chsh_max(const QubitPairState& state);

} // namespace bellvar
