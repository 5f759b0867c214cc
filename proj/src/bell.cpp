#include "bellvar/bell.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bellvar {

namespace {

constexpr double kImaginaryResidue = 1e-12;

double canonical_angle(double angle)
{
    double r = std::fmod(angle, 2.0 * std::numbers::pi);
    if (r < 0.0) {
        r += 2.0 * std::numbers::pi;
    }
    return r >= 2.0 * std::numbers::pi ? 0.0 : r;
}

Matrix4c kron(const Matrix2c& first, const Matrix2c& second)
{
    Matrix4c out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = first(i, j) * second;
        }
    }
    return out;
}

double real_expectation(const Complex& value)
{
    if (std::abs(value.imag()) > kImaginaryResidue) {
        std::ostringstream msg;
        msg << "expectation value has imaginary residue " << value.imag();
        throw DomainError(msg.str());
    }
    return value.real();
}

std::array<Matrix2c, 3> paulis()
{
    Matrix2c x, y, z;
    x << 0.0, 1.0, 1.0, 0.0;
    y << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    z << 1.0, 0.0, 0.0, -1.0;
    return {x, y, z};
}

} // namespace

const char* to_string(ObservableMode mode)
{
    return mode == ObservableMode::plane ? "plane" : "bloch";
}

ObservableMode parse_observable_mode(const std::string& name)
{
    if (name == "plane") {
        return ObservableMode::plane;
    }
    if (name == "bloch") {
        return ObservableMode::bloch;
    }
    throw DomainError("unknown observable mode '" + name + "' (expected plane or bloch)");
}

// ---------------------------------------------------------------------------
// Observable

Observable Observable::plane(double theta)
{
    return Observable(ObservableMode::plane, theta, 0.0, Vector3(std::sin(theta), 0.0, std::cos(theta)));
}

Observable Observable::bloch(const Vector3& direction)
{
    const double norm = direction.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "bloch observable needs a unit vector, |n| = " << norm;
        throw DomainError(msg.str());
    }
    const double polar = std::acos(std::clamp(direction.z(), -1.0, 1.0));
    const double azimuth = canonical_angle(std::atan2(direction.y(), direction.x()));
    return Observable(ObservableMode::bloch, polar, azimuth, direction);
}

Observable Observable::spherical(double polar, double azimuth)
{
    const Vector3 n(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar));
    return Observable(ObservableMode::bloch, polar, azimuth, n);
}

Matrix2c Observable::matrix() const
{
    const auto& n = direction_;
    Matrix2c m;
    m << n.z(), Complex(n.x(), -n.y()), Complex(n.x(), n.y()), -n.z();
    return m;
}

MeasurementSettings MeasurementSettings::plane(double theta_a, double theta_b, double theta_c, double theta_d)
{
    return {Observable::plane(theta_a), Observable::plane(theta_b), Observable::plane(theta_c),
            Observable::plane(theta_d)};
}

// ---------------------------------------------------------------------------
// Correlations

double correlation(const QubitPairState& state, const Observable& first, const Observable& second)
{
    const Matrix4c joint = kron(first.matrix(), second.matrix());
    return real_expectation((state.matrix() * joint).trace());
}

double correlation_pure(const PureState& state, const Observable& first, const Observable& second)
{
    const Matrix4c joint = kron(first.matrix(), second.matrix());
    const Vector4c& v = state.amplitudes();
    return real_expectation(v.dot(joint * v));
}

CorrelationMatrix correlation_matrix(const Matrix4c& rho)
{
    const auto sigma = paulis();
    CorrelationMatrix t;
    for (int u = 0; u < 3; ++u) {
        for (int v = 0; v < 3; ++v) {
            t(u, v) = (rho * kron(sigma[u], sigma[v])).trace().real();
        }
    }
    return t;
}

CorrelationMatrix correlation_matrix(const QubitPairState& state)
{
    return correlation_matrix(state.matrix());
}

CorrelationMatrix correlation_matrix(const PureState& state)
{
    return correlation_matrix(state.projector());
}

// ---------------------------------------------------------------------------
// Variable-bound inequality

InequalityReport evaluate_eq6(const Decomposition& decomp, const MeasurementSettings& s)
{
    require_valid(decomp);

    const QubitPairState& rho = decomp.source();
    const double ab = correlation(rho, s.a, s.b);
    const double ac = correlation(rho, s.a, s.c);
    const double db = correlation(rho, s.d, s.b);
    const double dc = correlation(rho, s.d, s.c);

    InequalityReport r;
    r.settings = s;
    r.decomposition = decomp.label();
    r.lhs = std::abs(ab - ac);

    double sum_ab = 0.0, sum_ac = 0.0, sum_db = 0.0, sum_dc = 0.0;
    double bound_shift = 0.0;
    for (const auto& term : decomp.terms()) {
        const double term_ab = correlation_pure(term.state, s.a, s.b);
        const double term_ac = correlation_pure(term.state, s.a, s.c);
        const double term_db = correlation_pure(term.state, s.d, s.b);
        const double term_dc = correlation_pure(term.state, s.d, s.c);
        sum_ab += term.weight * term_ab;
        sum_ac += term.weight * term_ac;
        sum_db += term.weight * term_db;
        sum_dc += term.weight * term_dc;
        const double value = std::abs(term_db + term_dc);
        r.per_term.push_back({term.weight, value});
        bound_shift += term.weight * value;
    }

    const double mismatch = std::max({std::abs(ab - sum_ab), std::abs(ac - sum_ac), std::abs(db - sum_db),
                                      std::abs(dc - sum_dc)});
    if (mismatch > kConsistencyTolerance) {
        std::ostringstream msg;
        msg << "full-state correlations disagree with the decomposition by " << mismatch;
        throw DomainError(msg.str());
    }

    r.bound = kLocalBound;
    r.b_value = r.lhs + bound_shift;
    r.violated = r.b_value > kLocalBound + kViolationSlack;
    return r;
}

ViolationFunctional::ViolationFunctional(const Decomposition& decomp)
    : full_(correlation_matrix(decomp.source()))
{
    require_valid(decomp);
    CorrelationMatrix summed = CorrelationMatrix::Zero();
    for (const auto& term : decomp.terms()) {
        weights_.push_back(term.weight);
        per_term_.push_back(correlation_matrix(term.state));
        summed += term.weight * per_term_.back();
    }
    const double mismatch = (summed - full_).cwiseAbs().maxCoeff();
    if (mismatch > kConsistencyTolerance) {
        std::ostringstream msg;
        msg << "full-state correlation matrix disagrees with the decomposition by " << mismatch;
        throw DomainError(msg.str());
    }
}

double ViolationFunctional::operator()(const Vector3& a, const Vector3& b, const Vector3& c,
                                       const Vector3& d) const
{
    const Vector3 diff = b - c;
    const Vector3 sum = b + c;
    double value = std::abs(a.dot(full_ * diff));
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        value += weights_[i] * std::abs(d.dot(per_term_[i] * sum));
    }
    return value;
}

// ---------------------------------------------------------------------------
// d = c specialization

Eq7Report evaluate_eq7(const Decomposition& decomp, const MeasurementSettings& s, std::size_t split,
                       std::span<const std::size_t> ordering)
{
    if ((s.d.direction() - s.c.direction()).cwiseAbs().maxCoeff() > 1e-12) {
        throw PreconditionError("evaluate_eq7 requires d == c");
    }
    const std::size_t n_terms = decomp.size();
    if (split < 1 || split > n_terms) {
        std::ostringstream msg;
        msg << "split index must lie in [1, " << n_terms << "], got " << split;
        throw PreconditionError(msg.str());
    }

    std::vector<std::size_t> order(ordering.begin(), ordering.end());
    if (order.empty()) {
        for (std::size_t i = 0; i < n_terms; ++i) {
            order.push_back(i);
        }
    }
    {
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        bool permutation = sorted.size() == n_terms;
        for (std::size_t i = 0; permutation && i < n_terms; ++i) {
            permutation = sorted[i] == i;
        }
        if (!permutation) {
            throw PreconditionError("ordering must be a permutation of the decomposition terms");
        }
    }
    require_valid(decomp);

    Eq7Report r;
    r.settings = s;
    r.split = split;
    r.ordering = order;
    r.lhs = std::abs(correlation(decomp.source(), s.a, s.b) - correlation(decomp.source(), s.a, s.c));

    double remainder = 0.0;
    for (std::size_t k = split; k < n_terms; ++k) {
        const auto& term = decomp.terms()[order[k]];
        remainder += term.weight * (correlation_pure(term.state, s.a, s.b) - correlation_pure(term.state, s.a, s.c));
    }
    r.remainder = std::abs(remainder);

    double correlated_sum = 0.0;
    for (std::size_t k = 0; k < split; ++k) {
        const auto& term = decomp.terms()[order[k]];
        CorrelatedTerm t{};
        t.index = order[k];
        t.weight = term.weight;
        t.bb = correlation_pure(term.state, s.b, s.b);
        t.bc = correlation_pure(term.state, s.b, s.c);
        t.double_bc = t.bb - t.bc;
        t.sign = t.double_bc > 0.0 ? 1 : -1;
        correlated_sum += t.sign * t.weight * t.double_bc;
        r.correlated.push_back(t);
    }
    r.rhs = r.remainder + correlated_sum;
    r.violated = r.lhs > r.rhs + kViolationSlack;
    return r;
}

// ---------------------------------------------------------------------------
// CHSH baseline

double chsh_value(const QubitPairState& state, const MeasurementSettings& s)
{
    return correlation(state, s.a, s.b) + correlation(state, s.a, s.c) + correlation(state, s.d, s.b) -
           correlation(state, s.d, s.c);
}

double chsh_max(const QubitPairState& state)
{
    const CorrelationMatrix t = correlation_matrix(state);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(t.transpose() * t, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d e = solver.eigenvalues(); // ascending
    return 2.0 * std::sqrt(std::max(0.0, e(1) + e(2)));
}

} // namespace bellvar
