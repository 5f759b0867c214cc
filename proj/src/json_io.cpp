#include "bellvar/json_io.hpp"

#include <fstream>

namespace bellvar {

namespace {

Json complex_to_json(const Complex& z)
{
    return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2) {
        throw DomainError("complex value must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

Json matrix_to_json(const Matrix4c& m)
{
    Json rows = Json::array();
    for (int i = 0; i < 4; ++i) {
        Json row = Json::array();
        for (int k = 0; k < 4; ++k) {
            row.push_back(complex_to_json(m(i, k)));
        }
        rows.push_back(row);
    }
    return rows;
}

Matrix4c matrix_from_json(const Json& j)
{
    Matrix4c m;
    if (j.is_array() && j.size() == 4) {
        for (int i = 0; i < 4; ++i) {
            if (!j[i].is_array() || j[i].size() != 4) {
                throw DomainError("matrix rows must hold 4 entries");
            }
            for (int k = 0; k < 4; ++k) {
                m(i, k) = complex_from_json(j[i][k]);
            }
        }
        return m;
    }
    if (j.is_array() && j.size() == 16) {
        for (int idx = 0; idx < 16; ++idx) {
            m(idx / 4, idx % 4) = complex_from_json(j[idx]);
        }
        return m;
    }
    throw DomainError("matrix must be 4 rows of 4 [re, im] pairs or 16 row-major pairs");
}

Json amplitudes_to_json(const Vector4c& v)
{
    Json out = Json::array();
    for (int i = 0; i < 4; ++i) {
        out.push_back(complex_to_json(v(i)));
    }
    return out;
}

Vector4c amplitudes_from_json(const Json& j)
{
    if (!j.is_array() || j.size() != 4) {
        throw DomainError("amplitudes must hold 4 [re, im] pairs");
    }
    Vector4c v;
    for (int i = 0; i < 4; ++i) {
        v(i) = complex_from_json(j[i]);
    }
    return v;
}

void to_json(Json& j, const QubitPairState& state)
{
    j = Json{{"matrix", matrix_to_json(state.matrix())}};
}

void to_json(Json& j, const Decomposition& d)
{
    Json terms = Json::array();
    for (const auto& t : d.terms()) {
        terms.push_back({{"weight", t.weight}, {"amplitudes", amplitudes_to_json(t.state.amplitudes())}});
    }
    j = Json{{"label", d.label()}, {"matrix", matrix_to_json(d.source().matrix())}, {"terms", terms}};
}

void to_json(Json& j, const DecompositionReport& r)
{
    j = Json{{"passed", r.passed},
             {"weight_sum_error", r.weight_sum_error},
             {"min_weight", r.min_weight},
             {"reconstruction_error", r.reconstruction_error},
             {"norm_errors", r.norm_errors},
             {"source",
              {{"hermitian_error", r.source_check.hermitian_error},
               {"trace_error", r.source_check.trace_error},
               {"min_eigenvalue", r.source_check.min_eigenvalue}}}};
}

void to_json(Json& j, const Observable& o)
{
    if (o.mode() == ObservableMode::plane) {
        j = Json{{"theta", o.theta()}};
        return;
    }
    const auto& n = o.direction();
    j = Json{{"theta", o.theta()}, {"azimuth", o.azimuth()}, {"direction", {n.x(), n.y(), n.z()}}};
}

void to_json(Json& j, const MeasurementSettings& s)
{
    const bool plane = s.a.mode() == ObservableMode::plane && s.b.mode() == ObservableMode::plane &&
                       s.c.mode() == ObservableMode::plane && s.d.mode() == ObservableMode::plane;
    j = Json{{"mode", plane ? "plane" : "bloch"}, {"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}};
}

void to_json(Json& j, const InequalityReport& r)
{
    Json per_term = Json::array();
    for (const auto& t : r.per_term) {
        per_term.push_back({{"weight", t.weight}, {"value", t.value}});
    }
    j = Json{{"lhs", r.lhs},         {"bound", r.bound},       {"b_value", r.b_value},
             {"violated", r.violated}, {"per_term", per_term}, {"decomposition", r.decomposition}};
    if (r.settings) {
        j["settings"] = *r.settings;
    }
    if (!r.provenance.empty()) {
        j["provenance"] = r.provenance;
    }
}

void to_json(Json& j, const Eq7Report& r)
{
    Json terms = Json::array();
    for (const auto& t : r.correlated) {
        terms.push_back({{"index", t.index},
                         {"weight", t.weight},
                         {"bb", t.bb},
                         {"bc", t.bc},
                         {"double_bc", t.double_bc},
                         {"sign", t.sign}});
    }
    j = Json{{"experimental", r.experimental}, {"lhs", r.lhs},         {"rhs", r.rhs},
             {"remainder", r.remainder},       {"violated", r.violated}, {"split", r.split},
             {"ordering", r.ordering},         {"correlated", terms},  {"settings", r.settings}};
}

void to_json(Json& j, const OptimizerConfig& c)
{
    j = Json{{"coarse_grid_points_per_axis", c.grid_points()},
             {"refine_seeds", c.refine_seeds},
             {"max_refine_iterations", c.max_refine_iterations},
             {"convergence_tolerance", c.convergence_tolerance},
             {"observable_mode", to_string(c.observable_mode)},
             {"rng_seed", c.rng_seed}};
}

void to_json(Json& j, const ViolationResult& r)
{
    j = Json{{"b_max", r.b_max},
             {"bound", r.report.bound},
             {"violated", r.report.violated},
             {"optimal_settings", r.optimal_settings},
             {"report", r.report},
             {"evaluations", r.evaluations},
             {"converged", r.converged},
             {"grid_best", r.grid_best},
             {"observable_mode", to_string(r.mode)},
             {"rng_seed", r.rng_seed}};
}

void to_json(Json& j, const SampleEstimate& e)
{
    j = Json{{"mean", e.mean}, {"std_error", e.std_error}, {"n_trials", e.n_trials}, {"rng_seed", e.rng_seed}};
}

QubitPairState state_from_json(const Json& j)
{
    if (j.contains("matrix")) {
        return QubitPairState::unchecked(matrix_from_json(j.at("matrix")));
    }
    if (j.contains("terms")) {
        return decomposition_from_json(j).source();
    }
    throw DomainError("state document needs a \"matrix\" field");
}

Decomposition decomposition_from_json(const Json& j)
{
    if (!j.contains("terms") || !j.at("terms").is_array()) {
        throw DomainError("decomposition document needs a \"terms\" array");
    }
    std::vector<DecompositionTerm> terms;
    for (const auto& t : j.at("terms")) {
        const double weight = t.at("weight").get<double>();
        if (weight == 0.0) {
            continue;
        }
        terms.push_back({weight, PureState::unchecked(amplitudes_from_json(t.at("amplitudes")))});
    }
    const std::string label = j.value("label", std::string("custom"));
    if (j.contains("matrix")) {
        return Decomposition(std::move(terms), QubitPairState::unchecked(matrix_from_json(j.at("matrix"))), label);
    }
    return Decomposition::from_terms(std::move(terms), label);
}

namespace {

Observable observable_from_json(const Json& j, ObservableMode mode)
{
    if (j.is_number()) {
        return Observable::plane(j.get<double>());
    }
    if (j.contains("direction")) {
        const auto& n = j.at("direction");
        return Observable::bloch(Vector3(n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>()));
    }
    const double theta = j.at("theta").get<double>();
    if (mode == ObservableMode::plane && !j.contains("azimuth")) {
        return Observable::plane(theta);
    }
    return Observable::spherical(theta, j.value("azimuth", 0.0));
}

} // namespace

MeasurementSettings settings_from_json(const Json& j)
{
    const ObservableMode mode = parse_observable_mode(j.value("mode", std::string("plane")));
    if (j.contains("angles")) {
        const auto angles = j.at("angles").get<std::vector<double>>();
        return settings_from_angles(angles, mode);
    }
    return {observable_from_json(j.at("a"), mode), observable_from_json(j.at("b"), mode),
            observable_from_json(j.at("c"), mode), observable_from_json(j.at("d"), mode)};
}

OptimizerConfig config_from_json(const Json& j)
{
    OptimizerConfig c;
    if (j.contains("observable_mode")) {
        c.observable_mode = parse_observable_mode(j.at("observable_mode").get<std::string>());
    }
    if (j.contains("coarse_grid_points_per_axis")) {
        c.coarse_grid_points_per_axis = j.at("coarse_grid_points_per_axis").get<int>();
    }
    c.refine_seeds = j.value("refine_seeds", c.refine_seeds);
    c.max_refine_iterations = j.value("max_refine_iterations", c.max_refine_iterations);
    c.convergence_tolerance = j.value("convergence_tolerance", c.convergence_tolerance);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DomainError(path + ": " + e.what());
    }
}

} // namespace bellvar
