#include "bellvar/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "parallel.hpp"

namespace bellvar {

namespace {

double require_param(const std::map<std::string, double>& params, const std::string& name, Family family)
{
    const auto it = params.find(name);
    if (it == params.end()) {
        throw DomainError(std::string("family '") + to_string(family) + "' needs parameter '" + name + "'");
    }
    return it->second;
}

struct GridPoint {
    std::vector<std::pair<std::string, double>> params;
    Family family;
};

std::vector<GridPoint> expand(const SweepSpec& spec)
{
    std::vector<std::vector<double>> values;
    for (const auto& axis : spec.axes) {
        values.push_back(axis.values());
    }

    std::vector<GridPoint> points;
    std::vector<std::size_t> cursor(spec.axes.size(), 0);
    while (true) {
        std::vector<std::pair<std::string, double>> params;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            params.emplace_back(spec.axes[a].name, values[a][cursor[a]]);
        }
        for (const auto& [name, value] : spec.fixed) {
            params.emplace_back(name, value);
        }
        for (Family f : spec.families) {
            points.push_back({params, f});
        }

        // Odometer increment, last axis fastest.
        std::size_t a = spec.axes.size();
        while (a > 0) {
            --a;
            if (++cursor[a] < values[a].size()) {
                break;
            }
            cursor[a] = 0;
            if (a == 0) {
                return points;
            }
        }
        if (spec.axes.empty()) {
            return points;
        }
    }
}

} // namespace

const char* to_string(Family family)
{
    switch (family) {
    case Family::mems:
        return "mems";
    case Family::werner:
        return "werner";
    case Family::product:
        return "product";
    case Family::bell:
        return "bell";
    }
    return "?";
}

Family parse_family(const std::string& name)
{
    for (Family f : {Family::mems, Family::werner, Family::product, Family::bell}) {
        if (name == to_string(f)) {
            return f;
        }
    }
    throw DomainError("unknown decomposition family '" + name + "'");
}

std::vector<std::string> family_parameters(Family family)
{
    switch (family) {
    case Family::mems:
        return {"gamma"};
    case Family::werner:
        return {"gamma", "xi"};
    case Family::product:
    case Family::bell:
        return {"x"};
    }
    return {};
}

Decomposition build_decomposition(Family family, const std::map<std::string, double>& params)
{
    switch (family) {
    case Family::mems:
        return mems_decomposition(require_param(params, "gamma", family));
    case Family::werner:
        return werner_decomposition(require_param(params, "gamma", family), require_param(params, "xi", family));
    case Family::product:
        return product_decomposition(require_param(params, "x", family));
    case Family::bell:
        return bell_decomposition(require_param(params, "x", family));
    }
    throw DomainError("unknown decomposition family");
}

std::vector<double> ParameterAxis::values() const
{
    std::vector<double> out;
    const int intervals = include_stop ? steps - 1 : steps;
    for (int k = 0; k < steps; ++k) {
        // The last inclusive point is pinned to `stop` so that domain edges
        // such as gamma = 1 are hit exactly.
        out.push_back(include_stop && k == steps - 1 ? stop : start + (stop - start) * k / intervals);
    }
    return out;
}

void SweepSpec::validate() const
{
    if (families.empty()) {
        throw DomainError("sweep needs at least one decomposition family");
    }
    if (axes.empty()) {
        throw DomainError("sweep needs at least one parameter axis");
    }
    for (const auto& axis : axes) {
        if (axis.steps < 2) {
            throw DomainError("axis '" + axis.name + "' needs at least 2 steps");
        }
    }
    for (Family f : families) {
        for (const auto& name : family_parameters(f)) {
            const bool on_axis = std::any_of(axes.begin(), axes.end(), [&](const auto& a) { return a.name == name; });
            if (!on_axis && !fixed.contains(name)) {
                throw DomainError(std::string("family '") + to_string(f) + "' needs parameter '" + name +
                                  "' as an axis or fixed value");
            }
        }
    }
    optimizer.validate();
}

SweepSpec preset_spec(const std::string& name)
{
    SweepSpec spec;
    spec.preset = name;
    const ParameterAxis gamma{"gamma", 0.05, 1.0, 20, true};
    if (name == "fig1a") {
        spec.families = {Family::mems};
        spec.axes = {gamma};
    } else if (name == "fig1b") {
        spec.families = {Family::werner};
        spec.axes = {gamma};
        spec.fixed = {{"xi", std::numbers::pi / 4.0}};
    } else if (name == "fig2") {
        spec.families = {Family::werner};
        spec.axes = {gamma, ParameterAxis{"xi", 0.0, 2.0 * std::numbers::pi, 24, false}};
    } else if (name == "fig3") {
        spec.families = {Family::product, Family::bell};
        spec.axes = {ParameterAxis{"x", -0.25, 0.25, 21, true}};
    } else {
        throw DomainError("unknown preset '" + name + "' (expected fig1a, fig1b, fig2 or fig3)");
    }
    return spec;
}

std::vector<std::string> preset_names()
{
    return {"fig1a", "fig1b", "fig2", "fig3"};
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec)
{
    spec.validate();
    const std::vector<GridPoint> points = expand(spec);

    OptimizerConfig per_point = spec.optimizer;
    const unsigned jobs = spec.optimizer.jobs;
    per_point.jobs = 1;

    std::vector<std::optional<SweepRow>> rows(points.size());
    detail::parallel_for(points.size(), jobs, [&](std::size_t i) {
        const auto& point = points[i];
        const std::map<std::string, double> params(point.params.begin(), point.params.end());
        const Decomposition d = build_decomposition(point.family, params);
        rows[i] = SweepRow{spec.preset, point.family, point.params, maximize_violation(d, per_point)};
    });

    std::vector<SweepRow> out;
    out.reserve(rows.size());
    for (auto& r : rows) {
        out.push_back(std::move(*r));
    }

    if (!spec.output_path.empty()) {
        std::ofstream file(spec.output_path);
        if (!file) {
            throw IoError("cannot write sweep output to " + spec.output_path);
        }
        write_csv(file, spec, out);
        if (!file) {
            throw IoError("write failed for " + spec.output_path);
        }
    }
    if (!spec.json_path.empty()) {
        std::ofstream file(spec.json_path);
        if (!file) {
            throw IoError("cannot write sweep sidecar to " + spec.json_path);
        }
        file << sweep_to_json(spec, out).dump(2) << '\n';
        if (!file) {
            throw IoError("write failed for " + spec.json_path);
        }
    }
    return out;
}

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
    const bool bloch = spec.optimizer.observable_mode == ObservableMode::bloch;
    out << "preset,decomposition";
    if (!rows.empty()) {
        for (const auto& [name, value] : rows.front().params) {
            out << ',' << name;
        }
    }
    out << ",b_max,bound,violated,theta_a,theta_b,theta_c,theta_d";
    if (bloch) {
        out << ",phi_a,phi_b,phi_c,phi_d";
    }
    out << ",evaluations\n";

    const auto old_precision = out.precision(12);
    for (const auto& row : rows) {
        const auto& r = row.result;
        const auto& s = r.optimal_settings;
        out << row.preset << ',' << to_string(row.family);
        for (const auto& [name, value] : row.params) {
            out << ',' << value;
        }
        out << ',' << r.b_max << ',' << r.report.bound << ',' << (r.report.violated ? "true" : "false") << ','
            << s.a.theta() << ',' << s.b.theta() << ',' << s.c.theta() << ',' << s.d.theta();
        if (bloch) {
            out << ',' << s.a.azimuth() << ',' << s.b.azimuth() << ',' << s.c.azimuth() << ',' << s.d.azimuth();
        }
        out << ',' << r.evaluations << '\n';
    }
    out.precision(old_precision);
}

Json sweep_to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows)
{
    Json out_rows = Json::array();
    for (const auto& row : rows) {
        Json params = Json::object();
        for (const auto& [name, value] : row.params) {
            params[name] = value;
        }
        out_rows.push_back({{"decomposition", to_string(row.family)}, {"params", params}, {"result", row.result}});
    }
    return Json{{"preset", spec.preset}, {"optimizer", spec.optimizer}, {"rows", out_rows}};
}

} // namespace bellvar
