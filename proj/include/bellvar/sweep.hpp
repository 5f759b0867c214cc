#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bellvar/json_io.hpp"
#include "bellvar/optimize.hpp"

namespace bellvar {

/// Decompositions the sweep engine knows how to build from parameters.
enum class Family { mems, werner, product, bell };

const char* to_string(Family family);
Family parse_family(const std::string& name);
/// Parameter names the family needs: mems {gamma}, werner {gamma, xi},
/// product and bell {x}.
std::vector<std::string> family_parameters(Family family);
/// Throws DomainError if a required parameter is missing or out of range.
Decomposition build_decomposition(Family family, const std::map<std::string, double>& params);

struct ParameterAxis {
    std::string name;
    double start = 0.0;
    double stop = 1.0;
    int steps = 2;
    /// false gives a half-open grid [start, stop) for periodic parameters.
    bool include_stop = true;

    std::vector<double> values() const;
};

struct SweepSpec {
    std::string preset = "custom";
    std::vector<Family> families;
    /// Outermost first; families vary fastest.
    std::vector<ParameterAxis> axes;
    std::map<std::string, double> fixed;
    OptimizerConfig optimizer;
    std::string output_path; // CSV; empty means no file
    std::string json_path;   // optional sidecar with full results

    void validate() const;
};

/// fig1a: mems over gamma; fig1b: werner at xi = pi/4 over gamma;
/// fig2: werner over (gamma, xi in [0, 2pi)); fig3: product and bell over x.
SweepSpec preset_spec(const std::string& name);
std::vector<std::string> preset_names();

struct SweepRow {
    std::string preset;
    Family family;
    std::vector<std::pair<std::string, double>> params;
    ViolationResult result;
};

/// One row per (grid point, family), in grid order. Writes the CSV (and
/// sidecar) when paths are set; unwritable paths raise IoError.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Columns: preset, decomposition, parameter names, b_max, bound, violated,
/// theta_a..theta_d, [phi_a..phi_d in bloch mode], evaluations.
void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);
Json sweep_to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);

} // namespace bellvar
