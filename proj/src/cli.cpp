#include "bellvar/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "bellvar/json_io.hpp"
#include "bellvar/sweep.hpp"

namespace bellvar::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SourceOptions {
    std::string family;
    std::string decomposition = "product";
    std::optional<double> gamma;
    std::optional<double> xi;
    std::optional<double> x;
    std::string state_file;
    std::string decomp_file;
};

struct OptimizerOptions {
    std::string config_file;
    std::optional<int> grid;
    std::optional<int> seeds;
    std::optional<int> max_iter;
    std::optional<double> tol;
    bool bloch = false;
    std::optional<std::uint64_t> seed;
};

void add_source(CLI::App* cmd, SourceOptions& s)
{
    cmd->add_option("--family", s.family, "Built-in family: mems, werner, separable, product, bell");
    cmd->add_option("--decomposition", s.decomposition, "Decomposition of the separable family: product or bell");
    cmd->add_option("--gamma", s.gamma, "Mixing parameter gamma in [0, 1]");
    cmd->add_option("--xi", s.xi, "Werner angle xi (radians)");
    cmd->add_option("--x", s.x, "Separable-state parameter, |x| <= 1/4");
    cmd->add_option("--state", s.state_file, "JSON file with a density matrix");
    cmd->add_option("--decomp", s.decomp_file, "JSON file with a decomposition");
}

void add_optimizer(CLI::App* cmd, OptimizerOptions& o)
{
    cmd->add_option("--config", o.config_file, "Optimizer config as JSON; flags override it");
    cmd->add_option("--grid", o.grid, "Coarse grid points per angle");
    cmd->add_option("--seeds", o.seeds, "Number of grid points refined");
    cmd->add_option("--max-iter", o.max_iter, "Nelder-Mead iterations per run");
    cmd->add_option("--tol", o.tol, "Convergence tolerance on <B>");
    cmd->add_flag("--bloch", o.bloch, "Optimize over full Bloch-sphere observables");
    cmd->add_option("--seed", o.seed, "RNG seed");
}

int source_count(const SourceOptions& s)
{
    return static_cast<int>(!s.family.empty()) + static_cast<int>(!s.state_file.empty()) +
           static_cast<int>(!s.decomp_file.empty());
}

double need(const std::optional<double>& v, const char* flag, const std::string& family)
{
    if (!v) {
        throw UsageError("family '" + family + "' needs " + flag);
    }
    return *v;
}

Family resolve_family(const SourceOptions& s)
{
    if (s.family == "separable") {
        if (s.decomposition != "product" && s.decomposition != "bell") {
            throw UsageError("--decomposition must be product or bell");
        }
        return parse_family(s.decomposition);
    }
    try {
        return parse_family(s.family);
    } catch (const DomainError&) {
        throw UsageError("unknown --family '" + s.family + "'");
    }
}

std::map<std::string, double> family_params(const SourceOptions& s, Family f)
{
    std::map<std::string, double> p;
    if (f == Family::mems || f == Family::werner) {
        p["gamma"] = need(s.gamma, "--gamma", s.family);
    }
    if (f == Family::werner) {
        p["xi"] = s.xi.value_or(std::numbers::pi / 4.0);
    }
    if (f == Family::product || f == Family::bell) {
        p["x"] = need(s.x, "--x", s.family);
    }
    return p;
}

Json describe_source(const SourceOptions& s)
{
    if (!s.state_file.empty()) {
        return {{"state_file", s.state_file}};
    }
    if (!s.decomp_file.empty()) {
        return {{"decomp_file", s.decomp_file}};
    }
    Json j = {{"family", s.family}};
    const Family f = resolve_family(s);
    j["decomposition"] = to_string(f);
    for (const auto& [name, value] : family_params(s, f)) {
        j[name] = value;
    }
    return j;
}

Decomposition load_decomposition(const SourceOptions& s)
{
    if (source_count(s) != 1 || !s.state_file.empty()) {
        throw UsageError("give exactly one of --family or --decomp");
    }
    if (!s.decomp_file.empty()) {
        return decomposition_from_json(read_json_file(s.decomp_file));
    }
    const Family f = resolve_family(s);
    return build_decomposition(f, family_params(s, f));
}

QubitPairState load_state(const SourceOptions& s)
{
    if (source_count(s) != 1) {
        throw UsageError("give exactly one of --family, --state or --decomp");
    }
    if (!s.state_file.empty()) {
        return state_from_json(read_json_file(s.state_file));
    }
    return load_decomposition(s).source();
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw UsageError("cannot parse number '" + item + "' in '" + text + "'");
        }
    }
    return values;
}

std::vector<double> to_radians(std::vector<double> values, bool degrees)
{
    if (degrees) {
        for (double& v : values) {
            v *= std::numbers::pi / 180.0;
        }
    }
    return values;
}

OptimizerConfig build_config(const OptimizerOptions& o, unsigned jobs)
{
    OptimizerConfig c = o.config_file.empty() ? OptimizerConfig{} : config_from_json(read_json_file(o.config_file));
    if (o.bloch) {
        c.observable_mode = ObservableMode::bloch;
    }
    if (o.grid) {
        c.coarse_grid_points_per_axis = *o.grid;
    }
    if (o.seeds) {
        c.refine_seeds = *o.seeds;
    }
    if (o.max_iter) {
        c.max_refine_iterations = *o.max_iter;
    }
    if (o.tol) {
        c.convergence_tolerance = *o.tol;
    }
    if (o.seed) {
        c.rng_seed = *o.seed;
    }
    c.jobs = jobs;
    return c;
}

unsigned default_jobs()
{
    if (const char* env = std::getenv("BELLVAR_JOBS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError(std::string("BELLVAR_JOBS must be a non-negative integer, got '") + env + "'");
        }
    }
    return 1;
}

ParameterAxis parse_axis(const std::string& text)
{
    // name:start:stop:steps
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) {
        parts.push_back(item);
    }
    if (parts.size() != 4) {
        throw UsageError("axis must be name:start:stop:steps, got '" + text + "'");
    }
    ParameterAxis axis;
    axis.name = parts[0];
    axis.start = parse_list(parts[1]).at(0);
    axis.stop = parse_list(parts[2]).at(0);
    axis.steps = static_cast<int>(parse_list(parts[3]).at(0));
    return axis;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Variable-bound Bell inequality toolkit for two-qubit states", "bellvar"};
    app.require_subcommand(1);

    unsigned jobs = 1;
    bool degrees = false;

    // eval
    SourceOptions eval_src;
    std::string eval_angles;
    bool eval_bloch = false;
    bool eval_eq7 = false;
    std::size_t eval_split = 0;
    std::string eval_ordering;
    auto* eval = app.add_subcommand("eval", "Evaluate the inequality at given settings");
    add_source(eval, eval_src);
    eval->add_option("--angles", eval_angles, "a,b,c,d plane angles (8 values polar,azimuth with --bloch)")->required();
    eval->add_flag("--bloch", eval_bloch, "Angles are spherical (polar, azimuth) pairs");
    eval->add_flag("--degrees", degrees, "Angles are given in degrees");
    eval->add_flag("--eq7", eval_eq7, "Evaluate the d = c perfectly-correlated form (experimental)");
    eval->add_option("--split", eval_split, "Size n of the perfectly-correlated group (default N)");
    eval->add_option("--ordering", eval_ordering, "Comma-separated permutation of term indices");

    // optimize
    SourceOptions opt_src;
    OptimizerOptions opt_options;
    auto* optimize = app.add_subcommand("optimize", "Maximize the violation over measurement settings");
    add_source(optimize, opt_src);
    add_optimizer(optimize, opt_options);
    optimize->add_option("--jobs", jobs, "Worker threads (default $BELLVAR_JOBS or 1)");

    // sweep
    std::string preset;
    std::string sweep_family;
    std::vector<std::string> sweep_axes;
    std::vector<std::string> sweep_fixed;
    std::string sweep_out;
    std::string sweep_json;
    bool sweep_csv = false;
    OptimizerOptions sweep_options;
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep (figure presets or custom grids)");
    sweep->add_option("--preset", preset, "fig1a, fig1b, fig2 or fig3");
    sweep->add_option("--family", sweep_family, "Comma-separated families for a custom sweep");
    sweep->add_option("--axis", sweep_axes, "name:start:stop:steps (repeatable)");
    sweep->add_option("--fixed", sweep_fixed, "name=value (repeatable)");
    sweep->add_option("--out", sweep_out, "CSV output path");
    sweep->add_option("--json", sweep_json, "JSON sidecar path");
    sweep->add_flag("--csv", sweep_csv, "Write CSV to standard output");
    add_optimizer(sweep, sweep_options);
    sweep->add_option("--jobs", jobs, "Worker threads (default $BELLVAR_JOBS or 1)");

    // sample
    SourceOptions sample_src;
    std::string first_text;
    std::string second_text;
    long long trials = 100000;
    std::uint64_t sample_seed = 0;
    auto* sample = app.add_subcommand("sample", "Monte Carlo estimate of a correlation");
    add_source(sample, sample_src);
    sample->add_option("--first", first_text, "Observable on particle one: theta or polar,azimuth")->required();
    sample->add_option("--second", second_text, "Observable on particle two: theta or polar,azimuth")->required();
    sample->add_option("--trials", trials, "Number of simulated measurements");
    sample->add_option("--seed", sample_seed, "RNG seed");
    sample->add_flag("--degrees", degrees, "Angles are given in degrees");
    sample->add_option("--jobs", jobs, "Worker threads (default $BELLVAR_JOBS or 1)");

    // concurrence
    SourceOptions conc_src;
    auto* conc = app.add_subcommand("concurrence", "Wootters concurrence of a state");
    add_source(conc, conc_src);

    // validate
    SourceOptions val_src;
    auto* validate = app.add_subcommand("validate", "Check a decomposition against its source state");
    add_source(validate, val_src);

    try {
        jobs = default_jobs();
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*eval) {
            const Decomposition d = load_decomposition(eval_src);
            const ObservableMode mode = eval_bloch ? ObservableMode::bloch : ObservableMode::plane;
            const MeasurementSettings s = settings_from_angles(to_radians(parse_list(eval_angles), degrees), mode);
            Json j = {{"source", describe_source(eval_src)}};
            if (eval_eq7) {
                std::vector<std::size_t> ordering;
                for (double v : parse_list(eval_ordering.empty() ? std::string() : eval_ordering)) {
                    ordering.push_back(static_cast<std::size_t>(v));
                }
                const std::size_t split = eval_split == 0 ? d.size() : eval_split;
                j["eq7"] = evaluate_eq7(d, s, split, ordering);
            } else {
                const InequalityReport r = evaluate_witness(d, s, "cli");
                j["report"] = r;
                j["b_value"] = r.b_value;
                j["violated"] = r.violated;
                j["chsh_value"] = chsh_value(d.source(), s);
                j["chsh_max"] = chsh_max(d.source());
            }
            out << j.dump(2) << '\n';
            return kExitOk;
        }

        if (*optimize) {
            const Decomposition d = load_decomposition(opt_src);
            const OptimizerConfig config = build_config(opt_options, jobs);
            const ViolationResult r = maximize_violation(d, config);
            Json j = r;
            j["source"] = describe_source(opt_src);
            j["config"] = config;
            out << j.dump(2) << '\n';
            return kExitOk;
        }

        if (*sweep) {
            SweepSpec spec;
            if (!preset.empty()) {
                if (!sweep_family.empty() || !sweep_axes.empty()) {
                    throw UsageError("--preset cannot be combined with --family/--axis");
                }
                spec = preset_spec(preset);
            } else {
                if (sweep_family.empty() || sweep_axes.empty()) {
                    throw UsageError("custom sweeps need --family and at least one --axis");
                }
                std::stringstream in(sweep_family);
                std::string name;
                while (std::getline(in, name, ',')) {
                    spec.families.push_back(parse_family(name));
                }
                for (const auto& a : sweep_axes) {
                    spec.axes.push_back(parse_axis(a));
                }
                for (const auto& f : sweep_fixed) {
                    const auto eq = f.find('=');
                    if (eq == std::string::npos) {
                        throw UsageError("--fixed expects name=value, got '" + f + "'");
                    }
                    spec.fixed[f.substr(0, eq)] = parse_list(f.substr(eq + 1)).at(0);
                }
            }
            spec.optimizer = build_config(sweep_options, jobs);
            spec.output_path = sweep_out;
            spec.json_path = sweep_json;
            const auto rows = run_sweep(spec);
            if (sweep_csv) {
                write_csv(out, spec, rows);
            } else if (!sweep_out.empty()) {
                out << Json{{"preset", spec.preset}, {"rows", rows.size()}, {"output", sweep_out}}.dump(2) << '\n';
            } else {
                out << sweep_to_json(spec, rows).dump(2) << '\n';
            }
            return kExitOk;
        }

        if (*sample) {
            const QubitPairState state = load_state(sample_src);
            auto observable = [&](const std::string& text) {
                const auto v = to_radians(parse_list(text), degrees);
                if (v.size() == 1) {
                    return Observable::plane(v[0]);
                }
                if (v.size() == 2) {
                    return Observable::spherical(v[0], v[1]);
                }
                throw UsageError("observable needs 1 (plane) or 2 (polar,azimuth) angles");
            };
            const Observable first = observable(first_text);
            const Observable second = observable(second_text);
            const SampleEstimate e = sample_correlation(state, first, second, trials, sample_seed, jobs);
            const double analytic = correlation(state, first, second);
            Json j = e;
            j["analytic"] = analytic;
            j["deviation_in_std_errors"] =
                e.std_error > 0.0 ? std::abs(e.mean - analytic) / e.std_error : std::abs(e.mean - analytic);
            j["source"] = describe_source(sample_src);
            out << j.dump(2) << '\n';
            return kExitOk;
        }

        if (*conc) {
            const QubitPairState state = load_state(conc_src);
            out << Json{{"concurrence", concurrence(state)}, {"source", describe_source(conc_src)}}.dump(2) << '\n';
            return kExitOk;
        }

        if (*validate) {
            const Decomposition d = load_decomposition(val_src);
            const DecompositionReport r = validate_decomposition(d);
            Json j = r;
            j["label"] = d.label();
            j["terms"] = d.size();
            out << j.dump(2) << '\n';
            return r.passed ? kExitOk : kExitDomain;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const Json::exception& e) {
        err << "error: malformed JSON input: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

} // namespace bellvar::cli
