#include "bellvar/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "parallel.hpp"

namespace bellvar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxRestarts = 8;
constexpr std::size_t kGridChunks = 256;

using Point = std::vector<double>;

double canonical_angle(double angle)
{
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    return r >= kTwoPi ? 0.0 : r;
}

Vector3 direction(ObservableMode mode, const double* angles)
{
    if (mode == ObservableMode::plane) {
        return Vector3(std::sin(angles[0]), 0.0, std::cos(angles[0]));
    }
    const double s = std::sin(angles[0]);
    return Vector3(s * std::cos(angles[1]), s * std::sin(angles[1]), std::cos(angles[0]));
}

// Objective over packed angles.
class Objective {
public:
    Objective(const ViolationFunctional& functional, ObservableMode mode)
        : functional_(functional), mode_(mode), stride_(mode == ObservableMode::plane ? 1 : 2)
    {
    }

    int dimension() const { return 4 * stride_; }
    ObservableMode mode() const { return mode_; }

    double operator()(const Point& x) const
    {
        ++evaluations_;
        const double* p = x.data();
        return functional_(direction(mode_, p), direction(mode_, p + stride_), direction(mode_, p + 2 * stride_),
                           direction(mode_, p + 3 * stride_));
    }

    long long evaluations() const { return evaluations_; }

private:
    const ViolationFunctional& functional_;
    ObservableMode mode_;
    int stride_;
    mutable long long evaluations_ = 0;
};

struct Candidate {
    double value;
    std::size_t index;
};

// Higher value first; equal values fall back to the smaller grid index,
// which is the lexicographically smaller angle vector.
bool better(const Candidate& lhs, const Candidate& rhs)
{
    return lhs.value != rhs.value ? lhs.value > rhs.value : lhs.index < rhs.index;
}

std::size_t ipow(std::size_t base, int exp)
{
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

struct GridScan {
    std::vector<Candidate> top;
    long long evaluations = 0;
};

// Exhaustive scan; index digits are ordered most-significant first, so
// index order is lexicographic order of the angle vector.
GridScan scan_grid(const ViolationFunctional& functional, ObservableMode mode, int points, int keep,
                   unsigned jobs)
{
    const int dim = mode == ObservableMode::plane ? 4 : 8;
    const std::size_t total = ipow(points, dim);

    std::vector<Vector3> table;
    if (mode == ObservableMode::plane) {
        for (int k = 0; k < points; ++k) {
            const double t = kTwoPi * k / points;
            table.emplace_back(std::sin(t), 0.0, std::cos(t));
        }
    } else {
        for (int k = 0; k < points; ++k) {
            for (int l = 0; l < points; ++l) {
                const double angles[2] = {kTwoPi * k / points, kTwoPi * l / points};
                table.push_back(direction(mode, angles));
            }
        }
    }
    const std::size_t per_observable = table.size();

    const std::size_t chunks = std::min(kGridChunks, total);
    std::vector<std::vector<Candidate>> partial(chunks);
    detail::parallel_for(chunks, jobs, [&](std::size_t chunk) {
        const std::size_t begin = total * chunk / chunks;
        const std::size_t end = total * (chunk + 1) / chunks;
        auto& best = partial[chunk];
        auto heap_cmp = [](const Candidate& x, const Candidate& y) { return better(x, y); };
        for (std::size_t idx = begin; idx < end; ++idx) {
            std::size_t rest = idx;
            std::size_t obs[4];
            for (int o = 3; o >= 0; --o) {
                obs[o] = rest % per_observable;
                rest /= per_observable;
            }
            const double value = functional(table[obs[0]], table[obs[1]], table[obs[2]], table[obs[3]]);
            const Candidate cand{value, idx};
            if (best.size() < static_cast<std::size_t>(keep)) {
                best.push_back(cand);
                std::push_heap(best.begin(), best.end(), heap_cmp);
            } else if (better(cand, best.front())) {
                std::pop_heap(best.begin(), best.end(), heap_cmp);
                best.back() = cand;
                std::push_heap(best.begin(), best.end(), heap_cmp);
            }
        }
    });

    GridScan scan;
    scan.evaluations = static_cast<long long>(total);
    for (const auto& p : partial) {
        scan.top.insert(scan.top.end(), p.begin(), p.end());
    }
    std::sort(scan.top.begin(), scan.top.end(), better);
    if (scan.top.size() > static_cast<std::size_t>(keep)) {
        scan.top.resize(keep);
    }
    return scan;
}

Point grid_point(std::size_t index, int points, int dim)
{
    Point x(dim);
    for (int k = dim - 1; k >= 0; --k) {
        x[k] = kTwoPi * static_cast<double>(index % points) / points;
        index /= points;
    }
    return x;
}

struct Refined {
    Point x;
    double value;
    bool converged;
};

struct NelderMeadResult {
    Point x;
    double value;
    bool converged;
};

// Maximizing Nelder-Mead. The best vertex is never replaced by a worse one,
// so the result is at least the starting value.
NelderMeadResult nelder_mead(const Objective& f, const Point& start, double start_value,
                             const std::vector<double>& steps, int max_iterations, double tolerance)
{
    const int dim = static_cast<int>(start.size());
    std::vector<Point> vertex(dim + 1, start);
    std::vector<double> value(dim + 1, start_value);
    for (int k = 0; k < dim; ++k) {
        vertex[k + 1][k] += steps[k];
        value[k + 1] = f(vertex[k + 1]);
    }

    std::vector<int> order(dim + 1);
    auto sort_vertices = [&] {
        for (int k = 0; k <= dim; ++k) {
            order[k] = k;
        }
        std::stable_sort(order.begin(), order.end(), [&](int l, int r) { return value[l] > value[r]; });
    };

    auto blend = [&](const Point& from, const Point& to, double t) {
        Point p(dim);
        for (int k = 0; k < dim; ++k) {
            p[k] = from[k] + t * (to[k] - from[k]);
        }
        return p;
    };

    bool converged = false;
    for (int iter = 0; iter < max_iterations; ++iter) {
        sort_vertices();
        const int best = order.front();
        const int worst = order.back();
        const int second_worst = order[dim - 1];
        if (value[best] - value[worst] <= tolerance) {
            converged = true;
            break;
        }

        Point centroid(dim, 0.0);
        for (int k = 0; k < dim; ++k) {
            const Point& v = vertex[order[k]];
            for (int j = 0; j < dim; ++j) {
                centroid[j] += v[j] / dim;
            }
        }

        const Point reflected = blend(vertex[worst], centroid, 2.0);
        const double reflected_value = f(reflected);
        if (reflected_value > value[best]) {
            const Point expanded = blend(vertex[worst], centroid, 3.0);
            const double expanded_value = f(expanded);
            if (expanded_value > reflected_value) {
                vertex[worst] = expanded;
                value[worst] = expanded_value;
            } else {
                vertex[worst] = reflected;
                value[worst] = reflected_value;
            }
            continue;
        }
        if (reflected_value > value[second_worst]) {
            vertex[worst] = reflected;
            value[worst] = reflected_value;
            continue;
        }

        const bool outside = reflected_value > value[worst];
        const Point contracted = outside ? blend(vertex[worst], centroid, 1.5) : blend(vertex[worst], centroid, 0.5);
        const double contracted_value = f(contracted);
        if (contracted_value > std::max(outside ? reflected_value : value[worst], value[worst])) {
            vertex[worst] = contracted;
            value[worst] = contracted_value;
            continue;
        }

        // Shrink towards the best vertex.
        for (int k = 0; k <= dim; ++k) {
            if (k == best) {
                continue;
            }
            vertex[k] = blend(vertex[best], vertex[k], 0.5);
            value[k] = f(vertex[k]);
        }
    }

    sort_vertices();
    return {vertex[order.front()], value[order.front()], converged};
}

Refined refine(const Objective& f, const Point& seed, double seed_value, double initial_step,
               const OptimizerConfig& config, std::mt19937_64& rng)
{
    const int dim = static_cast<int>(seed.size());
    Refined current{seed, seed_value, false};
    double step = initial_step;
    std::bernoulli_distribution coin(0.5);
    for (int restart = 0; restart < kMaxRestarts; ++restart) {
        std::vector<double> steps(dim);
        for (int k = 0; k < dim; ++k) {
            steps[k] = coin(rng) ? step : -step;
        }
        const NelderMeadResult run = nelder_mead(f, current.x, current.value, steps, config.max_refine_iterations,
                                                 config.convergence_tolerance);
        const double gain = run.value - current.value;
        if (run.value > current.value) {
            current.x = run.x;
            current.value = run.value;
        }
        current.converged = run.converged;
        if (run.converged && gain <= config.convergence_tolerance) {
            break;
        }
        step = std::max(step * 0.25, 1e-4);
    }
    return current;
}

bool lexicographically_less(const Point& l, const Point& r)
{
    return std::lexicographical_compare(l.begin(), l.end(), r.begin(), r.end());
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

int OptimizerConfig::grid_points() const
{
    if (coarse_grid_points_per_axis) {
        return *coarse_grid_points_per_axis;
    }
    return observable_mode == ObservableMode::plane ? 9 : 7;
}

void OptimizerConfig::validate() const
{
    std::ostringstream msg;
    if (grid_points() < 3) {
        msg << "coarse grid needs at least 3 points per axis, got " << grid_points();
    } else if (refine_seeds < 1) {
        msg << "refine_seeds must be >= 1, got " << refine_seeds;
    } else if (max_refine_iterations < 1) {
        msg << "max_refine_iterations must be >= 1, got " << max_refine_iterations;
    } else if (!(convergence_tolerance > 0.0)) {
        msg << "convergence_tolerance must be > 0, got " << convergence_tolerance;
    } else {
        return;
    }
    throw DomainError(msg.str());
}

MeasurementSettings settings_from_angles(std::span<const double> angles, ObservableMode mode)
{
    if (mode == ObservableMode::plane) {
        if (angles.size() != 4) {
            throw DomainError("plane settings need 4 angles");
        }
        return MeasurementSettings::plane(angles[0], angles[1], angles[2], angles[3]);
    }
    if (angles.size() != 8) {
        throw DomainError("bloch settings need 8 angles (polar, azimuth per observable)");
    }
    return {Observable::spherical(angles[0], angles[1]), Observable::spherical(angles[2], angles[3]),
            Observable::spherical(angles[4], angles[5]), Observable::spherical(angles[6], angles[7])};
}

ViolationResult maximize_violation(const Decomposition& decomp, const OptimizerConfig& config)
{
    config.validate();
    const ViolationFunctional functional(decomp);
    const ObservableMode mode = config.observable_mode;
    const int points = config.grid_points();
    const int dim = mode == ObservableMode::plane ? 4 : 8;

    const GridScan scan = scan_grid(functional, mode, points, config.refine_seeds, config.jobs);
    const double initial_step = 0.5 * kTwoPi / points;

    std::vector<Refined> refined(scan.top.size());
    std::vector<long long> evaluations(scan.top.size(), 0);
    detail::parallel_for(scan.top.size(), config.jobs, [&](std::size_t s) {
        const Objective f(functional, mode);
        std::mt19937_64 rng(mix_seed(config.rng_seed, s));
        const Point seed = grid_point(scan.top[s].index, points, dim);
        refined[s] = refine(f, seed, scan.top[s].value, initial_step, config, rng);
        evaluations[s] = f.evaluations();
    });

    ViolationResult result;
    result.mode = mode;
    result.rng_seed = config.rng_seed;
    result.grid_best = scan.top.front().value;
    result.evaluations = scan.evaluations;
    for (long long e : evaluations) {
        result.evaluations += e;
    }

    // Canonicalize, re-evaluate, then reduce with the fixed tie-break.
    const Objective f(functional, mode);
    std::optional<Refined> best;
    for (auto& r : refined) {
        for (double& angle : r.x) {
            angle = canonical_angle(angle);
        }
        r.value = f(r.x);
        if (!best || r.value > best->value || (r.value == best->value && lexicographically_less(r.x, best->x))) {
            best = r;
        }
    }
    result.evaluations += f.evaluations();

    result.b_max = best->value;
    result.converged = best->converged;
    result.optimal_settings = settings_from_angles(best->x, mode);
    result.report = evaluate_eq6(decomp, result.optimal_settings);
    result.report.provenance = "maximize_violation";
    return result;
}

InequalityReport evaluate_witness(const Decomposition& decomp, const MeasurementSettings& settings,
                                  std::string provenance)
{
    InequalityReport report = evaluate_eq6(decomp, settings);
    report.provenance = std::move(provenance);
    return report;
}

} // namespace bellvar
