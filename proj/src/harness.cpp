#include "clt/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "clt/parallel.hpp"
#include "clt/rng.hpp"

namespace clt::harness {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Stream-role ids; every random draw in an experiment belongs to a named
// stream keyed (seed, kind, n, replicate/resample, role).
enum Role : std::uint64_t {
    kRolePath = 1,
    kRoleRefDistance = 3,
    kRoleRefFloorA = 4,
    kRoleRefFloorB = 5,
    kRoleSliced = 6,
    kRoleSlicedFloor = 7,
};

std::uint64_t kind_id(ExperimentKind kind) {
    return static_cast<std::uint64_t>(kind) + 1;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

long elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

Vector start_distribution(const ExperimentConfig& config, const Vector& pi) {
    if (!config.start.has_value()) return pi;
    const int s = static_cast<int>(pi.size());
    if (*config.start < 0 || *config.start >= s) {
        throw ValidationError("start: state " + std::to_string(*config.start) +
                              " out of range for " + std::to_string(s) + " states");
    }
    Vector d = Vector::Zero(s);
    d(*config.start) = 1.0;
    return d;
}

int draw_start(const ExperimentConfig& config, const Vector& pi, Rng& rng) {
    if (config.start.has_value()) return *config.start;
    const double u = rng.next_double();
    double acc = 0.0;
    for (int i = 0; i < pi.size(); ++i) {
        acc += pi(i);
        if (u < acc) return i;
    }
    return static_cast<int>(pi.size()) - 1;
}

struct DistanceSummary {
    double value = 0.0;
    double value_se = 0.0;
    double floor = 0.0;
    double floor_se = 0.0;
    double adjusted = 0.0;
    bool exact = false;     // exact 1-d W1 vs sliced
    bool resolved = false;  // distance statistically above the floor
};

// Distance from an ensemble law to its reference Gaussian, with the same-size
// self-distance floor. The estimate averages over `ensemble_resamples`
// independent same-size ensembles (make_ensemble(j)); a grid point counts as
// resolved only when the mean distance exceeds the floor by 3 standard
// errors, since points at the floor carry no information about the decay.
template <typename EnsembleFn>
DistanceSummary distance_with_floor(EnsembleFn&& make_ensemble, long m, int dim,
                                    const Matrix& ref_cov, const ExperimentConfig& config,
                                    std::uint64_t n_key) {
    const std::uint64_t kind = kind_id(config.kind);
    const int m_ens = config.ensemble_resamples;

    DistanceSummary out;
    out.exact = dim == 1;
    auto measure = [&](const stats::SampleSet& a, const stats::SampleSet& b,
                       std::uint64_t slice_key) {
        if (out.exact) return stats::w1_exact_1d(a, b);
        return stats::sliced_w1(a, b, config.directions, slice_key).value;
    };

    double dsum = 0.0, dsumsq = 0.0;
    for (int j = 0; j < m_ens; ++j) {
        const std::uint64_t jj = static_cast<std::uint64_t>(j);
        const stats::SampleSet ens = make_ensemble(j);
        const auto ref = stats::gaussian_samples(
            ref_cov, m, subseed(config.seed, {kind, n_key, jj, kRoleRefDistance}));
        const double dist =
            measure(ens, ref, subseed(config.seed, {kind, n_key, jj, kRoleSliced}));
        dsum += dist;
        dsumsq += dist * dist;
    }
    out.value = dsum / m_ens;
    if (m_ens > 1) {
        const double dvar =
            std::max(0.0, (dsumsq - m_ens * out.value * out.value) / (m_ens - 1));
        out.value_se = std::sqrt(dvar / m_ens);
    }

    double fsum = 0.0, fsumsq = 0.0;
    const int m_floor = config.floor_resamples;
    for (int f = 0; f < m_floor; ++f) {
        const std::uint64_t ff = static_cast<std::uint64_t>(f);
        const auto floor_a = stats::gaussian_samples(
            ref_cov, m, subseed(config.seed, {kind, n_key, ff, kRoleRefFloorA}));
        const auto floor_b = stats::gaussian_samples(
            ref_cov, m, subseed(config.seed, {kind, n_key, ff, kRoleRefFloorB}));
        const double flr = measure(floor_a, floor_b,
                                   subseed(config.seed, {kind, n_key, ff, kRoleSlicedFloor}));
        fsum += flr;
        fsumsq += flr * flr;
    }
    out.floor = fsum / m_floor;
    if (m_floor > 1) {
        const double fvar =
            std::max(0.0, (fsumsq - m_floor * out.floor * out.floor) / (m_floor - 1));
        out.floor_se = std::sqrt(fvar / m_floor);
    }

    out.adjusted = stats::floor_adjust(out.value, out.floor);
    out.resolved = m_ens > 1 ? out.value - out.floor > 3.0 * out.value_se
                             : out.adjusted > 0.0;
    return out;
}

void push_distance_rows(ExperimentResult& result, long n, const DistanceSummary& dist) {
    const char* name = dist.exact ? "w1_exact" : "w1_sliced";
    result.rows.push_back({result.experiment, n, name, dist.value, dist.value_se});
    result.rows.push_back({result.experiment, n, "floor", dist.floor, dist.floor_se});
    result.rows.push_back(
        {result.experiment, n, "w1_floor_adjusted", dist.adjusted, dist.value_se});
}

// Fit a log-log slope over the floor-resolved points of a curve.
void fit_resolved(stats::RateReport& report, const std::vector<bool>& resolved,
                  std::vector<std::string>& notes) {
    std::vector<double> grid, values;
    for (std::size_t i = 0; i < report.values.size(); ++i) {
        if (resolved[i] && report.values[i] > 0.0) {
            grid.push_back(report.grid[i]);
            values.push_back(report.values[i]);
        } else {
            notes.push_back("# n=" + std::to_string(static_cast<long>(report.grid[i])) +
                            " not resolved above the floor; excluded from the slope fit");
        }
    }
    if (grid.size() < 2) {
        notes.push_back("# slope not fitted: fewer than 2 floor-resolved values");
        return;
    }
    const auto fit = stats::fit_rate(grid, values);
    report.slope = fit.slope;
    report.intercept = fit.intercept;
}

void note_config(ExperimentResult& result, const ExperimentConfig& config) {
    result.notes.push_back("# experiment: " + kind_to_string(config.kind));
    result.notes.push_back("# seed: " + std::to_string(config.seed));
    result.notes.push_back("# threads: " + std::to_string(config.threads));
    if (config.kind == ExperimentKind::mc_clt || config.kind == ExperimentKind::bound_curve) {
        result.notes.push_back("# c_universal: " + fmt(config.c_universal));
    }
}

struct BoundCurves {
    double fixed = std::numeric_limits<double>::quiet_NaN();
    double scheduled = 0.0;
};

BoundCurves bound_at(const markov::FiniteMarkovChain& chain,
                     const markov::PoissonSolution& sol, const Matrix& sigma, long n,
                     const ExperimentConfig& config, const Vector& initial) {
    const int d = static_cast<int>(sigma.rows());
    BoundCurves out;
    if (config.beta.has_value()) {
        const auto stats_fixed = stein::chain_martingale_stats(chain, sol, sigma, n,
                                                               *config.beta, initial);
        out.fixed = stein::martingale_clt_bound(
            stats_fixed, stein::stein_constants(d, *config.beta, config.c_universal));
    }
    const double beta_n = stein::beta_schedule(n);
    const auto stats_sched = stein::chain_martingale_stats(chain, sol, sigma, n, beta_n, initial);
    out.scheduled = stein::martingale_clt_bound(
        stats_sched, stein::stein_constants(d, beta_n, config.c_universal));
    return out;
}

}  // namespace

ExperimentKind kind_from_string(const std::string& name) {
    if (name == "mc-clt") return ExperimentKind::mc_clt;
    if (name == "td-clt") return ExperimentKind::td_clt;
    if (name == "bound-curve") return ExperimentKind::bound_curve;
    if (name == "upsilon-decay") return ExperimentKind::upsilon_decay;
    if (name == "delta-moments") return ExperimentKind::delta_moments;
    throw ValidationError("kind: unknown experiment \"" + name + "\"");
}

std::string kind_to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::mc_clt: return "mc-clt";
        case ExperimentKind::td_clt: return "td-clt";
        case ExperimentKind::bound_curve: return "bound-curve";
        case ExperimentKind::upsilon_decay: return "upsilon-decay";
        case ExperimentKind::delta_moments: return "delta-moments";
    }
    return "?";
}

std::uint64_t subseed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    return Rng(seed, ids).next_u64();
}

namespace {

io::json json_or_file(const io::json& value, const std::string& base_dir,
                      const std::string& what) {
    if (value.is_string()) {
        fs::path p(value.get<std::string>());
        if (p.is_relative()) p = fs::path(base_dir) / p;
        return io::load_json_file(p.string());
    }
    if (value.is_object()) return value;
    throw ValidationError(what + ": expected a file path or an inline object");
}

std::vector<long> parse_n_grid(const io::json& j) {
    if (!j.is_array() || j.size() < 1) {
        throw ValidationError("n_grid: expected a non-empty array of counts");
    }
    std::vector<long> grid;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long>() < 1) {
            throw ValidationError("n_grid: entries must be positive integers");
        }
        grid.push_back(v.get<long>());
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] <= grid[i - 1]) {
            throw ValidationError("n_grid: must be strictly increasing at entry " +
                                  std::to_string(i));
        }
    }
    return grid;
}

}  // namespace

ExperimentConfig load_experiment_config(const io::json& j, const std::string& base_dir) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ValidationError("config: missing string key \"kind\"");
    }
    ExperimentConfig config;
    config.kind = kind_from_string(j["kind"].get<std::string>());

    switch (config.kind) {
        case ExperimentKind::mc_clt:
            io::require_keys(j,
                             {"kind", "chain", "reward", "n_grid", "replicates", "seed",
                              "beta", "directions", "threads", "c_universal", "start",
                              "floor_resamples", "ensemble_resamples"},
                             "config");
            break;
        case ExperimentKind::td_clt:
            io::require_keys(j,
                             {"kind", "model", "n_grid", "replicates", "seed", "directions",
                              "threads", "start", "floor_resamples", "ensemble_resamples",
                              "theta0"},
                             "config");
            break;
        case ExperimentKind::bound_curve:
            io::require_keys(
                j, {"kind", "chain", "reward", "n_grid", "seed", "beta", "threads",
                    "c_universal", "start"},
                "config");
            break;
        case ExperimentKind::upsilon_decay:
            io::require_keys(j, {"kind", "n_grid", "delta", "a_bar", "seed", "threads"},
                             "config");
            break;
        case ExperimentKind::delta_moments:
            io::require_keys(
                j, {"kind", "model", "n_grid", "replicates", "seed", "threads", "theta0",
                    "start"},
                "config");
            break;
    }

    if (!j.contains("n_grid")) throw ValidationError("config: missing \"n_grid\"");
    config.n_grid = parse_n_grid(j["n_grid"]);

    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) throw ValidationError("seed: expected an integer");
        config.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("threads")) {
        if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 1) {
            throw ValidationError("threads: expected a positive integer");
        }
        config.threads = j["threads"].get<int>();
    }
    if (j.contains("replicates")) {
        if (!j["replicates"].is_number_integer() || j["replicates"].get<int>() < 1) {
            throw ValidationError("replicates: expected a positive integer");
        }
        config.replicates = j["replicates"].get<int>();
    }
    if (j.contains("directions")) {
        if (!j["directions"].is_number_integer() || j["directions"].get<int>() < 1) {
            throw ValidationError("directions: expected a positive integer");
        }
        config.directions = j["directions"].get<int>();
    }
    if (j.contains("floor_resamples")) {
        if (!j["floor_resamples"].is_number_integer() || j["floor_resamples"].get<int>() < 1) {
            throw ValidationError("floor_resamples: expected a positive integer");
        }
        config.floor_resamples = j["floor_resamples"].get<int>();
    }
    if (j.contains("ensemble_resamples")) {
        if (!j["ensemble_resamples"].is_number_integer() ||
            j["ensemble_resamples"].get<int>() < 1) {
            throw ValidationError("ensemble_resamples: expected a positive integer");
        }
        config.ensemble_resamples = j["ensemble_resamples"].get<int>();
    }
    if (j.contains("c_universal")) {
        if (!j["c_universal"].is_number() || !(j["c_universal"].get<double>() > 0.0)) {
            throw ValidationError("c_universal: expected a positive number");
        }
        config.c_universal = j["c_universal"].get<double>();
    }
    if (j.contains("beta")) {
        if (j["beta"].is_string()) {
            if (j["beta"].get<std::string>() != "schedule") {
                throw ValidationError("beta: expected a number or \"schedule\"");
            }
            config.beta.reset();
        } else if (j["beta"].is_number()) {
            config.beta = j["beta"].get<double>();
            if (!(*config.beta > 0.0 && *config.beta < 1.0)) {
                throw ValidationError("beta: must lie in (0, 1)");
            }
        } else {
            throw ValidationError("beta: expected a number or \"schedule\"");
        }
    } else {
        config.beta = 0.5;
    }
    if (j.contains("start")) {
        if (j["start"].is_string()) {
            if (j["start"].get<std::string>() != "stationary") {
                throw ValidationError("start: expected a state index or \"stationary\"");
            }
            config.start.reset();
        } else if (j["start"].is_number_integer()) {
            config.start = j["start"].get<int>();
        } else {
            throw ValidationError("start: expected a state index or \"stationary\"");
        }
    } else {
        config.start = 0;
    }
    if (j.contains("delta")) {
        if (!j["delta"].is_number()) throw ValidationError("delta: expected a number");
        config.delta = j["delta"].get<double>();
    }
    if (j.contains("a_bar")) {
        if (j["a_bar"].is_number()) {
            Matrix m(1, 1);
            m(0, 0) = j["a_bar"].get<double>();
            config.a_bar = m;
        } else {
            config.a_bar = io::matrix_from_json(j["a_bar"], "a_bar");
        }
    }
    if (j.contains("theta0")) {
        config.theta0 = io::vector_from_json(j["theta0"], "theta0");
    }

    if (j.contains("chain")) {
        config.chain = io::chain_from_json(json_or_file(j["chain"], base_dir, "chain"));
    }
    if (j.contains("reward")) {
        config.reward = io::reward_from_json(json_or_file(j["reward"], base_dir, "reward"));
    }
    if (j.contains("model")) {
        config.model = io::td_model_from_json(json_or_file(j["model"], base_dir, "model"));
    }

    // Kind-specific presence checks.
    auto need = [&](bool ok, const char* key) {
        if (!ok) {
            throw ValidationError("config (" + kind_to_string(config.kind) +
                                  "): missing required field \"" + std::string(key) + "\"");
        }
    };
    switch (config.kind) {
        case ExperimentKind::mc_clt:
            need(config.chain.has_value(), "chain");
            need(config.reward.has_value(), "reward");
            need(config.replicates >= 2, "replicates (>= 2)");
            break;
        case ExperimentKind::td_clt:
            need(config.model.has_value(), "model");
            need(config.replicates >= 2, "replicates (>= 2)");
            break;
        case ExperimentKind::bound_curve:
            need(config.chain.has_value(), "chain");
            need(config.reward.has_value(), "reward");
            break;
        case ExperimentKind::upsilon_decay:
            need(config.delta.has_value(), "delta");
            need(config.a_bar.has_value(), "a_bar");
            break;
        case ExperimentKind::delta_moments:
            need(config.model.has_value(), "model");
            need(config.replicates >= 2, "replicates (>= 2)");
            break;
    }
    return config;
}

ExperimentConfig load_experiment_config_file(const std::string& path) {
    const io::json j = io::load_json_file(path);
    return load_experiment_config(j, fs::path(path).parent_path().string());
}

ExperimentResult run_mc_clt(const ExperimentConfig& config) {
    const auto& chain = *config.chain;
    const auto sol = markov::solve_poisson(chain, *config.reward);
    if (sol.cols != 1) {
        throw ValidationError("mc-clt: reward must be vector-valued");
    }
    const auto acov = markov::asymptotic_covariance(chain, sol);
    if (!acov.positive_definite) {
        throw DegenerateCovarianceError(
            "mc-clt: Sigma_inf is not positive definite (min eigenvalue " +
            std::to_string(acov.min_eigenvalue) + "); the CLT reference is degenerate");
    }
    const Matrix& sigma = acov.sigma;
    const int d = sol.rows;
    const Vector r_bar = sol.r_bar;
    const Vector pi = sol.pi;
    const Vector initial = start_distribution(config, pi);

    ExperimentResult result;
    result.experiment = kind_to_string(config.kind);
    note_config(result, config);
    result.notes.push_back("# sigma_inf_min_eigenvalue: " + fmt(acov.min_eigenvalue));
    result.notes.push_back("# poisson_max_value_norm: " + fmt(sol.max_value_norm()));

    const Matrix& p = chain.transition();
    const Matrix& rewards = config.reward->flat;

    std::vector<bool> resolved;
    for (long n : config.n_grid) {
        const auto t0 = Clock::now();
        auto make_ensemble = [&](int j) {
            Matrix ens(config.replicates, d);
            parallel_for(config.replicates, config.threads, [&](long r) {
                Rng rng(config.seed,
                        {kind_id(config.kind), static_cast<std::uint64_t>(n),
                         static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(r),
                         kRolePath});
                int x = draw_start(config, pi, rng);
                Vector acc = Vector::Zero(d);
                for (long k = 0; k < n; ++k) {
                    acc += (rewards.row(x).transpose() - r_bar);
                    if (k + 1 < n) x = markov::step_state(p, x, rng.next_double());
                }
                ens.row(r) = acc.transpose() / std::sqrt(static_cast<double>(n));
            });
            return stats::SampleSet{std::move(ens)};
        };
        const auto dist = distance_with_floor(make_ensemble, config.replicates, d, sigma,
                                              config, static_cast<std::uint64_t>(n));
        push_distance_rows(result, n, dist);

        const auto bounds = bound_at(chain, sol, sigma, n, config, initial);
        if (config.beta.has_value()) {
            result.rows.push_back(
                {result.experiment, n, "bound_fixed_beta", bounds.fixed, 0.0});
        }
        result.rows.push_back(
            {result.experiment, n, "bound_scheduled_beta", bounds.scheduled, 0.0});

        result.rate.grid.push_back(static_cast<double>(n));
        result.rate.values.push_back(dist.adjusted);
        result.rate.stderrs.push_back(dist.value_se);
        resolved.push_back(dist.resolved);
        result.notes.push_back("# wall_ms n=" + std::to_string(n) + ": " +
                               std::to_string(elapsed_ms(t0)));
    }

    fit_resolved(result.rate, resolved, result.notes);
    result.summary.emplace_back("w1_floor_adjusted_slope", result.rate.slope);
    return result;
}

ExperimentResult run_td_clt(const ExperimentConfig& config) {
    const auto& model = *config.model;
    const auto target = td::mean_dynamics(model);
    const Vector theta0 =
        config.theta0.has_value() ? *config.theta0 : Vector::Zero(model.dim());
    if (theta0.size() != model.dim()) {
        throw ValidationError("theta0: dimension " + std::to_string(theta0.size()) +
                              " does not match model dimension " +
                              std::to_string(model.dim()));
    }

    ExperimentResult result;
    result.experiment = kind_to_string(config.kind);
    note_config(result, config);
    if (!target.sigma_positive_definite) {
        result.notes.push_back("# warning: Sigma_inf is degenerate; reference covariance 0");
    }
    result.notes.push_back("# limit_cov_hs_norm: " + fmt(linalg::hs_norm(target.limit_cov)));

    const double limit_norm = linalg::hs_norm(target.limit_cov);
    const Vector pi = model.pi();

    std::vector<bool> resolved;
    for (long n : config.n_grid) {
        const auto t0 = Clock::now();
        auto make_ensemble = [&](int j) {
            Matrix ens(config.replicates, model.dim());
            parallel_for(config.replicates, config.threads, [&](long r) {
                Rng rng(config.seed,
                        {kind_id(config.kind), static_cast<std::uint64_t>(n),
                         static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(r),
                         kRolePath});
                const int x0 = draw_start(config, pi, rng);
                const auto end = td::run_td_endpoint(model, n, theta0, x0, rng);
                ens.row(r) = std::sqrt(static_cast<double>(n)) *
                             (end.theta_bar_n - target.theta_star).transpose();
            });
            return stats::SampleSet{std::move(ens)};
        };

        // Covariance criterion uses the first ensemble at the configured size.
        const stats::SampleSet first = make_ensemble(0);
        const Matrix emp_cov = stats::empirical_covariance(first);
        const double cov_err = limit_norm > 0.0
                                   ? linalg::hs_norm(emp_cov - target.limit_cov) / limit_norm
                                   : linalg::hs_norm(emp_cov);

        auto cached_ensemble = [&](int j) {
            return j == 0 ? first : make_ensemble(j);
        };
        const auto dist =
            distance_with_floor(cached_ensemble, config.replicates, model.dim(),
                                target.limit_cov, config, static_cast<std::uint64_t>(n));
        push_distance_rows(result, n, dist);
        result.rows.push_back({result.experiment, n, "cov_rel_hs_error", cov_err, 0.0});

        result.rate.grid.push_back(static_cast<double>(n));
        result.rate.values.push_back(dist.adjusted);
        result.rate.stderrs.push_back(dist.value_se);
        resolved.push_back(dist.resolved);
        result.notes.push_back("# wall_ms n=" + std::to_string(n) + ": " +
                               std::to_string(elapsed_ms(t0)));
    }

    fit_resolved(result.rate, resolved, result.notes);
    result.summary.emplace_back("w1_floor_adjusted_slope", result.rate.slope);
    result.summary.emplace_back("sigma_positive_definite",
                                target.sigma_positive_definite ? 1.0 : 0.0);
    return result;
}

ExperimentResult run_bound_curve(const ExperimentConfig& config) {
    const auto& chain = *config.chain;
    const auto sol = markov::solve_poisson(chain, *config.reward);
    if (sol.cols != 1) {
        throw ValidationError("bound-curve: reward must be vector-valued");
    }
    const auto acov = markov::asymptotic_covariance(chain, sol);
    if (!acov.positive_definite) {
        throw DegenerateCovarianceError("bound-curve: Sigma_inf is not positive definite");
    }
    const Vector initial = start_distribution(config, sol.pi);

    ExperimentResult result;
    result.experiment = kind_to_string(config.kind);
    note_config(result, config);
    if (config.beta.has_value()) {
        result.notes.push_back("# fixed_beta: " + fmt(*config.beta));
    }

    std::vector<double> grid, fixed_curve, sched_curve;
    for (long n : config.n_grid) {
        const auto t0 = Clock::now();
        const auto bounds = bound_at(chain, sol, acov.sigma, n, config, initial);
        if (config.beta.has_value()) {
            result.rows.push_back({result.experiment, n, "bound_fixed_beta", bounds.fixed, 0.0});
            fixed_curve.push_back(bounds.fixed);
        }
        result.rows.push_back(
            {result.experiment, n, "bound_scheduled_beta", bounds.scheduled, 0.0});
        grid.push_back(static_cast<double>(n));
        sched_curve.push_back(bounds.scheduled);
        result.notes.push_back("# wall_ms n=" + std::to_string(n) + ": " +
                               std::to_string(elapsed_ms(t0)));
    }

    if (config.beta.has_value() && grid.size() >= 2) {
        const auto fit = stats::fit_rate(grid, fixed_curve);
        result.summary.emplace_back("bound_fixed_beta_slope", fit.slope);
        result.rate.grid = grid;
        result.rate.values = fixed_curve;
        result.rate.stderrs.assign(grid.size(), 0.0);
        result.rate.slope = fit.slope;
        result.rate.intercept = fit.intercept;
    }
    if (grid.size() >= 2) {
        const auto fit = stats::fit_rate(grid, sched_curve);
        result.summary.emplace_back("bound_scheduled_beta_slope", fit.slope);
    }
    // Scheduled-beta order constant: value_n <= c * log(n)/sqrt(n) with c fitted
    // as the geometric mean of the per-point ratios.
    double log_ratio_sum = 0.0;
    double max_ratio = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ratio = sched_curve[i] * std::sqrt(grid[i]) / std::log(grid[i]);
        log_ratio_sum += std::log(ratio);
        max_ratio = std::max(max_ratio, ratio);
    }
    const double c_fit = std::exp(log_ratio_sum / static_cast<double>(grid.size()));
    result.summary.emplace_back("scheduled_log_over_sqrt_c_fit", c_fit);
    result.summary.emplace_back("scheduled_log_over_sqrt_max_ratio", max_ratio / c_fit);
    return result;
}

ExperimentResult run_upsilon_decay(const ExperimentConfig& config) {
    ExperimentResult result;
    result.experiment = kind_to_string(config.kind);
    note_config(result, config);

    const auto t0 = Clock::now();
    const auto decay = td::upsilon_decay_curve(config.n_grid, *config.delta, *config.a_bar);
    for (std::size_t i = 0; i < decay.report.grid.size(); ++i) {
        const long t = static_cast<long>(decay.report.grid[i]);
        result.rows.push_back({result.experiment, t, "upsilon_avg_sq_opnorm",
                               decay.report.values[i], 0.0});
        result.rows.push_back(
            {result.experiment, t, "upsilon_sup_opnorm", decay.sup_norms[i], 0.0});
    }
    result.notes.push_back("# wall_ms total: " + std::to_string(elapsed_ms(t0)));
    result.rate = decay.report;
    result.summary.emplace_back("upsilon_avg_sq_slope", decay.report.slope);
    double sup_max = 0.0;
    for (double s : decay.sup_norms) sup_max = std::max(sup_max, s);
    result.summary.emplace_back("upsilon_sup_opnorm_max", sup_max);
    return result;
}

ExperimentResult run_delta_moments(const ExperimentConfig& config) {
    const auto& model = *config.model;
    const Vector theta0 =
        config.theta0.has_value() ? *config.theta0 : Vector::Zero(model.dim());
    const int start = config.start.value_or(0);

    ExperimentResult result;
    result.experiment = kind_to_string(config.kind);
    note_config(result, config);

    const auto t0 = Clock::now();
    const auto report =
        td::delta_moment_curve(model, config.n_grid, config.replicates,
                               subseed(config.seed, {kind_id(config.kind)}), config.threads,
                               &theta0, start);
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
        result.rows.push_back({result.experiment, static_cast<long>(report.grid[i]),
                               "delta_sq_mean", report.values[i], report.stderrs[i]});
    }
    result.notes.push_back("# wall_ms total: " + std::to_string(elapsed_ms(t0)));
    result.rate = report;
    result.summary.emplace_back("delta_sq_slope", report.slope);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentKind::mc_clt: return run_mc_clt(config);
        case ExperimentKind::td_clt: return run_td_clt(config);
        case ExperimentKind::bound_curve: return run_bound_curve(config);
        case ExperimentKind::upsilon_decay: return run_upsilon_decay(config);
        case ExperimentKind::delta_moments: return run_delta_moments(config);
    }
    throw ValidationError("unknown experiment kind");
}

std::string to_csv(const ExperimentResult& result) {
    std::string out;
    for (const auto& note : result.notes) {
        out += note;
        out += '\n';
    }
    for (const auto& [key, value] : result.summary) {
        out += "# " + key + ": " + fmt(value) + "\n";
    }
    out += "experiment,n,estimator,value,stderr,wall_ms\n";
    for (const auto& row : result.rows) {
        out += row.experiment + "," + std::to_string(row.n) + "," + row.estimator + "," +
               fmt(row.value) + "," + fmt(row.std_error) + ",0\n";
    }
    return out;
}

io::json result_to_json(const ExperimentResult& result) {
    io::json rows = io::json::array();
    for (const auto& row : result.rows) {
        rows.push_back({{"experiment", row.experiment},
                        {"n", row.n},
                        {"estimator", row.estimator},
                        {"value", row.value},
                        {"stderr", row.std_error},
                        {"wall_ms", 0}});
    }
    io::json summary = io::json::object();
    for (const auto& [key, value] : result.summary) summary[key] = value;
    io::json notes = io::json::array();
    for (const auto& note : result.notes) notes.push_back(note);
    return io::json{{"experiment", result.experiment},
                    {"rows", rows},
                    {"summary", summary},
                    {"notes", notes}};
}

}  // namespace clt::harness
