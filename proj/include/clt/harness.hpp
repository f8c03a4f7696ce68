#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clt/io.hpp"
#include "clt/markov.hpp"
#include "clt/stats.hpp"
#include "clt/stein.hpp"
#include "clt/td.hpp"

namespace clt::harness {

enum class ExperimentKind { mc_clt, td_clt, bound_curve, upsilon_decay, delta_moments };

ExperimentKind kind_from_string(const std::string& name);
std::string kind_to_string(ExperimentKind kind);

/// Parsed and fully loaded experiment configuration. Model files referenced
/// by path are resolved relative to the config file's directory; JSON objects
/// may also be given inline. Unknown keys are rejected.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::mc_clt;

    std::optional<markov::FiniteMarkovChain> chain;
    std::optional<markov::RewardMap> reward;
    std::optional<td::TDModel> model;
    std::optional<Matrix> a_bar;   // upsilon-decay only
    std::optional<double> delta;   // upsilon-decay only

    std::vector<long> n_grid;
    int replicates = 0;
    std::uint64_t seed = 1;
    std::optional<double> beta;    // nullopt = scheduled beta only
    int directions = 256;
    int threads = 1;
    double c_universal = 1.0;
    std::optional<int> start;      // nullopt = draw X_0 from pi
    int floor_resamples = 8;       // independent reference pairs for the floor
    int ensemble_resamples = 8;    // independent same-size ensembles per grid point
    std::optional<Vector> theta0;  // TD initial iterate, default zero
};

ExperimentConfig load_experiment_config(const io::json& j, const std::string& base_dir);
ExperimentConfig load_experiment_config_file(const std::string& path);

struct ResultRow {
    std::string experiment;
    long n = 0;
    std::string estimator;
    double value = 0.0;
    double std_error = 0.0;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<ResultRow> rows;
    stats::RateReport rate;  // primary decay curve, when the experiment has one
    std::vector<std::pair<std::string, double>> summary;
    std::vector<std::string> notes;  // '#' header lines; timings live here only
};

/// Markov-chain CLT experiment: ensembles of U_n = n^{-1/2} sum (r(X_{k-1}) - r_bar)
/// against samples of N(0, Sigma_inf), with the finite-sample floor and the
/// martingale CLT bound curves (fixed and scheduled beta) alongside.
ExperimentResult run_mc_clt(const ExperimentConfig& config);

/// Averaged-TD CLT experiment: ensembles of sqrt(n) (theta_bar_n - theta*)
/// against N(0, A_bar^{-1} Sigma_inf A_bar^{-T}), plus the relative HS error
/// of the ensemble covariance.
ExperimentResult run_td_clt(const ExperimentConfig& config);

/// Martingale CLT bound curves only (no simulation): fixed beta and
/// beta = 1 - 2/log n, from exact per-step chain statistics.
ExperimentResult run_bound_curve(const ExperimentConfig& config);

/// Averaged squared operator norms of Upsilon_j^t over a t-grid.
ExperimentResult run_upsilon_decay(const ExperimentConfig& config);

/// Ensemble decay of E||theta_k - theta*||^2 over a k-grid.
ExperimentResult run_delta_moments(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV with '#' note lines, then the fixed header
/// experiment,n,estimator,value,stderr,wall_ms. Rows are byte-deterministic
/// for a given (config, seed) at any thread count; wall_ms is therefore fixed
/// to 0 in rows, with measured timings reported in the notes.
std::string to_csv(const ExperimentResult& result);

io::json result_to_json(const ExperimentResult& result);

/// Derives a 64-bit subseed for a named random role of one experiment.
std::uint64_t subseed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

}  // namespace clt::harness
