#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "clt/harness.hpp"
#include "clt/io.hpp"
#include "clt/linalg.hpp"
#include "clt/markov.hpp"
#include "clt/stein.hpp"

namespace {

using clt::io::json;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw clt::ValidationError("cannot write to " + out_path);
    out << text;
}

std::vector<double> parse_csv_doubles(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw clt::ValidationError(what + ": \"" + item + "\" is not a number");
        }
    }
    if (values.empty()) throw clt::ValidationError(what + ": empty list");
    return values;
}

struct ChainAndReward {
    clt::markov::FiniteMarkovChain chain;
    clt::markov::RewardMap reward;
};

ChainAndReward load_chain_reward(const std::string& chain_path, const std::string& reward_path) {
    return ChainAndReward{clt::io::chain_from_json(clt::io::load_json_file(chain_path)),
                          clt::io::reward_from_json(clt::io::load_json_file(reward_path))};
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Poisson equations, Stein CLT bounds, and TD-averaging experiments "
                 "for finite Markov chains"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path;
    bool as_json = false;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> threads_override;
    app.add_option("--out", out_path, "Write output to this file instead of stdout");
    app.add_flag("--json", as_json, "Emit experiment results as JSON instead of CSV");
    app.add_option("--seed", seed_override, "Override the config seed");
    app.add_option("--threads", threads_override, "Override the config thread count");

    // chain stationary|poisson|sigma-inf
    auto* chain_cmd = app.add_subcommand("chain", "Finite Markov chain utilities");
    chain_cmd->require_subcommand(1);
    std::string chain_path, reward_path;

    auto* stationary_cmd = chain_cmd->add_subcommand("stationary", "Stationary distribution");
    stationary_cmd->add_option("--input", chain_path, "Chain JSON file")->required();

    auto* poisson_cmd = chain_cmd->add_subcommand("poisson", "Poisson equation solution");
    poisson_cmd->add_option("--input", chain_path, "Chain JSON file")->required();
    poisson_cmd->add_option("--reward", reward_path, "Reward JSON file")->required();

    auto* sigma_cmd = chain_cmd->add_subcommand("sigma-inf", "Asymptotic covariance");
    sigma_cmd->add_option("--input", chain_path, "Chain JSON file")->required();
    sigma_cmd->add_option("--reward", reward_path, "Reward JSON file")->required();

    // bound martingale
    auto* bound_cmd = app.add_subcommand("bound", "Martingale CLT bound evaluation");
    bound_cmd->require_subcommand(1);
    auto* martingale_cmd = bound_cmd->add_subcommand(
        "martingale", "CLT bound for the Poisson-derived martingale of a chain");
    long bound_n = 0;
    std::string beta_arg = "0.5";
    double c_universal = 1.0;
    std::string start_arg = "0";
    martingale_cmd->add_option("--input", chain_path, "Chain JSON file")->required();
    martingale_cmd->add_option("--reward", reward_path, "Reward JSON file")->required();
    martingale_cmd->add_option("--n", bound_n, "Number of martingale steps")->required();
    martingale_cmd->add_option("--beta", beta_arg, "Exponent in (0,1) or \"schedule\"");
    martingale_cmd->add_option("--c-universal", c_universal,
                               "Universal constant of the covariance-error term");
    martingale_cmd->add_option("--start", start_arg, "Start state index or \"stationary\"");

    // experiment <kind>
    auto* experiment_cmd = app.add_subcommand("experiment", "Config-driven experiments");
    experiment_cmd->require_subcommand(1);
    std::string config_path;
    for (const char* kind :
         {"mc-clt", "td-clt", "bound-curve", "upsilon-decay", "delta-moments"}) {
        auto* cmd = experiment_cmd->add_subcommand(kind);
        cmd->add_option("--config", config_path, "Experiment config JSON file")->required();
    }

    // fit-rate
    auto* fit_cmd = app.add_subcommand("fit-rate", "Log-log slope of a decay curve");
    std::string grid_arg, values_arg;
    fit_cmd->add_option("--grid", grid_arg, "Comma-separated n values")->required();
    fit_cmd->add_option("--values", values_arg, "Comma-separated estimates")->required();

    // Let the global flags appear after any subcommand.
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
        cmd->fallthrough();
        for (auto* sub : cmd->get_subcommands([](CLI::App*) { return true; })) {
            enable_fallthrough(sub);
        }
    };
    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (stationary_cmd->parsed()) {
        const auto chain = clt::io::chain_from_json(clt::io::load_json_file(chain_path));
        const auto pi = clt::markov::stationary(chain);
        json out{{"pi", clt::io::vector_to_json(pi)}};
        if (!chain.labels().empty()) out["labels"] = chain.labels();
        write_output(out.dump(2), out_path);
        return 0;
    }

    if (poisson_cmd->parsed()) {
        const auto [chain, reward] = load_chain_reward(chain_path, reward_path);
        const auto sol = clt::markov::solve_poisson(chain, reward);
        json out{{"V", clt::io::matrix_to_json(sol.v)},
                 {"r_bar", clt::io::vector_to_json(sol.r_bar)},
                 {"pi", clt::io::vector_to_json(sol.pi)},
                 {"rows", sol.rows},
                 {"cols", sol.cols},
                 {"residual", sol.residual},
                 {"max_value_norm", sol.max_value_norm()}};
        write_output(out.dump(2), out_path);
        return 0;
    }

    if (sigma_cmd->parsed()) {
        const auto [chain, reward] = load_chain_reward(chain_path, reward_path);
        const auto sol = clt::markov::solve_poisson(chain, reward);
        const auto acov = clt::markov::asymptotic_covariance(chain, sol);
        json out{{"sigma_inf", clt::io::matrix_to_json(acov.sigma)},
                 {"positive_definite", acov.positive_definite},
                 {"min_eigenvalue", acov.min_eigenvalue}};
        write_output(out.dump(2), out_path);
        return 0;
    }

    if (martingale_cmd->parsed()) {
        const auto [chain, reward] = load_chain_reward(chain_path, reward_path);
        const auto sol = clt::markov::solve_poisson(chain, reward);
        const auto acov = clt::markov::asymptotic_covariance(chain, sol);
        if (!acov.positive_definite) {
            throw clt::DegenerateCovarianceError("Sigma_inf is not positive definite");
        }
        if (bound_n < 1) throw clt::ValidationError("--n must be >= 1");

        double beta;
        if (beta_arg == "schedule") {
            beta = clt::stein::beta_schedule(bound_n);
        } else {
            try {
                beta = std::stod(beta_arg);
            } catch (const std::exception&) {
                throw clt::ValidationError("--beta: expected a number or \"schedule\"");
            }
        }

        clt::Vector initial = clt::Vector::Zero(chain.num_states());
        if (start_arg == "stationary") {
            initial = sol.pi;
        } else {
            int idx;
            try {
                idx = std::stoi(start_arg);
            } catch (const std::exception&) {
                throw clt::ValidationError("--start: expected an index or \"stationary\"");
            }
            if (idx < 0 || idx >= chain.num_states()) {
                throw clt::ValidationError("--start: index out of range");
            }
            initial(idx) = 1.0;
        }

        const auto stats = clt::stein::chain_martingale_stats(chain, sol, acov.sigma,
                                                              bound_n, beta, initial);
        const auto constants =
            clt::stein::stein_constants(sol.rows, beta, c_universal);
        const double bound = clt::stein::martingale_clt_bound(stats, constants);
        json out{{"n", bound_n},
                 {"beta", beta},
                 {"bound", bound},
                 {"c_universal", c_universal},
                 {"sigma_sqrt_opnorm", stats.sigma_sqrt_opnorm}};
        write_output(out.dump(2), out_path);
        return 0;
    }

    if (experiment_cmd->parsed()) {
        auto config = clt::harness::load_experiment_config_file(config_path);
        const auto* chosen = experiment_cmd->get_subcommands().front();
        const auto requested = clt::harness::kind_from_string(chosen->get_name());
        if (requested != config.kind) {
            throw clt::ValidationError("kind: config says \"" +
                                       clt::harness::kind_to_string(config.kind) +
                                       "\" but the subcommand is \"" + chosen->get_name() +
                                       "\"");
        }
        if (seed_override) config.seed = *seed_override;
        if (threads_override) {
            if (*threads_override < 1) throw clt::ValidationError("--threads must be >= 1");
            config.threads = *threads_override;
        }
        const auto result = clt::harness::run_experiment(config);
        write_output(as_json ? clt::harness::result_to_json(result).dump(2)
                             : clt::harness::to_csv(result),
                     out_path);
        return 0;
    }

    if (fit_cmd->parsed()) {
        const auto grid = parse_csv_doubles(grid_arg, "--grid");
        const auto values = parse_csv_doubles(values_arg, "--values");
        const auto fit = clt::stats::fit_rate(grid, values);
        json out{{"slope", fit.slope}, {"intercept", fit.intercept}};
        write_output(out.dump(2), out_path);
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const clt::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const clt::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
