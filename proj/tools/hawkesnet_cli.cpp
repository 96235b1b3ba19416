// hawkesnet: command-line front end.
//
//   hawkesnet model    --d 20 --k 2 --alpha 0.2 --seed 7 --out model.json
//   hawkesnet simulate --model model.json --T 500 --seed 1 --method thinning --out events.csv
//   hawkesnet recover  --events events.csv --meta events.meta.json --auto --alpha 0.2 --w-minus 1 --k 2 --out net.json
//   hawkesnet sweep    --spec sweep.json --out results.csv [--threshold-mode] [--jobs N]
//   hawkesnet fano     --d 101 --k 1 --T 10 --beta 1 --mu-bar 1 --mu-bar-star 1 --theta-minus 0.2
//   hawkesnet oracle   --model model.json
//
// Exit codes: 0 success, 2 invalid input or spec, 3 simulation event cap hit,
// 1 any other failure.

#include "hawkesnet/estimator.hpp"
#include "hawkesnet/event_io.hpp"
#include "hawkesnet/info_bounds.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/moments.hpp"
#include "hawkesnet/simulate.hpp"
#include "hawkesnet/sweep.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hawkesnet;

constexpr int kExitInvalid = 2;
constexpr int kExitCap = 3;

void emit_json(const nlohmann::json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << j.dump(2) << '\n';
}

std::filesystem::path default_meta_path(const std::filesystem::path& events) {
    auto p = events;
    p.replace_extension(".meta.json");
    return p;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (!tok.empty()) {
            out.push_back(std::stoul(tok));
        }
    }
    return out;
}

struct ModelArgs {
    RandomInstanceSpec spec;
    std::uint64_t seed{0};
    bool subclass{false};
    std::size_t i_star{0};
    std::string support;
    double theta_minus{0.2};
    double mu_bar{1.0};
    double mu_bar_star{1.0};
    std::string out;
};

int run_model(const ModelArgs& a) {
    HawkesParams params;
    if (a.subclass) {
        params = build_subclass_instance(a.spec.d, a.spec.k, a.i_star, parse_index_list(a.support), a.theta_minus,
                                         a.mu_bar, a.mu_bar_star, a.spec.beta);
    } else {
        params = sample_random_instance(a.spec, a.seed);
    }
    emit_json(to_json(params), a.out);
    return 0;
}

struct SimulateArgs {
    std::string model;
    double T{0.0};
    std::optional<double> burn_in;
    std::uint64_t seed{0};
    std::string method{"thinning"};
    std::string out;
    std::string meta;
    std::size_t event_cap{100'000'000};
};

int run_simulate(const SimulateArgs& a) {
    const HawkesParams params = read_model(a.model);
    SimulationOptions opts;
    opts.event_cap = a.event_cap;
    const double burn_in = a.burn_in.value_or(default_burn_in(params));
    const EventLog log = simulate(params, a.T, burn_in, a.seed, parse_simulation_method(a.method), opts);
    write_events_csv(log, a.out);
    write_meta(log, a.meta.empty() ? default_meta_path(a.out) : std::filesystem::path(a.meta));
    return 0;
}

struct RecoverArgs {
    std::string events;
    std::string meta;
    double h{0.0};
    double R{0.0};
    std::size_t m{0};
    double tau{0.0};
    bool use_auto{false};
    double alpha{0.0};
    double w_minus{1.0};
    std::size_t k{0};
    std::size_t jobs{1};
    std::string out;
};

int run_recover(const RecoverArgs& a) {
    const EventLog log =
        read_event_log(a.events, a.meta.empty() ? default_meta_path(a.events) : std::filesystem::path(a.meta));
    EstimatorConfig config;
    if (a.use_auto) {
        config = EstimatorConfig::make_auto(a.alpha, a.w_minus, a.k);
    } else {
        config.h = a.h;
        config.R = a.R;
        config.m = a.m;
        config.tau = a.tau;
    }
    config.validate();
    const BinnedSample sample = bin_and_clip(log, config.h, config.R);
    emit_json(to_json(recover(sample, config, a.jobs)), a.out);
    return 0;
}

struct SweepArgs {
    std::string spec;
    std::string out;
    bool threshold_mode{false};
    std::optional<std::size_t> jobs;
};

int run_sweep(const SweepArgs& a) {
    SweepSpec spec = read_sweep_spec(a.spec);
    if (a.jobs) {
        spec.jobs = *a.jobs;
    }
    const SweepResult result = a.threshold_mode ? run_threshold_sweep(spec) : run_grid_sweep(spec);

    const std::filesystem::path out_path(a.out);
    {
        std::ofstream out(out_path);
        if (!out) {
            throw std::runtime_error("cannot write " + a.out);
        }
        write_results_csv(result.cells, out);
    }
    if (a.threshold_mode) {
        const auto dir = out_path.parent_path();
        std::ofstream thr(dir / "thresholds.csv");
        write_thresholds_csv(result.thresholds, thr);
        if (result.fit) {
            emit_json(to_json(*result.fit), (dir / "fit.json").string());
        }
        for (const auto& row : result.thresholds) {
            if (!row.estimate.bracketed) {
                std::cerr << "warning: no crossing of the success level bracketed for d = " << row.d << '\n';
            } else if (row.estimate.monotonicity_violation) {
                std::cerr << "warning: recovery rate not monotone in T for d = " << row.d
                          << "; threshold taken from grid scan\n";
            }
        }
    }
    for (const auto& cell : result.cells) {
        if (!cell.diagnostic.empty()) {
            std::cerr << "cell d=" << cell.d << " T=" << format_double(cell.T) << ": " << cell.failed_trials
                      << " failed trial(s); " << cell.diagnostic << '\n';
        }
    }
    return result.cap_exceeded ? kExitCap : 0;
}

struct FanoArgs {
    FanoInputs in;
    std::string curve;
    std::string out;
    std::optional<double> target;
};

int run_fano(const FanoArgs& a) {
    a.in.validate();
    if (!a.curve.empty()) {
        double t0 = 0.0;
        double t1 = 0.0;
        std::size_t steps = 0;
        char c1 = 0;
        char c2 = 0;
        std::stringstream ss(a.curve);
        if (!(ss >> t0 >> c1 >> t1 >> c2 >> steps) || c1 != ':' || c2 != ':') {
            throw std::invalid_argument("--curve expects T0:T1:steps");
        }
        if (a.out.empty()) {
            throw std::invalid_argument("--curve requires --out");
        }
        write_fano_curve_csv(fano_curve(a.in, t0, t1, steps), a.out);
        return 0;
    }
    nlohmann::json j = {
        {"d", a.in.d},
        {"k", a.in.k},
        {"T", a.in.T},
        {"c_init_bound", a.in.c_init_bound},
        {"c_path", c_path(a.in.k, a.in.mu_bar, a.in.beta)},
        {"log_hypotheses", log_hypothesis_count(a.in.d, a.in.k)},
        {"kl_budget", kl_budget(a.in)},
        {"error_floor", fano_error_floor(a.in)},
        // With no initial-state bound the floor over-states the true bound.
        {"floor_kind", a.in.c_init_bound == 0.0 ? "optimistic (c_init = 0)" : "rigorous given c_init bound"},
    };
    if (a.target) {
        j["target"] = *a.target;
        j["critical_time"] = critical_time(a.in, *a.target);
    }
    emit_json(j, a.out);
    return 0;
}

struct OracleArgs {
    std::string model;
    std::string out;
};

int run_oracle(const OracleArgs& a) {
    const HawkesParams params = read_model(a.model);
    const auto violations = validate(params);
    if (!violations.empty()) {
        throw std::invalid_argument("invalid model: " + violations.front().message);
    }
    const StationaryMoments mom = stationary_moments(params);
    const Eigen::MatrixXd g = population_screening_scores(params, mom.sigma);
    const auto gaps = screening_gap(g, support_of(params));

    auto rows_of = [](const Eigen::MatrixXd& mat) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < mat.rows(); ++i) {
            std::vector<double> r(static_cast<std::size_t>(mat.cols()));
            for (Eigen::Index j = 0; j < mat.cols(); ++j) {
                r[static_cast<std::size_t>(j)] = mat(i, j);
            }
            rows.push_back(r);
        }
        return rows;
    };
    nlohmann::json gap_json = nlohmann::json::array();
    for (const auto& g_i : gaps) {
        gap_json.push_back(g_i ? nlohmann::json(*g_i) : nlohmann::json(nullptr));
    }
    emit_json({{"m", mom.m},
               {"lambda_bar", mom.lambda_bar},
               {"sigma", rows_of(mom.sigma)},
               {"G", rows_of(g)},
               {"gaps", gap_json},
               {"gap_floor", screening_gap_floor(params.alpha, params.mu_minus, params.w_minus, params.beta)}},
              a.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hawkes network simulation, recovery and lower-bound toolkit"};
    // "-h" would collide with the bin-width option of recover.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    ModelArgs model_args;
    auto* model_cmd = app.add_subcommand("model", "Sample a random model or build a single-row subclass instance");
    model_cmd->add_option("--d", model_args.spec.d)->required();
    model_cmd->add_option("--k", model_args.spec.k)->required();
    model_cmd->add_option("--alpha", model_args.spec.alpha);
    model_cmd->add_option("--w-minus", model_args.spec.w_minus);
    model_cmd->add_option("--w-plus", model_args.spec.w_plus);
    model_cmd->add_option("--mu-minus", model_args.spec.mu_minus);
    model_cmd->add_option("--mu-plus", model_args.spec.mu_plus);
    model_cmd->add_option("--beta", model_args.spec.beta);
    model_cmd->add_option("--seed", model_args.seed);
    model_cmd->add_flag("--subclass", model_args.subclass);
    model_cmd->add_option("--i-star", model_args.i_star);
    model_cmd->add_option("--support", model_args.support, "Comma-separated parent indices of i_star");
    model_cmd->add_option("--theta-minus", model_args.theta_minus);
    model_cmd->add_option("--mu-bar", model_args.mu_bar);
    model_cmd->add_option("--mu-bar-star", model_args.mu_bar_star);
    model_cmd->add_option("--out", model_args.out);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate an event log from a model file");
    sim_cmd->add_option("--model", sim_args.model)->required();
    sim_cmd->add_option("--T", sim_args.T)->required();
    sim_cmd->add_option("--burn-in", sim_args.burn_in);
    sim_cmd->add_option("--seed", sim_args.seed)->required();
    sim_cmd->add_option("--method", sim_args.method)->check(CLI::IsMember({"thinning", "cluster"}));
    sim_cmd->add_option("--out", sim_args.out)->required();
    sim_cmd->add_option("--meta", sim_args.meta, "Metadata path (default: output path with a .meta.json extension)");
    sim_cmd->add_option("--event-cap", sim_args.event_cap);

    RecoverArgs rec_args;
    auto* rec_cmd = app.add_subcommand("recover", "Recover the interaction network from an event log");
    rec_cmd->add_option("--events", rec_args.events)->required();
    rec_cmd->add_option("--meta", rec_args.meta);
    rec_cmd->add_option("--h", rec_args.h);
    rec_cmd->add_option("--R", rec_args.R);
    rec_cmd->add_option("--m", rec_args.m);
    rec_cmd->add_option("--tau", rec_args.tau);
    rec_cmd->add_flag("--auto", rec_args.use_auto);
    rec_cmd->add_option("--alpha", rec_args.alpha);
    rec_cmd->add_option("--w-minus", rec_args.w_minus);
    rec_cmd->add_option("--k", rec_args.k);
    rec_cmd->add_option("--jobs", rec_args.jobs);
    rec_cmd->add_option("--out", rec_args.out);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a Monte-Carlo recovery sweep");
    sweep_cmd->add_option("--spec", sweep_args.spec)->required();
    sweep_cmd->add_option("--out", sweep_args.out)->required();
    sweep_cmd->add_flag("--threshold-mode", sweep_args.threshold_mode);
    sweep_cmd->add_option("--jobs", sweep_args.jobs);

    FanoArgs fano_args;
    auto* fano_cmd = app.add_subcommand("fano", "Evaluate the Fano error floor");
    fano_cmd->add_option("--d", fano_args.in.d)->required();
    fano_cmd->add_option("--k", fano_args.in.k)->required();
    fano_cmd->add_option("--T", fano_args.in.T)->required();
    fano_cmd->add_option("--beta", fano_args.in.beta)->required();
    fano_cmd->add_option("--mu-bar", fano_args.in.mu_bar)->required();
    fano_cmd->add_option("--mu-bar-star", fano_args.in.mu_bar_star)->required();
    fano_cmd->add_option("--theta-minus", fano_args.in.theta_minus)->required();
    fano_cmd->add_option("--c-init", fano_args.in.c_init_bound);
    fano_cmd->add_option("--curve", fano_args.curve, "T0:T1:steps");
    fano_cmd->add_option("--target", fano_args.target, "Also report the time at which the floor hits this value");
    fano_cmd->add_option("--out", fano_args.out);

    OracleArgs oracle_args;
    auto* oracle_cmd = app.add_subcommand("oracle", "Print stationary moments and population screening scores");
    oracle_cmd->add_option("--model", oracle_args.model)->required();
    oracle_cmd->add_option("--out", oracle_args.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*model_cmd) {
            return run_model(model_args);
        }
        if (*sim_cmd) {
            return run_simulate(sim_args);
        }
        if (*rec_cmd) {
            return run_recover(rec_args);
        }
        if (*sweep_cmd) {
            return run_sweep(sweep_args);
        }
        if (*fano_cmd) {
            return run_fano(fano_args);
        }
        if (*oracle_cmd) {
            return run_oracle(oracle_args);
        }
    } catch (const SimulationCapExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCap;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
