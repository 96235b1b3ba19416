#pragma once

#include "hawkesnet/estimator.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hawkesnet {

class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EstimatorSpec {
    EstimatorConfig::Mode mode{EstimatorConfig::Mode::Auto};
    double a_h{1.0};
    double a_r{1.0};
    std::optional<std::size_t> k;  // auto mode: overrides the model k (needed when k = 0)
    EstimatorConfig fixed;         // explicit mode
};

struct ThresholdSearch {
    double t_lo{200.0};
    double t_hi{3200.0};
    double rel_width{0.1};
    std::size_t max_expansions{8};
};

struct SweepSpec {
    std::vector<std::size_t> d_values;
    std::vector<double> t_values;  // grid mode
    ThresholdSearch threshold;     // threshold mode
    std::size_t trials{50};
    RandomInstanceSpec model;      // model.d is replaced per cell
    EstimatorSpec estimator;
    std::optional<double> burn_in;  // default_burn_in(params) when absent
    SimulationMethod method{SimulationMethod::Thinning};
    std::uint64_t base_seed{1};
    double success_level{0.9};
    std::size_t jobs{1};
    std::size_t event_cap{100'000'000};

    /// Throws SpecError describing the first problem found.
    void validate(bool threshold_mode) const;
    [[nodiscard]] EstimatorConfig estimator_config() const;
};

[[nodiscard]] SweepSpec sweep_spec_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const SweepSpec& spec);
[[nodiscard]] SweepSpec read_sweep_spec(const std::filesystem::path& path);

/// Key used in seed derivation for every probe of the threshold search, so
/// that all probes of one d reuse the same instances and event streams.
inline constexpr std::uint64_t kThresholdTimeKey = 0xffff'ffffULL;

/// seed(cell, trial) = mix64(base_seed, {d, t_key, trial}).
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t d, std::uint64_t t_key, std::size_t trial);

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval at 95% confidence.
[[nodiscard]] Interval wilson_interval(std::size_t successes, std::size_t trials);

struct CellResult {
    std::size_t d{0};
    double T{0.0};
    std::size_t trials{0};
    std::size_t successes{0};
    double rate{0.0};
    double ci_lo{0.0};
    double ci_hi{0.0};
    std::size_t failed_trials{0};  // simulation or estimation errors, counted as misses
    bool cap_exceeded{false};
    std::string diagnostic;
};

/// Draws, simulates, bins, recovers and scores `spec.trials` independent
/// instances of dimension d at horizon T. Trials run on spec.jobs threads;
/// the result depends only on (spec, d, T, t_key).
[[nodiscard]] CellResult run_cell(std::size_t d, double T, std::uint64_t t_key, const SweepSpec& spec);

struct ThresholdEstimate {
    double t_star{0.0};
    double t_lo{0.0};
    double t_hi{0.0};
    double rate_lo{0.0};
    double rate_hi{0.0};
    bool bracketed{false};
    bool monotonicity_violation{false};
    std::vector<std::pair<double, double>> probes;  // (T, rate) in evaluation order
};

using RateFunction = std::function<double(double)>;

/// Finds where rate(T) crosses `level`. The bracket is expanded until
/// rate(t_lo) < level <= rate(t_hi), then bisected geometrically until
/// (t_hi - t_lo) <= rel_width * midpoint. Rates that drop with T by more
/// than three binomial standard errors (for `trials` draws) trigger a
/// fallback grid scan over the explored range.
[[nodiscard]] ThresholdEstimate estimate_threshold_time(const RateFunction& rate, double level,
                                                        const ThresholdSearch& search, std::size_t trials);

struct LogFit {
    double slope{0.0};
    double intercept{0.0};
    double r2{0.0};
};

/// Ordinary least squares of t_star on ln d. Throws std::invalid_argument
/// with fewer than three distinct d values.
[[nodiscard]] LogFit fit_log_scaling(const std::vector<std::pair<std::size_t, double>>& points);

struct ThresholdRow {
    std::size_t d{0};
    ThresholdEstimate estimate;
};

struct SweepResult {
    std::vector<CellResult> cells;
    std::vector<ThresholdRow> thresholds;
    std::optional<LogFit> fit;
    bool cap_exceeded{false};
};

[[nodiscard]] SweepResult run_grid_sweep(const SweepSpec& spec);
[[nodiscard]] SweepResult run_threshold_sweep(const SweepSpec& spec);

// results.csv: d,T,trials,successes,rate,ci_lo,ci_hi
void write_results_csv(const std::vector<CellResult>& cells, std::ostream& out);
[[nodiscard]] std::vector<CellResult> read_results_csv(std::istream& in);

// thresholds.csv: d,t_star,t_lo,t_hi
void write_thresholds_csv(const std::vector<ThresholdRow>& rows, std::ostream& out);
[[nodiscard]] nlohmann::json to_json(const LogFit& fit);

} // namespace hawkesnet
