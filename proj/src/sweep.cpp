#include "hawkesnet/sweep.hpp"

#include "hawkesnet/event_io.hpp"
#include "hawkesnet/parallel.hpp"
#include "hawkesnet/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace hawkesnet {

namespace {

constexpr double kWilsonZ = 1.959963984540054;

EstimatorSpec estimator_spec_from_json(const nlohmann::json& j) {
    EstimatorSpec e;
    const auto mode = j.value("mode", std::string("auto"));
    if (mode == "auto") {
        e.mode = EstimatorConfig::Mode::Auto;
        e.a_h = j.value("A_h", 1.0);
        e.a_r = j.value("A_R", 1.0);
        if (j.contains("k")) {
            e.k = j.at("k").get<std::size_t>();
        }
    } else if (mode == "explicit") {
        e.mode = EstimatorConfig::Mode::Explicit;
        e.fixed.h = j.at("h").get<double>();
        e.fixed.R = j.at("R").get<double>();
        e.fixed.m = j.at("m").get<std::size_t>();
        e.fixed.tau = j.at("tau").get<double>();
    } else {
        throw SpecError("estimator.mode must be 'auto' or 'explicit'");
    }
    return e;
}

} // namespace

void SweepSpec::validate(bool threshold_mode) const {
    if (d_values.empty()) {
        throw SpecError("sweep spec needs at least one d value");
    }
    if (trials == 0) {
        throw SpecError("trials must be at least 1");
    }
    if (!(success_level > 0.0 && success_level < 1.0)) {
        throw SpecError("success_level must lie in (0, 1)");
    }
    if (threshold_mode) {
        if (!(threshold.t_lo > 0.0) || !(threshold.t_hi > threshold.t_lo)) {
            throw SpecError("threshold search needs 0 < t_lo < t_hi");
        }
        if (!(threshold.rel_width > 0.0)) {
            throw SpecError("threshold rel_width must be positive");
        }
    } else {
        if (t_values.empty()) {
            throw SpecError("grid mode needs at least one T value");
        }
        for (std::size_t q = 0; q < t_values.size(); ++q) {
            if (!(t_values[q] > 0.0) || (q > 0 && !(t_values[q] > t_values[q - 1]))) {
                throw SpecError("T values must be positive and strictly ascending");
            }
        }
    }
    for (std::size_t d : d_values) {
        if (d == 0 || d < model.k) {
            throw SpecError("every d must be positive and at least k");
        }
    }
    if (!(model.beta > 0.0) || !(model.mu_minus > 0.0) || !(model.mu_minus <= model.mu_plus)) {
        throw SpecError("model needs beta > 0 and 0 < mu_minus <= mu_plus");
    }
    if (model.k > 0) {
        if (!(model.alpha > 0.0) || !(model.w_minus > 0.0) || !(model.w_minus <= model.w_plus)) {
            throw SpecError("model needs alpha > 0 and 0 < w_minus <= w_plus");
        }
        if (!(static_cast<double>(model.k) * model.alpha * model.w_plus / model.beta < 1.0)) {
            throw SpecError("model is not subcritical: k * alpha * w_plus / beta >= 1");
        }
    }
    if (burn_in && !(*burn_in >= 0.0)) {
        throw SpecError("burn_in must be non-negative");
    }
    try {
        estimator_config().validate();
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
}

EstimatorConfig SweepSpec::estimator_config() const {
    if (estimator.mode == EstimatorConfig::Mode::Explicit) {
        return estimator.fixed;
    }
    const std::size_t k = estimator.k.value_or(model.k);
    try {
        return EstimatorConfig::make_auto(model.alpha, model.w_minus, k, estimator.a_h, estimator.a_r);
    } catch (const std::invalid_argument& e) {
        throw SpecError(e.what());
    }
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    try {
        SweepSpec s;
        s.d_values = j.at("d").get<std::vector<std::size_t>>();
        s.t_values = j.value("T", std::vector<double>{});
        if (j.contains("threshold")) {
            const auto& t = j.at("threshold");
            s.threshold.t_lo = t.value("t_lo", s.threshold.t_lo);
            s.threshold.t_hi = t.value("t_hi", s.threshold.t_hi);
            s.threshold.rel_width = t.value("rel_width", s.threshold.rel_width);
            s.threshold.max_expansions = t.value("max_expansions", s.threshold.max_expansions);
        }
        s.trials = j.value("trials", s.trials);
        if (j.contains("model")) {
            const auto& m = j.at("model");
            s.model.k = m.value("k", s.model.k);
            s.model.alpha = m.value("alpha", s.model.alpha);
            s.model.w_minus = m.value("w_minus", s.model.w_minus);
            s.model.w_plus = m.value("w_plus", s.model.w_plus);
            s.model.mu_minus = m.value("mu_minus", s.model.mu_minus);
            s.model.mu_plus = m.value("mu_plus", s.model.mu_plus);
            s.model.beta = m.value("beta", s.model.beta);
        }
        if (j.contains("estimator")) {
            s.estimator = estimator_spec_from_json(j.at("estimator"));
        }
        if (j.contains("burn_in")) {
            s.burn_in = j.at("burn_in").get<double>();
        }
        s.method = parse_simulation_method(j.value("method", std::string("thinning")));
        s.base_seed = j.value("base_seed", s.base_seed);
        s.success_level = j.value("success_level", s.success_level);
        s.jobs = j.value("jobs", s.jobs);
        s.event_cap = j.value("event_cap", s.event_cap);
        return s;
    } catch (const SpecError&) {
        throw;
    } catch (const std::exception& e) {
        throw SpecError(std::string("malformed sweep spec: ") + e.what());
    }
}

nlohmann::json to_json(const SweepSpec& s) {
    nlohmann::json est;
    if (s.estimator.mode == EstimatorConfig::Mode::Auto) {
        est = {{"mode", "auto"}, {"A_h", s.estimator.a_h}, {"A_R", s.estimator.a_r}};
        if (s.estimator.k) {
            est["k"] = *s.estimator.k;
        }
    } else {
        est = {{"mode", "explicit"},
               {"h", s.estimator.fixed.h},
               {"R", s.estimator.fixed.R},
               {"m", s.estimator.fixed.m},
               {"tau", s.estimator.fixed.tau}};
    }
    nlohmann::json j = {
        {"d", s.d_values},
        {"T", s.t_values},
        {"threshold",
         {{"t_lo", s.threshold.t_lo},
          {"t_hi", s.threshold.t_hi},
          {"rel_width", s.threshold.rel_width},
          {"max_expansions", s.threshold.max_expansions}}},
        {"trials", s.trials},
        {"model",
         {{"k", s.model.k},
          {"alpha", s.model.alpha},
          {"w_minus", s.model.w_minus},
          {"w_plus", s.model.w_plus},
          {"mu_minus", s.model.mu_minus},
          {"mu_plus", s.model.mu_plus},
          {"beta", s.model.beta}}},
        {"estimator", est},
        {"method", to_string(s.method)},
        {"base_seed", s.base_seed},
        {"success_level", s.success_level},
        {"jobs", s.jobs},
        {"event_cap", s.event_cap},
    };
    if (s.burn_in) {
        j["burn_in"] = *s.burn_in;
    }
    return j;
}

SweepSpec read_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError("cannot open sweep spec " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("sweep spec is not valid JSON: ") + e.what());
    }
    return sweep_spec_from_json(j);
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t d, std::uint64_t t_key, std::size_t trial) {
    return mix64(base_seed, {static_cast<std::uint64_t>(d), t_key, static_cast<std::uint64_t>(trial)});
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = kWilsonZ * kWilsonZ;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, std::min(centre - half, p)), std::min(1.0, std::max(centre + half, p))};
}

CellResult run_cell(std::size_t d, double T, std::uint64_t t_key, const SweepSpec& spec) {
    const EstimatorConfig config = spec.estimator_config();
    RandomInstanceSpec model = spec.model;
    model.d = d;

    struct TrialOutcome {
        bool success{false};
        bool failed{false};
        bool cap{false};
        std::string what;
    };
    std::vector<TrialOutcome> outcomes(spec.trials);

    parallel_for(spec.trials, spec.jobs, [&](std::size_t trial) {
        TrialOutcome& out = outcomes[trial];
        const std::uint64_t seed = trial_seed(spec.base_seed, d, t_key, trial);
        try {
            const HawkesParams params = sample_random_instance(model, mix64(seed, {1}));
            const double burn_in = spec.burn_in.value_or(default_burn_in(params));
            SimulationOptions opts;
            opts.event_cap = spec.event_cap;
            const EventLog log = simulate(params, T, burn_in, mix64(seed, {2}), spec.method, opts);
            const BinnedSample sample = bin_and_clip(log, config.h, config.R);
            const RecoveredNetwork net = recover(sample, config);
            out.success = evaluate(net, support_of(params)).exact;
        } catch (const SimulationCapExceeded& e) {
            out.failed = true;
            out.cap = true;
            out.what = e.what();
        } catch (const std::exception& e) {
            out.failed = true;
            out.what = e.what();
        }
    });

    CellResult cell;
    cell.d = d;
    cell.T = T;
    cell.trials = spec.trials;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        const auto& o = outcomes[t];
        cell.successes += o.success ? 1 : 0;
        cell.failed_trials += o.failed ? 1 : 0;
        cell.cap_exceeded = cell.cap_exceeded || o.cap;
        if (o.failed && cell.diagnostic.empty()) {
            cell.diagnostic = "trial " + std::to_string(t) + ": " + o.what;
        }
    }
    cell.rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
    const Interval ci = wilson_interval(cell.successes, cell.trials);
    cell.ci_lo = ci.lo;
    cell.ci_hi = ci.hi;
    return cell;
}

ThresholdEstimate estimate_threshold_time(const RateFunction& rate_fn, double level, const ThresholdSearch& search,
                                          std::size_t trials) {
    ThresholdEstimate est;
    std::map<double, double> seen;
    auto rate = [&](double t) {
        if (const auto it = seen.find(t); it != seen.end()) {
            return it->second;
        }
        const double r = rate_fn(t);
        seen.emplace(t, r);
        est.probes.emplace_back(t, r);
        return r;
    };
    const double n = static_cast<double>(std::max<std::size_t>(trials, 1));
    auto violated = [&] {
        // A later (larger T) rate falling well below an earlier one.
        for (auto a = seen.begin(); a != seen.end(); ++a) {
            for (auto b = std::next(a); b != seen.end(); ++b) {
                const double p = 0.5 * (a->second + b->second);
                const double margin = std::max(3.0 * std::sqrt(2.0 * p * (1.0 - p) / n), 1.0 / n);
                if (a->second - b->second > margin) {
                    return true;
                }
            }
        }
        return false;
    };

    double lo = search.t_lo;
    double hi = search.t_hi;
    double r_hi = rate(hi);
    for (std::size_t e = 0; r_hi < level && e < search.max_expansions; ++e) {
        lo = hi;
        hi *= 2.0;
        r_hi = rate(hi);
    }
    double r_lo = rate(lo);
    for (std::size_t e = 0; r_lo >= level && e < search.max_expansions; ++e) {
        hi = lo;
        r_hi = r_lo;
        lo *= 0.5;
        r_lo = rate(lo);
    }
    est.bracketed = r_lo < level && r_hi >= level;

    if (est.bracketed) {
        while (hi - lo > search.rel_width * 0.5 * (hi + lo)) {
            const double mid = std::sqrt(lo * hi);
            const double r = rate(mid);
            if (r >= level) {
                hi = mid;
                r_hi = r;
            } else {
                lo = mid;
                r_lo = r;
            }
            if (violated()) {
                est.monotonicity_violation = true;
                break;
            }
        }
        est.monotonicity_violation = est.monotonicity_violation || violated();
    }

    if (est.monotonicity_violation) {
        // Grid scan over the explored range; the first grid point reaching
        // the level closes the bracket.
        const double start = seen.begin()->first;
        const double stop = seen.rbegin()->first;
        const double ratio = 1.0 + search.rel_width;
        std::vector<double> grid;
        for (double t = start; t < stop; t *= ratio) {
            grid.push_back(t);
        }
        grid.push_back(stop);
        est.bracketed = false;
        for (std::size_t q = 1; q < grid.size(); ++q) {
            const double r = rate(grid[q]);
            if (r >= level) {
                lo = grid[q - 1];
                hi = grid[q];
                r_lo = rate(lo);
                r_hi = r;
                est.bracketed = r_lo < level;
                break;
            }
        }
    }

    est.t_lo = lo;
    est.t_hi = hi;
    est.rate_lo = r_lo;
    est.rate_hi = r_hi;
    est.t_star = est.bracketed ? 0.5 * (lo + hi) : std::numeric_limits<double>::quiet_NaN();
    return est;
}

LogFit fit_log_scaling(const std::vector<std::pair<std::size_t, double>>& points) {
    std::vector<std::size_t> ds;
    for (const auto& p : points) {
        ds.push_back(p.first);
    }
    std::sort(ds.begin(), ds.end());
    if (std::unique(ds.begin(), ds.end()) - ds.begin() < 3) {
        throw std::invalid_argument("log-scaling fit needs at least three distinct d values");
    }
    const double n = static_cast<double>(points.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [d, t] : points) {
        sx += std::log(static_cast<double>(d));
        sy += t;
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [d, t] : points) {
        const double dx = std::log(static_cast<double>(d)) - mx;
        const double dy = t - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // Constant responses are fitted exactly.
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

SweepResult run_grid_sweep(const SweepSpec& spec) {
    spec.validate(false);
    SweepResult out;
    for (std::size_t d : spec.d_values) {
        for (std::size_t q = 0; q < spec.t_values.size(); ++q) {
            out.cells.push_back(run_cell(d, spec.t_values[q], q, spec));
            out.cap_exceeded = out.cap_exceeded || out.cells.back().cap_exceeded;
        }
    }
    return out;
}

SweepResult run_threshold_sweep(const SweepSpec& spec) {
    spec.validate(true);
    SweepResult out;
    std::vector<std::pair<std::size_t, double>> points;
    for (std::size_t d : spec.d_values) {
        const auto rate = [&](double T) {
            out.cells.push_back(run_cell(d, T, kThresholdTimeKey, spec));
            out.cap_exceeded = out.cap_exceeded || out.cells.back().cap_exceeded;
            return out.cells.back().rate;
        };
        ThresholdRow row{d, estimate_threshold_time(rate, spec.success_level, spec.threshold, spec.trials)};
        if (row.estimate.bracketed) {
            points.emplace_back(d, row.estimate.t_star);
        }
        out.thresholds.push_back(std::move(row));
    }
    std::vector<std::size_t> distinct;
    for (const auto& p : points) {
        distinct.push_back(p.first);
    }
    std::sort(distinct.begin(), distinct.end());
    if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() >= 3) {
        out.fit = fit_log_scaling(points);
    }
    return out;
}

void write_results_csv(const std::vector<CellResult>& cells, std::ostream& out) {
    out << "d,T,trials,successes,rate,ci_lo,ci_hi\n";
    for (const auto& c : cells) {
        out << c.d << ',' << format_double(c.T) << ',' << c.trials << ',' << c.successes << ','
            << format_double(c.rate) << ',' << format_double(c.ci_lo) << ',' << format_double(c.ci_hi) << '\n';
    }
}

std::vector<CellResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "d,T,trials,successes,rate,ci_lo,ci_hi") {
        throw std::runtime_error("results CSV has an unexpected header");
    }
    std::vector<CellResult> cells;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) {
            f.push_back(tok);
        }
        if (f.size() != 7) {
            throw std::runtime_error("results CSV row must have 7 fields: " + line);
        }
        auto num = [](const std::string& s, auto& v) {
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
                throw std::runtime_error("results CSV: cannot parse '" + s + "'");
            }
        };
        CellResult c;
        num(f[0], c.d);
        num(f[1], c.T);
        num(f[2], c.trials);
        num(f[3], c.successes);
        num(f[4], c.rate);
        num(f[5], c.ci_lo);
        num(f[6], c.ci_hi);
        cells.push_back(c);
    }
    return cells;
}

void write_thresholds_csv(const std::vector<ThresholdRow>& rows, std::ostream& out) {
    out << "d,t_star,t_lo,t_hi\n";
    for (const auto& r : rows) {
        out << r.d << ',' << format_double(r.estimate.t_star) << ',' << format_double(r.estimate.t_lo) << ','
            << format_double(r.estimate.t_hi) << '\n';
    }
}

nlohmann::json to_json(const LogFit& fit) {
    return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
}

} // namespace hawkesnet
