#include "hawkesnet/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace hawkesnet;

namespace {

SweepSpec small_spec() {
    SweepSpec s;
    s.d_values = {5, 8};
    s.t_values = {50.0, 200.0};
    s.trials = 6;
    s.model.k = 1;
    s.model.alpha = 0.3;
    s.base_seed = 17;
    return s;
}

} // namespace

TEST_CASE("trial seeds are deterministic and distinct across cells and trials") {
    std::set<std::uint64_t> seen;
    for (std::size_t d : {10, 20}) {
        for (std::uint64_t t = 0; t < 5; ++t) {
            for (std::size_t trial = 0; trial < 50; ++trial) {
                const auto s = trial_seed(1, d, t, trial);
                CHECK(s == trial_seed(1, d, t, trial));
                seen.insert(s);
            }
        }
    }
    CHECK(seen.size() == 500);
    CHECK(trial_seed(1, 10, 0, 0) != trial_seed(2, 10, 0, 0));
}

TEST_CASE("wilson interval contains the rate") {
    for (std::size_t n : {1, 7, 50, 1000}) {
        for (std::size_t s = 0; s <= n; s += std::max<std::size_t>(1, n / 10)) {
            const auto ci = wilson_interval(s, n);
            const double rate = static_cast<double>(s) / static_cast<double>(n);
            CHECK(ci.lo >= 0.0);
            CHECK(ci.hi <= 1.0);
            CHECK(ci.lo <= rate);
            CHECK(ci.hi >= rate);
        }
    }
    const auto half = wilson_interval(50, 100);
    CHECK(half.lo == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(half.hi == doctest::Approx(0.5962).epsilon(1e-3));
}

TEST_CASE("threshold search on a step function") {
    ThresholdSearch search;
    search.t_lo = 1.0;
    search.t_hi = 16.0;
    const auto est = estimate_threshold_time([](double t) { return t >= 7.0 ? 1.0 : 0.0; }, 0.9, search, 50);
    REQUIRE(est.bracketed);
    CHECK_FALSE(est.monotonicity_violation);
    CHECK(est.t_star >= 6.3);
    CHECK(est.t_star <= 7.7);
    CHECK(est.rate_lo < 0.9);
    CHECK(est.rate_hi >= 0.9);
    CHECK(est.t_hi - est.t_lo <= 0.1 * 0.5 * (est.t_hi + est.t_lo));
}

TEST_CASE("threshold search expands its bracket in both directions") {
    ThresholdSearch search;
    search.t_lo = 1.0;
    search.t_hi = 2.0;
    auto up = estimate_threshold_time([](double t) { return t >= 40.0 ? 1.0 : 0.0; }, 0.9, search, 50);
    REQUIRE(up.bracketed);
    CHECK(std::abs(up.t_star - 40.0) <= 0.1 * 40.0);
    search.t_lo = 64.0;
    search.t_hi = 128.0;
    auto down = estimate_threshold_time([](double t) { return t >= 3.0 ? 1.0 : 0.0; }, 0.9, search, 50);
    REQUIRE(down.bracketed);
    CHECK(std::abs(down.t_star - 3.0) <= 0.1 * 3.0);
}

TEST_CASE("threshold search reports an unreachable level") {
    ThresholdSearch search;
    search.t_lo = 1.0;
    search.t_hi = 2.0;
    search.max_expansions = 3;
    const auto est = estimate_threshold_time([](double) { return 0.0; }, 0.9, search, 50);
    CHECK_FALSE(est.bracketed);
    CHECK(std::isnan(est.t_star));
}

TEST_CASE("threshold search falls back to a scan on non-monotone rates") {
    // 0.8 below T = 8, a dip to 0 up to T = 20, then 1. The bisection sees
    // the drop from 0.8 to 0 and rescans the explored range.
    const auto rate = [](double t) { return t < 8.0 ? 0.8 : (t < 20.0 ? 0.0 : 1.0); };
    ThresholdSearch search;
    search.t_lo = 1.0;
    search.t_hi = 32.0;
    const auto est = estimate_threshold_time(rate, 0.9, search, 50);
    CHECK(est.monotonicity_violation);
    REQUIRE(est.bracketed);
    CHECK(est.rate_lo < 0.9);
    CHECK(est.rate_hi >= 0.9);
    CHECK(est.t_hi >= 20.0);
    CHECK(est.t_lo < 20.0);
    CHECK(est.t_star == doctest::Approx(20.0).epsilon(0.1));
}

TEST_CASE("log fit of exact points") {
    std::vector<std::pair<std::size_t, double>> pts;
    for (std::size_t d : {10, 20, 40, 80}) {
        pts.emplace_back(d, 2.0 * std::log(static_cast<double>(d)));
    }
    auto fit = fit_log_scaling(pts);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(fit.intercept) <= 1e-12);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
    for (auto& p : pts) {
        p.second = 5.0;
    }
    fit = fit_log_scaling(pts);
    CHECK(std::abs(fit.slope) <= 1e-12);
    CHECK(fit.intercept == doctest::Approx(5.0));
    pts.resize(2);
    CHECK_THROWS_AS((void)fit_log_scaling(pts), std::invalid_argument);
}

TEST_CASE("cells are deterministic and independent of thread count") {
    auto spec = small_spec();
    const auto a = run_cell(8, 100.0, 0, spec);
    spec.jobs = 3;
    const auto b = run_cell(8, 100.0, 0, spec);
    CHECK(a.successes == b.successes);
    CHECK(a.rate == b.rate);
    CHECK(a.successes <= a.trials);
    CHECK(a.ci_lo <= a.rate);
    CHECK(a.rate <= a.ci_hi);
}

TEST_CASE("a one-bin-scale horizon recovers nothing") {
    auto spec = small_spec();
    spec.model.k = 2;
    spec.model.alpha = 0.2;
    spec.trials = 10;
    const auto cell = run_cell(10, 1.0, 0, spec);
    CHECK(cell.rate <= 0.1);
}

TEST_CASE("grid sweep is reproducible and round trips through csv") {
    const auto spec = small_spec();
    const auto a = run_grid_sweep(spec);
    const auto b = run_grid_sweep(spec);
    REQUIRE(a.cells.size() == 4);
    std::ostringstream out_a;
    std::ostringstream out_b;
    write_results_csv(a.cells, out_a);
    write_results_csv(b.cells, out_b);
    CHECK(out_a.str() == out_b.str());
    std::istringstream in(out_a.str());
    const auto back = read_results_csv(in);
    std::ostringstream again;
    write_results_csv(back, again);
    CHECK(again.str() == out_a.str());
    CHECK(out_a.str().rfind("d,T,trials,successes,rate,ci_lo,ci_hi\n", 0) == 0);
}

TEST_CASE("cap hits are reported per cell") {
    auto spec = small_spec();
    spec.event_cap = 10;
    const auto cell = run_cell(5, 100.0, 0, spec);
    CHECK(cell.cap_exceeded);
    CHECK(cell.successes == 0);
    CHECK(cell.failed_trials == cell.trials);
    CHECK_FALSE(cell.diagnostic.empty());
}

TEST_CASE("spec json parsing and validation") {
    const auto j = nlohmann::json::parse(R"({
        "d": [10, 20], "T": [100, 200], "trials": 5,
        "model": {"k": 2, "alpha": 0.2},
        "estimator": {"mode": "auto", "A_h": 1.5},
        "base_seed": 9, "jobs": 2, "method": "cluster"
    })");
    const auto s = sweep_spec_from_json(j);
    CHECK(s.d_values == std::vector<std::size_t>{10, 20});
    CHECK(s.trials == 5);
    CHECK(s.method == SimulationMethod::Cluster);
    CHECK(s.estimator_config().h == doctest::Approx(1.5 * 0.04));
    CHECK_NOTHROW(s.validate(false));
    const auto again = sweep_spec_from_json(to_json(s));
    CHECK(to_json(again).dump() == to_json(s).dump());

    CHECK_THROWS_AS((void)sweep_spec_from_json(nlohmann::json::parse(R"({"T": [1]})")), SpecError);
    CHECK_THROWS_AS((void)sweep_spec_from_json(nlohmann::json::parse(R"({"d": [5], "estimator": {"mode": "x"}})")),
                    SpecError);
    auto bad = s;
    bad.t_values = {200.0, 100.0};
    CHECK_THROWS_AS(bad.validate(false), SpecError);
    bad = s;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(false), SpecError);
    bad = s;
    bad.success_level = 1.0;
    CHECK_THROWS_AS(bad.validate(true), SpecError);
    bad = s;
    bad.model.alpha = 0.6;
    CHECK_THROWS_AS(bad.validate(false), SpecError);
}

TEST_CASE("thresholds csv layout") {
    ThresholdRow row;
    row.d = 10;
    row.estimate.t_star = 7.5;
    row.estimate.t_lo = 7.0;
    row.estimate.t_hi = 8.0;
    std::ostringstream out;
    write_thresholds_csv({row}, out);
    CHECK(out.str() == "d,t_star,t_lo,t_hi\n10,7.5,7,8\n");
    const auto j = to_json(LogFit{2.0, 0.5, 0.99});
    CHECK(j.at("slope") == 2.0);
    CHECK(j.contains("intercept"));
    CHECK(j.contains("r2"));
}

TEST_CASE("null experiment: no interactions, all supports empty") {
    SweepSpec spec;
    spec.trials = 50;
    spec.model.k = 0;
    spec.model.alpha = 0.2;
    spec.estimator.k = 2;  // tuning as for k = 2 networks
    spec.base_seed = 31;
    const auto cell = run_cell(10, 3000.0, 0, spec);
    CHECK(cell.failed_trials == 0);
    CHECK(cell.rate >= 0.9);
}
