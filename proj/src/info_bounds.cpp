#include "hawkesnet/info_bounds.hpp"

#include "hawkesnet/event_io.hpp"
#include "hawkesnet/moments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace hawkesnet {

namespace {

constexpr std::size_t kDirectSumLimit = 32;

} // namespace

void FanoInputs::validate() const {
    if (d < k + 2) {
        throw std::invalid_argument("Fano bound needs d >= k + 2");
    }
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("observation time must be finite and non-negative");
    }
    if (!(beta > 0.0) || !(mu_bar > 0.0) || !(mu_bar_star > 0.0) || !(theta_minus > 0.0)) {
        throw std::invalid_argument("beta, mu_bar, mu_bar_star, theta_minus must be positive");
    }
    if (!(c_init_bound >= 0.0)) {
        throw std::invalid_argument("c_init bound must be non-negative");
    }
    if (!(static_cast<double>(k) * theta_minus / beta < 1.0)) {
        throw std::invalid_argument("k * theta_minus / beta must be below 1");
    }
}

double log_hypothesis_count(std::size_t d, std::size_t k) {
    if (d == 0 || k > d - 1) {
        throw std::invalid_argument("log_hypothesis_count needs k <= d - 1");
    }
    const std::size_t n = d - 1;
    const std::size_t kk = std::min(k, n - k);
    if (kk <= kDirectSumLimit) {
        double acc = 0.0;
        for (std::size_t t = 0; t < kk; ++t) {
            acc += std::log(static_cast<double>(n - t) / static_cast<double>(t + 1));
        }
        return acc;
    }
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(kk) + 1.0) -
           std::lgamma(static_cast<double>(n - kk) + 1.0);
}

double kl_budget(const FanoInputs& in) {
    in.validate();
    const double rate = in.theta_minus * in.theta_minus / in.mu_bar_star * c_path(in.k, in.mu_bar, in.beta);
    return in.c_init_bound + rate * in.T;
}

double fano_error_floor(const FanoInputs& in) {
    const double budget = kl_budget(in);
    const double floor = 1.0 - (budget + std::numbers::ln2) / log_hypothesis_count(in.d, in.k);
    return std::clamp(floor, 0.0, 1.0);
}

double critical_time(const FanoInputs& in, double target) {
    FanoInputs at_zero = in;
    at_zero.T = 0.0;
    const double floor0 = fano_error_floor(at_zero);
    if (!(target > 0.0) || !(target < floor0)) {
        throw std::invalid_argument("target error must lie strictly between 0 and the floor at T = 0");
    }
    const double rate = in.theta_minus * in.theta_minus / in.mu_bar_star * c_path(in.k, in.mu_bar, in.beta);
    const double log_m = log_hypothesis_count(in.d, in.k);
    return ((1.0 - target) * log_m - in.c_init_bound - std::numbers::ln2) / rate;
}

std::vector<FanoCurvePoint> fano_curve(FanoInputs in, double t0, double t1, std::size_t steps) {
    if (steps < 2 || !(t0 >= 0.0) || !(t1 > t0)) {
        throw std::invalid_argument("curve needs 0 <= T0 < T1 and at least two steps");
    }
    std::vector<FanoCurvePoint> out;
    out.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        in.T = s + 1 == steps ? t1 : t0 + (t1 - t0) * static_cast<double>(s) / static_cast<double>(steps - 1);
        out.push_back(FanoCurvePoint{in.T, fano_error_floor(in)});
    }
    return out;
}

void write_fano_curve_csv(const std::vector<FanoCurvePoint>& curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "T,error_floor\n";
    for (const auto& p : curve) {
        out << format_double(p.T) << ',' << format_double(p.error_floor) << '\n';
    }
}

} // namespace hawkesnet
