#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace hawkesnet {

// Constants of the single-row hard subclass used for the Fano bound.
struct FanoInputs {
    std::size_t d{0};
    std::size_t k{1};
    double T{0.0};
    double beta{1.0};
    double mu_bar{1.0};
    double mu_bar_star{1.0};
    double theta_minus{0.1};
    double c_init_bound{0.0};  // 0 gives an optimistic (larger) floor

    /// Throws std::invalid_argument unless d >= k + 2, T >= 0, rates are
    /// positive, c_init_bound >= 0 and k * theta_minus / beta < 1.
    void validate() const;
};

/// ln C(d - 1, k): direct sum for small k, log-gamma otherwise.
[[nodiscard]] double log_hypothesis_count(std::size_t d, std::size_t k);

/// c_init + (theta_minus^2 / mu_bar_star) * C_path * T.
[[nodiscard]] double kl_budget(const FanoInputs& in);

/// max(0, 1 - (kl_budget + ln 2) / ln C(d - 1, k)).
[[nodiscard]] double fano_error_floor(const FanoInputs& in);

/// Observation time at which the floor equals `target`; in.T is ignored.
/// Throws std::invalid_argument unless 0 < target < floor at T = 0.
[[nodiscard]] double critical_time(const FanoInputs& in, double target);

struct FanoCurvePoint {
    double T;
    double error_floor;
};

/// `steps` evenly spaced times from t0 to t1 inclusive.
[[nodiscard]] std::vector<FanoCurvePoint> fano_curve(FanoInputs in, double t0, double t1, std::size_t steps);
void write_fano_curve_csv(const std::vector<FanoCurvePoint>& curve, const std::filesystem::path& path);

} // namespace hawkesnet
