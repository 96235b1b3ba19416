#pragma once

#include "hawkesnet/model.hpp"

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hawkesnet {

struct FixedPointOptions {
    double tol{1e-12};             // sup-norm of the increment
    std::size_t max_iterations{1'000'000};
};

struct StationaryMoments {
    std::vector<double> m;           // E[X(0)]
    std::vector<double> lambda_bar;  // E[lambda(0)] = beta * m
    Eigen::MatrixXd sigma;           // Cov(X(0), X(0))
};

/// Solves (beta I - Theta) m = mu by the Neumann series
/// m = (1/beta) sum_l (Theta/beta)^l mu. Throws std::runtime_error if the
/// series has not converged within the iteration budget.
[[nodiscard]] std::vector<double> stationary_mean(const HawkesParams& params, const FixedPointOptions& opts = {});

/// Fixed point of Sigma <- (Theta Sigma + Sigma Theta^T + diag(beta m)) / (2 beta),
/// started from zero. Throws std::runtime_error on non-convergence.
[[nodiscard]] Eigen::MatrixXd stationary_covariance(const HawkesParams& params, const std::vector<double>& m,
                                                    const FixedPointOptions& opts = {});

[[nodiscard]] StationaryMoments stationary_moments(const HawkesParams& params, const FixedPointOptions& opts = {});

/// G_ij = Cov(X_j(0), lambda_i(0)) = sum_{l in S_i} theta_il Sigma_jl.
[[nodiscard]] Eigen::MatrixXd population_screening_scores(const HawkesParams& params, const Eigen::MatrixXd& sigma);

/// Per row: min over parents of G_ij minus max over non-parents. Empty rows
/// have no gap (nullopt); rows with no non-parents report the parent minimum.
[[nodiscard]] std::vector<std::optional<double>> screening_gap(const Eigen::MatrixXd& g, const TrueSupport& support);

/// Guaranteed population gap mu_minus * w_minus * alpha / (4 beta) in the weak-coupling regime.
[[nodiscard]] double screening_gap_floor(double alpha, double mu_minus, double w_minus, double beta) noexcept;

/// Stationary second moment of the summed state of k independent
/// rate-mu_bar shot-noise parents: k^2 mu_bar^2 / beta^2 + k mu_bar / (2 beta).
[[nodiscard]] double c_path(std::size_t k, double mu_bar, double beta) noexcept;

} // namespace hawkesnet
