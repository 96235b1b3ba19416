#pragma once

#include "hawkesnet/model.hpp"
#include "hawkesnet/simulate.hpp"

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace hawkesnet {

/// Tuning of the screen-then-regress estimator.
///
/// In auto mode the resolution follows the weak-coupling schedule
///   h = A_h alpha^2,  R = max(1, A_R / alpha),  m = 2k,  tau = alpha w_minus h / 2.
struct EstimatorConfig {
    enum class Mode { Explicit, Auto };

    double h{0.04};
    double R{5.0};
    std::size_t m{2};
    double tau{0.004};
    Mode mode{Mode::Explicit};

    [[nodiscard]] static EstimatorConfig make_auto(double alpha, double w_minus, std::size_t k, double a_h = 1.0,
                                                   double a_r = 1.0);
    /// Throws std::invalid_argument if h, R, tau are not positive or m == 0.
    void validate() const;
};

/// Smallest admissible eigenvalue of the candidate Gram matrix, relative to
/// its mean diagonal.
inline constexpr double kGramRelativeTolerance = 1e-10;

struct RowEstimate {
    std::vector<std::size_t> candidates;  // by score, descending
    std::vector<double> scores;           // full screening row F_i.
    std::vector<double> coeffs;           // aligned with candidates; empty when degenerate
    std::vector<std::size_t> support;     // sorted
    bool degenerate{false};
};

struct RecoveredNetwork {
    std::size_t d{0};
    std::vector<RowEstimate> rows;

    [[nodiscard]] TrueSupport support() const;
};

/// F_ij = mean_r(Z_jr Y_ir) - mean_r(Z_jr) mean_r(Y_ir), accumulated over
/// the sparse active entries of Y. Throws std::invalid_argument if n < 2.
[[nodiscard]] Eigen::MatrixXd screening_scores(const BinnedSample& sample);

/// Indices of the m largest scores, ties to the smaller index; min(m, d) entries.
[[nodiscard]] std::vector<std::size_t> select_candidates(std::span<const double> scores, std::size_t m);

struct LeastSquaresFit {
    std::vector<double> coeffs;
    bool degenerate{false};
};

/// Centred least squares of Y_i on the Z columns in C:
/// coeffs = Sigma_C^{-1} g_C, or a degenerate flag when the Gram matrix is
/// numerically singular or n <= |C|.
[[nodiscard]] LeastSquaresFit local_least_squares(const BinnedSample& sample, std::size_t i,
                                                  std::span<const std::size_t> candidates);

/// {C[q] : coeffs[q] >= tau}, sorted ascending.
[[nodiscard]] std::vector<std::size_t> threshold_support(std::span<const double> coeffs,
                                                         std::span<const std::size_t> candidates, double tau);

/// Screening, candidate selection, regression and thresholding for every
/// row. Rows are independent and are split over `jobs` threads.
[[nodiscard]] RecoveredNetwork recover(const BinnedSample& sample, const EstimatorConfig& config,
                                       std::size_t jobs = 1);

struct RecoveryMetrics {
    bool exact{false};
    std::size_t true_positives{0};
    std::size_t false_positives{0};
    std::size_t false_negatives{0};
    std::size_t hamming{0};
    std::vector<bool> row_correct;
};

/// Throws std::invalid_argument on dimension mismatch.
[[nodiscard]] RecoveryMetrics evaluate(const TrueSupport& estimated, const TrueSupport& truth);
[[nodiscard]] RecoveryMetrics evaluate(const RecoveredNetwork& recovered, const TrueSupport& truth);

[[nodiscard]] nlohmann::json to_json(const RecoveredNetwork& net);

} // namespace hawkesnet
