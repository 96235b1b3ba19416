#include "hawkesnet/estimator.hpp"

#include "hawkesnet/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hawkesnet {

EstimatorConfig EstimatorConfig::make_auto(double alpha, double w_minus, std::size_t k, double a_h, double a_r) {
    if (!(alpha > 0.0) || !(w_minus > 0.0) || !(a_h > 0.0) || !(a_r > 0.0)) {
        throw std::invalid_argument("auto estimator config needs positive alpha, w_minus, A_h, A_R");
    }
    if (k == 0) {
        throw std::invalid_argument("auto estimator config needs k >= 1");
    }
    EstimatorConfig c;
    c.mode = Mode::Auto;
    c.h = a_h * alpha * alpha;
    c.R = std::max(1.0, a_r / alpha);
    c.m = 2 * k;
    c.tau = alpha * w_minus * c.h / 2.0;
    return c;
}

void EstimatorConfig::validate() const {
    if (!(h > 0.0) || !(R > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("estimator config needs h, R, tau > 0");
    }
    if (m == 0) {
        throw std::invalid_argument("estimator config needs m >= 1");
    }
}

TrueSupport RecoveredNetwork::support() const {
    TrueSupport s;
    s.parents.reserve(rows.size());
    for (const auto& row : rows) {
        s.parents.push_back(row.support);
    }
    return s;
}

Eigen::MatrixXd screening_scores(const BinnedSample& sample) {
    const std::size_t n = sample.n;
    const std::size_t d = sample.d;
    if (n < 2) {
        throw std::invalid_argument("screening needs at least two bins");
    }
    std::vector<double> zy(d * d, 0.0);  // zy[i * d + j] = sum_r Z_jr Y_ir
    std::vector<double> z_sum(d, 0.0);
    std::vector<double> y_sum(d, 0.0);
    // Bins are processed in blocks transposed to bin-major order so that the
    // update for each active node touches a contiguous row of zy.
    constexpr std::size_t block = 256;
    std::vector<double> tile(block * d);
    for (std::size_t r0 = 0; r0 < n; r0 += block) {
        const std::size_t len = std::min(block, n - r0);
        for (std::size_t j = 0; j < d; ++j) {
            const double* z = sample.z_col(j).data() + r0;
            double total = 0.0;
            for (std::size_t t = 0; t < len; ++t) {
                tile[t * d + j] = z[t];
                total += z[t];
            }
            z_sum[j] += total;
        }
        for (std::size_t t = 0; t < len; ++t) {
            const double* z = tile.data() + t * d;
            for (std::size_t i : sample.active(r0 + t)) {
                double* acc = zy.data() + i * d;
                for (std::size_t j = 0; j < d; ++j) {
                    acc[j] += z[j];
                }
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        const auto y = sample.y_col(i);
        y_sum[i] = static_cast<double>(std::accumulate(y.begin(), y.end(), std::size_t{0}));
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::MatrixXd f(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        const double y_mean = y_sum[i] * inv_n;
        for (std::size_t j = 0; j < d; ++j) {
            f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                zy[i * d + j] * inv_n - (z_sum[j] * inv_n) * y_mean;
        }
    }
    return f;
}

std::vector<std::size_t> select_candidates(std::span<const double> scores, std::size_t m) {
    if (m == 0) {
        throw std::invalid_argument("candidate set size must be at least 1");
    }
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t take = std::min(m, scores.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                      [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); });
    idx.resize(take);
    return idx;
}

LeastSquaresFit local_least_squares(const BinnedSample& sample, std::size_t i, std::span<const std::size_t> candidates) {
    const std::size_t n = sample.n;
    const std::size_t d = sample.d;
    const std::size_t c = candidates.size();
    if (i >= d) {
        throw std::out_of_range("row index outside [0, d)");
    }
    for (std::size_t j : candidates) {
        if (j >= d) {
            throw std::out_of_range("candidate index outside [0, d)");
        }
    }
    LeastSquaresFit fit;
    if (c == 0) {
        return fit;
    }
    if (n < c + 1) {
        fit.degenerate = true;
        return fit;
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<std::span<const double>> cols;
    std::vector<double> z_mean(c, 0.0);
    for (std::size_t q = 0; q < c; ++q) {
        cols.push_back(sample.z_col(candidates[q]));
        z_mean[q] = std::accumulate(cols[q].begin(), cols[q].end(), 0.0) * inv_n;
    }
    const auto y = sample.y_col(i);
    const double y_mean = static_cast<double>(std::accumulate(y.begin(), y.end(), std::size_t{0})) * inv_n;

    // Lower triangle of sum_r zt zt^T and sum_r zt yt over centred values.
    std::vector<double> lower(c * c, 0.0);
    std::vector<double> cross_sum(c, 0.0);
    std::vector<double> centred(n);
    for (std::size_t a = 0; a < c; ++a) {
        const auto za = cols[a];
        double cs = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            centred[r] = za[r] - z_mean[a];
            cs += centred[r] * (static_cast<double>(y[r]) - y_mean);
        }
        cross_sum[a] = cs;
        for (std::size_t b = 0; b <= a; ++b) {
            const auto zb = cols[b];
            const double mb = z_mean[b];
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                acc += centred[r] * (zb[r] - mb);
            }
            lower[a * c + b] = acc;
        }
    }
    const auto cc = static_cast<Eigen::Index>(c);
    Eigen::MatrixXd gram(cc, cc);
    Eigen::VectorXd cross(cc);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double v = lower[a * c + b] * inv_n;
            gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
            gram(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
        }
        cross[static_cast<Eigen::Index>(a)] = cross_sum[a] * inv_n;
    }

    const double trace = gram.trace();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double floor = kGramRelativeTolerance * trace / static_cast<double>(c);
    if (!(trace > 0.0) || eig.info() != Eigen::Success || !(eig.eigenvalues()[0] > floor)) {
        fit.degenerate = true;
        return fit;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        fit.degenerate = true;
        return fit;
    }
    const Eigen::VectorXd coeffs = llt.solve(cross);
    fit.coeffs.assign(coeffs.data(), coeffs.data() + c);
    return fit;
}

std::vector<std::size_t> threshold_support(std::span<const double> coeffs, std::span<const std::size_t> candidates,
                                           double tau) {
    if (coeffs.size() != candidates.size()) {
        throw std::invalid_argument("coefficients and candidates must align");
    }
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < coeffs.size(); ++q) {
        if (coeffs[q] >= tau) {
            out.push_back(candidates[q]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

RecoveredNetwork recover(const BinnedSample& sample, const EstimatorConfig& config, std::size_t jobs) {
    config.validate();
    const Eigen::MatrixXd f = screening_scores(sample);
    RecoveredNetwork net;
    net.d = sample.d;
    net.rows.resize(sample.d);
    parallel_for(sample.d, jobs, [&](std::size_t i) {
        RowEstimate& row = net.rows[i];
        row.scores.resize(sample.d);
        for (std::size_t j = 0; j < sample.d; ++j) {
            row.scores[j] = f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        row.candidates = select_candidates(row.scores, config.m);
        auto fit = local_least_squares(sample, i, row.candidates);
        row.degenerate = fit.degenerate;
        if (!fit.degenerate) {
            row.coeffs = std::move(fit.coeffs);
            row.support = threshold_support(row.coeffs, row.candidates, config.tau);
        }
    });
    return net;
}

RecoveryMetrics evaluate(const TrueSupport& estimated, const TrueSupport& truth) {
    if (estimated.dim() != truth.dim()) {
        throw std::invalid_argument("evaluate: estimated and true supports differ in dimension");
    }
    RecoveryMetrics m;
    m.row_correct.resize(truth.dim());
    m.exact = true;
    for (std::size_t i = 0; i < truth.dim(); ++i) {
        auto est = estimated.parents[i];
        auto tru = truth.parents[i];
        std::sort(est.begin(), est.end());
        std::sort(tru.begin(), tru.end());
        std::vector<std::size_t> common;
        std::set_intersection(est.begin(), est.end(), tru.begin(), tru.end(), std::back_inserter(common));
        m.true_positives += common.size();
        m.false_positives += est.size() - common.size();
        m.false_negatives += tru.size() - common.size();
        m.row_correct[i] = est == tru;
        m.exact = m.exact && m.row_correct[i];
    }
    m.hamming = m.false_positives + m.false_negatives;
    return m;
}

RecoveryMetrics evaluate(const RecoveredNetwork& recovered, const TrueSupport& truth) {
    return evaluate(recovered.support(), truth);
}

nlohmann::json to_json(const RecoveredNetwork& net) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < net.rows.size(); ++i) {
        const auto& r = net.rows[i];
        rows.push_back({
            {"i", i},
            {"candidates", r.candidates},
            {"coeffs", r.coeffs},
            {"support", r.support},
            {"degenerate", r.degenerate},
        });
    }
    return {{"d", net.d}, {"rows", std::move(rows)}};
}

} // namespace hawkesnet
