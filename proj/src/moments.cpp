#include "hawkesnet/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hawkesnet {

std::vector<double> stationary_mean(const HawkesParams& params, const FixedPointOptions& opts) {
    const std::size_t d = params.dim();
    const double beta = params.beta;
    std::vector<double> term(d);
    for (std::size_t i = 0; i < d; ++i) {
        term[i] = params.mu[i] / beta;
    }
    std::vector<double> m = term;
    std::vector<double> next(d);
    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        double sup = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            double acc = 0.0;
            for (const auto& e : params.theta.row(i)) {
                acc += e.weight * term[e.source];
            }
            next[i] = acc / beta;
            sup = std::max(sup, std::abs(next[i]));
        }
        term.swap(next);
        for (std::size_t i = 0; i < d; ++i) {
            m[i] += term[i];
        }
        if (sup < opts.tol) {
            return m;
        }
    }
    throw std::runtime_error("stationary_mean: Neumann series did not converge (gamma too close to 1?)");
}

Eigen::MatrixXd stationary_covariance(const HawkesParams& params, const std::vector<double>& m,
                                      const FixedPointOptions& opts) {
    const auto d = static_cast<Eigen::Index>(params.dim());
    const double beta = params.beta;
    if (m.size() != params.dim()) {
        throw std::invalid_argument("stationary_covariance: mean vector has wrong length");
    }
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd theta_sigma(d, d);
    Eigen::MatrixXd next(d, d);
    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        // (Theta Sigma)_{jl} = sum_r theta_jr Sigma_rl
        for (Eigen::Index j = 0; j < d; ++j) {
            theta_sigma.row(j).setZero();
            for (const auto& e : params.theta.row(static_cast<std::size_t>(j))) {
                theta_sigma.row(j) += e.weight * sigma.row(static_cast<Eigen::Index>(e.source));
            }
        }
        next = theta_sigma + theta_sigma.transpose();
        for (Eigen::Index j = 0; j < d; ++j) {
            next(j, j) += beta * m[static_cast<std::size_t>(j)];
        }
        next /= 2.0 * beta;
        const double sup = (next - sigma).cwiseAbs().maxCoeff();
        sigma.swap(next);
        if (d == 0 || sup < opts.tol) {
            return sigma;
        }
    }
    throw std::runtime_error("stationary_covariance: Lyapunov iteration did not converge");
}

StationaryMoments stationary_moments(const HawkesParams& params, const FixedPointOptions& opts) {
    StationaryMoments out;
    out.m = stationary_mean(params, opts);
    out.lambda_bar.resize(out.m.size());
    std::transform(out.m.begin(), out.m.end(), out.lambda_bar.begin(), [&](double v) { return params.beta * v; });
    out.sigma = stationary_covariance(params, out.m, opts);
    return out;
}

Eigen::MatrixXd population_screening_scores(const HawkesParams& params, const Eigen::MatrixXd& sigma) {
    const auto d = static_cast<Eigen::Index>(params.dim());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (const auto& e : params.theta.row(static_cast<std::size_t>(i))) {
            g.row(i) += e.weight * sigma.col(static_cast<Eigen::Index>(e.source)).transpose();
        }
    }
    return g;
}

std::vector<std::optional<double>> screening_gap(const Eigen::MatrixXd& g, const TrueSupport& support) {
    const std::size_t d = support.dim();
    std::vector<std::optional<double>> out(d);
    std::vector<bool> is_parent(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto& parents = support.parents[i];
        if (parents.empty()) {
            continue;
        }
        std::fill(is_parent.begin(), is_parent.end(), false);
        double min_parent = std::numeric_limits<double>::infinity();
        for (std::size_t j : parents) {
            is_parent[j] = true;
            min_parent = std::min(min_parent, g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        double max_other = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j) {
            if (!is_parent[j]) {
                max_other = std::max(max_other, g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            }
        }
        out[i] = parents.size() == d ? min_parent : min_parent - max_other;
    }
    return out;
}

double screening_gap_floor(double alpha, double mu_minus, double w_minus, double beta) noexcept {
    return mu_minus * w_minus * alpha / (4.0 * beta);
}

double c_path(std::size_t k, double mu_bar, double beta) noexcept {
    const double kk = static_cast<double>(k);
    return kk * kk * mu_bar * mu_bar / (beta * beta) + kk * mu_bar / (2.0 * beta);
}

} // namespace hawkesnet
