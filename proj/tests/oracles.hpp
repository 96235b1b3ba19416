#pragma once

// Reference computations used only by the tests. They take deliberately
// different routes from the library code: dense factorizations instead of
// series and fixed points, textbook elimination instead of Cholesky.

#include "hawkesnet/model.hpp"
#include "hawkesnet/rng.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline Eigen::MatrixXd dense_theta(const hawkesnet::HawkesParams& p) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
    for (const auto& e : p.theta.triplets()) {
        t(static_cast<Eigen::Index>(e.target), static_cast<Eigen::Index>(e.source)) = e.weight;
    }
    return t;
}

// (beta I - Theta) m = mu by LU.
inline Eigen::VectorXd mean_direct(const hawkesnet::HawkesParams& p) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    const Eigen::MatrixXd a = p.beta * Eigen::MatrixXd::Identity(d, d) - dense_theta(p);
    const Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(p.mu.data(), d);
    return a.fullPivLu().solve(mu);
}

// 2 beta S - Theta S - S Theta^T = diag(beta m), vectorized column-major:
// (2 beta I - I kron Theta - Theta kron I) vec(S) = vec(diag(beta m)).
inline Eigen::MatrixXd covariance_direct(const hawkesnet::HawkesParams& p) {
    const auto d = static_cast<Eigen::Index>(p.dim());
    const Eigen::MatrixXd theta = dense_theta(p);
    const Eigen::VectorXd m = mean_direct(p);
    const Eigen::Index n = d * d;
    Eigen::MatrixXd a = 2.0 * p.beta * Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index col = 0; col < d; ++col) {
        for (Eigen::Index row = 0; row < d; ++row) {
            const Eigen::Index q = col * d + row;  // index of S(row, col)
            for (Eigen::Index r = 0; r < d; ++r) {
                a(q, col * d + r) -= theta(row, r);  // (Theta S)(row, col)
                a(q, r * d + row) -= theta(col, r);  // (S Theta^T)(row, col)
            }
        }
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < d; ++j) {
        rhs(j * d + j) = p.beta * m(j);
    }
    const Eigen::VectorXd v = a.fullPivLu().solve(rhs);
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d);
}

// Gaussian elimination with partial pivoting on a dense square system.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        if (a[piv][col] == 0.0) {
            throw std::runtime_error("singular system");
        }
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    return x;
}

// Centred normal equations of y on the columns zs, built from the
// definitions and solved by elimination.
inline std::vector<double> ols_normal_equations(const std::vector<std::vector<double>>& zs, const std::vector<double>& y) {
    const std::size_t c = zs.size();
    const std::size_t n = y.size();
    std::vector<double> zm(c, 0.0);
    double ym = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        ym += y[r] / static_cast<double>(n);
        for (std::size_t q = 0; q < c; ++q) {
            zm[q] += zs[q][r] / static_cast<double>(n);
        }
    }
    std::vector<std::vector<double>> gram(c, std::vector<double>(c, 0.0));
    std::vector<double> g(c, 0.0);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = 0; b < c; ++b) {
            for (std::size_t r = 0; r < n; ++r) {
                gram[a][b] += (zs[a][r] - zm[a]) * (zs[b][r] - zm[b]) / static_cast<double>(n);
            }
        }
        for (std::size_t r = 0; r < n; ++r) {
            g[a] += (zs[a][r] - zm[a]) * (y[r] - ym) / static_cast<double>(n);
        }
    }
    return gauss_solve(gram, g);
}

// Two-pass sample covariance (1/n normalization).
inline double covariance_two_pass(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        ma += a[r];
        mb += b[r];
    }
    ma /= n;
    mb /= n;
    double s = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        s += (a[r] - ma) * (b[r] - mb);
    }
    return s / n;
}

// Random subcritical instance with up to k parents per row and varied
// weights and rates; rows may have fewer than k parents.
inline hawkesnet::HawkesParams random_params(hawkesnet::Rng& rng, std::size_t d, std::size_t k, double gamma_max) {
    hawkesnet::HawkesParams p;
    p.beta = rng.uniform(0.5, 2.0);
    p.k = k;
    p.w_minus = 0.5;
    p.w_plus = 1.0;
    p.alpha = gamma_max * p.beta / (static_cast<double>(k) * p.w_plus);
    p.mu_minus = 0.5;
    p.mu_plus = 2.0;
    std::vector<hawkesnet::Triplet> entries;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<std::size_t> pool(d);
        for (std::size_t j = 0; j < d; ++j) {
            pool[j] = j;
        }
        const std::size_t count = rng.index(std::min(k, d) + 1);
        for (std::size_t q = 0; q < count; ++q) {
            const std::size_t pick = q + rng.index(d - q);
            std::swap(pool[q], pool[pick]);
            entries.push_back({i, pool[q], p.alpha * rng.uniform(p.w_minus, p.w_plus)});
        }
    }
    p.theta = hawkesnet::SparseInteractionMatrix::from_triplets(d, std::move(entries));
    for (std::size_t i = 0; i < d; ++i) {
        p.mu.push_back(rng.uniform(p.mu_minus, p.mu_plus));
    }
    return p;
}

} // namespace oracle
