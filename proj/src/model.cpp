#include "hawkesnet/model.hpp"

#include "hawkesnet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hawkesnet {

SparseInteractionMatrix SparseInteractionMatrix::from_triplets(std::size_t d, std::vector<Triplet> entries) {
    SparseInteractionMatrix out(d);
    for (const auto& e : entries) {
        if (e.target >= d || e.source >= d) {
            throw std::invalid_argument("interaction entry (" + std::to_string(e.target) + ", " +
                                        std::to_string(e.source) + ") outside [0, " + std::to_string(d) + ")");
        }
        if (!std::isfinite(e.weight) || e.weight <= 0.0) {
            throw std::invalid_argument("interaction weights must be finite and strictly positive");
        }
        out.rows_[e.target].push_back(Edge{e.source, e.weight});
    }
    for (std::size_t i = 0; i < d; ++i) {
        auto& row = out.rows_[i];
        std::sort(row.begin(), row.end(), [](const Edge& a, const Edge& b) { return a.source < b.source; });
        const auto dup = std::adjacent_find(row.begin(), row.end(),
                                            [](const Edge& a, const Edge& b) { return a.source == b.source; });
        if (dup != row.end()) {
            throw std::invalid_argument("duplicate interaction entry (" + std::to_string(i) + ", " +
                                        std::to_string(dup->source) + ")");
        }
    }
    return out;
}

std::size_t SparseInteractionMatrix::nnz() const noexcept {
    std::size_t total = 0;
    for (const auto& row : rows_) {
        total += row.size();
    }
    return total;
}

double SparseInteractionMatrix::at(std::size_t i, std::size_t j) const {
    const auto& r = rows_.at(i);
    const auto it = std::lower_bound(r.begin(), r.end(), j, [](const Edge& e, std::size_t s) { return e.source < s; });
    return (it != r.end() && it->source == j) ? it->weight : 0.0;
}

std::vector<Triplet> SparseInteractionMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (const auto& e : rows_[i]) {
            out.push_back(Triplet{i, e.source, e.weight});
        }
    }
    return out;
}

std::vector<std::vector<Edge>> SparseInteractionMatrix::children() const {
    std::vector<std::vector<Edge>> out(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (const auto& e : rows_[i]) {
            out[e.source].push_back(Edge{i, e.weight});
        }
    }
    return out;
}

bool operator==(const SparseInteractionMatrix& a, const SparseInteractionMatrix& b) {
    if (a.rows_.size() != b.rows_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.rows_.size(); ++i) {
        const auto& ra = a.rows_[i];
        const auto& rb = b.rows_[i];
        if (!std::equal(ra.begin(), ra.end(), rb.begin(), rb.end(),
                        [](const Edge& x, const Edge& y) { return x.source == y.source && x.weight == y.weight; })) {
            return false;
        }
    }
    return true;
}

double HawkesParams::gamma() const noexcept {
    return static_cast<double>(k) * theta_plus() / beta;
}

const char* to_string(ViolationKind kind) noexcept {
    switch (kind) {
    case ViolationKind::DimensionMismatch: return "dimension_mismatch";
    case ViolationKind::NonPositiveDecay: return "non_positive_decay";
    case ViolationKind::BadRateBounds: return "bad_rate_bounds";
    case ViolationKind::RateOutOfBounds: return "rate_out_of_bounds";
    case ViolationKind::BadWeightBounds: return "bad_weight_bounds";
    case ViolationKind::WeightOutOfBounds: return "weight_out_of_bounds";
    case ViolationKind::RowTooDense: return "row_too_dense";
    case ViolationKind::Supercritical: return "supercritical";
    }
    return "unknown";
}

std::vector<Violation> validate(const HawkesParams& p) {
    std::vector<Violation> out;
    auto add = [&](ViolationKind kind, std::size_t row, std::size_t col, std::string msg) {
        out.push_back(Violation{kind, row, col, std::move(msg)});
    };

    if (p.theta.dim() != p.mu.size()) {
        add(ViolationKind::DimensionMismatch, 0, 0,
            "mu has " + std::to_string(p.mu.size()) + " entries but theta is " + std::to_string(p.theta.dim()) +
                "-dimensional");
    }
    if (!(p.beta > 0.0) || !std::isfinite(p.beta)) {
        add(ViolationKind::NonPositiveDecay, 0, 0, "beta must be finite and positive");
    }
    if (!(p.mu_minus > 0.0) || !(p.mu_minus <= p.mu_plus) || !std::isfinite(p.mu_plus)) {
        add(ViolationKind::BadRateBounds, 0, 0, "rate bounds must satisfy 0 < mu_minus <= mu_plus < inf");
    }
    for (std::size_t i = 0; i < p.mu.size(); ++i) {
        if (!(p.mu[i] >= p.mu_minus && p.mu[i] <= p.mu_plus)) {
            std::ostringstream msg;
            msg << "mu[" << i << "] = " << p.mu[i] << " outside [" << p.mu_minus << ", " << p.mu_plus << "]";
            add(ViolationKind::RateOutOfBounds, i, i, msg.str());
        }
    }
    const bool weight_bounds_ok = p.alpha > 0.0 && p.w_minus > 0.0 && p.w_minus <= p.w_plus && std::isfinite(p.w_plus);
    if (!weight_bounds_ok && p.theta.nnz() > 0) {
        add(ViolationKind::BadWeightBounds, 0, 0, "weight bounds must satisfy alpha > 0 and 0 < w_minus <= w_plus");
    }
    const double lo = p.theta_minus();
    const double hi = p.theta_plus();
    for (std::size_t i = 0; i < p.theta.dim(); ++i) {
        const auto row = p.theta.row(i);
        if (row.size() > p.k) {
            add(ViolationKind::RowTooDense, i, 0,
                "row " + std::to_string(i) + " has " + std::to_string(row.size()) + " parents, k = " +
                    std::to_string(p.k));
        }
        if (!weight_bounds_ok) {
            continue;
        }
        for (const auto& e : row) {
            if (e.weight < lo || e.weight > hi) {
                std::ostringstream msg;
                msg << "theta[" << i << "][" << e.source << "] = " << e.weight << " outside [" << lo << ", " << hi
                    << "]";
                add(ViolationKind::WeightOutOfBounds, i, e.source, msg.str());
            }
        }
    }
    if (p.beta > 0.0 && p.theta.nnz() > 0 && !(p.gamma() < 1.0)) {
        std::ostringstream msg;
        msg << "gamma = k * theta_plus / beta = " << p.gamma() << " is not below 1";
        add(ViolationKind::Supercritical, 0, 0, msg.str());
    }
    return out;
}

HawkesParams sample_random_instance(const RandomInstanceSpec& s, std::uint64_t seed) {
    if (s.d == 0) {
        throw std::invalid_argument("d must be positive");
    }
    if (s.k > s.d) {
        throw std::invalid_argument("k cannot exceed d");
    }
    if (!(s.beta > 0.0) || !(s.mu_minus > 0.0) || !(s.mu_minus <= s.mu_plus)) {
        throw std::invalid_argument("need beta > 0 and 0 < mu_minus <= mu_plus");
    }
    if (s.k > 0) {
        if (!(s.alpha > 0.0) || !(s.w_minus > 0.0) || !(s.w_minus <= s.w_plus)) {
            throw std::invalid_argument("need alpha > 0 and 0 < w_minus <= w_plus");
        }
        if (!(static_cast<double>(s.k) * s.alpha * s.w_plus / s.beta < 1.0)) {
            throw std::invalid_argument("k * alpha * w_plus / beta must be below 1");
        }
    }

    Rng rng(seed);
    std::vector<Triplet> entries;
    entries.reserve(s.d * s.k);
    std::vector<std::size_t> pool(s.d);
    for (std::size_t i = 0; i < s.d; ++i) {
        // Partial Fisher-Yates over a fresh identity pool.
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t t = 0; t < s.k; ++t) {
            const std::size_t pick = t + static_cast<std::size_t>(rng.index(s.d - t));
            std::swap(pool[t], pool[pick]);
            entries.push_back(Triplet{i, pool[t], s.alpha * rng.uniform(s.w_minus, s.w_plus)});
        }
    }

    HawkesParams p;
    p.mu.resize(s.d);
    for (auto& m : p.mu) {
        m = s.mu_minus == s.mu_plus ? s.mu_minus : rng.uniform(s.mu_minus, s.mu_plus);
    }
    p.theta = SparseInteractionMatrix::from_triplets(s.d, std::move(entries));
    p.beta = s.beta;
    p.k = s.k;
    p.alpha = s.alpha;
    p.w_minus = s.w_minus;
    p.w_plus = s.w_plus;
    p.mu_minus = s.mu_minus;
    p.mu_plus = s.mu_plus;
    return p;
}

HawkesParams build_subclass_instance(std::size_t d, std::size_t k, std::size_t i_star, std::vector<std::size_t> support,
                                     double theta_minus, double mu_bar, double mu_bar_star, double beta) {
    if (i_star >= d) {
        throw std::invalid_argument("i_star outside [0, d)");
    }
    std::sort(support.begin(), support.end());
    if (std::adjacent_find(support.begin(), support.end()) != support.end()) {
        throw std::invalid_argument("support contains duplicate indices");
    }
    if (support.size() != k) {
        throw std::invalid_argument("support must contain exactly k indices");
    }
    for (std::size_t j : support) {
        if (j >= d) {
            throw std::invalid_argument("support index outside [0, d)");
        }
        if (j == i_star) {
            throw std::invalid_argument("support may not contain i_star");
        }
    }
    if (!(theta_minus > 0.0) || !(beta > 0.0) || !(mu_bar > 0.0) || !(mu_bar_star > 0.0)) {
        throw std::invalid_argument("theta_minus, beta and rates must be positive");
    }
    if (!(static_cast<double>(k) * theta_minus / beta < 1.0)) {
        throw std::invalid_argument("k * theta_minus / beta must be below 1");
    }

    std::vector<Triplet> entries;
    for (std::size_t j : support) {
        entries.push_back(Triplet{i_star, j, theta_minus});
    }
    HawkesParams p;
    p.mu.assign(d, mu_bar);
    p.mu[i_star] = mu_bar_star;
    p.theta = SparseInteractionMatrix::from_triplets(d, std::move(entries));
    p.beta = beta;
    p.k = k;
    // Every active weight sits at the class minimum: alpha = theta_minus, w = 1.
    p.alpha = theta_minus;
    p.w_minus = 1.0;
    p.w_plus = 1.0;
    p.mu_minus = std::min(mu_bar, mu_bar_star);
    p.mu_plus = std::max(mu_bar, mu_bar_star);
    return p;
}

TrueSupport support_of(const HawkesParams& params) {
    TrueSupport s;
    s.parents.resize(params.theta.dim());
    for (std::size_t i = 0; i < params.theta.dim(); ++i) {
        for (const auto& e : params.theta.row(i)) {
            s.parents[i].push_back(e.source);
        }
    }
    return s;
}

HawkesParams permute(const HawkesParams& params, std::span<const std::size_t> perm) {
    const std::size_t d = params.dim();
    if (perm.size() != d) {
        throw std::invalid_argument("permutation length must equal d");
    }
    std::vector<bool> seen(d, false);
    for (std::size_t v : perm) {
        if (v >= d || seen[v]) {
            throw std::invalid_argument("not a permutation of [0, d)");
        }
        seen[v] = true;
    }
    HawkesParams out = params;
    for (std::size_t i = 0; i < d; ++i) {
        out.mu[perm[i]] = params.mu[i];
    }
    auto entries = params.theta.triplets();
    for (auto& e : entries) {
        e.target = perm[e.target];
        e.source = perm[e.source];
    }
    out.theta = SparseInteractionMatrix::from_triplets(d, std::move(entries));
    return out;
}

nlohmann::json to_json(const HawkesParams& p) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& t : p.theta.triplets()) {
        edges.push_back({{"i", t.target}, {"j", t.source}, {"w", t.weight}});
    }
    return {
        {"d", p.dim()},
        {"beta", p.beta},
        {"mu", p.mu},
        {"edges", std::move(edges)},
        {"k", p.k},
        {"alpha", p.alpha},
        {"w_minus", p.w_minus},
        {"w_plus", p.w_plus},
        {"mu_minus", p.mu_minus},
        {"mu_plus", p.mu_plus},
    };
}

HawkesParams params_from_json(const nlohmann::json& j) {
    HawkesParams p;
    const auto d = j.at("d").get<std::size_t>();
    p.mu = j.at("mu").get<std::vector<double>>();
    if (p.mu.size() != d) {
        throw std::invalid_argument("model JSON: mu length does not match d");
    }
    std::vector<Triplet> entries;
    for (const auto& e : j.at("edges")) {
        entries.push_back(Triplet{e.at("i").get<std::size_t>(), e.at("j").get<std::size_t>(), e.at("w").get<double>()});
    }
    p.theta = SparseInteractionMatrix::from_triplets(d, std::move(entries));
    p.beta = j.at("beta").get<double>();
    p.k = j.at("k").get<std::size_t>();
    p.alpha = j.at("alpha").get<double>();
    p.w_minus = j.at("w_minus").get<double>();
    p.w_plus = j.at("w_plus").get<double>();
    const auto [lo, hi] = std::minmax_element(p.mu.begin(), p.mu.end());
    p.mu_minus = j.value("mu_minus", lo == p.mu.end() ? 0.0 : *lo);
    p.mu_plus = j.value("mu_plus", hi == p.mu.end() ? 0.0 : *hi);
    return p;
}

HawkesParams read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file " + path.string());
    }
    return params_from_json(nlohmann::json::parse(in));
}

void write_model(const HawkesParams& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write model file " + path.string());
    }
    out << to_json(params).dump(2) << '\n';
}

} // namespace hawkesnet
