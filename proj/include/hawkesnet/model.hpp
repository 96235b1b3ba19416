#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hawkesnet {

struct Edge {
    std::size_t source;
    double weight;
};

struct Triplet {
    std::size_t target;  // row i
    std::size_t source;  // column j
    double weight;
};

/// Row-sparse nonnegative interaction matrix. Row i lists the parents j of
/// node i with weights theta_ij > 0, sorted by j; zeros are never stored.
class SparseInteractionMatrix {
public:
    SparseInteractionMatrix() = default;
    explicit SparseInteractionMatrix(std::size_t d) : rows_(d) {}

    /// Throws std::invalid_argument on out-of-range indices, duplicate
    /// (i, j) pairs, or weights that are not finite and strictly positive.
    static SparseInteractionMatrix from_triplets(std::size_t d, std::vector<Triplet> entries);

    [[nodiscard]] std::size_t dim() const noexcept { return rows_.size(); }
    [[nodiscard]] std::span<const Edge> row(std::size_t i) const { return rows_.at(i); }
    [[nodiscard]] std::size_t nnz() const noexcept;
    [[nodiscard]] double at(std::size_t i, std::size_t j) const;
    [[nodiscard]] std::vector<Triplet> triplets() const;

    /// Transposed adjacency: for each source j, the (target i, theta_ij) pairs.
    [[nodiscard]] std::vector<std::vector<Edge>> children() const;

    friend bool operator==(const SparseInteractionMatrix& a, const SparseInteractionMatrix& b);

private:
    std::vector<std::vector<Edge>> rows_;
};

struct HawkesParams {
    std::vector<double> mu;
    SparseInteractionMatrix theta;
    double beta{1.0};
    std::size_t k{0};
    double alpha{0.0};
    double w_minus{0.0};
    double w_plus{0.0};
    double mu_minus{0.0};
    double mu_plus{0.0};

    [[nodiscard]] std::size_t dim() const noexcept { return mu.size(); }
    [[nodiscard]] double theta_minus() const noexcept { return alpha * w_minus; }
    [[nodiscard]] double theta_plus() const noexcept { return alpha * w_plus; }
    /// Uniform row-excitation bound k * theta_plus / beta.
    [[nodiscard]] double gamma() const noexcept;
};

struct TrueSupport {
    std::vector<std::vector<std::size_t>> parents;  // sorted, one list per row

    [[nodiscard]] std::size_t dim() const noexcept { return parents.size(); }
    friend bool operator==(const TrueSupport&, const TrueSupport&) = default;
};

enum class ViolationKind {
    DimensionMismatch,
    NonPositiveDecay,
    BadRateBounds,
    RateOutOfBounds,
    BadWeightBounds,
    WeightOutOfBounds,
    RowTooDense,
    Supercritical,
};

struct Violation {
    ViolationKind kind;
    std::size_t row{0};
    std::size_t col{0};
    std::string message;
};

[[nodiscard]] const char* to_string(ViolationKind kind) noexcept;

/// Every violated class invariant, each with the offending index. Never throws.
[[nodiscard]] std::vector<Violation> validate(const HawkesParams& params);

struct RandomInstanceSpec {
    std::size_t d{10};
    std::size_t k{2};
    double alpha{0.2};
    double w_minus{1.0};
    double w_plus{1.0};
    double mu_minus{1.0};
    double mu_plus{1.0};
    double beta{1.0};
};

/// Each row gets exactly k distinct parents drawn uniformly from [0, d)
/// (self-loops allowed), weights alpha * U[w-, w+], rates U[mu-, mu+].
[[nodiscard]] HawkesParams sample_random_instance(const RandomInstanceSpec& spec, std::uint64_t seed);

/// Single active row i_star with weight theta_minus on S; every other row
/// empty. Rates are mu_bar_star for i_star and mu_bar elsewhere.
[[nodiscard]] HawkesParams build_subclass_instance(std::size_t d, std::size_t k, std::size_t i_star,
                                                   std::vector<std::size_t> support, double theta_minus,
                                                   double mu_bar, double mu_bar_star, double beta);

[[nodiscard]] TrueSupport support_of(const HawkesParams& params);

/// Relabels node i as perm[i]: theta'_{perm[i], perm[j]} = theta_ij.
[[nodiscard]] HawkesParams permute(const HawkesParams& params, std::span<const std::size_t> perm);

[[nodiscard]] nlohmann::json to_json(const HawkesParams& params);
[[nodiscard]] HawkesParams params_from_json(const nlohmann::json& j);

[[nodiscard]] HawkesParams read_model(const std::filesystem::path& path);
void write_model(const HawkesParams& params, const std::filesystem::path& path);

} // namespace hawkesnet
