#pragma once

#include "hawkesnet/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkesnet {

enum class SimulationMethod { Thinning, Cluster };

[[nodiscard]] const char* to_string(SimulationMethod method) noexcept;
[[nodiscard]] SimulationMethod parse_simulation_method(const std::string& name);

/// Event times per node over [t_start, t_end], with the observation window
/// starting at 0. Events before 0 are burn-in and only feed the state.
struct EventLog {
    std::size_t d{0};
    double beta{1.0};
    std::vector<std::vector<double>> events;  // strictly increasing per node
    double t_start{0.0};
    double t_end{0.0};
    std::uint64_t seed{0};
    SimulationMethod method{SimulationMethod::Thinning};

    [[nodiscard]] std::size_t total_events() const noexcept;
    /// Events of node i in the observation window (0, t_end].
    [[nodiscard]] std::size_t observed_count(std::size_t i) const;
};

class SimulationCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationOptions {
    std::size_t event_cap{100'000'000};
};

/// max(20/beta, 20/(beta (1 - gamma))), with gamma the class bound.
[[nodiscard]] double default_burn_in(const HawkesParams& params);

/// Ogata thinning from an empty state at -burn_in against the total
/// intensity, which is non-increasing between events.
[[nodiscard]] EventLog simulate_thinning(const HawkesParams& params, double horizon, double burn_in, std::uint64_t seed,
                                         const SimulationOptions& opts = {});

/// Poisson cluster construction: roots on [-burn_in - 40/beta, horizon],
/// offspring expanded breadth-first, then clipped to [-burn_in, horizon].
[[nodiscard]] EventLog simulate_cluster(const HawkesParams& params, double horizon, double burn_in, std::uint64_t seed,
                                        const SimulationOptions& opts = {});

[[nodiscard]] EventLog simulate(const HawkesParams& params, double horizon, double burn_in, std::uint64_t seed,
                                SimulationMethod method, const SimulationOptions& opts = {});

/// X_j(t) = sum_{s <= t} exp(-beta (t - s)); right-continuous.
[[nodiscard]] double state_at(const EventLog& log, std::size_t node, double t);

/// Clipped grid states and bin indicators at resolution (h, R).
///   Z(r, j) = min(X_j(r h), R),   Y(r, i) = 1{ N_i((r h, (r+1) h]) >= 1 }
/// Tables are stored node-major (one contiguous column of n bins per node);
/// Y is also kept as a per-bin list of active nodes.
struct BinnedSample {
    std::size_t n{0};
    std::size_t d{0};
    double h{0.0};
    double R{0.0};
    std::vector<double> z;                  // z[j * n + r]
    std::vector<std::uint8_t> y;            // y[i * n + r]
    std::vector<std::size_t> active_begin;  // n + 1 offsets into active_nodes
    std::vector<std::size_t> active_nodes;

    [[nodiscard]] double z_at(std::size_t r, std::size_t j) const noexcept { return z[j * n + r]; }
    [[nodiscard]] std::uint8_t y_at(std::size_t r, std::size_t i) const noexcept { return y[i * n + r]; }
    [[nodiscard]] std::span<const double> z_col(std::size_t j) const noexcept { return {z.data() + j * n, n}; }
    [[nodiscard]] std::span<const std::uint8_t> y_col(std::size_t i) const noexcept { return {y.data() + i * n, n}; }
    [[nodiscard]] std::span<const std::size_t> active(std::size_t r) const noexcept {
        return {active_nodes.data() + active_begin[r], active_begin[r + 1] - active_begin[r]};
    }
};

/// Throws std::invalid_argument when h or R is not positive or when the
/// window holds no full bin.
[[nodiscard]] BinnedSample bin_and_clip(const EventLog& log, double h, double R);

/// Builds a sample from Z and Y tables given bin-major (entry r * d + j),
/// the natural layout for hand-written test data.
[[nodiscard]] BinnedSample make_sample(std::size_t n, std::size_t d, std::vector<double> z, std::vector<std::uint8_t> y,
                                       double h = 1.0, double R = 1.0);

} // namespace hawkesnet
