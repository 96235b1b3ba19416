#include "hawkesnet/simulate.hpp"

#include "hawkesnet/rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace hawkesnet {

namespace {

constexpr double kAncestryHorizon = 40.0;  // in units of 1/beta

void check_inputs(const HawkesParams& params, double horizon, double burn_in) {
    const auto violations = validate(params);
    if (!violations.empty()) {
        throw std::invalid_argument("invalid model: " + violations.front().message);
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("observation horizon T must be positive");
    }
    if (!(burn_in >= 0.0) || !std::isfinite(burn_in)) {
        throw std::invalid_argument("burn-in must be non-negative");
    }
}

[[noreturn]] void cap_exceeded(std::size_t cap) {
    throw SimulationCapExceeded("event cap of " + std::to_string(cap) + " exceeded");
}

} // namespace

const char* to_string(SimulationMethod method) noexcept {
    return method == SimulationMethod::Thinning ? "thinning" : "cluster";
}

SimulationMethod parse_simulation_method(const std::string& name) {
    if (name == "thinning") {
        return SimulationMethod::Thinning;
    }
    if (name == "cluster") {
        return SimulationMethod::Cluster;
    }
    throw std::invalid_argument("unknown simulation method '" + name + "'");
}

std::size_t EventLog::total_events() const noexcept {
    std::size_t total = 0;
    for (const auto& e : events) {
        total += e.size();
    }
    return total;
}

std::size_t EventLog::observed_count(std::size_t i) const {
    const auto& e = events.at(i);
    return static_cast<std::size_t>(e.end() - std::upper_bound(e.begin(), e.end(), 0.0));
}

double default_burn_in(const HawkesParams& params) {
    const double gamma = params.theta.nnz() > 0 ? params.gamma() : 0.0;
    return std::max(20.0 / params.beta, 20.0 / (params.beta * (1.0 - gamma)));
}

EventLog simulate_thinning(const HawkesParams& params, double horizon, double burn_in, std::uint64_t seed,
                           const SimulationOptions& opts) {
    check_inputs(params, horizon, burn_in);
    const std::size_t d = params.dim();
    const double beta = params.beta;
    const auto children = params.theta.children();

    EventLog log;
    log.d = d;
    log.beta = beta;
    log.events.resize(d);
    log.t_start = -burn_in;
    log.t_end = horizon;
    log.seed = seed;
    log.method = SimulationMethod::Thinning;

    const double mu_sum = std::accumulate(params.mu.begin(), params.mu.end(), 0.0);
    if (!(mu_sum > 0.0)) {
        return log;
    }

    // excitation[i] = sum_j theta_ij X_j(t); the total intensity
    // mu_sum + sum_i excitation[i] only decays between events.
    std::vector<double> excitation(d, 0.0);
    Rng rng(seed);
    double t = -burn_in;
    double bound = mu_sum;
    std::size_t count = 0;

    while (true) {
        const double wait = rng.exponential(bound);
        t += wait;
        if (t > horizon) {
            break;
        }
        const double decay = std::exp(-beta * wait);
        double excitation_sum = 0.0;
        for (double& e : excitation) {
            e *= decay;
            excitation_sum += e;
        }
        const double total = mu_sum + excitation_sum;
        assert(total <= bound * (1.0 + 1e-12));

        if (rng.uniform() * bound <= total) {
            const double target = rng.uniform() * total;
            std::size_t node = d - 1;
            double cumulative = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                cumulative += params.mu[i] + excitation[i];
                if (target <= cumulative) {
                    node = i;
                    break;
                }
            }
            log.events[node].push_back(t);
            if (++count > opts.event_cap) {
                cap_exceeded(opts.event_cap);
            }
            for (const auto& c : children[node]) {
                excitation[c.source] += c.weight;
                excitation_sum += c.weight;
            }
            bound = mu_sum + excitation_sum;
        } else {
            bound = total;
        }
    }
    return log;
}

EventLog simulate_cluster(const HawkesParams& params, double horizon, double burn_in, std::uint64_t seed,
                          const SimulationOptions& opts) {
    check_inputs(params, horizon, burn_in);
    const std::size_t d = params.dim();
    const double beta = params.beta;
    const auto children = params.theta.children();

    EventLog log;
    log.d = d;
    log.beta = beta;
    log.events.resize(d);
    log.t_start = -burn_in;
    log.t_end = horizon;
    log.seed = seed;
    log.method = SimulationMethod::Cluster;

    struct Birth {
        std::size_t node;
        double time;
    };
    std::vector<Birth> queue;
    Rng rng(seed);

    const double root_start = -burn_in - kAncestryHorizon / beta;
    for (std::size_t v = 0; v < d; ++v) {
        if (!(params.mu[v] > 0.0)) {
            continue;
        }
        double t = root_start;
        while (true) {
            t += rng.exponential(params.mu[v]);
            if (t > horizon) {
                break;
            }
            queue.push_back(Birth{v, t});
            if (queue.size() > opts.event_cap) {
                cap_exceeded(opts.event_cap);
            }
        }
    }

    // Breadth-first over generations; children later than the horizon are
    // dropped together with their whole subtree.
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Birth parent = queue[head];
        if (parent.time >= log.t_start) {
            log.events[parent.node].push_back(parent.time);
        }
        for (const auto& c : children[parent.node]) {
            const std::uint64_t n_children = rng.poisson(c.weight / beta);
            for (std::uint64_t q = 0; q < n_children; ++q) {
                const double t = parent.time + rng.exponential(beta);
                if (t <= horizon) {
                    queue.push_back(Birth{c.source, t});
                }
            }
        }
        if (queue.size() > opts.event_cap) {
            cap_exceeded(opts.event_cap);
        }
    }

    for (auto& e : log.events) {
        std::stable_sort(e.begin(), e.end());
    }
    return log;
}

EventLog simulate(const HawkesParams& params, double horizon, double burn_in, std::uint64_t seed,
                  SimulationMethod method, const SimulationOptions& opts) {
    return method == SimulationMethod::Thinning ? simulate_thinning(params, horizon, burn_in, seed, opts)
                                                : simulate_cluster(params, horizon, burn_in, seed, opts);
}

double state_at(const EventLog& log, std::size_t node, double t) {
    if (node >= log.d) {
        throw std::out_of_range("node index outside [0, d)");
    }
    if (!(t >= log.t_start && t <= log.t_end)) {
        throw std::out_of_range("state_at: time outside the log window");
    }
    const auto& e = log.events[node];
    const auto last = std::upper_bound(e.begin(), e.end(), t);
    double x = 0.0;
    for (auto it = e.begin(); it != last; ++it) {
        x += std::exp(-log.beta * (t - *it));
    }
    return x;
}

namespace {

// Per-bin lists of active nodes, ascending within each bin.
void index_active(BinnedSample& s) {
    const std::size_t n = s.n;
    s.active_begin.assign(n + 1, 0);
    for (std::size_t i = 0; i < s.d; ++i) {
        const auto col = s.y_col(i);
        for (std::size_t r = 0; r < n; ++r) {
            s.active_begin[r + 1] += col[r];
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        s.active_begin[r + 1] += s.active_begin[r];
    }
    s.active_nodes.assign(s.active_begin[n], 0);
    std::vector<std::size_t> fill(s.active_begin.begin(), s.active_begin.end() - 1);
    for (std::size_t i = 0; i < s.d; ++i) {
        const auto col = s.y_col(i);
        for (std::size_t r = 0; r < n; ++r) {
            if (col[r] != 0) {
                s.active_nodes[fill[r]++] = i;
            }
        }
    }
}

} // namespace

BinnedSample bin_and_clip(const EventLog& log, double h, double R) {
    if (!(h > 0.0) || !(R > 0.0)) {
        throw std::invalid_argument("bin width h and clip level R must be positive");
    }
    const double n_real = std::floor(log.t_end / h);
    if (!(n_real >= 1.0)) {
        throw std::invalid_argument("observation window shorter than one bin");
    }
    const auto n = static_cast<std::size_t>(n_real);
    const std::size_t d = log.d;
    const double beta = log.beta;
    const double step_decay = std::exp(-beta * h);

    BinnedSample s;
    s.n = n;
    s.d = d;
    s.h = h;
    s.R = R;
    s.z.assign(n * d, 0.0);
    s.y.assign(n * d, 0);

    for (std::size_t j = 0; j < d; ++j) {
        const auto& ev = log.events[j];
        std::size_t next = 0;
        double state = 0.0;  // unclipped X_j at time `anchor`
        double anchor = log.t_start;
        for (std::size_t r = 0; r < n; ++r) {
            const double grid = static_cast<double>(r) * h;
            if (next < ev.size() && ev[next] <= grid) {
                while (next < ev.size() && ev[next] <= grid) {
                    state = state * std::exp(-beta * (ev[next] - anchor)) + 1.0;
                    anchor = ev[next];
                    ++next;
                }
                state *= std::exp(-beta * (grid - anchor));
            } else if (r == 0) {
                state *= std::exp(-beta * (grid - anchor));
            } else {
                state *= step_decay;
            }
            anchor = grid;
            s.z[j * n + r] = std::min(state, R);
        }

        // Y: bin r covers (r h, (r+1) h]; an event exactly on r h falls in bin r-1.
        for (auto it = std::upper_bound(ev.begin(), ev.end(), 0.0); it != ev.end(); ++it) {
            const double t = *it;
            auto r = static_cast<std::size_t>(std::max(std::ceil(t / h) - 1.0, 0.0));
            while (r > 0 && t <= static_cast<double>(r) * h) {
                --r;
            }
            while (t > static_cast<double>(r + 1) * h) {
                ++r;
            }
            if (r >= n) {
                break;
            }
            s.y[j * n + r] = 1;
        }
    }

    index_active(s);
    return s;
}

BinnedSample make_sample(std::size_t n, std::size_t d, std::vector<double> z, std::vector<std::uint8_t> y, double h,
                         double R) {
    if (z.size() != n * d || y.size() != n * d) {
        throw std::invalid_argument("make_sample: table sizes must equal n * d");
    }
    BinnedSample s;
    s.n = n;
    s.d = d;
    s.h = h;
    s.R = R;
    s.z.resize(n * d);
    s.y.resize(n * d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            s.z[j * n + r] = z[r * d + j];
            s.y[j * n + r] = y[r * d + j] != 0 ? 1 : 0;
        }
    }
    index_active(s);
    return s;
}

} // namespace hawkesnet
