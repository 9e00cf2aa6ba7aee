#pragma once

// Brute-force references for checking the projection and GTS code on small
// inputs. Nothing here relies on the structural results used by
// projection.hpp apart from the fact that optimal jumps are a subset of the
// jumps of f.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "stateproj/core.hpp"
#include "stateproj/measures.hpp"
#include "stateproj/projection.hpp"

namespace stateproj {

inline constexpr std::size_t kOracleMaxJumps = 10;
inline constexpr std::size_t kOracleMaxStates = 4;

struct OracleResult {
    double cost = kInfinity;
    std::vector<StateSequence> optimal;
    std::size_t search_space = 0;  // candidates whose energy was evaluated

    bool contains(const StateSequence& g) const {
        return std::find(optimal.begin(), optimal.end(), g) != optimal.end();
    }
};

// Enumerates every jump subset of J(f) and every labelling of the resulting
// bounded segments. The unbounded segments keep f's boundary states; any
// other choice has infinite energy.
inline OracleResult brute_force_project(const StateSequence& f, double gamma, const StateMetric& d = {}) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be nonnegative and finite");
    }
    const auto& jumps = f.jumps();
    const std::size_t n = jumps.size();

    std::vector<State> alphabet = f.states_used();
    const State top = std::max(alphabet.back(), d.table_size());
    for (State s = 1; s <= top; ++s) {
        alphabet.push_back(s);
    }
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
    if (n > kOracleMaxJumps || alphabet.size() > kOracleMaxStates) {
        throw std::invalid_argument("instance too large for exhaustive search");
    }

    struct Candidate {
        StateSequence g;
        double cost;
    };
    std::vector<Candidate> kept;
    double best = kInfinity;
    OracleResult out;

    std::vector<double> times;
    std::vector<std::size_t> digit;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        times.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                times.push_back(jumps[i].time);
            }
        }
        bool feasible = true;
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (span_below(times[i] - times[i - 1], gamma)) {
                feasible = false;
            }
        }
        if (!feasible) {
            continue;
        }
        const std::size_t k = times.size();
        if (k == 0) {
            if (f.initial_state() != f.final_state()) {
                continue;
            }
        }
        // Odometer over the k - 1 bounded segment states.
        const std::size_t free_segments = k == 0 ? 0 : k - 1;
        digit.assign(free_segments, 0);
        while (true) {
            std::vector<State> labels;
            labels.push_back(f.initial_state());
            for (std::size_t i = 0; i < free_segments; ++i) {
                labels.push_back(alphabet[digit[i]]);
            }
            if (k > 0) {
                labels.push_back(f.final_state());
            }
            bool distinct = true;
            for (std::size_t i = 1; i < labels.size(); ++i) {
                if (labels[i] == labels[i - 1]) {
                    distinct = false;
                }
            }
            if (distinct) {
                std::vector<Jump> gj;
                for (std::size_t i = 0; i < k; ++i) {
                    gj.push_back({times[i], labels[i + 1]});
                }
                StateSequence g(labels.front(), std::move(gj));
                const double e = energy(f, g, gamma, d);
                ++out.search_space;
                if (std::isfinite(e)) {
                    if (e < best) {
                        best = e;
                    }
                    if (e <= best || costs_equal(e, best)) {
                        kept.push_back({std::move(g), e});
                    }
                }
            }
            std::size_t pos = 0;
            for (; pos < free_segments; ++pos) {
                if (++digit[pos] < alphabet.size()) {
                    break;
                }
                digit[pos] = 0;
            }
            if (pos == free_segments) {
                break;
            }
        }
    }

    out.cost = best;
    for (Candidate& c : kept) {
        if (costs_equal(c.cost, best)) {
            out.optimal.push_back(std::move(c.g));
        }
    }
    return out;
}

// GTS objective minimized over the grid -sigma, -sigma + step, ..., sigma.
inline double grid_gts(const StateSequence& f, const StateSequence& g, const GtsParams& p,
                       const StateMetric& d, double step) {
    p.validate();
    if (!(step > 0.0)) {
        throw std::invalid_argument("grid step must be positive");
    }
    if (!std::isfinite(p.sigma)) {
        throw std::invalid_argument("grid search needs a finite sigma");
    }
    const double ratio = 2.0 * p.sigma / step;
    auto count = static_cast<std::size_t>(std::floor(ratio + 1e-9));
    double best = kInfinity;
    for (std::size_t i = 0; i <= count; ++i) {
        const double eps = std::min(p.sigma, -p.sigma + static_cast<double>(i) * step);
        best = std::min(best, gts_objective(f, g, eps, p.w, d));
    }
    best = std::min(best, gts_objective(f, g, p.sigma, p.w, d));
    return best;
}

struct OracleInstance {
    StateSequence f;
    double gamma = 0.0;
    int states = 2;
};

// Random small instance. Half of the draws put jump times and gamma on a
// 0.05 s grid so that ties and threshold-length events come up often.
inline OracleInstance random_instance(std::mt19937_64& rng, std::size_t max_jumps, int max_states) {
    std::uniform_int_distribution<std::size_t> jump_count(0, max_jumps);
    std::uniform_int_distribution<int> state_count(2, std::max(2, max_states));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool grid = unit(rng) < 0.5;

    OracleInstance inst;
    inst.states = state_count(rng);
    const std::size_t n = jump_count(rng);
    std::uniform_int_distribution<int> pick(1, inst.states);
    const State initial = pick(rng);
    std::vector<Jump> jumps;
    double t = grid ? 0.05 * static_cast<double>(std::uniform_int_distribution<int>(0, 20)(rng))
                    : unit(rng);
    State current = initial;
    double max_gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            const double gap = grid ? 0.05 * static_cast<double>(std::uniform_int_distribution<int>(1, 12)(rng))
                                    : 0.01 + 0.6 * unit(rng);
            t += gap;
            max_gap = std::max(max_gap, gap);
        }
        State next = current;
        while (next == current) {
            next = pick(rng);
        }
        jumps.push_back({t, next});
        current = next;
    }
    inst.f = StateSequence(initial, std::move(jumps));
    if (max_gap <= 0.0) {
        max_gap = 0.5;
    }
    if (grid) {
        const int steps = std::max(1, static_cast<int>(std::lround(max_gap / 0.05)));
        inst.gamma = 0.05 * static_cast<double>(std::uniform_int_distribution<int>(1, steps)(rng));
    } else {
        inst.gamma = max_gap * (0.001 + 0.999 * unit(rng));
    }
    return inst;
}

// Same, restricted to two states.
inline OracleInstance random_binary_instance(std::mt19937_64& rng, std::size_t max_jumps) {
    return random_instance(rng, max_jumps, 2);
}

using Projector = std::function<ProjectionResult(const StateSequence&, double, const StateMetric&,
                                                 const ProjectionOptions&)>;

inline ProjectionResult default_projector(const StateSequence& f, double gamma, const StateMetric& d,
                                          const ProjectionOptions& o) {
    return project(f, gamma, d, o);
}

struct OracleCheckConfig {
    std::size_t instances = 500;
    std::size_t max_jumps = 8;
    int max_states = 3;
    std::uint64_t seed = 1;
};

struct OracleMismatch {
    OracleInstance instance;
    bool binary = false;
    StateSequence projected;
    double project_cost = 0.0;
    OracleResult oracle;
    std::string reason;
};

struct OracleCheckReport {
    std::size_t checked = 0;
    std::vector<OracleMismatch> failures;

    bool passed() const { return failures.empty(); }
};

// Compares project() against brute force on random instances. Two-state
// instances are also projected with the parity-restricted graph.
inline OracleCheckReport run_oracle_check(const OracleCheckConfig& cfg,
                                          const Projector& projector = default_projector) {
    if (cfg.max_jumps > kOracleMaxJumps || cfg.max_states < 2 ||
        static_cast<std::size_t>(cfg.max_states) > kOracleMaxStates) {
        throw std::invalid_argument("oracle bounds exceed the exhaustive search limits");
    }
    std::mt19937_64 rng(cfg.seed);
    OracleCheckReport report;
    const StateMetric rho;
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        const OracleInstance inst = random_instance(rng, cfg.max_jumps, cfg.max_states);
        const OracleResult ref = brute_force_project(inst.f, inst.gamma, rho);
        std::vector<bool> modes{false};
        if (inst.f.states_used().size() <= 2) {
            modes.push_back(true);
        }
        for (bool binary : modes) {
            ProjectionOptions opts;
            opts.binary = binary;
            const ProjectionResult got = projector(inst.f, inst.gamma, rho, opts);
            std::string reason;
            if (std::abs(got.cost - ref.cost) > 1e-12 * std::max(1.0, ref.cost)) {
                reason = "cost differs from brute force";
            } else if (!ref.contains(got.projected)) {
                reason = "projection is not among the brute-force optima";
            } else if (std::abs(energy(inst.f, got.projected, inst.gamma, rho) - got.cost) >
                       1e-12 * std::max(1.0, got.cost)) {
                reason = "reported cost is not the energy of the projection";
            }
            if (!reason.empty()) {
                report.failures.push_back({inst, binary, got.projected, got.cost, ref, reason});
            }
        }
        ++report.checked;
    }
    return report;
}

}  // namespace stateproj
