#pragma once

// Monte Carlo study of projection as a post-processing step.
//
// Noisy labels alternate between stretches that follow the reference labels
// (exponential with mean mu1) and stretches stuck in a uniformly drawn wrong
// state (exponential with mean mu2). Each replication is scored before and
// after projection.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stateproj/core.hpp"
#include "stateproj/measures.hpp"
#include "stateproj/projection.hpp"

namespace stateproj {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64 (seed + replication); inverse-CDF exponential";

struct NoiseModel {
    double mu1 = 0.1;  // mean time following the reference, seconds
    double mu2 = 0.08;  // mean time in a wrong state, seconds
    std::uint64_t seed = 0;

    void validate() const {
        if (!(mu1 > 0.0) || !std::isfinite(mu1) || !(mu2 > 0.0) || !std::isfinite(mu2)) {
            throw std::invalid_argument("noise means must be positive and finite");
        }
    }
};

// 1 on [0,5), 2 on [5,15), 3 on [15,30), 2 on [30,40), 3 on [40,55), 1 on [55,60].
inline LabelTrack reference_labels() {
    return LabelTrack(60.0, StateSequence(1, {{5.0, 2}, {15.0, 3}, {30.0, 2}, {40.0, 3}, {55.0, 1}}));
}

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double exponential(std::mt19937_64& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

}  // namespace detail

// Draws one noisy copy of `base` over states 1..state_count. The wrong state
// is chosen against the reference state at the start of its stretch and is
// held for the whole stretch.
inline LabelTrack generate_noisy_labels(const LabelTrack& base, const NoiseModel& model, int state_count,
                                        std::mt19937_64& rng) {
    model.validate();
    const StateSpace space(state_count);
    const double horizon = base.horizon();
    const StateSequence& ref = base.sequence();

    std::vector<Jump> jumps;
    State current = ref.initial_state();
    auto set_state = [&](double at, State s) {
        if (at <= 0.0) {
            current = s;
            jumps.clear();
        } else {
            jumps.push_back({at, s});
        }
    };

    double t = 0.0;
    while (t < horizon) {
        const double follow_end = std::min(horizon, t + detail::exponential(rng, model.mu1));
        set_state(t, ref.state_at(t));
        for (const Jump& j : ref.jumps()) {
            if (j.time > t && j.time < follow_end) {
                set_state(j.time, j.state);
            }
        }
        t = follow_end;
        if (t >= horizon) {
            break;
        }
        const double wrong_end = std::min(horizon, t + detail::exponential(rng, model.mu2));
        const State truth = ref.state_at(t);
        auto pick = static_cast<State>(rng() % static_cast<std::uint64_t>(space.count - 1)) + 1;
        if (pick >= truth) {
            ++pick;
        }
        set_state(t, pick);
        t = wrong_end;
    }
    // Canonicalization drops repeated states and collapses near-coincident jumps.
    StateSequence seq(current, std::move(jumps));
    std::vector<Jump> inside;
    for (const Jump& j : seq.jumps()) {
        if (j.time < horizon) {
            inside.push_back(j);
        }
    }
    return LabelTrack(horizon, StateSequence(seq.initial_state(), std::move(inside)));
}

inline LabelTrack generate_noisy_labels(const LabelTrack& base, const NoiseModel& model, int state_count) {
    std::mt19937_64 rng(model.seed);
    return generate_noisy_labels(base, model, state_count, rng);
}

// Projection of finite-window labels; the first and last events act as
// unbounded anchors.
inline LabelTrack project_labels(const LabelTrack& labels, double gamma, const StateMetric& d = {},
                                 const ProjectionOptions& options = {}) {
    return LabelTrack(labels.horizon(), project(labels.sequence(), gamma, d, options).projected);
}

enum class SweepParameter { mu1, mu2, gamma, w, lambda };

inline std::string_view to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::mu1: return "mu1";
        case SweepParameter::mu2: return "mu2";
        case SweepParameter::gamma: return "gamma";
        case SweepParameter::w: return "w";
        case SweepParameter::lambda: return "lambda";
    }
    return "?";
}

inline SweepParameter parse_sweep_parameter(std::string_view name) {
    if (name == "mu1") return SweepParameter::mu1;
    if (name == "mu2") return SweepParameter::mu2;
    if (name == "gamma") return SweepParameter::gamma;
    if (name == "w") return SweepParameter::w;
    if (name == "lambda") return SweepParameter::lambda;
    throw std::invalid_argument("unknown sweep parameter: " + std::string(name));
}

struct SweepConfig {
    LabelTrack base = reference_labels();
    int state_count = 3;
    std::size_t replications = 1000;
    SweepParameter parameter = SweepParameter::mu2;
    std::vector<double> values;
    NoiseModel noise;
    double gamma = 0.5;
    LtsParams lts;
    bool score_projection = true;  // skip projecting when only noisy scores are wanted

    void validate() const {
        if (replications < 1) {
            throw std::invalid_argument("at least one replication is required");
        }
        if (values.empty()) {
            throw std::invalid_argument("sweep needs at least one value");
        }
        noise.validate();
        lts.validate();
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
            throw std::invalid_argument("gamma must be nonnegative and finite");
        }
        (void)StateSpace(state_count);
        for (double v : values) {
            const bool ok = parameter == SweepParameter::lambda || parameter == SweepParameter::w ||
                                    parameter == SweepParameter::gamma
                                ? (v >= 0.0 && std::isfinite(v))
                                : (v > 0.0 && std::isfinite(v));
            if (!ok) {
                throw std::invalid_argument("invalid sweep value");
            }
        }
    }
};

struct SweepRow {
    double value = 0.0;
    double mean_accuracy_noisy = 0.0;
    double se_accuracy = 0.0;
    double mean_lts_noisy = 0.0;
    double se_lts_noisy = 0.0;
    double mean_lts_pp = 0.0;
    double se_lts_pp = 0.0;
};

namespace detail {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

// One row per swept value. Replication r uses seed + r for every value, so
// rows share their random draws.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::size_t reps = cfg.replications;
    const std::size_t nv = cfg.values.size();
    std::vector<std::vector<double>> acc(nv, std::vector<double>(reps));
    std::vector<std::vector<double>> lts_noisy(nv, std::vector<double>(reps));
    std::vector<std::vector<double>> lts_pp(nv, std::vector<double>(reps));
    const StateMetric rho;

    // w and lambda only change the scoring, gamma only the projection.
    const bool shared_noise = cfg.parameter == SweepParameter::w ||
                              cfg.parameter == SweepParameter::lambda ||
                              cfg.parameter == SweepParameter::gamma;
    const bool shared_projection = cfg.parameter == SweepParameter::w || cfg.parameter == SweepParameter::lambda;

    for (std::size_t r = 0; r < reps; ++r) {
        std::optional<LabelTrack> noisy;
        std::optional<LabelTrack> projected;
        for (std::size_t v = 0; v < nv; ++v) {
            NoiseModel noise = cfg.noise;
            noise.seed = cfg.noise.seed + r;
            double gamma = cfg.gamma;
            LtsParams lts = cfg.lts;
            const double value = cfg.values[v];
            switch (cfg.parameter) {
                case SweepParameter::mu1: noise.mu1 = value; break;
                case SweepParameter::mu2: noise.mu2 = value; break;
                case SweepParameter::gamma: gamma = value; break;
                case SweepParameter::w: lts.w = value; break;
                case SweepParameter::lambda: lts.lambda = value; break;
            }
            if (!noisy || !shared_noise) {
                noisy = generate_noisy_labels(cfg.base, noise, cfg.state_count);
                projected.reset();
            }
            acc[v][r] = accuracy(cfg.base, *noisy);
            lts_noisy[v][r] = lts_measure(cfg.base, *noisy, lts, rho);
            if (cfg.score_projection) {
                if (!projected || !shared_projection) {
                    projected = project_labels(*noisy, gamma, rho);
                }
                lts_pp[v][r] = lts_measure(cfg.base, *projected, lts, rho);
            }
        }
    }

    std::vector<SweepRow> rows;
    rows.reserve(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        SweepRow row;
        row.value = cfg.values[v];
        const auto a = detail::mean_se(acc[v]);
        const auto n = detail::mean_se(lts_noisy[v]);
        row.mean_accuracy_noisy = a.mean;
        row.se_accuracy = a.se;
        row.mean_lts_noisy = n.mean;
        row.se_lts_noisy = n.se;
        if (cfg.score_projection) {
            const auto p = detail::mean_se(lts_pp[v]);
            row.mean_lts_pp = p.mean;
            row.se_lts_pp = p.se;
        } else {
            row.mean_lts_pp = std::nan("");
            row.se_lts_pp = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

// Standard value lists for each sweep.
inline std::vector<double> default_sweep_values(SweepParameter p, double mu1 = 0.1) {
    switch (p) {
        case SweepParameter::mu2: {
            std::vector<double> out;
            for (int i = 1; i <= 9; ++i) {
                out.push_back(std::round(mu1 * i * 1e11) / 1e12);
            }
            return out;
        }
        case SweepParameter::gamma: return {0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 2.0, 2.5};
        case SweepParameter::w: {
            std::vector<double> out;
            for (int i = 0; i <= 12; ++i) {
                out.push_back(i / 10.0);
            }
            return out;
        }
        case SweepParameter::lambda: {
            std::vector<double> out;
            for (int i = 0; i <= 10; ++i) {
                out.push_back(i / 100.0);
            }
            return out;
        }
        case SweepParameter::mu1: return {0.1, 0.2, 0.5, 1.0};
    }
    return {};
}

}  // namespace stateproj
