#pragma once

// Distances and scores between a reference sequence f and an estimate g
// that tolerate uncertainty in where the true state boundaries are.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "stateproj/core.hpp"

namespace stateproj {

struct GtsParams {
    double w = 0.6;       // cost per second of global shift
    double sigma = 0.35;  // largest admissible shift; may be +inf

    void validate() const {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("GTS weight w must be nonnegative");
        }
        if (!(sigma > 0.0)) {
            throw std::invalid_argument("GTS sigma must be positive");
        }
    }
};

struct LtsParams {
    double w = 0.6;          // weight of forgiven mismatch segments
    double sigma = 0.35;     // longest mismatch segment that can be forgiven
    double lambda = 0.0001;  // penalty per event shorter than zeta
    double zeta = 0.5;       // shortest plausible event

    void validate() const {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("LTS weight w must be nonnegative");
        }
        if (!(sigma > 0.0)) {
            throw std::invalid_argument("LTS sigma must be positive");
        }
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
            throw std::invalid_argument("duration penalty lambda must be nonnegative");
        }
        if (!(zeta > 0.0) || !std::isfinite(zeta)) {
            throw std::invalid_argument("duration bound zeta must be positive");
        }
    }
};

// dist(f o tau_eps, g) + w |eps| with f o tau_eps (t) = f(t - eps).
inline double gts_objective(const StateSequence& f, const StateSequence& g, double eps, double w,
                            const StateMetric& d = {}) {
    const double dist = standard_distance(f.shifted(eps), g, d);
    return std::isfinite(dist) ? dist + w * std::abs(eps) : kInfinity;
}

// Exact GTS distance. The objective is piecewise linear in eps with kinks at
// eps = 0 and wherever a shifted jump of f crosses a jump of g, so its
// minimum over [-sigma, sigma] sits at one of those points or at an end.
inline double gts_distance(const StateSequence& f, const StateSequence& g, const GtsParams& p,
                           const StateMetric& d = {}) {
    p.validate();
    std::vector<double> candidates{0.0};
    if (std::isfinite(p.sigma)) {
        candidates.push_back(-p.sigma);
        candidates.push_back(p.sigma);
    }
    for (const Jump& a : g.jumps()) {
        for (const Jump& b : f.jumps()) {
            candidates.push_back(std::clamp(a.time - b.time, -p.sigma, p.sigma));
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    double best = kInfinity;
    for (double eps : candidates) {
        best = std::min(best, gts_objective(f, g, eps, p.w, d));
    }
    return best;
}

// LTS distance. A bounded mismatch segment no longer than sigma whose two
// neighbouring segments agree is weighted by w, any other by 1. Sequences
// that disagree on an unbounded segment are infinitely far apart.
inline double lts_distance(const StateSequence& f, const StateSequence& g, const LtsParams& p,
                           const StateMetric& d = {}) {
    p.validate();
    const Segmentation seg = segments(f, g);
    const std::size_t last = seg.size() - 1;
    if (d(seg.states[0].first, seg.states[0].second) > 0.0 ||
        d(seg.states[last].first, seg.states[last].second) > 0.0) {
        return kInfinity;
    }
    auto agree = [&](std::size_t i) { return seg.states[i].first == seg.states[i].second; };
    double total = 0.0;
    for (std::size_t i = 1; i < last; ++i) {
        const auto [a, b] = seg.states[i];
        if (a == b) {
            continue;
        }
        const double len = seg.length(i);
        const bool forgiven = span_at_least(p.sigma, len) && agree(i - 1) && agree(i + 1);
        total += (forgiven ? p.w : 1.0) * len * d(a, b);
    }
    return total;
}

// lambda times the number of finite events of g shorter than zeta.
inline double duration_penalty(const StateSequence& g, double lambda, double zeta) {
    std::size_t violations = 0;
    const auto& jumps = g.jumps();
    for (std::size_t k = 1; k < jumps.size(); ++k) {
        if (span_below(jumps[k].time - jumps[k - 1].time, zeta)) {
            ++violations;
        }
    }
    return lambda * static_cast<double>(violations);
}

// Embeds labels on [0, M) into R by filling the outside with one state.
inline StateSequence extend(const LabelTrack& labels, State fill = 1) {
    const StateSequence& seq = labels.sequence();
    std::vector<Jump> jumps;
    jumps.reserve(seq.jump_count() + 2);
    jumps.push_back({0.0, seq.initial_state()});
    jumps.insert(jumps.end(), seq.jumps().begin(), seq.jumps().end());
    jumps.push_back({labels.horizon(), fill});
    return StateSequence(fill, std::move(jumps));
}

inline void require_same_horizon(const LabelTrack& f, const LabelTrack& g) {
    if (std::abs(f.horizon() - g.horizon()) > kTimeMergeTolerance) {
        throw std::invalid_argument("label tracks cover different horizons");
    }
}

// exp(-LTS(f*, g*) / M - DP(g)); the penalty looks at the estimate's own
// jumps, so the window edges never count as violations.
inline double lts_measure(const LabelTrack& truth, const LabelTrack& estimate, const LtsParams& p,
                          const StateMetric& d = {}) {
    require_same_horizon(truth, estimate);
    const double dist = lts_distance(extend(truth), extend(estimate), p, d);
    return std::exp(-dist / truth.horizon() -
                    duration_penalty(estimate.sequence(), p.lambda, p.zeta));
}

// Fraction of [0, M) on which the two tracks agree.
inline double accuracy(const LabelTrack& truth, const LabelTrack& estimate) {
    require_same_horizon(truth, estimate);
    return 1.0 - standard_distance(extend(truth), extend(estimate)) / truth.horizon();
}

}  // namespace stateproj
