#pragma once

// Piecewise-constant state sequences on the real line.
//
// A StateSequence is a right-continuous step function R -> S with finitely
// many jumps. It is stored as the state in force on (-inf, t_1) plus an
// ordered list of (time, new state) jumps. Everything in this header is a
// pure function over immutable values.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stateproj {

using State = int;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Jumps closer than this are merged when a sequence is constructed.
inline constexpr double kTimeMergeTolerance = 1e-9;

// Slack used when a time span is compared against a duration bound
// (gamma, 2*gamma, sigma, zeta). Decimal input such as 0.75 - 0.55 would
// otherwise fall a few ulps short of 0.2.
inline constexpr double kSpanTolerance = 1e-12;

inline bool span_at_least(double span, double bound) {
    return span >= bound - kSpanTolerance * std::max(1.0, std::abs(bound));
}

inline bool span_below(double span, double bound) {
    return !span_at_least(span, bound);
}

// Number of states M; states are 1..M.
struct StateSpace {
    int count = 2;

    explicit StateSpace(int m) : count(m) {
        if (m < 2) {
            throw std::invalid_argument("state space needs at least two states");
        }
    }

    bool contains(State s) const { return s >= 1 && s <= count; }
};

// Metric on the state set. Default-constructed instances are the discrete
// metric (1 for distinct states, 0 otherwise) and accept any state id.
class StateMetric {
public:
    StateMetric() = default;

    static StateMetric discrete() { return {}; }

    // Table for states 1..n, row-major. The metric axioms are checked.
    static StateMetric from_table(const std::vector<std::vector<double>>& rows) {
        const std::size_t n = rows.size();
        if (n < 2) {
            throw std::invalid_argument("metric table needs at least two states");
        }
        StateMetric m;
        m.size_ = static_cast<int>(n);
        m.table_.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) {
                throw std::invalid_argument("metric table must be square");
            }
            for (std::size_t j = 0; j < n; ++j) {
                const double v = rows[i][j];
                if (!std::isfinite(v) || v < 0.0) {
                    throw std::invalid_argument("metric entries must be finite and nonnegative");
                }
                m.table_[i * n + j] = v;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (m.table_[i * n + i] != 0.0) {
                throw std::invalid_argument("metric must vanish on the diagonal");
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (m.table_[i * n + j] != m.table_[j * n + i]) {
                    throw std::invalid_argument("metric must be symmetric");
                }
                if (i != j && m.table_[i * n + j] <= 0.0) {
                    throw std::invalid_argument("metric must separate distinct states");
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double lhs = m.table_[i * n + k];
                    const double rhs = m.table_[i * n + j] + m.table_[j * n + k];
                    if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) {
                        throw std::invalid_argument("metric violates the triangle inequality");
                    }
                }
            }
        }
        return m;
    }

    bool is_discrete() const { return size_ == 0; }

    // Number of states covered by the table; 0 for the discrete metric.
    int table_size() const { return size_; }

    // Distance from a to the closest other state.
    double nearest(State a) const {
        if (size_ == 0) {
            return 1.0;
        }
        double best = kInfinity;
        for (State b = 1; b <= size_; ++b) {
            if (b != a) {
                best = std::min(best, (*this)(a, b));
            }
        }
        return best;
    }

    double operator()(State a, State b) const {
        if (a == b) {
            return 0.0;
        }
        if (size_ == 0) {
            return 1.0;
        }
        if (a < 1 || b < 1 || a > size_ || b > size_) {
            throw std::out_of_range("state outside the metric table");
        }
        return table_[static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(size_) +
                      static_cast<std::size_t>(b - 1)];
    }

private:
    int size_ = 0;
    std::vector<double> table_;
};

struct Jump {
    double time = 0.0;
    State state = 1;

    friend bool operator==(const Jump&, const Jump&) = default;
};

// Maximal interval [begin, end) on which a sequence is constant. The first
// event starts at -inf and the last one ends at +inf.
struct Event {
    double begin = -kInfinity;
    double end = kInfinity;
    State state = 1;

    double length() const { return end - begin; }
    bool bounded() const { return std::isfinite(begin) && std::isfinite(end); }

    friend bool operator==(const Event&, const Event&) = default;
};

class StateSequence {
public:
    StateSequence() = default;

    // Canonicalizing constructor. Jump times must be finite and
    // nondecreasing; jumps closer than kTimeMergeTolerance collapse onto the
    // earlier time keeping the later state, and jumps that do not change the
    // state are dropped.
    explicit StateSequence(State initial, std::vector<Jump> jumps = {}) : initial_(initial) {
        if (initial < 0) {
            throw std::invalid_argument("state ids must be nonnegative");
        }
        jumps_.reserve(jumps.size());
        for (const Jump& j : jumps) {
            if (!std::isfinite(j.time)) {
                throw std::invalid_argument("jump times must be finite");
            }
            if (j.state < 0) {
                throw std::invalid_argument("state ids must be nonnegative");
            }
            if (!jumps_.empty() && j.time < jumps_.back().time) {
                throw std::invalid_argument("jump times must be increasing");
            }
            if (!jumps_.empty() && j.time - jumps_.back().time < kTimeMergeTolerance) {
                jumps_.back().state = j.state;
                const State before = jumps_.size() > 1 ? jumps_[jumps_.size() - 2].state : initial_;
                if (jumps_.back().state == before) {
                    jumps_.pop_back();
                }
                continue;
            }
            const State current = jumps_.empty() ? initial_ : jumps_.back().state;
            if (j.state != current) {
                jumps_.push_back(j);
            }
        }
    }

    static StateSequence constant(State s) { return StateSequence(s); }

    // Rebuilds a sequence from consecutive events (inverse of events()).
    static StateSequence from_events(const std::vector<Event>& evs) {
        if (evs.empty()) {
            throw std::invalid_argument("event list must not be empty");
        }
        std::vector<Jump> jumps;
        jumps.reserve(evs.size() - 1);
        for (std::size_t i = 1; i < evs.size(); ++i) {
            jumps.push_back({evs[i].begin, evs[i].state});
        }
        return StateSequence(evs.front().state, std::move(jumps));
    }

    State initial_state() const { return initial_; }
    State final_state() const { return jumps_.empty() ? initial_ : jumps_.back().state; }
    const std::vector<Jump>& jumps() const { return jumps_; }
    std::size_t jump_count() const { return jumps_.size(); }
    bool is_constant() const { return jumps_.empty(); }

    std::vector<double> jump_times() const {
        std::vector<double> out;
        out.reserve(jumps_.size());
        for (const Jump& j : jumps_) {
            out.push_back(j.time);
        }
        return out;
    }

    // State in force before jump i (i in [0, jump_count()]); i == jump_count()
    // gives the final state.
    State state_before(std::size_t i) const { return i == 0 ? initial_ : jumps_[i - 1].state; }

    State state_at(double t) const {
        auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                                   [](double x, const Jump& j) { return x < j.time; });
        return it == jumps_.begin() ? initial_ : std::prev(it)->state;
    }

    // g(t) = f(t - eps): every jump moves by +eps.
    StateSequence shifted(double eps) const {
        StateSequence out = *this;
        for (Jump& j : out.jumps_) {
            j.time += eps;
        }
        return out;
    }

    // Distinct states taking part in the sequence, ascending.
    std::vector<State> states_used() const {
        std::vector<State> out{initial_};
        for (const Jump& j : jumps_) {
            out.push_back(j.state);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    friend bool operator==(const StateSequence&, const StateSequence&) = default;

private:
    State initial_ = 1;
    std::vector<Jump> jumps_;
};

inline State state_at(const StateSequence& seq, double t) { return seq.state_at(t); }

inline std::vector<Event> events(const StateSequence& seq) {
    std::vector<Event> out;
    out.reserve(seq.jump_count() + 1);
    double begin = -kInfinity;
    State state = seq.initial_state();
    for (const Jump& j : seq.jumps()) {
        out.push_back({begin, j.time, state});
        begin = j.time;
        state = j.state;
    }
    out.push_back({begin, kInfinity, state});
    return out;
}

// Common refinement of two sequences. Segment 0 is (-inf, a_1), segment i is
// [a_i, a_{i+1}) and segment l is [a_l, inf); with no breakpoints there is a
// single segment covering R.
struct Segmentation {
    std::vector<double> breakpoints;
    std::vector<std::pair<State, State>> states;

    std::size_t size() const { return states.size(); }
    double begin(std::size_t i) const { return i == 0 ? -kInfinity : breakpoints[i - 1]; }
    double end(std::size_t i) const { return i < breakpoints.size() ? breakpoints[i] : kInfinity; }
    double length(std::size_t i) const { return end(i) - begin(i); }
    bool bounded(std::size_t i) const { return i > 0 && i < breakpoints.size(); }
};

inline Segmentation segments(const StateSequence& f, const StateSequence& g) {
    Segmentation seg;
    const auto& fj = f.jumps();
    const auto& gj = g.jumps();
    seg.breakpoints.reserve(fj.size() + gj.size());
    seg.states.reserve(fj.size() + gj.size() + 1);

    State fs = f.initial_state();
    State gs = g.initial_state();
    seg.states.emplace_back(fs, gs);
    std::size_t i = 0;
    std::size_t k = 0;
    while (i < fj.size() || k < gj.size()) {
        const double tf = i < fj.size() ? fj[i].time : kInfinity;
        const double tg = k < gj.size() ? gj[k].time : kInfinity;
        const double t = std::min(tf, tg);
        if (tf == t) {
            fs = fj[i++].state;
        }
        if (tg == t) {
            gs = gj[k++].state;
        }
        seg.breakpoints.push_back(t);
        seg.states.emplace_back(fs, gs);
    }
    return seg;
}

// Integral of d(f(t), g(t)) over R; +inf when f and g disagree on an
// unbounded segment.
inline double standard_distance(const StateSequence& f, const StateSequence& g,
                                const StateMetric& d = {}) {
    if (d(f.initial_state(), g.initial_state()) > 0.0 ||
        d(f.final_state(), g.final_state()) > 0.0) {
        return kInfinity;
    }
    const Segmentation seg = segments(f, g);
    double total = 0.0;
    for (std::size_t i = 1; i + 1 < seg.size(); ++i) {
        const auto [a, b] = seg.states[i];
        if (a != b) {
            total += seg.length(i) * d(a, b);
        }
    }
    return total;
}

// Labels defined on the finite window [0, horizon]. The underlying sequence
// holds the state at time 0 as its initial state and every jump lies in
// (0, horizon); read on R it extends the first and last events to -inf and
// +inf.
class LabelTrack {
public:
    LabelTrack(double horizon, StateSequence seq) : horizon_(horizon), seq_(std::move(seq)) {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) {
            throw std::invalid_argument("horizon must be positive and finite");
        }
        for (const Jump& j : seq_.jumps()) {
            if (!(j.time > 0.0) || !(j.time < horizon_)) {
                throw std::invalid_argument("label jumps must lie inside (0, horizon)");
            }
        }
    }

    // Builds a track from jumps in [0, horizon); a jump at exactly 0 sets
    // the state at time 0.
    static LabelTrack from_jumps(double horizon, State initial, std::vector<Jump> jumps) {
        std::size_t skip = 0;
        while (skip < jumps.size() && jumps[skip].time <= 0.0) {
            if (jumps[skip].time < 0.0) {
                throw std::invalid_argument("label jumps must not be negative");
            }
            initial = jumps[skip].state;
            ++skip;
        }
        jumps.erase(jumps.begin(), jumps.begin() + static_cast<std::ptrdiff_t>(skip));
        return LabelTrack(horizon, StateSequence(initial, std::move(jumps)));
    }

    double horizon() const { return horizon_; }
    const StateSequence& sequence() const { return seq_; }

    friend bool operator==(const LabelTrack&, const LabelTrack&) = default;

private:
    double horizon_ = 1.0;
    StateSequence seq_;
};

}  // namespace stateproj
