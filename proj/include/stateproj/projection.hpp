#pragma once

// Projection of a state sequence onto the set of sequences whose finite
// events all last at least gamma.
//
// The projection minimizes
//
//     E(f, g) = dist(f, g) + gamma * |J(g)|
//
// over all g. Optimal jumps are a subset of the jumps of f, events of f that
// are long enough survive unchanged, and what is left is a shortest path
// through a DAG whose vertices are candidate jump times of f. Each arc
// (t_k, t_l) stands for "g is constant on [t_k, t_l)" and weighs the
// disagreement with f there plus the penalty for the jump at t_l.
//
// With two states the jump directions are forced, which allows the parity
// restricted arc set and doubles the minimum event length of the result.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stateproj/core.hpp"

namespace stateproj {

inline double energy(const StateSequence& f, const StateSequence& g, double gamma,
                     const StateMetric& d = {}) {
    const double dist = standard_distance(f, g, d);
    if (!std::isfinite(dist)) {
        return kInfinity;
    }
    return dist + gamma * static_cast<double>(g.jump_count());
}

// State occupying the most time of [a, b) under f; ties go to the smallest
// id. Unbounded intervals return the boundary state whose occupancy is
// infinite.
inline State most_common_state(const StateSequence& f, double a, double b) {
    if (!(a < b)) {
        throw std::invalid_argument("most_common_state needs a < b");
    }
    if (std::isinf(a) && std::isinf(b)) {
        return std::min(f.initial_state(), f.final_state());
    }
    if (std::isinf(a)) {
        return f.initial_state();
    }
    if (std::isinf(b)) {
        return f.final_state();
    }
    std::vector<std::pair<State, double>> occupancy;
    for (const Event& e : events(f)) {
        const double lo = std::max(a, e.begin);
        const double hi = std::min(b, e.end);
        if (hi <= lo) {
            continue;
        }
        auto it = std::find_if(occupancy.begin(), occupancy.end(),
                               [&](const auto& p) { return p.first == e.state; });
        if (it == occupancy.end()) {
            occupancy.emplace_back(e.state, hi - lo);
        } else {
            it->second += hi - lo;
        }
    }
    std::sort(occupancy.begin(), occupancy.end());
    State best = occupancy.front().first;
    double best_time = occupancy.front().second;
    for (const auto& [s, t] : occupancy) {
        if (t > best_time) {
            best = s;
            best_time = t;
        }
    }
    return best;
}

// Run of jumps of f lying between two frozen events. The sequence keeps
// those jumps only, so its initial and final states are the states of the
// frozen neighbours.
struct Subproblem {
    StateSequence sequence;
    std::size_t first_jump = 0;  // index of the first jump in the parent's jump list

    std::size_t jump_count() const { return sequence.jump_count(); }
    double begin() const { return sequence.jumps().front().time; }
    double end() const { return sequence.jumps().back().time; }
};

// Freezes every event of f that no projection alters, together with the two
// unbounded events, and returns the runs of short events in between. Jumps
// sitting directly between two frozen events are not part of any
// subproblem; they survive projection as they are.
//
// Under the discrete metric an event is frozen from length 2*gamma on. Two
// states do not lower that bound: 1 on [0, L) surrounded by 2 with
// gamma < L < 2*gamma costs L to erase and 2*gamma to keep. When the state
// of the event is closer than 1 to every other state, the bound grows by
// that factor, since erasing it costs less.
//
// An event of exactly threshold length may or may not change in an optimum;
// it is frozen unless `freeze_ties` is false.
inline std::vector<Subproblem> split_long_events(const StateSequence& f, double gamma,
                                                 const StateMetric& d = {}, bool freeze_ties = true) {
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gamma must be positive");
    }
    const auto& jumps = f.jumps();
    const std::size_t n = jumps.size();

    // Event i spans [t_i, t_{i+1}) with t_0 = -inf, t_{n+1} = +inf.
    std::vector<std::size_t> frozen{0};
    for (std::size_t i = 1; i < n; ++i) {
        const double threshold = 2.0 * gamma / std::min(1.0, d.nearest(jumps[i - 1].state));
        const double len = jumps[i].time - jumps[i - 1].time;
        if (freeze_ties ? span_at_least(len, threshold) : !span_at_least(threshold, len)) {
            frozen.push_back(i);
        }
    }
    if (n > 0) {
        frozen.push_back(n);
    }

    std::vector<Subproblem> out;
    for (std::size_t k = 0; k + 1 < frozen.size(); ++k) {
        const std::size_t a = frozen[k];
        const std::size_t b = frozen[k + 1];
        if (b - a < 2) {
            continue;
        }
        std::vector<Jump> part(jumps.begin() + static_cast<std::ptrdiff_t>(a),
                               jumps.begin() + static_cast<std::ptrdiff_t>(b));
        out.push_back({StateSequence(f.state_before(a), std::move(part)), a});
    }
    return out;
}

struct ProjectionArc {
    std::size_t from = 0;  // positions in ProjectionGraph::times
    std::size_t to = 0;
    double weight = 0.0;
    State state = 1;  // value of the candidate on [times[from], times[to])
    std::vector<State> tied;  // other values of the same weight
};

struct ProjectionGraph {
    std::vector<double> times;              // -inf, selected jump times, +inf
    std::vector<std::size_t> jump_index;    // position of each vertex in t_0..t_{n+1}
    std::vector<ProjectionArc> arcs;        // grouped by `from`, ascending `to`
    std::vector<std::size_t> first_arc;     // arcs of vertex u: [first_arc[u], first_arc[u+1])
    double gamma = 0.0;
    bool binary = false;

    std::size_t vertex_count() const { return times.size(); }
    std::size_t source() const { return 0; }
    std::size_t sink() const { return times.size() - 1; }

    const ProjectionArc* find_arc(std::size_t from, std::size_t to) const {
        for (std::size_t a = first_arc[from]; a < first_arc[from + 1]; ++a) {
            if (arcs[a].to == to) {
                return &arcs[a];
            }
        }
        return nullptr;
    }
};

inline bool costs_equal(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

namespace detail {

// Candidate segment states: those used by f, or the whole table for a
// non-discrete metric (a state absent from f can still be the cheapest one).
inline std::vector<State> candidate_states(const StateSequence& f, const StateMetric& d) {
    std::vector<State> out = f.states_used();
    for (State s = 1; s <= d.table_size(); ++s) {
        out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline ProjectionGraph build_graph_impl(const StateSequence& f, double gamma, const StateMetric& d,
                                        bool binary, bool prune) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be positive and finite");
    }
    const auto& jumps = f.jumps();
    const std::size_t n = jumps.size();

    // t_i and s_i for i = 0..n+1, s_i being the state on [t_i, t_{i+1}).
    std::vector<double> t(n + 2);
    t[0] = -kInfinity;
    t[n + 1] = kInfinity;
    for (std::size_t i = 0; i < n; ++i) {
        t[i + 1] = jumps[i].time;
    }
    std::vector<State> s(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        s[i] = f.state_before(i);
    }

    // Under the discrete metric some optimum avoids the second jump when it
    // follows the first within gamma: a jump there can slide back onto t_1.
    // The penultimate jump mirrors this. A wider gap offers no such
    // guarantee, since both jumps may then be kept.
    std::vector<bool> is_vertex(n + 2, true);
    if (prune && !binary && n > 2 && d.is_discrete()) {
        if (span_at_least(gamma, t[2] - t[1])) {
            is_vertex[2] = false;
        }
        if (span_at_least(gamma, t[n] - t[n - 1])) {
            is_vertex[n - 1] = false;
        }
    }

    ProjectionGraph g;
    g.gamma = gamma;
    g.binary = binary;
    std::vector<std::size_t> position(n + 2, 0);
    for (std::size_t i = 0; i < n + 2; ++i) {
        if (is_vertex[i]) {
            position[i] = g.times.size();
            g.times.push_back(t[i]);
            g.jump_index.push_back(i);
        }
    }

    const std::vector<State> cand = candidate_states(f, d);
    auto cand_index = [&](State st) {
        return static_cast<std::size_t>(std::lower_bound(cand.begin(), cand.end(), st) - cand.begin());
    };
    std::vector<std::size_t> s_idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        s_idx[i] = cand_index(s[i]);
    }
    // dist_to[c][m] = d(cand[c], s_m)
    std::vector<std::vector<double>> dist_to(cand.size(), std::vector<double>(n + 1));
    for (std::size_t c = 0; c < cand.size(); ++c) {
        for (std::size_t m = 0; m <= n; ++m) {
            dist_to[c][m] = d(cand[c], s[m]);
        }
    }

    std::vector<double> cost(cand.size());
    g.first_arc.assign(g.times.size() + 1, 0);
    for (std::size_t k = 0; k < n + 2; ++k) {
        if (!is_vertex[k]) {
            continue;
        }
        g.first_arc[position[k]] = g.arcs.size();
        if (k == n + 1) {
            continue;
        }
        // cost[c]: disagreement of constant cand[c] with f over the finite
        // intervals of [t_k, t_l).
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t l = k + 1; l < n + 2; ++l) {
            const std::size_t m = l - 1;  // interval just absorbed
            if (m >= 1 && m < n) {
                const double len = t[m + 1] - t[m];
                for (std::size_t c = 0; c < cand.size(); ++c) {
                    cost[c] += len * dist_to[c][m];
                }
            }
            if (!is_vertex[l]) {
                continue;
            }
            const double span = t[l] - t[k];
            const bool admissible = binary ? (span_at_least(span, 2.0 * gamma) && (l - k) % 2 == 1)
                                           : span_at_least(span, gamma);
            if (!admissible) {
                continue;
            }
            std::size_t chosen = 0;
            if (k == 0 && l == n + 1) {
                // Constant candidate; finite only when f starts and ends alike.
                if (d(s[0], s[n]) > 0.0) {
                    continue;
                }
                chosen = s_idx[0];
            } else if (k == 0) {
                chosen = s_idx[0];
            } else if (l == n + 1) {
                chosen = s_idx[n];
            } else if (binary) {
                // Jump directions are forced: g takes the state f jumps to at t_k.
                chosen = s_idx[k];
            } else {
                for (std::size_t c = 1; c < cand.size(); ++c) {
                    if (cost[c] < cost[chosen]) {
                        chosen = c;
                    }
                }
            }
            const double penalty = l == n + 1 ? 0.0 : gamma;
            ProjectionArc arc{position[k], position[l], cost[chosen] + penalty, cand[chosen], {}};
            if (!binary && k != 0 && l != n + 1) {
                for (std::size_t c = chosen + 1; c < cand.size(); ++c) {
                    if (costs_equal(cost[c], cost[chosen])) {
                        arc.tied.push_back(cand[c]);
                    }
                }
            }
            g.arcs.push_back(std::move(arc));
        }
    }
    g.first_arc[g.times.size()] = g.arcs.size();
    return g;
}

}  // namespace detail

// Graph for the general case. Expects every finite event of f to be shorter
// than 2*gamma, which split_long_events guarantees for its subproblems.
inline ProjectionGraph build_graph(const StateSequence& f, double gamma, const StateMetric& d = {}) {
    return detail::build_graph_impl(f, gamma, d, false, true);
}

// Parity-restricted graph for two-state sequences. Expects every finite
// event of f to be shorter than 2*gamma.
inline ProjectionGraph build_graph_binary(const StateSequence& f, double gamma,
                                          const StateMetric& d = {}) {
    if (f.states_used().size() > 2) {
        throw std::invalid_argument("binary projection needs a two-state sequence");
    }
    return detail::build_graph_impl(f, gamma, d, true, false);
}

struct GraphPath {
    std::vector<std::size_t> vertices;  // source ... sink
    std::vector<std::size_t> arcs;      // indices into ProjectionGraph::arcs
    double cost = 0.0;

    std::size_t jump_count() const { return vertices.size() - 2; }
};

struct ShortestPaths {
    GraphPath best;
    std::vector<GraphPath> all_optimal;  // filled only on request; best comes first
    bool truncated = false;              // all_optimal hit the cap
};

namespace detail {

inline std::vector<std::size_t> path_to(const std::vector<std::size_t>& pred, std::size_t v) {
    std::vector<std::size_t> out{v};
    while (out.back() != 0) {
        out.push_back(pred[out.back()]);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Dynamic programming over vertices in time order. Among equal-cost paths the
// one with fewer jumps wins, then the lexicographically earliest jump times.
inline ShortestPaths shortest_path(const ProjectionGraph& g, bool all_optimal = false,
                                   std::size_t max_paths = 256) {
    const std::size_t nv = g.vertex_count();
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<double> dist(nv, kInfinity);
    std::vector<std::size_t> hops(nv, 0);
    std::vector<std::size_t> pred(nv, kNone);
    std::vector<std::size_t> pred_arc(nv, kNone);
    dist[0] = 0.0;

    for (std::size_t u = 0; u < nv; ++u) {
        if (!std::isfinite(dist[u])) {
            continue;
        }
        for (std::size_t a = g.first_arc[u]; a < g.first_arc[u + 1]; ++a) {
            const ProjectionArc& arc = g.arcs[a];
            const std::size_t v = arc.to;
            const double c = dist[u] + arc.weight;
            const std::size_t h = hops[u] + (v == g.sink() ? 0 : 1);
            bool better = false;
            if (pred[v] == kNone) {
                better = true;
            } else if (!costs_equal(c, dist[v])) {
                better = c < dist[v];
            } else if (h != hops[v]) {
                better = h < hops[v];
            } else {
                const auto mine = detail::path_to(pred, u);
                const auto theirs = detail::path_to(pred, pred[v]);
                better = std::lexicographical_compare(
                    mine.begin(), mine.end(), theirs.begin(), theirs.end(),
                    [&](std::size_t x, std::size_t y) { return g.times[x] < g.times[y]; });
            }
            if (better) {
                dist[v] = c;
                hops[v] = h;
                pred[v] = u;
                pred_arc[v] = a;
            }
        }
    }
    if (pred[g.sink()] == kNone) {
        throw std::logic_error("projection graph has no path to the sink");
    }

    ShortestPaths out;
    out.best.vertices = detail::path_to(pred, g.sink());
    for (std::size_t i = 1; i < out.best.vertices.size(); ++i) {
        out.best.arcs.push_back(pred_arc[out.best.vertices[i]]);
    }
    out.best.cost = dist[g.sink()];
    if (!all_optimal) {
        return out;
    }

    // Every arc that is tight with respect to the optimal labels.
    std::vector<std::vector<std::size_t>> tight_in(nv);
    for (std::size_t a = 0; a < g.arcs.size(); ++a) {
        const ProjectionArc& arc = g.arcs[a];
        if (std::isfinite(dist[arc.from]) && costs_equal(dist[arc.from] + arc.weight, dist[arc.to])) {
            tight_in[arc.to].push_back(a);
        }
    }

    // Walk tight arcs back from the sink.
    std::vector<std::size_t> stack_arcs;
    auto walk = [&](auto&& self, std::size_t v) -> void {
        if (out.all_optimal.size() >= max_paths) {
            out.truncated = true;
            return;
        }
        if (v == 0) {
            GraphPath p;
            p.vertices.push_back(0);
            for (auto it = stack_arcs.rbegin(); it != stack_arcs.rend(); ++it) {
                p.arcs.push_back(*it);
                p.vertices.push_back(g.arcs[*it].to);
            }
            p.cost = 0.0;
            for (std::size_t a : p.arcs) {
                p.cost += g.arcs[a].weight;
            }
            out.all_optimal.push_back(std::move(p));
            return;
        }
        for (std::size_t a : tight_in[v]) {
            stack_arcs.push_back(a);
            self(self, g.arcs[a].from);
            stack_arcs.pop_back();
        }
    };
    walk(walk, g.sink());

    auto key_less = [&](const GraphPath& x, const GraphPath& y) {
        if (x.vertices.size() != y.vertices.size()) {
            return x.vertices.size() < y.vertices.size();
        }
        return std::lexicographical_compare(
            x.vertices.begin(), x.vertices.end(), y.vertices.begin(), y.vertices.end(),
            [&](std::size_t a, std::size_t b) { return g.times[a] < g.times[b]; });
    };
    std::sort(out.all_optimal.begin(), out.all_optimal.end(), key_less);
    auto same = std::find_if(out.all_optimal.begin(), out.all_optimal.end(),
                             [&](const GraphPath& p) { return p.vertices == out.best.vertices; });
    if (same != out.all_optimal.end()) {
        std::rotate(out.all_optimal.begin(), same, same + 1);
    } else {
        out.all_optimal.insert(out.all_optimal.begin(), out.best);
    }
    return out;
}

// Sequence described by a source-to-sink path.
inline StateSequence path_sequence(const ProjectionGraph& g, const GraphPath& p) {
    std::vector<Jump> jumps;
    jumps.reserve(p.arcs.size());
    for (std::size_t i = 1; i < p.arcs.size(); ++i) {
        const ProjectionArc& arc = g.arcs[p.arcs[i]];
        jumps.push_back({g.times[arc.from], arc.state});
    }
    return StateSequence(g.arcs[p.arcs.front()].state, std::move(jumps));
}

// Every sequence a path describes when tied segment values are swapped in.
// Choices that repeat a state across a jump are skipped; they cannot be
// optimal. At most `limit` sequences are returned.
inline std::vector<StateSequence> path_sequences(const ProjectionGraph& g, const GraphPath& p,
                                                 std::size_t limit, bool* truncated = nullptr) {
    std::vector<StateSequence> out;
    std::vector<State> values(p.arcs.size());
    auto walk = [&](auto&& self, std::size_t i) -> void {
        if (out.size() >= limit) {
            if (truncated) *truncated = true;
            return;
        }
        if (i == p.arcs.size()) {
            std::vector<Jump> jumps;
            for (std::size_t k = 1; k < p.arcs.size(); ++k) {
                jumps.push_back({g.times[g.arcs[p.arcs[k]].from], values[k]});
            }
            out.emplace_back(values.front(), std::move(jumps));
            return;
        }
        const ProjectionArc& arc = g.arcs[p.arcs[i]];
        auto attempt = [&](State s) {
            if (i > 0 && values[i - 1] == s) return;
            values[i] = s;
            self(self, i + 1);
        };
        attempt(arc.state);
        for (State s : arc.tied) attempt(s);
    };
    walk(walk, 0);
    return out;
}

struct ProjectionOptions {
    bool binary = false;        // parity-restricted graph; needs a two-state input
    bool all_optimal = false;   // enumerate every optimal projection
    std::size_t max_optimal = 256;
};

struct SubproblemSpan {
    double begin = 0.0;  // first jump of the run
    double end = 0.0;    // last jump of the run
    std::size_t jump_count = 0;
};

struct ProjectionResult {
    StateSequence projected;
    double cost = 0.0;  // E_gamma(f, projected)
    std::vector<StateSequence> optimal;  // all optima when requested; projected first
    bool optimal_truncated = false;
    std::vector<SubproblemSpan> subproblems;
};

inline ProjectionResult project(const StateSequence& f, double gamma, const StateMetric& d = {},
                                const ProjectionOptions& options = {}) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be nonnegative and finite");
    }
    if (options.binary && f.states_used().size() > 2) {
        throw std::invalid_argument("binary projection needs a two-state sequence");
    }
    ProjectionResult result;
    if (gamma == 0.0) {
        result.projected = f;
        result.cost = 0.0;
        if (options.all_optimal) {
            result.optimal.push_back(f);
        }
        return result;
    }

    const auto subs = split_long_events(f, gamma, d, !options.all_optimal);
    const auto& jumps = f.jumps();

    // Per-subproblem optimal jump lists; index 0 is the primary choice.
    std::vector<std::vector<std::vector<Jump>>> choices;
    choices.reserve(subs.size());
    double cost = 0.0;
    for (const Subproblem& sub : subs) {
        // Enumerating every optimum needs the unpruned vertex set.
        const ProjectionGraph g = options.binary ? build_graph_binary(sub.sequence, gamma, d)
                                  : options.all_optimal
                                      ? detail::build_graph_impl(sub.sequence, gamma, d, false, false)
                                      : build_graph(sub.sequence, gamma, d);
        const ShortestPaths sp = shortest_path(g, options.all_optimal, options.max_optimal);
        cost += sp.best.cost;
        result.subproblems.push_back({sub.begin(), sub.end(), sub.jump_count()});
        std::vector<std::vector<Jump>> alts;
        if (options.all_optimal) {
            result.optimal_truncated = result.optimal_truncated || sp.truncated;
            for (const GraphPath& p : sp.all_optimal) {
                bool cut = false;
                for (const StateSequence& seq : path_sequences(g, p, options.max_optimal, &cut)) {
                    alts.push_back(seq.jumps());
                }
                result.optimal_truncated = result.optimal_truncated || cut;
            }
        } else {
            alts.push_back(path_sequence(g, sp.best).jumps());
        }
        choices.push_back(std::move(alts));
    }

    // Jumps between two adjacent frozen events cost gamma each and are kept.
    std::vector<bool> in_sub(jumps.size(), false);
    for (const Subproblem& sub : subs) {
        for (std::size_t i = 0; i < sub.jump_count(); ++i) {
            in_sub[sub.first_jump + i] = true;
        }
    }
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        if (!in_sub[i]) {
            cost += gamma;
        }
    }

    auto assemble = [&](const std::vector<std::size_t>& pick) {
        std::vector<Jump> out;
        out.reserve(jumps.size());
        std::size_t next_sub = 0;
        for (std::size_t i = 0; i < jumps.size();) {
            if (next_sub < subs.size() && subs[next_sub].first_jump == i) {
                const auto& part = choices[next_sub][pick[next_sub]];
                out.insert(out.end(), part.begin(), part.end());
                i += subs[next_sub].jump_count();
                ++next_sub;
            } else {
                out.push_back(jumps[i]);
                ++i;
            }
        }
        return StateSequence(f.initial_state(), std::move(out));
    };

    std::vector<std::size_t> pick(subs.size(), 0);
    result.projected = assemble(pick);
    result.cost = cost;
    if (options.all_optimal) {
        // Cartesian product of the per-subproblem optima.
        while (true) {
            if (result.optimal.size() >= options.max_optimal) {
                result.optimal_truncated = true;
                break;
            }
            result.optimal.push_back(assemble(pick));
            std::size_t k = 0;
            for (; k < pick.size(); ++k) {
                if (++pick[k] < choices[k].size()) {
                    break;
                }
                pick[k] = 0;
            }
            if (k == pick.size()) {
                break;
            }
        }
    }
    return result;
}

}  // namespace stateproj
