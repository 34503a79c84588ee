#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "coverlab/common.hpp"

namespace coverlab {

/// Finite layered episodic MDP. Layer h (0-based, h < H) has its own state
/// set; transitions from layer h land in layer h+1, and the final layer feeds
/// an implicit zero-reward terminal sink. States carry string labels for I/O;
/// all computation runs on dense integer indices. Rewards are deterministic
/// tables in [0,1], normalized so every trajectory's total reward lies in
/// [0,1]. Immutable after construction by convention.
struct LayeredMdp {
    int horizon = 0;      // H
    int num_actions = 0;  // A, shared across layers
    std::vector<std::vector<std::string>> state_labels;  // [h][x]
    std::vector<std::string> action_labels;
    // transitions[h][x*A+a] = dense distribution over layer h+1 states;
    // empty for h == H-1 (terminal sink).
    std::vector<std::vector<std::vector<double>>> transitions;
    // rewards[h][x*A+a]
    std::vector<std::vector<double>> rewards;
    int initial_state = 0;  // index into layer 0

    int layer_size(int h) const { return static_cast<int>(state_labels[h].size()); }
    int cells(int h) const { return layer_size(h) * num_actions; }
    int cell(int x, int a) const { return x * num_actions + a; }
    double reward(int h, int x, int a) const { return rewards[h][cell(x, a)]; }
    const std::vector<double>& row(int h, int x, int a) const {
        return transitions[h][cell(x, a)];
    }

};

/// Builds an MDP skeleton with default labels; transition rows start empty
/// and reward tables start at zero.
inline LayeredMdp make_mdp(const std::vector<int>& states_per_layer, int num_actions) {
    LayeredMdp m;
    m.horizon = static_cast<int>(states_per_layer.size());
    m.num_actions = num_actions;
    m.state_labels.resize(m.horizon);
    m.transitions.resize(m.horizon);
    m.rewards.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        int n = states_per_layer[h];
        for (int x = 0; x < n; ++x)
            m.state_labels[h].push_back("h" + std::to_string(h) + "_s" + std::to_string(x));
        int next = h + 1 < m.horizon ? states_per_layer[h + 1] : 0;
        m.transitions[h].assign(static_cast<size_t>(n) * num_actions,
                                std::vector<double>(next, 0.0));
        if (h + 1 == m.horizon)
            for (auto& row : m.transitions[h]) row.clear();
        m.rewards[h].assign(static_cast<size_t>(n) * num_actions, 0.0);
    }
    for (int a = 0; a < num_actions; ++a) m.action_labels.push_back("a" + std::to_string(a));
    return m;
}

/// Per-layer action distributions. Deterministic policies carry one-hot rows
/// plus an explicit action table.
struct Policy {
    bool deterministic = true;
    std::vector<std::vector<int>> action;     // [h][x], valid when deterministic
    std::vector<std::vector<double>> probs;   // [h][x*A+a], always populated

    double prob(const LayeredMdp& m, int h, int x, int a) const {
        return probs[h][m.cell(x, a)];
    }
};

inline Policy make_deterministic_policy(const LayeredMdp& m,
                                        const std::vector<std::vector<int>>& actions) {
    Policy p;
    p.deterministic = true;
    p.action = actions;
    p.probs.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        p.probs[h].assign(m.cells(h), 0.0);
        for (int x = 0; x < m.layer_size(h); ++x) p.probs[h][m.cell(x, actions[h][x])] = 1.0;
    }
    return p;
}

inline Policy make_uniform_policy(const LayeredMdp& m) {
    Policy p;
    p.deterministic = false;
    p.probs.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h)
        p.probs[h].assign(m.cells(h), 1.0 / m.num_actions);
    return p;
}

struct TrajectoryStep {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;  // index into layer h+1; 0 denotes the sink after the last layer
};
using Trajectory = std::vector<TrajectoryStep>;

/// Exact per-layer visitation table d_h(x,a) with state marginals.
struct OccupancyMeasure {
    std::vector<std::vector<double>> cell;   // [h][x*A+a]
    std::vector<std::vector<double>> state;  // [h][x]
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(const std::string& msg) {
        ok = false;
        violations.push_back(msg);
    }
};

namespace detail {
inline std::string coord(int h, int x, int a) {
    std::ostringstream os;
    os << "(h=" << h << ",x=" << x << ",a=" << a << ")";
    return os.str();
}
}  // namespace detail

/// Structural and probabilistic validation: tensor shapes, row sums within
/// 1e-12, rewards in [0,1], and the normalization bound (max/min cumulative
/// reward from the initial state within [0,1], checked by dynamic
/// programming).
inline ValidationReport validate(const LayeredMdp& m) {
    ValidationReport rep;
    if (m.horizon <= 0) { rep.fail("horizon must be positive"); return rep; }
    if (m.num_actions <= 0) { rep.fail("action set must be nonempty"); return rep; }
    if (static_cast<int>(m.state_labels.size()) != m.horizon ||
        static_cast<int>(m.transitions.size()) != m.horizon ||
        static_cast<int>(m.rewards.size()) != m.horizon) {
        rep.fail("layer count mismatch between labels/transitions/rewards");
        return rep;
    }
    for (int h = 0; h < m.horizon; ++h) {
        int n = m.layer_size(h);
        if (n <= 0) { rep.fail("empty layer " + std::to_string(h)); return rep; }
        if (static_cast<int>(m.transitions[h].size()) != m.cells(h) ||
            static_cast<int>(m.rewards[h].size()) != m.cells(h)) {
            rep.fail("table shape mismatch at layer " + std::to_string(h));
            return rep;
        }
        int next = h + 1 < m.horizon ? m.layer_size(h + 1) : 0;
        for (int x = 0; x < n; ++x)
            for (int a = 0; a < m.num_actions; ++a) {
                const auto& row = m.row(h, x, a);
                if (h + 1 < m.horizon) {
                    if (static_cast<int>(row.size()) != next) {
                        rep.fail("transition row shape at " + detail::coord(h, x, a));
                        continue;
                    }
                    double s = 0.0;
                    for (double p : row) {
                        if (p < 0.0) rep.fail("negative probability at " + detail::coord(h, x, a));
                        s += p;
                    }
                    if (!close(s, 1.0, kRowSumTol))
                        rep.fail("row sum " + format_double(s) + " at " + detail::coord(h, x, a));
                } else if (!row.empty()) {
                    rep.fail("final layer must transition to the sink at " + detail::coord(h, x, a));
                }
                double r = m.reward(h, x, a);
                if (r < -kRowSumTol || r > 1.0 + kRowSumTol)
                    rep.fail("reward " + format_double(r) + " out of [0,1] at " + detail::coord(h, x, a));
            }
    }
    if (m.initial_state < 0 || m.initial_state >= m.layer_size(0)) {
        rep.fail("initial state out of range");
        return rep;
    }
    if (!rep.ok) return rep;

    // cumulative-reward normalization, by backward DP for max and min
    for (bool maximize : {true, false}) {
        std::vector<double> next_val;  // over layer h+1 states
        for (int h = m.horizon - 1; h >= 0; --h) {
            std::vector<double> val(m.layer_size(h), 0.0);
            for (int x = 0; x < m.layer_size(h); ++x) {
                double best = maximize ? -1e300 : 1e300;
                for (int a = 0; a < m.num_actions; ++a) {
                    double q = m.reward(h, x, a);
                    if (h + 1 < m.horizon) {
                        const auto& row = m.row(h, x, a);
                        for (int y = 0; y < static_cast<int>(row.size()); ++y)
                            q += row[y] * next_val[y];
                    }
                    best = maximize ? std::max(best, q) : std::min(best, q);
                }
                val[x] = best;
            }
            next_val = std::move(val);
        }
        double v0 = next_val[m.initial_state];
        if (maximize && v0 > 1.0 + kDpTol)
            rep.fail("max cumulative reward " + format_double(v0) + " exceeds 1");
        if (!maximize && v0 < -kDpTol)
            rep.fail("min cumulative reward " + format_double(v0) + " below 0");
    }
    return rep;
}

/// Forward recursion: d_0 is a point mass at the initial state,
/// d_h(x,a) = d_h(x) pi_h(a|x), d_{h+1}(x') = sum_{x,a} d_h(x,a) P_h(x'|x,a).
inline OccupancyMeasure occupancy(const LayeredMdp& m, const Policy& pi) {
    OccupancyMeasure d;
    d.cell.resize(m.horizon);
    d.state.resize(m.horizon);
    std::vector<double> cur(m.layer_size(0), 0.0);
    cur[m.initial_state] = 1.0;
    for (int h = 0; h < m.horizon; ++h) {
        d.state[h] = cur;
        d.cell[h].assign(m.cells(h), 0.0);
        for (int x = 0; x < m.layer_size(h); ++x)
            for (int a = 0; a < m.num_actions; ++a)
                d.cell[h][m.cell(x, a)] = cur[x] * pi.probs[h][m.cell(x, a)];
        if (h + 1 < m.horizon) {
            std::vector<double> nxt(m.layer_size(h + 1), 0.0);
            for (int x = 0; x < m.layer_size(h); ++x)
                for (int a = 0; a < m.num_actions; ++a) {
                    double w = d.cell[h][m.cell(x, a)];
                    if (w == 0.0) continue;
                    const auto& row = m.row(h, x, a);
                    for (int y = 0; y < static_cast<int>(row.size()); ++y) nxt[y] += w * row[y];
                }
            cur = std::move(nxt);
        }
    }
    return d;
}

struct PolicyEvaluation {
    double total = 0.0;                   // J(pi)
    std::vector<std::vector<double>> v;   // [h][x]
    std::vector<std::vector<double>> q;   // [h][x*A+a]
};

/// Backward recursion for V^pi / Q^pi; J(pi) = V_0(initial).
inline PolicyEvaluation policy_value(const LayeredMdp& m, const Policy& pi) {
    PolicyEvaluation ev;
    ev.v.resize(m.horizon);
    ev.q.resize(m.horizon);
    std::vector<double> next_v;
    for (int h = m.horizon - 1; h >= 0; --h) {
        ev.q[h].assign(m.cells(h), 0.0);
        ev.v[h].assign(m.layer_size(h), 0.0);
        for (int x = 0; x < m.layer_size(h); ++x) {
            double vx = 0.0;
            for (int a = 0; a < m.num_actions; ++a) {
                double q = m.reward(h, x, a);
                if (h + 1 < m.horizon) {
                    const auto& row = m.row(h, x, a);
                    for (int y = 0; y < static_cast<int>(row.size()); ++y)
                        q += row[y] * next_v[y];
                }
                ev.q[h][m.cell(x, a)] = q;
                vx += pi.probs[h][m.cell(x, a)] * q;
            }
            ev.v[h][x] = vx;
        }
        next_v = ev.v[h];
    }
    ev.total = ev.v[0][m.initial_state];
    return ev;
}

struct OptimalValues {
    double value = 0.0;                   // J(pi*)
    std::vector<std::vector<double>> q;   // [h][x*A+a]
    std::vector<std::vector<double>> v;   // [h][x]
    Policy greedy;                        // least-index tie-breaking
};

/// Backward induction with max over actions; ties broken toward the least
/// action index so replays are deterministic.
inline OptimalValues optimal_values(const LayeredMdp& m) {
    OptimalValues out;
    out.q.resize(m.horizon);
    out.v.resize(m.horizon);
    std::vector<std::vector<int>> act(m.horizon);
    std::vector<double> next_v;
    for (int h = m.horizon - 1; h >= 0; --h) {
        out.q[h].assign(m.cells(h), 0.0);
        out.v[h].assign(m.layer_size(h), 0.0);
        act[h].assign(m.layer_size(h), 0);
        for (int x = 0; x < m.layer_size(h); ++x) {
            double best = -1e300;
            int best_a = 0;
            for (int a = 0; a < m.num_actions; ++a) {
                double q = m.reward(h, x, a);
                if (h + 1 < m.horizon) {
                    const auto& row = m.row(h, x, a);
                    for (int y = 0; y < static_cast<int>(row.size()); ++y)
                        q += row[y] * next_v[y];
                }
                out.q[h][m.cell(x, a)] = q;
                if (q > best) { best = q; best_a = a; }
            }
            out.v[h][x] = best;
            act[h][x] = best_a;
        }
        next_v = out.v[h];
    }
    out.value = out.v[0][m.initial_state];
    out.greedy = make_deterministic_policy(m, act);
    return out;
}

/// Best achievable probability over Markov policies of occupying state x at
/// layer h. With an action argument the value is unchanged: the maximizing
/// policy simply plays that action upon arrival.
inline double max_reach(const LayeredMdp& m, int h, int x) {
    std::vector<double> val(m.layer_size(h), 0.0);
    val[x] = 1.0;
    for (int g = h - 1; g >= 0; --g) {
        std::vector<double> prev(m.layer_size(g), 0.0);
        for (int y = 0; y < m.layer_size(g); ++y) {
            double best = 0.0;
            for (int a = 0; a < m.num_actions; ++a) {
                const auto& row = m.row(g, y, a);
                double p = 0.0;
                for (int z = 0; z < static_cast<int>(row.size()); ++z) p += row[z] * val[z];
                best = std::max(best, p);
            }
            prev[y] = best;
        }
        val = std::move(prev);
    }
    return val[m.initial_state];
}

inline double max_reach(const LayeredMdp& m, int h, int x, int /*a*/) {
    return max_reach(m, h, x);
}

/// One seeded episode. Rewards are read from the deterministic table, so the
/// trajectory depends on the seed only through transitions and randomized
/// action draws.
inline Trajectory sample_trajectory(const LayeredMdp& m, const Policy& pi, Rng& rng) {
    Trajectory traj;
    traj.reserve(m.horizon);
    int x = m.initial_state;
    for (int h = 0; h < m.horizon; ++h) {
        int a;
        if (pi.deterministic) {
            a = pi.action[h][x];
        } else {
            std::vector<double> w(m.num_actions);
            for (int k = 0; k < m.num_actions; ++k) w[k] = pi.probs[h][m.cell(x, k)];
            a = rng.categorical(w);
        }
        TrajectoryStep step;
        step.state = x;
        step.action = a;
        step.reward = m.reward(h, x, a);
        step.next_state = h + 1 < m.horizon ? rng.categorical(m.row(h, x, a)) : 0;
        traj.push_back(step);
        x = step.next_state;
    }
    return traj;
}

inline Trajectory sample_trajectory(const LayeredMdp& m, const Policy& pi, std::uint64_t seed) {
    Rng rng(seed);
    return sample_trajectory(m, pi, rng);
}

}  // namespace coverlab
