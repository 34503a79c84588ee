#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coverlab/golf.hpp"

namespace coverlab {

struct RfConfig {
    int rounds = 0;
    double beta_rf = 0.0;
    std::uint64_t seed = 0;
};

struct RfRound {
    int chosen = -1;
    double explored_value = 0.0;  // g^(t)(x_init, greedy action): residual mass still claimed
    int set_size = 0;
};

/// Everything the offline phase is allowed to see: (x, a, x') triples per
/// layer, plus the index of the selected stopping round. Rewards never enter
/// this phase. The offline phase reads the data gathered strictly before the
/// stopping round.
struct ExplorationOutput {
    std::vector<RfRound> rounds;
    std::vector<std::vector<DataTuple>> datasets;  // reward field fixed at 0
    int t_star = 0;                                // 1-based; least round attaining the min value
    bool aborted = false;
    std::string abort_reason;

    std::vector<std::vector<DataTuple>> exploitation_data() const {
        std::vector<std::vector<DataTuple>> out(datasets.size());
        size_t keep = static_cast<size_t>(std::max(0, t_star - 1));
        for (size_t h = 0; h < datasets.size(); ++h)
            out[h].assign(datasets[h].begin(),
                          datasets[h].begin() + std::min(keep, datasets[h].size()));
        return out;
    }
};

/// Optimistic exploration with rewards withheld: the same loop as the online
/// algorithm but with the zero-reward backup inside the loss, data stored as
/// (x, a, x') triples, and the stopping round chosen as the first round whose
/// selected member claims the least initial value.
inline ExplorationOutput rf_explore(const LayeredMdp& m, const ValueFunctionFamily& g_family,
                                    const RfConfig& cfg) {
    ExplorationOutput out;
    out.datasets.resize(m.horizon);

    std::vector<Policy> greedy(g_family.members.size());
    std::vector<double> claimed(g_family.members.size());
    for (size_t gi = 0; gi < g_family.members.size(); ++gi) {
        greedy[gi] = greedy_policy(m, g_family.members[gi]);
        claimed[gi] = optimistic_value(m, g_family.members[gi]);
    }

    LossCache cache(m, g_family, false);
    std::vector<int> survivors(g_family.members.size());
    for (size_t i = 0; i < survivors.size(); ++i) survivors[i] = static_cast<int>(i);

    Rng rng(cfg.seed);
    for (int t = 1; t <= cfg.rounds; ++t) {
        if (survivors.empty()) {
            out.aborted = true;
            out.abort_reason = "exploration confidence set empty at round " + std::to_string(t);
            break;
        }
        int chosen = survivors[0];
        for (int gi : survivors)
            if (claimed[gi] > claimed[chosen]) chosen = gi;

        Trajectory traj = sample_trajectory(m, greedy[chosen], rng);
        for (int h = 0; h < m.horizon; ++h) {
            DataTuple tup{traj[h].state, traj[h].action, 0.0, traj[h].next_state};
            out.datasets[h].push_back(tup);
            cache.add_tuple(h, tup);
        }
        survivors = confidence_set(m, g_family, cache, cfg.beta_rf);
        out.rounds.push_back({chosen, claimed[chosen], static_cast<int>(survivors.size())});
    }

    out.t_star = 1;
    for (size_t t = 1; t < out.rounds.size(); ++t)
        if (out.rounds[t].explored_value < out.rounds[out.t_star - 1].explored_value)
            out.t_star = static_cast<int>(t) + 1;
    return out;
}

struct ExploitResult {
    int chosen = -1;
    Policy policy;
    std::vector<int> surviving;
    bool aborted = false;
    std::string abort_reason;
};

/// Offline selection against a target reward: rebuild squared losses from the
/// exploration triples with the reward table inserted, keep members whose
/// loss gap stays within beta_off at every layer, and return the greedy
/// policy of the most optimistic survivor (least index on ties).
inline ExploitResult rf_exploit(const LayeredMdp& m, const ValueFunctionFamily& f_family,
                                const std::vector<LayerTable>& target_reward,
                                const ExplorationOutput& exploration, double beta_off) {
    std::vector<std::vector<DataTuple>> data = exploration.exploitation_data();
    for (int h = 0; h < m.horizon; ++h)
        for (auto& tup : data[h]) tup.reward = target_reward[h][m.cell(tup.state, tup.action)];

    ExploitResult out;
    out.surviving = confidence_set(m, f_family, data, beta_off, true);
    if (out.surviving.empty()) {
        out.aborted = true;
        out.abort_reason = "offline confidence set empty; beta_off too small";
        return out;
    }
    int chosen = out.surviving[0];
    double best = optimistic_value(m, f_family.members[chosen]);
    for (int fi : out.surviving) {
        double v = optimistic_value(m, f_family.members[fi]);
        if (v > best) {
            best = v;
            chosen = fi;
        }
    }
    out.chosen = chosen;
    out.policy = greedy_policy(m, f_family.members[chosen]);
    return out;
}

/// Backward lift g_h = delta_h + zero-reward-backup(g_{h+1}) of a member's
/// residuals, with g past the last layer identically zero. The lift
/// dominates the member's advantage over its own greedy policy pointwise:
/// g_h(x,a) >= f_h(x,a) - Q_h^{pi_f}(x,a).
inline MemberTables residual_lift(const LayeredMdp& m, const MemberTables& f) {
    MemberTables delta = residual_tables(m, f, true);
    MemberTables g(m.horizon);
    LayerTable next;  // g_{h+1}
    for (int h = m.horizon - 1; h >= 0; --h) {
        LayerTable backed = bellman_backup(m, next, h, false);
        g[h].resize(m.cells(h));
        for (int c = 0; c < m.cells(h); ++c) g[h][c] = delta[h][c] + backed[c];
        next = g[h];
    }
    return g;
}

/// Largest violation of the lift's domination guarantee across all cells
/// (positive means the guarantee failed).
inline double residual_lift_max_violation(const LayeredMdp& m, const MemberTables& f) {
    MemberTables g = residual_lift(m, f);
    PolicyEvaluation ev = policy_value(m, greedy_policy(m, f));
    double worst = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < m.horizon; ++h)
        for (int c = 0; c < m.cells(h); ++c)
            worst = std::max(worst, f[h][c] - ev.q[h][c] - g[h][c]);
    return worst;
}

struct VspaceInclusionReport {
    bool precondition_met = false;  // beta_rf >= 6 beta_off + 18 log(H max(|F|,|G|)/delta)
    double threshold = 0.0;
    bool ok = true;
    std::vector<int> offline_survivors;
    std::vector<int> exploration_survivors;  // members of G surviving on the stopping prefix
    std::vector<int> unmatched;              // offline members with no residual-matching G member
};

/// For every member surviving the offline confidence set, the exploration
/// confidence set at the stopping round must hold a member with identical
/// residuals layerwise (target-reward residual for F, zero-reward residual
/// for G). Violations are findings, not errors; the guarantee is only
/// promised above the beta threshold.
inline VspaceInclusionReport check_rf_vspace_inclusion(
    const LayeredMdp& m, const ValueFunctionFamily& f_family, const ValueFunctionFamily& g_family,
    const std::vector<LayerTable>& target_reward, const ExplorationOutput& exploration,
    double beta_off, double beta_rf, double delta = 0.05, double tol = 1e-9) {
    VspaceInclusionReport rep;
    size_t bigger = std::max(f_family.size(), g_family.size());
    rep.threshold = 6.0 * beta_off + 18.0 * std::log(m.horizon * static_cast<double>(bigger) / delta);
    rep.precondition_met = beta_rf >= rep.threshold - 1e-12;

    std::vector<std::vector<DataTuple>> prefix = exploration.exploitation_data();
    rep.exploration_survivors = confidence_set(m, g_family, prefix, beta_rf, false);

    std::vector<std::vector<DataTuple>> rewarded = prefix;
    for (int h = 0; h < m.horizon; ++h)
        for (auto& tup : rewarded[h]) tup.reward = target_reward[h][m.cell(tup.state, tup.action)];
    rep.offline_survivors = confidence_set(m, f_family, rewarded, beta_off, true);

    std::vector<MemberTables> g_residuals;
    for (int gi : rep.exploration_survivors)
        g_residuals.push_back(residual_tables(m, g_family.members[gi], false));
    for (int fi : rep.offline_survivors) {
        MemberTables delta = residual_tables(m, f_family.members[fi], true);
        bool matched = false;
        for (const auto& gr : g_residuals) {
            double dist = 0.0;
            for (int h = 0; h < m.horizon; ++h)
                dist = std::max(dist, linf_distance(delta[h], gr[h]));
            if (dist <= tol) {
                matched = true;
                break;
            }
        }
        if (!matched) {
            rep.ok = false;
            rep.unmatched.push_back(fi);
        }
    }
    return rep;
}

}  // namespace coverlab
