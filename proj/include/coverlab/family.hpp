#pragma once

#include <map>
#include <string>
#include <vector>

#include "coverlab/mdp.hpp"

namespace coverlab {

using LayerTable = std::vector<double>;        // f_h(x,a), layout x*A+a
using MemberTables = std::vector<LayerTable>;  // one table per layer

/// Finite set of candidate Q-functions. Each member is one [0,1]-valued table
/// per layer; the (virtual) table past the last layer is identically zero.
/// Per-layer component sets back the "min over candidate layer tables" step
/// of the confidence-set losses; when not supplied they default to the
/// distinct layer tables appearing among the members, i.e. the smallest
/// product family containing the members.
struct ValueFunctionFamily {
    int horizon = 0;
    int num_actions = 0;
    std::vector<MemberTables> members;
    std::vector<std::vector<LayerTable>> components;   // [h][k]
    std::vector<std::vector<int>> member_component;    // [m][h] -> k

    size_t size() const { return members.size(); }
};

/// Deduplicates member layer tables into component sets (exact comparison;
/// members are constructed, not measured). Supplied component sets are kept
/// and member tables are matched into them.
inline void build_components(ValueFunctionFamily& fam, double match_tol = 1e-12) {
    bool supplied = !fam.components.empty();
    if (!supplied) fam.components.assign(fam.horizon, {});
    fam.member_component.assign(fam.members.size(), std::vector<int>(fam.horizon, -1));
    for (size_t mi = 0; mi < fam.members.size(); ++mi)
        for (int h = 0; h < fam.horizon; ++h) {
            const auto& table = fam.members[mi][h];
            int found = -1;
            for (size_t k = 0; k < fam.components[h].size(); ++k)
                if (linf_distance(fam.components[h][k], table) <= match_tol) {
                    found = static_cast<int>(k);
                    break;
                }
            if (found < 0) {
                if (supplied)
                    throw std::runtime_error("member table missing from supplied components at layer " +
                                             std::to_string(h));
                fam.components[h].push_back(table);
                found = static_cast<int>(fam.components[h].size()) - 1;
            }
            fam.member_component[mi][h] = found;
        }
}

inline ValueFunctionFamily make_family(const LayeredMdp& m, std::vector<MemberTables> members,
                                       std::vector<std::vector<LayerTable>> components = {}) {
    ValueFunctionFamily fam;
    fam.horizon = m.horizon;
    fam.num_actions = m.num_actions;
    fam.members = std::move(members);
    fam.components = std::move(components);
    build_components(fam);
    return fam;
}

/// One-step backup of a layer-(h+1) table: reward plus expected next-layer
/// max, or the expectation alone when with_reward is false. An empty next
/// table is the zero function (the convention past the last layer).
inline LayerTable bellman_backup(const LayeredMdp& m, const LayerTable& next_table, int h,
                                 bool with_reward = true) {
    LayerTable out(m.cells(h), 0.0);
    std::vector<double> next_max;
    if (h + 1 < m.horizon && !next_table.empty()) {
        int n_next = m.layer_size(h + 1);
        next_max.assign(n_next, 0.0);
        for (int y = 0; y < n_next; ++y) {
            double best = next_table[m.cell(y, 0)];
            for (int a = 1; a < m.num_actions; ++a)
                best = std::max(best, next_table[m.cell(y, a)]);
            next_max[y] = best;
        }
    }
    for (int x = 0; x < m.layer_size(h); ++x)
        for (int a = 0; a < m.num_actions; ++a) {
            double v = with_reward ? m.reward(h, x, a) : 0.0;
            if (!next_max.empty()) {
                const auto& row = m.row(h, x, a);
                for (int y = 0; y < static_cast<int>(row.size()); ++y) v += row[y] * next_max[y];
            }
            out[m.cell(x, a)] = v;
        }
    return out;
}

/// Residual tables delta_h = f_h - backup(f_{h+1}); with_reward=false gives
/// the zero-reward variant used by exploration losses.
inline MemberTables residual_tables(const LayeredMdp& m, const MemberTables& f,
                                    bool with_reward = true) {
    MemberTables delta(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        LayerTable backed = bellman_backup(m, h + 1 < m.horizon ? f[h + 1] : LayerTable{}, h, with_reward);
        delta[h].resize(m.cells(h));
        for (int c = 0; c < m.cells(h); ++c) delta[h][c] = f[h][c] - backed[c];
    }
    return delta;
}

inline int argmax_action(const LayeredMdp& m, const LayerTable& table, int x) {
    int best_a = 0;
    double best = table[m.cell(x, 0)];
    for (int a = 1; a < m.num_actions; ++a)
        if (table[m.cell(x, a)] > best) {
            best = table[m.cell(x, a)];
            best_a = a;
        }
    return best_a;
}

/// Deterministic greedy policy of a member; least action index wins ties.
inline Policy greedy_policy(const LayeredMdp& m, const MemberTables& f) {
    std::vector<std::vector<int>> act(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        act[h].resize(m.layer_size(h));
        for (int x = 0; x < m.layer_size(h); ++x) act[h][x] = argmax_action(m, f[h], x);
    }
    return make_deterministic_policy(m, act);
}

/// f_0(x_init, a_greedy): the member's claimed total reward.
inline double optimistic_value(const LayeredMdp& m, const MemberTables& f) {
    return f[0][m.cell(m.initial_state, argmax_action(m, f[0], m.initial_state))];
}

struct RealizabilityReport {
    bool realizable = false;
    int nearest_member = -1;
    double nearest_distance = 0.0;
};

/// True iff some member matches the optimal Q-function within tol in sup norm.
inline RealizabilityReport check_realizability(const LayeredMdp& m, const ValueFunctionFamily& fam,
                                               double tol = 1e-9) {
    OptimalValues opt = optimal_values(m);
    RealizabilityReport rep;
    rep.nearest_distance = std::numeric_limits<double>::infinity();
    for (size_t mi = 0; mi < fam.members.size(); ++mi) {
        double dist = 0.0;
        for (int h = 0; h < m.horizon; ++h)
            dist = std::max(dist, linf_distance(fam.members[mi][h], opt.q[h]));
        if (dist < rep.nearest_distance) {
            rep.nearest_distance = dist;
            rep.nearest_member = static_cast<int>(mi);
        }
    }
    rep.realizable = rep.nearest_distance <= tol;
    return rep;
}

struct CompletenessViolation {
    int member = -1;
    int layer = -1;
    double distance = 0.0;
};

struct CompletenessReport {
    bool complete = true;
    std::vector<CompletenessViolation> violations;
};

/// Checks closure under backups: for every member and layer h, the exact
/// backup of the member's layer-(h+1) table must match some layer-h component
/// within tol in sup norm. Floating-point backups force the tolerance; the
/// families built here satisfy closure exactly.
inline CompletenessReport check_completeness(const LayeredMdp& m, const ValueFunctionFamily& fam,
                                             double tol = 1e-9) {
    CompletenessReport rep;
    for (size_t mi = 0; mi < fam.members.size(); ++mi)
        for (int h = 0; h < m.horizon; ++h) {
            LayerTable backed = bellman_backup(
                m, h + 1 < m.horizon ? fam.members[mi][h + 1] : LayerTable{}, h, true);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& comp : fam.components[h])
                best = std::min(best, linf_distance(comp, backed));
            if (best > tol) {
                rep.complete = false;
                rep.violations.push_back({static_cast<int>(mi), h, best});
            }
        }
    return rep;
}

struct RfCompletenessReport {
    bool ok = true;
    // part (a): zero-reward backups of exploration members stay in the class
    std::vector<CompletenessViolation> backup_violations;
    // part (b): every target-reward residual of F matches some zero-reward
    // residual of G
    std::vector<CompletenessViolation> residual_violations;
};

/// Two-part condition coupling the exploitation class F with the exploration
/// class G: (a) G is closed under zero-reward backups; (b) per layer, every
/// target-reward residual of F appears among the zero-reward residuals of G.
inline RfCompletenessReport check_rf_completeness(const LayeredMdp& m,
                                                  const ValueFunctionFamily& f_family,
                                                  const ValueFunctionFamily& g_family,
                                                  double tol = 1e-9) {
    RfCompletenessReport rep;
    for (size_t gi = 0; gi < g_family.members.size(); ++gi)
        for (int h = 0; h < m.horizon; ++h) {
            LayerTable backed = bellman_backup(
                m, h + 1 < m.horizon ? g_family.members[gi][h + 1] : LayerTable{}, h, false);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& comp : g_family.components[h])
                best = std::min(best, linf_distance(comp, backed));
            if (best > tol) {
                rep.ok = false;
                rep.backup_violations.push_back({static_cast<int>(gi), h, best});
            }
        }

    std::vector<MemberTables> g_residuals;
    g_residuals.reserve(g_family.members.size());
    for (const auto& g : g_family.members) g_residuals.push_back(residual_tables(m, g, false));
    for (size_t fi = 0; fi < f_family.members.size(); ++fi) {
        MemberTables delta = residual_tables(m, f_family.members[fi], true);
        for (int h = 0; h < m.horizon; ++h) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& gr : g_residuals) best = std::min(best, linf_distance(delta[h], gr[h]));
            if (best > tol) {
                rep.ok = false;
                rep.residual_violations.push_back({static_cast<int>(fi), h, best});
            }
        }
    }
    return rep;
}

}  // namespace coverlab
