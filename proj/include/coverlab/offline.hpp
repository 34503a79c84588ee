#pragma once

#include <cstdint>
#include <vector>

#include "coverlab/coverage.hpp"
#include "coverlab/golf.hpp"

namespace coverlab {

/// Logged dataset: per layer, n i.i.d. draws (x,a) from the logging
/// distribution with the exact table reward and a sampled successor.
struct OfflineDataset {
    std::vector<std::vector<DataTuple>> layers;
    std::uint64_t seed = 0;
    DistributionFamily mu;
};

inline OfflineDataset generate_offline(const LayeredMdp& m, const DistributionFamily& mu, int n,
                                       std::uint64_t seed) {
    OfflineDataset ds;
    ds.seed = seed;
    ds.mu = mu;
    ds.layers.resize(m.horizon);
    Rng rng(seed);
    for (int h = 0; h < m.horizon; ++h) {
        ds.layers[h].reserve(n);
        for (int i = 0; i < n; ++i) {
            int cell = rng.categorical(mu.mu[h]);
            int x = cell / m.num_actions, a = cell % m.num_actions;
            DataTuple tup;
            tup.state = x;
            tup.action = a;
            tup.reward = m.reward(h, x, a);
            tup.next_state = h + 1 < m.horizon ? rng.categorical(m.row(h, x, a)) : 0;
            ds.layers[h].push_back(tup);
        }
    }
    return ds;
}

struct OfflineFit {
    int chosen = -1;                    // member index (squared-gap minimizer)
    double objective = 0.0;
    Policy policy;
    MemberTables tables;                // the selected/assembled value function
    std::vector<int> component_choice;  // per layer, for the backward fit
    std::vector<int> empty_layers;      // layers with no data (flagged, not fatal)
};

/// Squared-loss gap minimizer over whole members: for each member, sum over
/// layers of (its loss) minus (the best component loss against the same
/// next-layer table); least index wins ties.
inline OfflineFit msbo(const LayeredMdp& m, const ValueFunctionFamily& fam,
                       const OfflineDataset& data) {
    LossCache cache(m, fam, true);
    cache.recompute(data.layers);
    OfflineFit out;
    double best = std::numeric_limits<double>::infinity();
    for (size_t mi = 0; mi < fam.members.size(); ++mi) {
        double gap = 0.0;
        for (int h = 0; h < m.horizon; ++h) {
            int i = fam.member_component[mi][h];
            int j = h + 1 < m.horizon ? fam.member_component[mi][h + 1] : 0;
            gap += cache.loss(h, i, j) - cache.min_loss(h, j);
        }
        if (gap < best) {
            best = gap;
            out.chosen = static_cast<int>(mi);
        }
    }
    out.objective = best;
    out.tables = fam.members[out.chosen];
    out.policy = greedy_policy(m, out.tables);
    return out;
}

/// Backward fitted iteration: per layer, pick the component minimizing the
/// squared regression loss against reward plus the greedy value of the table
/// fitted one layer later; least index wins ties. A layer with no data keeps
/// the least-index component and is flagged.
inline OfflineFit fqi(const LayeredMdp& m, const ValueFunctionFamily& fam,
                      const OfflineDataset& data) {
    OfflineFit out;
    out.component_choice.assign(m.horizon, 0);
    out.tables.resize(m.horizon);
    LayerTable next_fit;  // fitted table at layer h+1
    for (int h = m.horizon - 1; h >= 0; --h) {
        if (data.layers[h].empty()) out.empty_layers.push_back(h);
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (size_t k = 0; k < fam.components[h].size(); ++k) {
            double loss =
                squared_bellman_loss(m, data.layers[h], fam.components[h][k], next_fit, h, true);
            if (loss < best) {
                best = loss;
                best_k = static_cast<int>(k);
            }
        }
        out.component_choice[h] = best_k;
        out.tables[h] = fam.components[h][best_k];
        out.objective += best;
        next_fit = out.tables[h];
    }
    out.policy = greedy_policy(m, out.tables);
    return out;
}

}  // namespace coverlab
