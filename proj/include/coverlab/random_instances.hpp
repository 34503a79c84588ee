#pragma once

#include <cstdint>
#include <vector>

#include "coverlab/coverage.hpp"
#include "coverlab/family.hpp"
#include "coverlab/mdp.hpp"

namespace coverlab {

/// Random layered MDP with dense stochastic rows and rewards u/H, which keeps
/// every trajectory's total reward inside [0,1].
inline LayeredMdp random_mdp(Rng& rng, const std::vector<int>& states_per_layer, int num_actions) {
    LayeredMdp m = make_mdp(states_per_layer, num_actions);
    for (int h = 0; h < m.horizon; ++h)
        for (int x = 0; x < m.layer_size(h); ++x)
            for (int a = 0; a < num_actions; ++a) {
                m.rewards[h][m.cell(x, a)] = rng.next_double() / m.horizon;
                if (h + 1 == m.horizon) continue;
                auto& row = m.transitions[h][m.cell(x, a)];
                double total = 0.0;
                for (double& p : row) total += (p = 0.02 + rng.next_double());
                for (double& p : row) p /= total;
            }
    return m;
}

/// Random [0,1]-valued members; component sets default to the member tables.
inline ValueFunctionFamily random_family(Rng& rng, const LayeredMdp& m, int members) {
    std::vector<MemberTables> fs;
    for (int k = 0; k < members; ++k) {
        MemberTables f(m.horizon);
        for (int h = 0; h < m.horizon; ++h) {
            f[h].resize(m.cells(h));
            for (double& v : f[h]) v = rng.next_double();
        }
        fs.push_back(std::move(f));
    }
    return make_family(m, std::move(fs));
}

/// Random fully supported logging distributions.
inline DistributionFamily random_mu(Rng& rng, const LayeredMdp& m) {
    DistributionFamily dist;
    dist.mu.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        dist.mu[h].resize(m.cells(h));
        double total = 0.0;
        for (double& v : dist.mu[h]) total += (v = 0.05 + rng.next_double());
        for (double& v : dist.mu[h]) v /= total;
    }
    return dist;
}

/// Random deterministic Markov policy.
inline Policy random_policy(Rng& rng, const LayeredMdp& m) {
    std::vector<std::vector<int>> act(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        act[h].resize(m.layer_size(h));
        for (int& a : act[h]) a = rng.uniform_int(m.num_actions);
    }
    return make_deterministic_policy(m, act);
}

/// Every deterministic Markov policy of a small MDP, enumerated in
/// mixed-radix order. Guarded by a count cap.
inline std::vector<Policy> enumerate_deterministic_policies(const LayeredMdp& m,
                                                            long cap = 100000) {
    long count = 1;
    std::vector<std::pair<int, int>> slots;  // (layer, state)
    for (int h = 0; h < m.horizon; ++h)
        for (int x = 0; x < m.layer_size(h); ++x) {
            slots.push_back({h, x});
            count *= m.num_actions;
            if (count > cap) throw std::runtime_error("policy enumeration exceeds cap");
        }
    std::vector<Policy> out;
    std::vector<int> digits(slots.size(), 0);
    while (true) {
        std::vector<std::vector<int>> act(m.horizon);
        for (int h = 0; h < m.horizon; ++h) act[h].assign(m.layer_size(h), 0);
        for (size_t i = 0; i < slots.size(); ++i) act[slots[i].first][slots[i].second] = digits[i];
        out.push_back(make_deterministic_policy(m, act));
        size_t i = 0;
        while (i < digits.size() && ++digits[i] == m.num_actions) digits[i++] = 0;
        if (i == digits.size()) break;
    }
    return out;
}

}  // namespace coverlab
