#pragma once

#include <map>
#include <string>
#include <vector>

#include "coverlab/family.hpp"
#include "coverlab/mdp.hpp"

namespace coverlab {

/// Machine-checkable expectations attached to a generated instance. Every
/// listed property is verified by the coverage/complexity/family modules in
/// the claims suites; nothing here is asserted on trust.
struct ConstructionManifest {
    std::string name;
    std::map<std::string, double> params;
    bool expect_complete = false;
    double c_cov_bound = -1.0;            // induced-policy coverability, when set
    double c_gen_bound = -1.0;            // generalized coefficient at mu = d^{pi*}
    double dim_sq_lower = -1.0;           // squared-eluder lower bound ...
    double dim_eps_below = -1.0;          // ... valid for thresholds below this
    int dim_layer = -1;                   // ... at this layer
    double optimal_value = -1.0;          // J(pi*)
    double log_family_bound = -1.0;       // bound on log |members|
};

struct ConstructionBuild {
    LayeredMdp mdp;
    ValueFunctionFamily family;
    ConstructionManifest manifest;
};

namespace detail {

inline LayerTable indicator_table(const LayeredMdp& m, int h, int x, int a) {
    LayerTable t(m.cells(h), 0.0);
    t[m.cell(x, a)] = 1.0;
    return t;
}

}  // namespace detail

/// Deterministic binary routing tree with two actions. Layer h holds 2^h
/// states; the two actions move to the left/right child. A single leaf
/// action pays reward 1 and everything else pays 0, so the optimal policy
/// traces the unique root-to-leaf path and J(pi*) = 1. The family is the
/// full product of single-cell indicator tables per layer, which is closed
/// under backups and contains the optimal Q-function.
///
/// `state_budget` caps the tree: requires 2^(H-1) <= state_budget.
/// `leaf_pair` indexes the rewarded (leaf, action) pair in [0, 2^H).
inline ConstructionBuild build_tree(int horizon, int state_budget, int leaf_pair) {
    if (horizon < 1) throw std::runtime_error("build_tree: horizon must be >= 1");
    std::vector<int> sizes(horizon);
    for (int h = 0; h < horizon; ++h) {
        sizes[h] = 1 << h;
        if (h == horizon - 1 && sizes[h] > state_budget)
            throw std::runtime_error("build_tree: depth exceeds the state budget");
    }
    int leaves = sizes[horizon - 1];
    if (leaf_pair < 0 || leaf_pair >= leaves * 2)
        throw std::runtime_error("build_tree: leaf pair index out of range");

    ConstructionBuild out;
    out.mdp = make_mdp(sizes, 2);
    for (int h = 0; h + 1 < horizon; ++h)
        for (int x = 0; x < sizes[h]; ++x)
            for (int a = 0; a < 2; ++a) out.mdp.transitions[h][out.mdp.cell(x, a)][2 * x + a] = 1.0;
    int leaf = leaf_pair / 2, leaf_action = leaf_pair % 2;
    out.mdp.rewards[horizon - 1][out.mdp.cell(leaf, leaf_action)] = 1.0;

    std::vector<std::vector<LayerTable>> components(horizon);
    for (int h = 0; h < horizon; ++h)
        for (int x = 0; x < sizes[h]; ++x)
            for (int a = 0; a < 2; ++a)
                components[h].push_back(detail::indicator_table(out.mdp, h, x, a));
    std::vector<MemberTables> members;
    std::vector<int> idx(horizon, 0);
    while (true) {  // full product, layer 0 most significant
        MemberTables f(horizon);
        for (int h = 0; h < horizon; ++h) f[h] = components[h][idx[h]];
        members.push_back(std::move(f));
        int h = horizon - 1;
        while (h >= 0 && ++idx[h] == static_cast<int>(components[h].size())) idx[h--] = 0;
        if (h < 0) break;
    }
    out.family = make_family(out.mdp, std::move(members), std::move(components));

    out.manifest.name = "tree";
    out.manifest.params = {{"H", static_cast<double>(horizon)},
                           {"leaf_pair", static_cast<double>(leaf_pair)}};
    out.manifest.expect_complete = true;
    out.manifest.c_gen_bound = horizon;
    out.manifest.optimal_value = 1.0;
    out.manifest.log_family_bound =
        horizon * std::log(2.0 * (1 << (horizon - 1)) * 2.0);
    return out;
}

struct BanditBuild {
    std::vector<LayeredMdp> instances;  // instance i pays off on arm i
    ValueFunctionFamily family;         // shared mean-value members
    ConstructionManifest manifest;
};

/// Family of Bernoulli bandit instances with arm gap eps1 = 1/A, lifted to a
/// two-layer MDP so that rewards stay deterministic tables: an arm pull
/// stochastically routes to a "win" or "lose" second-layer state carrying
/// reward 1 or 0. Instance i has win probability 1/2 + eps1 on arm i and 1/2
/// elsewhere. Member j of the family is the mean-value function of instance
/// j (its first-layer table) over the shared exact second-layer values, so
/// the family is complete and realizable in every instance, and the member
/// grid forms the diagonal certificate for the squared eluder dimension.
inline BanditBuild build_bandit_family(double eps1) {
    double arms_real = 1.0 / eps1;
    int arms = static_cast<int>(std::llround(arms_real));
    if (!close(arms_real, arms, 1e-9) || arms < 2 || eps1 > 0.5)
        throw std::runtime_error("build_bandit_family: 1/eps1 must be an integer >= 2");

    BanditBuild out;
    LayerTable shared_second;  // built against the first instance's shape
    std::vector<MemberTables> members;
    for (int inst = 0; inst < arms; ++inst) {
        LayeredMdp m = make_mdp({1, 2}, arms);  // layer 1: {win, lose}
        for (int a = 0; a < arms; ++a) {
            double p = 0.5 + (a == inst ? eps1 : 0.0);
            m.transitions[0][m.cell(0, a)] = {p, 1.0 - p};
            m.rewards[1][m.cell(0, a)] = 1.0;  // win
            m.rewards[1][m.cell(1, a)] = 0.0;  // lose
        }
        m.state_labels[1] = {"win", "lose"};
        out.instances.push_back(std::move(m));
    }
    const LayeredMdp& shape = out.instances[0];
    shared_second.assign(shape.cells(1), 0.0);
    for (int a = 0; a < arms; ++a) shared_second[shape.cell(0, a)] = 1.0;
    for (int j = 0; j < arms; ++j) {
        MemberTables f(2);
        f[0].assign(shape.cells(0), 0.5);
        f[0][shape.cell(0, j)] = 0.5 + eps1;
        f[1] = shared_second;
        members.push_back(std::move(f));
    }
    out.family = make_family(shape, std::move(members));

    out.manifest.name = "bandit-ladder";
    out.manifest.params = {{"eps1", eps1}, {"A", static_cast<double>(arms)}};
    out.manifest.expect_complete = true;
    out.manifest.dim_sq_lower = arms - 1;
    out.manifest.dim_eps_below = eps1;
    out.manifest.dim_layer = 0;
    out.manifest.optimal_value = 0.5 + eps1;
    return out;
}

/// Two-layer instance with a single first-layer state that routes to a rare
/// state y (probability eps2) or a common state z. Only action i pays at y.
/// The family holds one optimal Q-function per candidate arm: constant eps2
/// at the first layer, an arm indicator at y, zero at z. Coverability stays
/// at most 2 for the induced greedy policies no matter how many arms there
/// are, while the squared eluder dimension at the second layer grows with
/// the arm count.
inline ConstructionBuild build_two_layer(double eps2, int instance) {
    double arms_real = 1.0 / eps2;
    int arms = static_cast<int>(std::llround(arms_real));
    if (!close(arms_real, arms, 1e-9) || arms < 2 || eps2 > 0.5)
        throw std::runtime_error("build_two_layer: 1/eps2 must be an integer >= 2");
    if (instance < 0 || instance >= arms)
        throw std::runtime_error("build_two_layer: instance index out of range");

    ConstructionBuild out;
    out.mdp = make_mdp({1, 2}, arms);
    out.mdp.state_labels[1] = {"y", "z"};
    for (int a = 0; a < arms; ++a) {
        out.mdp.transitions[0][out.mdp.cell(0, a)] = {eps2, 1.0 - eps2};
        out.mdp.rewards[1][out.mdp.cell(0, a)] = a == instance ? 1.0 : 0.0;  // y
    }

    std::vector<MemberTables> members;
    for (int j = 0; j < arms; ++j) {
        MemberTables f(2);
        f[0].assign(out.mdp.cells(0), eps2);
        f[1].assign(out.mdp.cells(1), 0.0);
        f[1][out.mdp.cell(0, j)] = 1.0;  // arm j at y; zero at z
        members.push_back(std::move(f));
    }
    out.family = make_family(out.mdp, std::move(members));

    out.manifest.name = "two-layer";
    out.manifest.params = {{"eps2", eps2},
                           {"A", static_cast<double>(arms)},
                           {"instance", static_cast<double>(instance)}};
    out.manifest.expect_complete = true;
    out.manifest.c_cov_bound = 2.0;
    out.manifest.dim_sq_lower = arms - 1;
    out.manifest.dim_eps_below = eps2;
    out.manifest.dim_layer = 1;
    out.manifest.optimal_value = eps2;
    return out;
}

struct RfPairBuild {
    LayeredMdp mdp;
    ValueFunctionFamily f_family;  // exploitation class, target-reward aware
    ValueFunctionFamily g_family;  // exploration class, [0,1]-valued
    ConstructionManifest manifest;
};

/// Exploration/exploitation pair on the two-layer instance. Exploitation
/// member j claims arms {j, instance} at y (so its residual 1{a=j} stays
/// nonnegative) over the constant-eps2 first layer; the class is complete
/// and contains the optimal Q-function. The exploration class is the
/// product {0, eps2-const} x ({0} + arm indicators at y): closed under
/// zero-reward backups, and its zero-reward residual set contains every
/// exploitation residual layerwise.
inline RfPairBuild build_two_layer_rf(double eps2, int instance) {
    ConstructionBuild base = build_two_layer(eps2, instance);
    RfPairBuild out;
    out.mdp = base.mdp;
    out.manifest = base.manifest;
    out.manifest.name = "two-layer-rf";
    int arms = out.mdp.num_actions;

    std::vector<MemberTables> f_members;
    for (int j = 0; j < arms; ++j) {
        MemberTables f(2);
        f[0].assign(out.mdp.cells(0), eps2);
        f[1].assign(out.mdp.cells(1), 0.0);
        f[1][out.mdp.cell(0, j)] = 1.0;
        f[1][out.mdp.cell(0, instance)] = 1.0;
        f_members.push_back(std::move(f));
    }
    out.f_family = make_family(out.mdp, std::move(f_members));

    std::vector<LayerTable> g0 = {LayerTable(out.mdp.cells(0), 0.0),
                                  LayerTable(out.mdp.cells(0), eps2)};
    std::vector<LayerTable> g1 = {LayerTable(out.mdp.cells(1), 0.0)};
    for (int j = 0; j < arms; ++j) {
        LayerTable t(out.mdp.cells(1), 0.0);
        t[out.mdp.cell(0, j)] = 1.0;
        g1.push_back(std::move(t));
    }
    // members pair each arm indicator with its own zero-reward backup
    // (the eps2 constant), plus the all-zero hypothesis and the pessimistic
    // (0, indicator) variants; the component sets stay the full grids
    std::vector<MemberTables> g_members;
    g_members.push_back({g0[0], g1[0]});
    for (int j = 1; j <= arms; ++j) g_members.push_back({g0[0], g1[j]});
    for (int j = 1; j <= arms; ++j) g_members.push_back({g0[1], g1[j]});
    out.g_family = make_family(out.mdp, std::move(g_members), {g0, g1});
    return out;
}

/// Emission process: per layer and latent state, a distribution over fresh
/// observation indices. Supports must be disjoint across latent states
/// within a layer so observations decode uniquely.
struct Emission {
    // weights[h][s] = list of (observation index, probability)
    std::vector<std::vector<std::vector<std::pair<int, double>>>> weights;
    std::vector<int> obs_count;  // observations per layer
};

struct AugmentedMdp {
    LayeredMdp mdp;
    std::vector<std::vector<int>> decoder;  // [h][observation] -> latent state
};

/// Pushes an MDP through a decodable observation process: the latent chain
/// is unchanged, observations are emitted from the current latent state, and
/// rewards depend on the decoded state only. The layer-0 emission of the
/// initial state must be a point mass (the model fixes a deterministic
/// initial state).
inline AugmentedMdp augment_rich_obs(const LayeredMdp& m, const Emission& em) {
    AugmentedMdp out;
    out.decoder.resize(m.horizon);
    std::vector<int> sizes(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        sizes[h] = em.obs_count[h];
        out.decoder[h].assign(sizes[h], -1);
        for (int s = 0; s < m.layer_size(h); ++s)
            for (auto [obs, p] : em.weights[h][s]) {
                if (p <= 0.0) continue;
                if (out.decoder[h][obs] != -1)
                    throw std::runtime_error("augment_rich_obs: overlapping emission supports");
                out.decoder[h][obs] = s;
            }
    }
    if (em.weights[0][m.initial_state].size() != 1)
        throw std::runtime_error("augment_rich_obs: initial emission must be a point mass");

    out.mdp = make_mdp(sizes, m.num_actions);
    out.mdp.initial_state = em.weights[0][m.initial_state][0].first;
    for (int h = 0; h < m.horizon; ++h)
        for (int obs = 0; obs < sizes[h]; ++obs) {
            int s = out.decoder[h][obs];
            if (s < 0) s = 0;  // unreachable spare observation; give it benign rows
            for (int a = 0; a < m.num_actions; ++a) {
                out.mdp.rewards[h][out.mdp.cell(obs, a)] = m.reward(h, s, a);
                if (h + 1 == m.horizon) continue;
                auto& row = out.mdp.transitions[h][out.mdp.cell(obs, a)];
                const auto& latent_row = m.row(h, s, a);
                for (int s2 = 0; s2 < m.layer_size(h + 1); ++s2) {
                    if (latent_row[s2] == 0.0) continue;
                    for (auto [obs2, q] : em.weights[h + 1][s2]) row[obs2] += latent_row[s2] * q;
                }
            }
        }
    return out;
}

/// Product with an action-independent side chain: states become
/// (latent, noise) pairs, the noise steps by its own row-stochastic kernel,
/// and rewards ignore it. State index layout: s * |Xi| + xi.
inline AugmentedMdp augment_exogenous(const LayeredMdp& m,
                                      const std::vector<std::vector<double>>& exo_chain,
                                      int exo_init) {
    int n_exo = static_cast<int>(exo_chain.size());
    for (const auto& row : exo_chain) {
        double s = 0.0;
        for (double p : row) s += p;
        if (!close(s, 1.0, kRowSumTol))
            throw std::runtime_error("augment_exogenous: noise kernel must be row-stochastic");
    }
    AugmentedMdp out;
    std::vector<int> sizes(m.horizon);
    for (int h = 0; h < m.horizon; ++h) sizes[h] = m.layer_size(h) * n_exo;
    out.mdp = make_mdp(sizes, m.num_actions);
    out.mdp.initial_state = m.initial_state * n_exo + exo_init;
    out.decoder.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        out.decoder[h].resize(sizes[h]);
        for (int s = 0; s < m.layer_size(h); ++s)
            for (int e = 0; e < n_exo; ++e) {
                int x = s * n_exo + e;
                out.decoder[h][x] = s;
                for (int a = 0; a < m.num_actions; ++a) {
                    out.mdp.rewards[h][out.mdp.cell(x, a)] = m.reward(h, s, a);
                    if (h + 1 == m.horizon) continue;
                    auto& row = out.mdp.transitions[h][out.mdp.cell(x, a)];
                    const auto& latent_row = m.row(h, s, a);
                    for (int s2 = 0; s2 < m.layer_size(h + 1); ++s2)
                        for (int e2 = 0; e2 < n_exo; ++e2)
                            row[s2 * n_exo + e2] = latent_row[s2] * exo_chain[e][e2];
                }
            }
    }
    return out;
}

struct ExBmdpBuild {
    LayeredMdp mdp;                         // observation-level MDP
    LayeredMdp endogenous;                  // the controllable latent chain
    std::vector<std::vector<int>> decoder;  // observation -> endogenous state
    ConstructionManifest manifest;
};

/// Random controllable chain, random action-independent noise chain, and a
/// disjoint-support emission with `obs_multiplicity` observations per latent
/// pair. Coverability of the observation MDP is bounded by (and in fact
/// equals) that of the endogenous chain, so it cannot grow with the noise
/// alphabet or the emission richness.
inline ExBmdpBuild build_exbmdp(int n_endo, int n_exo, int n_actions, int horizon,
                                int obs_multiplicity, std::uint64_t seed) {
    Rng rng(seed);
    ExBmdpBuild out;
    out.endogenous = make_mdp(std::vector<int>(horizon, n_endo), n_actions);
    for (int h = 0; h < horizon; ++h)
        for (int s = 0; s < n_endo; ++s)
            for (int a = 0; a < n_actions; ++a) {
                out.endogenous.rewards[h][out.endogenous.cell(s, a)] = rng.next_double() / horizon;
                if (h + 1 == horizon) continue;
                auto& row = out.endogenous.transitions[h][out.endogenous.cell(s, a)];
                double total = 0.0;
                for (int s2 = 0; s2 < n_endo; ++s2) total += (row[s2] = 0.05 + rng.next_double());
                for (double& p : row) p /= total;
            }

    std::vector<std::vector<double>> exo_chain(n_exo, std::vector<double>(n_exo, 0.0));
    for (auto& row : exo_chain) {
        double total = 0.0;
        for (double& p : row) total += (p = 0.05 + rng.next_double());
        for (double& p : row) p /= total;
    }
    AugmentedMdp product = augment_exogenous(out.endogenous, exo_chain, 0);

    Emission em;
    em.weights.resize(horizon);
    em.obs_count.assign(horizon, 0);
    for (int h = 0; h < horizon; ++h) {
        int latent = product.mdp.layer_size(h);
        em.weights[h].resize(latent);
        for (int z = 0; z < latent; ++z) {
            int mult = (h == 0 && z == product.mdp.initial_state) ? 1 : obs_multiplicity;
            std::vector<double> w(mult);
            double total = 0.0;
            for (double& v : w) total += (v = 0.2 + rng.next_double());
            for (int k = 0; k < mult; ++k)
                em.weights[h][z].push_back({em.obs_count[h] + k, w[k] / total});
            em.obs_count[h] += mult;
        }
    }
    AugmentedMdp observed = augment_rich_obs(product.mdp, em);

    out.mdp = std::move(observed.mdp);
    out.decoder.resize(horizon);
    for (int h = 0; h < horizon; ++h) {
        out.decoder[h].resize(out.mdp.layer_size(h));
        for (int obs = 0; obs < out.mdp.layer_size(h); ++obs)
            out.decoder[h][obs] = product.decoder[h][observed.decoder[h][obs]];
    }
    out.manifest.name = "ex-bmdp";
    out.manifest.params = {{"S", static_cast<double>(n_endo)},
                           {"Xi", static_cast<double>(n_exo)},
                           {"A", static_cast<double>(n_actions)},
                           {"H", static_cast<double>(horizon)},
                           {"obs_multiplicity", static_cast<double>(obs_multiplicity)}};
    out.manifest.c_cov_bound = static_cast<double>(n_endo) * n_actions;
    return out;
}

}  // namespace coverlab
