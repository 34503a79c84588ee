#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coverlab/constructions.hpp"
#include "coverlab/random_instances.hpp"
#include "coverlab/reward_free.hpp"

using namespace coverlab;

namespace {

std::vector<LayerTable> reward_tables(const LayeredMdp& m) { return m.rewards; }

}  // namespace

TEST_CASE("all-zero exploration class claims zero every round and stops at round one") {
    Rng rng(601);
    LayeredMdp m = random_mdp(rng, {2, 2, 2}, 2);
    MemberTables zero(m.horizon);
    for (int h = 0; h < m.horizon; ++h) zero[h].assign(m.cells(h), 0.0);
    ValueFunctionFamily g = make_family(m, {zero});
    ExplorationOutput out = rf_explore(m, g, {30, 1.0, 5u});
    REQUIRE(out.rounds.size() == 30);
    for (const auto& r : out.rounds) CHECK(r.explored_value == 0.0);
    CHECK(out.t_star == 1);
    CHECK(out.exploitation_data()[0].empty());
}

TEST_CASE("exploration data carries no reward and is reproducible") {
    auto pair = build_two_layer_rf(0.25, 2);
    RfConfig cfg{80, 12.0, 9u};
    ExplorationOutput a = rf_explore(pair.mdp, pair.g_family, cfg);
    ExplorationOutput b = rf_explore(pair.mdp, pair.g_family, cfg);
    REQUIRE(a.rounds.size() == b.rounds.size());
    CHECK(a.t_star == b.t_star);
    for (int h = 0; h < pair.mdp.horizon; ++h) {
        REQUIRE(a.datasets[h].size() == b.datasets[h].size());
        for (size_t i = 0; i < a.datasets[h].size(); ++i) {
            CHECK(a.datasets[h][i].reward == 0.0);
            CHECK(a.datasets[h][i].state == b.datasets[h][i].state);
            CHECK(a.datasets[h][i].action == b.datasets[h][i].action);
            CHECK(a.datasets[h][i].next_state == b.datasets[h][i].next_state);
        }
    }
}

TEST_CASE("on a deterministic instance the exploration set never regrows") {
    auto tree = build_tree(3, 4, 5);
    // exploration class: zero plus one wrong-claim member (claims mass it
    // cannot back up), which the data must eliminate exactly once refuted
    MemberTables zero(tree.mdp.horizon);
    for (int h = 0; h < tree.mdp.horizon; ++h) zero[h].assign(tree.mdp.cells(h), 0.0);
    MemberTables claim = zero;
    claim[0][tree.mdp.cell(0, 0)] = 1.0;  // claims value via the left move, layer 1 denies it
    ValueFunctionFamily g = make_family(tree.mdp, {zero, claim});
    ExplorationOutput out = rf_explore(tree.mdp, g, {10, 0.5, 3u});
    int prev = static_cast<int>(g.size());
    for (const auto& r : out.rounds) {
        CHECK(r.set_size <= prev);
        prev = r.set_size;
    }
    CHECK(out.rounds.back().set_size == 1);
}

TEST_CASE("per-round telescoping: claimed value equals on-policy zero-reward residual mass") {
    auto pair = build_two_layer_rf(0.25, 1);
    ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, {120, 20.0, 13u});
    for (const auto& r : out.rounds) {
        const MemberTables& g = pair.g_family.members[r.chosen];
        MemberTables delta = residual_tables(pair.mdp, g, false);
        OccupancyMeasure d = occupancy(pair.mdp, greedy_policy(pair.mdp, g));
        double mass = 0.0;
        for (int h = 0; h < pair.mdp.horizon; ++h)
            for (int c = 0; c < pair.mdp.cells(h); ++c) mass += d.cell[h][c] * delta[h][c];
        CHECK(std::abs(mass - r.explored_value) < 1e-9);
    }
}

TEST_CASE("residual lift: exact at the last layer, zero for the optimal Q, dominates pointwise") {
    Rng rng(611);
    LayeredMdp m = random_mdp(rng, {2, 3, 2}, 2);

    MemberTables qstar = optimal_values(m).q;
    MemberTables lifted = residual_lift(m, qstar);
    for (const auto& layer : lifted)
        for (double v : layer) CHECK(std::abs(v) < 1e-9);

    ValueFunctionFamily fam = random_family(rng, m, 4);
    for (const auto& f : fam.members) {
        MemberTables g = residual_lift(m, f);
        int last = m.horizon - 1;
        for (int c = 0; c < m.cells(last); ++c)
            CHECK(g[last][c] == doctest::Approx(f[last][c] - m.rewards[last][c]).epsilon(1e-12));
    }

    for (int k = 0; k < 100; ++k) {
        LayeredMdp inst = random_mdp(rng, {2, 2, 3}, 2);
        ValueFunctionFamily ff = random_family(rng, inst, 1);
        CHECK(residual_lift_max_violation(inst, ff.members[0]) <= 1e-10);
    }
}

TEST_CASE("degenerate offline width returns the most optimistic member regardless of data") {
    auto pair = build_two_layer_rf(0.25, 2);
    ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, {400, 30.0, 17u});
    ExploitResult fit = rf_exploit(pair.mdp, pair.f_family, reward_tables(pair.mdp), out, 1e18);
    CHECK(fit.surviving.size() == pair.f_family.size());
    CHECK(fit.chosen == 0);  // all members claim eps2; least index wins
}

TEST_CASE("saturated exploration plus a wide margin recovers the optimal policy") {
    auto pair = build_two_layer_rf(0.25, 2);
    RfConfig cfg{2000, 3.0 * std::log(2000.0 * 2 * pair.g_family.size() / 0.05), 21u};
    ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, cfg);
    double beta_off = 2.0 * std::log(2000.0 * 2 * pair.g_family.size() / 0.05);
    ExploitResult fit = rf_exploit(pair.mdp, pair.f_family, reward_tables(pair.mdp), out, beta_off);
    REQUIRE(!fit.aborted);
    CHECK(policy_value(pair.mdp, fit.policy).total ==
          doctest::Approx(optimal_values(pair.mdp).value).epsilon(1e-12));
}

TEST_CASE("exploitation never sees rewards before the stopping round") {
    auto pair = build_two_layer_rf(0.25, 0);
    ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, {100, 15.0, 23u});
    auto data = out.exploitation_data();
    size_t total = 0;
    for (const auto& layer : data) {
        total += layer.size();
        for (const auto& tup : layer) CHECK(tup.reward == 0.0);
    }
    CHECK(total == static_cast<size_t>(pair.mdp.horizon) *
                       static_cast<size_t>(std::max(0, out.t_star - 1)));
}

TEST_CASE("version-space inclusion holds at and above the width threshold") {
    auto pair = build_two_layer_rf(0.25, 2);
    for (std::uint64_t seed : {31u, 32u, 33u, 34u, 35u}) {
        double beta_off = 2.0 * std::log(300.0 * 2 * pair.g_family.size() / 0.05);
        double beta_rf =
            6.0 * beta_off + 18.0 * std::log(2.0 * pair.g_family.size() / 0.05);
        ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, {300, beta_rf, seed});
        VspaceInclusionReport rep =
            check_rf_vspace_inclusion(pair.mdp, pair.f_family, pair.g_family,
                                      reward_tables(pair.mdp), out, beta_off, beta_rf);
        CHECK(rep.precondition_met);
        CHECK(rep.ok);
    }
}

TEST_CASE("below the threshold the checker flags the precondition and reports findings") {
    auto pair = build_two_layer_rf(0.25, 1);
    double beta_off = 2.0 * std::log(300.0 * 2 * pair.g_family.size() / 0.05);
    double beta_rf = 0.5;  // far below the required margin
    ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, {300, beta_rf, 41u});
    VspaceInclusionReport rep = check_rf_vspace_inclusion(
        pair.mdp, pair.f_family, pair.g_family, reward_tables(pair.mdp), out, beta_off, beta_rf);
    CHECK(!rep.precondition_met);
    // violations may or may not appear; the report must stay internally consistent
    CHECK(rep.unmatched.size() <= rep.offline_survivors.size());
}

TEST_CASE("end-to-end shrinkage probe: long exploration beats short exploration") {
    auto pair = build_two_layer_rf(0.25, 2);
    double jstar = optimal_values(pair.mdp).value;
    auto run = [&](int rounds, std::uint64_t seed) {
        double beta_rf = 3.0 * std::log(rounds * 2.0 * pair.g_family.size() / 0.05);
        double beta_off = 2.0 * std::log(rounds * 2.0 * pair.g_family.size() / 0.05);
        ExplorationOutput out = rf_explore(pair.mdp, pair.g_family, {rounds, beta_rf, seed});
        ExploitResult fit =
            rf_exploit(pair.mdp, pair.f_family, reward_tables(pair.mdp), out, beta_off);
        return fit.aborted ? jstar : jstar - policy_value(pair.mdp, fit.policy).total;
    };
    std::vector<double> small, large;
    for (std::uint64_t seed = 50; seed < 56; ++seed) {
        small.push_back(run(150, seed));
        large.push_back(run(1500, seed));
    }
    CHECK(median(large) < median(small));
}
