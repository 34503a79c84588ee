#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coverlab/constructions.hpp"
#include "coverlab/coverage.hpp"
#include "coverlab/random_instances.hpp"

using namespace coverlab;

TEST_CASE("concentrability of a singleton set against its own occupancy is 1") {
    Rng rng(201);
    LayeredMdp m = random_mdp(rng, {2, 3, 2}, 2);
    Policy pi = random_policy(rng, m);
    OccupancyMeasure d = occupancy(m, pi);
    DistributionFamily mu;
    mu.mu = d.cell;
    CoverageReport rep = concentrability(m, explicit_policies({pi}), mu);
    CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-state bandit with uniform logging has concentrability A") {
    // one first-layer state, A actions, deterministic continuation
    const int A = 4;
    LayeredMdp m = make_mdp({1, 1}, A);
    for (int a = 0; a < A; ++a) {
        m.transitions[0][m.cell(0, a)] = {1.0};
        m.rewards[1][m.cell(0, a)] = 0.0;
    }
    DistributionFamily mu;
    mu.mu = {std::vector<double>(A, 1.0 / A), std::vector<double>(A, 1.0 / A)};
    CoverageReport rep = concentrability(m, all_markov_policies(), mu);
    CHECK(rep.value == doctest::Approx(static_cast<double>(A)).epsilon(1e-12));
}

TEST_CASE("a zero-mass reachable cell sends concentrability to infinity") {
    Rng rng(211);
    LayeredMdp m = random_mdp(rng, {2, 2}, 2);
    DistributionFamily mu = random_mu(rng, m);
    mu.mu[1][m.cell(0, 1)] = 0.0;
    CoverageReport rep = concentrability(m, all_markov_policies(), mu);
    CHECK(rep.infinite);
    CHECK(rep.witness_layer == 1);
}

TEST_CASE("single-policy concentrability: optimal occupancy logging gives 1, gaps give infinity") {
    Rng rng(221);
    LayeredMdp m = random_mdp(rng, {2, 3, 2}, 2);
    OptimalValues opt = optimal_values(m);
    DistributionFamily mu;
    mu.mu = occupancy(m, opt.greedy).cell;
    CHECK(single_policy_concentrability(m, mu).value == doctest::Approx(1.0).epsilon(1e-12));

    // chain visiting one cell per layer under uniform logging: ratio |X_h|*A
    auto tree = build_tree(3, 4, 0);
    DistributionFamily unif;
    unif.mu.resize(tree.mdp.horizon);
    for (int h = 0; h < tree.mdp.horizon; ++h)
        unif.mu[h].assign(tree.mdp.cells(h), 1.0 / tree.mdp.cells(h));
    CoverageReport rep = single_policy_concentrability(tree.mdp, unif);
    CHECK(rep.value == doctest::Approx(8.0).epsilon(1e-12));  // layer 2: 4 states * 2 actions

    DistributionFamily missing = unif;
    missing.mu[0][tree.mdp.cell(0, 0)] = 0.0;  // the optimal first move
    CHECK(single_policy_concentrability(tree.mdp, missing).infinite);
}

TEST_CASE("coverability never exceeds states-times-actions; witness reproduces the value") {
    Rng rng(231);
    for (int k = 0; k < 10; ++k) {
        LayeredMdp m = random_mdp(rng, {2, 3, 3}, 2);
        CoverageReport cov = coverability(m, all_markov_policies());
        for (int h = 0; h < m.horizon; ++h) CHECK(cov.value <= m.cells(h) + 1e-9);
        CHECK(cov.value >= 1.0 - 1e-12);

        CoverageReport re = concentrability(m, all_markov_policies(), cov.witness_mu);
        CHECK(std::abs(re.value - cov.value) <= 1e-7 * std::max(1.0, cov.value));
    }
}

TEST_CASE("two-layer induced policies have coverability at most 2") {
    for (double eps : {0.25, 0.125}) {
        auto built = build_two_layer(eps, 1);
        CoverageReport cov = coverability(built.mdp, induced_policies(built.mdp, built.family));
        CHECK(cov.value <= 2.0 + 1e-12);
    }
}

TEST_CASE("inf-sup oracle: singleton policy set gives 1; agrees with the closed form") {
    Rng rng(241);
    LayeredMdp m = random_mdp(rng, {2, 2, 2}, 2);
    Policy pi = random_policy(rng, m);
    CoverageReport one = coverability_infimum_oracle(m, explicit_policies({pi}));
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-7));

    for (int k = 0; k < 50; ++k) {
        std::vector<int> sizes{1 + rng.uniform_int(2), 1 + rng.uniform_int(4), 1 + rng.uniform_int(4)};
        LayeredMdp inst = random_mdp(rng, sizes, 2 + rng.uniform_int(2));
        ValueFunctionFamily fam = random_family(rng, inst, 2 + rng.uniform_int(6));
        PolicySet pols = induced_policies(inst, fam);
        double closed = coverability(inst, pols).value;
        double oracle = coverability_infimum_oracle(inst, pols).value;
        CHECK(std::abs(closed - oracle) <= 1e-7 * std::max(1.0, closed));
    }
}

TEST_CASE("coefficients are monotone in the policy set") {
    Rng rng(251);
    LayeredMdp m = random_mdp(rng, {2, 3, 2}, 2);
    std::vector<Policy> pols;
    for (int i = 0; i < 6; ++i) pols.push_back(random_policy(rng, m));
    DistributionFamily mu = random_mu(rng, m);
    double prev_conc = 0.0, prev_cov = 0.0;
    for (size_t n = 1; n <= pols.size(); ++n) {
        PolicySet sub = explicit_policies({pols.begin(), pols.begin() + n});
        double conc = concentrability(m, sub, mu).value;
        double cov = coverability(m, sub).value;
        CHECK(conc >= prev_conc - 1e-12);
        CHECK(cov >= prev_cov - 1e-12);
        prev_conc = conc;
        prev_cov = cov;
    }
}

TEST_CASE("generalized concentrability: optimal-Q family degenerates to the flagged 1") {
    Rng rng(261);
    LayeredMdp m = random_mdp(rng, {2, 2}, 2);
    ValueFunctionFamily fam = make_family(m, {optimal_values(m).q});
    PolicySet pols = induced_policies(m, fam);
    DistributionFamily mu = random_mu(rng, m);
    CoverageReport rep = generalized_concentrability(m, fam, pols, mu);
    CHECK(rep.all_residuals_zero);
    CHECK(rep.value == doctest::Approx(1.0));
}

TEST_CASE("tree with optimal-occupancy logging: generalized coefficient at most H") {
    auto tree = build_tree(3, 4, 3);
    DistributionFamily mu;
    mu.mu = occupancy(tree.mdp, optimal_values(tree.mdp).greedy).cell;
    PolicySet pols = induced_policies(tree.mdp, tree.family);
    CoverageReport rep = generalized_concentrability(tree.mdp, tree.family, pols, mu);
    CHECK(!rep.infinite);
    CHECK(rep.value <= tree.mdp.horizon + 1e-9);
}

TEST_CASE("generalized coefficients are dominated by their plain counterparts") {
    Rng rng(271);
    for (int k = 0; k < 20; ++k) {
        LayeredMdp m = random_mdp(rng, {1 + rng.uniform_int(2), 2, 2}, 2);
        ValueFunctionFamily fam = random_family(rng, m, 4);
        PolicySet pols = induced_policies(m, fam);
        DistributionFamily mu = random_mu(rng, m);
        double gen = generalized_concentrability(m, fam, pols, mu).value;
        double conc = concentrability(m, pols, mu).value;
        CHECK(gen <= conc + 1e-9);

        double gen_cov = generalized_coverability(m, fam, pols).value;
        double cov = coverability(m, pols).value;
        CHECK(gen_cov <= cov + 1e-6);
    }
}

TEST_CASE("generalized coverability: degenerate family flags, tree stays below H") {
    Rng rng(281);
    LayeredMdp m = random_mdp(rng, {2, 2}, 2);
    ValueFunctionFamily fam = make_family(m, {optimal_values(m).q});
    CoverageReport rep = generalized_coverability(m, fam, induced_policies(m, fam));
    CHECK(rep.all_residuals_zero);

    auto tree = build_tree(3, 4, 1);
    PolicySet pols = induced_policies(tree.mdp, tree.family);
    CoverageReport tr = generalized_coverability(tree.mdp, tree.family, pols);
    CHECK(!tr.infinite);
    CHECK(tr.value <= tree.mdp.horizon + 1e-6);

    // returned witness must certify the value through the direct coefficient
    CoverageReport back = generalized_concentrability(tree.mdp, tree.family, pols, tr.witness_mu);
    CHECK(back.value <= tr.value * (1.0 + 1e-6) + 1e-9);
}

TEST_CASE("generalized coefficients are monotone in the policy set too") {
    Rng rng(291);
    LayeredMdp m = random_mdp(rng, {1, 2, 2}, 2);
    ValueFunctionFamily fam = random_family(rng, m, 4);
    DistributionFamily mu = random_mu(rng, m);
    std::vector<Policy> pols;
    for (int i = 0; i < 5; ++i) pols.push_back(random_policy(rng, m));
    double prev_conc = 0.0, prev_cov = 0.0;
    for (size_t n = 1; n <= pols.size(); ++n) {
        PolicySet sub = explicit_policies({pols.begin(), pols.begin() + n});
        double conc = generalized_concentrability(m, fam, sub, mu).value;
        double cov = generalized_coverability(m, fam, sub).value;
        CHECK(conc >= prev_conc - 1e-12);
        CHECK(cov >= prev_cov - 1e-6);
        prev_conc = conc;
        prev_cov = cov;
    }
}

TEST_CASE("inf-sup oracle respects the two-layer bound") {
    for (double eps : {0.25, 0.125}) {
        auto built = build_two_layer(eps, 0);
        PolicySet pols = induced_policies(built.mdp, built.family);
        CHECK(coverability_infimum_oracle(built.mdp, pols).value <= 2.0 + 1e-7);
    }
}
