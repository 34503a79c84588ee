#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coverlab/complexity.hpp"
#include "coverlab/constructions.hpp"
#include "coverlab/random_instances.hpp"

using namespace coverlab;

TEST_CASE("eluder dimension is zero once the threshold exceeds every expectation") {
    Rng rng(301);
    LayeredMdp m = random_mdp(rng, {2, 2}, 2);
    ValueFunctionFamily fam = random_family(rng, m, 4);
    PolicySet pols = induced_policies(m, fam);

    // residuals of a [0,1]-valued family are bounded, so a threshold above
    // the largest attained expectation kills every candidate first step
    double max_expect = 0.0;
    for (int h = 0; h < m.horizon; ++h) {
        TestAlphabet alpha = make_q_alphabet(m, fam, pols, h);
        for (const auto& d : alpha.dists)
            for (const auto& psi : alpha.tests) {
                double e = 0.0;
                for (int z = 0; z < alpha.dim; ++z) e += d[z] * psi[z];
                max_expect = std::max(max_expect, std::abs(e));
            }
    }
    for (auto variant : {EluderVariant::kAverage, EluderVariant::kSquared}) {
        ComplexityReport rep = be_dim(m, fam, pols, max_expect + 1e-9, variant);
        CHECK(rep.value == 0.0);
        CHECK(rep.exact);
        CHECK(be_dim(m, fam, pols, 2.01, variant).value == 0.0);
    }
}

TEST_CASE("two-layer diagonal certificate: squared dimension at least A-1 at the rare layer") {
    for (int arms : {4, 8}) {
        auto built = build_two_layer(1.0 / arms, arms - 1);
        PolicySet pols = induced_policies(built.mdp, built.family);
        double eps = 0.5 / arms;  // strictly below the branch probability
        ComplexityReport rep =
            be_dim(built.mdp, built.family, pols, eps, EluderVariant::kSquared, TestType::kQ, 64, 1);
        CHECK(rep.value >= arms - 1);

        // replay the witness through independent expectation code
        TestAlphabet alpha = make_q_alphabet(built.mdp, built.family, pols, 1);
        std::vector<double> acc(alpha.tests.size(), 0.0);
        for (const auto& step : rep.witness) {
            double e = 0.0, s = 0.0;
            for (int z = 0; z < alpha.dim; ++z) {
                e += alpha.dists[step.dist][z] * alpha.tests[step.test][z];
                s += alpha.dists[step.dist][z] * alpha.tests[step.test][z] * alpha.tests[step.test][z];
            }
            CHECK(std::abs(e) > std::max(eps, std::sqrt(acc[step.test])));
            for (size_t t = 0; t < acc.size(); ++t) {
                double st = 0.0;
                for (int z = 0; z < alpha.dim; ++z)
                    st += alpha.dists[step.dist][z] * alpha.tests[t][z] * alpha.tests[t][z];
                acc[t] += st;
            }
        }
    }
}

TEST_CASE("bandit ladder: squared dimension at least A-1 in the off-target instance") {
    auto bandit = build_bandit_family(0.25);
    const LayeredMdp& m = bandit.instances.back();
    PolicySet pols = induced_policies(m, bandit.family);
    ComplexityReport rep =
        be_dim(m, bandit.family, pols, 0.1, EluderVariant::kSquared, TestType::kQ, 64, 0);
    CHECK(rep.value >= 3);
}

TEST_CASE("dimension is nonincreasing in the threshold") {
    Rng rng(311);
    LayeredMdp m = random_mdp(rng, {1, 3, 2}, 2);
    ValueFunctionFamily fam = random_family(rng, m, 5);
    PolicySet pols = induced_policies(m, fam);
    for (auto variant : {EluderVariant::kAverage, EluderVariant::kSquared}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
            ComplexityReport rep = be_dim(m, fam, pols, eps, variant);
            CHECK(rep.value <= prev + 1e-12);
            prev = rep.value;
        }
    }
}

TEST_CASE("exhaustive extrapolation: zero residuals give zero, T=1 is the best single ratio") {
    Rng rng(321);
    LayeredMdp m = random_mdp(rng, {1, 2}, 2);
    ValueFunctionFamily qonly = make_family(m, {optimal_values(m).q});
    PolicySet pols = induced_policies(m, qonly);
    ComplexityReport zero = sec_rl(m, qonly, pols, 3);
    CHECK(zero.value <= 1e-18);

    ValueFunctionFamily fam = random_family(rng, m, 4);
    PolicySet ip = induced_policies(m, fam);
    ComplexityReport one = sec_rl(m, fam, ip, 1);
    double expect = 0.0;
    for (int h = 0; h < m.horizon; ++h) {
        TestAlphabet alpha = make_q_alphabet(m, fam, ip, h);
        for (const auto& d : alpha.dists)
            for (const auto& psi : alpha.tests) {
                double e = 0.0;
                for (int z = 0; z < alpha.dim; ++z) e += d[z] * psi[z];
                expect = std::max(expect, e * e);
            }
    }
    CHECK(one.value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("greedy extrapolation lower-bounds the exhaustive value and matches it at T=1") {
    Rng rng(331);
    for (int k = 0; k < 12; ++k) {
        LayeredMdp m = random_mdp(rng, {1, 2, 2}, 2);
        ValueFunctionFamily fam = random_family(rng, m, 3);
        PolicySet pols = induced_policies(m, fam);
        ComplexityReport g1 = sec_rl(m, fam, pols, 1, TestType::kQ, false);
        ComplexityReport e1 = sec_rl(m, fam, pols, 1);
        CHECK(g1.value == doctest::Approx(e1.value).epsilon(1e-12));

        ComplexityReport g4 = sec_rl(m, fam, pols, 4, TestType::kQ, false);
        ComplexityReport e4 = sec_rl(m, fam, pols, 4);
        CHECK(g4.value <= e4.value + 1e-9);
    }
}

TEST_CASE("extrapolation coefficient is nondecreasing in the length") {
    Rng rng(341);
    LayeredMdp m = random_mdp(rng, {1, 2}, 3);
    ValueFunctionFamily fam = random_family(rng, m, 3);
    PolicySet pols = induced_policies(m, fam);
    double prev = 0.0;
    for (int T = 1; T <= 4; ++T) {
        ComplexityReport rep = sec_rl(m, fam, pols, T);
        CHECK(rep.value >= prev - 1e-12);
        prev = rep.value;
    }
}

TEST_CASE("witness replay reproduces reported extrapolation values") {
    Rng rng(351);
    LayeredMdp m = random_mdp(rng, {1, 3}, 2);
    ValueFunctionFamily fam = random_family(rng, m, 4);
    PolicySet pols = induced_policies(m, fam);
    for (int h = 0; h < m.horizon; ++h) {
        TestAlphabet alpha = make_q_alphabet(m, fam, pols, h);
        ComplexityReport ex = sec_exhaustive(alpha, 3);
        CHECK(replay_sec_witness(alpha, ex.witness) == doctest::Approx(ex.value).epsilon(1e-10));
        ComplexityReport gr = sec_greedy(alpha, 5);
        CHECK(replay_sec_witness(alpha, gr.witness) == doctest::Approx(gr.value).epsilon(1e-10));
    }
}

TEST_CASE("exhaustive search refuses oversized sequence spaces") {
    Rng rng(361);
    LayeredMdp m = random_mdp(rng, {2, 4, 4}, 3);
    ValueFunctionFamily fam = random_family(rng, m, 10);
    PolicySet pols;
    for (int i = 0; i < 12; ++i) pols.policies.push_back(random_policy(rng, m));
    CHECK_THROWS(sec_rl(m, fam, pols, 12));
}

TEST_CASE("V-type sets: deterministic greedy composition and action-count sandwich") {
    auto built = build_two_layer(0.25, 1);
    PolicySet pols = induced_policies(built.mdp, built.family);
    TestAlphabet v = make_v_alphabet(built.mdp, built.family, pols, 1);
    TestAlphabet q = make_q_alphabet(built.mdp, built.family, pols, 1);
    // each V-type test is its member's residual along the member's own greedy action
    for (size_t t = 0; t < v.tests.size(); ++t) {
        int member = v.test_member[t];
        MemberTables delta = residual_tables(built.mdp, built.family.members[member], true);
        for (int x = 0; x < built.mdp.layer_size(1); ++x) {
            int a = argmax_action(built.mdp, built.family.members[member][1], x);
            CHECK(v.tests[t][x] == doctest::Approx(delta[1][built.mdp.cell(x, a)]));
        }
    }

    // state-marginal coverability sandwich: C_cov^states <= C_cov <= A * C_cov^states
    Rng rng(371);
    for (int k = 0; k < 10; ++k) {
        LayeredMdp m = random_mdp(rng, {1, 3, 2}, 2);
        ValueFunctionFamily fam = random_family(rng, m, 4);
        PolicySet ip = induced_policies(m, fam);
        auto best = cellwise_max_occupancy(m, ip);
        double qcov = 0.0, vcov = 0.0;
        std::vector<OccupancyMeasure> occs;
        for (const auto& pi : ip.policies) occs.push_back(occupancy(m, pi));
        for (int h = 0; h < m.horizon; ++h) {
            double qa = 0.0, va = 0.0;
            for (double x : best[h]) qa += x;
            for (int x = 0; x < m.layer_size(h); ++x) {
                double b = 0.0;
                for (const auto& d : occs) b = std::max(b, d.state[h][x]);
                va += b;
            }
            qcov = std::max(qcov, qa);
            vcov = std::max(vcov, va);
        }
        CHECK(vcov <= qcov + 1e-12);
        CHECK(qcov <= vcov * m.num_actions + 1e-12);
    }
}

TEST_CASE("ordering checks pass on random tiny instances") {
    Rng rng(381);
    for (int k = 0; k < 10; ++k) {
        LayeredMdp m = random_mdp(rng, {1, 2, 2}, 2);
        ValueFunctionFamily fam = random_family(rng, m, 3);
        PolicySet pols = induced_policies(m, fam);
        for (auto check : verify_sec_bounds(m, fam, pols, 4, 0.1)) CHECK(check.pass);
    }
}

TEST_CASE("potential sums respect the logarithmic bound under domination") {
    Rng rng(391);
    const int T = 10000, dim = 8;
    std::vector<double> mu(dim);
    double total = 0.0;
    for (double& v : mu) total += (v = 0.05 + rng.next_double());
    for (double& v : mu) v /= total;

    std::vector<std::vector<double>> dists(T, std::vector<double>(dim));
    double cmax = 0.0;
    for (auto& d : dists) {
        double s = 0.0;
        for (int z = 0; z < dim; ++z) s += (d[z] = mu[z] * (0.1 + rng.next_double()));
        for (int z = 0; z < dim; ++z) {
            d[z] /= s;
            cmax = std::max(cmax, d[z] / mu[z]);
        }
    }
    CHECK(elliptic_potential_max(dists, mu, cmax) <= elliptic_potential_bound(T));
}

TEST_CASE("greedy extrapolation stays under the coverability bound out to T=1000") {
    auto built = build_two_layer(0.25, 1);
    PolicySet pols = induced_policies(built.mdp, built.family);
    double cov = coverability(built.mdp, pols).value;
    for (int T : {100, 1000}) {
        ComplexityReport rep = sec_rl(built.mdp, built.family, pols, T, TestType::kQ, false);
        CHECK(rep.value <= 6.0 * cov * (1.0 + std::log(T + 1.0)));
    }
}

TEST_CASE("zero-residual families satisfy every ordering check trivially") {
    Rng rng(399);
    LayeredMdp m = random_mdp(rng, {1, 2}, 2);
    ValueFunctionFamily fam = make_family(m, {optimal_values(m).q});
    PolicySet pols = induced_policies(m, fam);
    for (const auto& check : verify_sec_bounds(m, fam, pols, 3, 0.1)) CHECK(check.pass);
}
