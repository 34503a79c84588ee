#pragma once

#include <limits>
#include <string>
#include <vector>

#include "coverlab/family.hpp"
#include "coverlab/mdp.hpp"
#include "coverlab/simplex.hpp"

namespace coverlab {

/// Per-layer logging distributions mu_h over (x,a) cells.
struct DistributionFamily {
    std::vector<std::vector<double>> mu;  // [h][x*A+a]
};

inline ValidationReport validate(const LayeredMdp& m, const DistributionFamily& dist) {
    ValidationReport rep;
    if (static_cast<int>(dist.mu.size()) != m.horizon) {
        rep.fail("distribution family layer count mismatch");
        return rep;
    }
    for (int h = 0; h < m.horizon; ++h) {
        if (static_cast<int>(dist.mu[h].size()) != m.cells(h)) {
            rep.fail("distribution shape mismatch at layer " + std::to_string(h));
            continue;
        }
        double s = 0.0;
        for (double p : dist.mu[h]) {
            if (p < 0.0) rep.fail("negative mass at layer " + std::to_string(h));
            s += p;
        }
        if (!close(s, 1.0, kRowSumTol))
            rep.fail("layer " + std::to_string(h) + " mass " + format_double(s));
    }
    return rep;
}

/// Either an explicit finite list of policies or the set of all Markov
/// policies (handled by reachability DP where a finite list would be needed).
struct PolicySet {
    bool all = false;
    std::vector<Policy> policies;
};

inline PolicySet all_markov_policies() {
    PolicySet s;
    s.all = true;
    return s;
}

inline PolicySet induced_policies(const LayeredMdp& m, const ValueFunctionFamily& fam) {
    PolicySet s;
    for (const auto& f : fam.members) s.policies.push_back(greedy_policy(m, f));
    return s;
}

inline PolicySet explicit_policies(std::vector<Policy> ps) {
    PolicySet s;
    s.policies = std::move(ps);
    return s;
}

/// Per-cell best-case visitation max_pi d_h^pi(x,a) for every layer. For an
/// explicit set this enumerates occupancies; for the all-policy set the
/// per-cell supremum equals the reachability of the state (the maximizing
/// policy plays the required action on arrival).
inline std::vector<std::vector<double>> cellwise_max_occupancy(const LayeredMdp& m,
                                                               const PolicySet& pols) {
    std::vector<std::vector<double>> best(m.horizon);
    for (int h = 0; h < m.horizon; ++h) best[h].assign(m.cells(h), 0.0);
    if (pols.all) {
        for (int h = 0; h < m.horizon; ++h)
            for (int x = 0; x < m.layer_size(h); ++x) {
                double r = max_reach(m, h, x);
                for (int a = 0; a < m.num_actions; ++a) best[h][m.cell(x, a)] = r;
            }
        return best;
    }
    if (pols.policies.empty()) throw std::runtime_error("empty policy set");
    for (const auto& pi : pols.policies) {
        OccupancyMeasure d = occupancy(m, pi);
        for (int h = 0; h < m.horizon; ++h)
            for (int c = 0; c < m.cells(h); ++c) best[h][c] = std::max(best[h][c], d.cell[h][c]);
    }
    return best;
}

struct CoverageReport {
    double value = 0.0;
    bool infinite = false;
    std::string method;
    // witness payloads; which fields are meaningful depends on the measure
    int witness_layer = -1;
    int witness_state = -1;
    int witness_action = -1;
    int witness_policy = -1;           // index into an explicit policy set
    int witness_member = -1;           // index into a value-function family
    DistributionFamily witness_mu;     // optimal logging distribution, when computed
    bool all_residuals_zero = false;
    double achieved_tol = 0.0;
    double lower_bracket = 0.0;        // bisection interval, when applicable
    double upper_bracket = 0.0;
};

/// Worst density ratio sup_{pi,h} d_h^pi(x,a) / mu_h(x,a). A cell with zero
/// logging mass but positive best-case visitation yields +infinity.
inline CoverageReport concentrability(const LayeredMdp& m, const PolicySet& pols,
                                      const DistributionFamily& dist) {
    auto best = cellwise_max_occupancy(m, pols);
    CoverageReport rep;
    rep.method = "density-ratio";
    for (int h = 0; h < m.horizon; ++h)
        for (int x = 0; x < m.layer_size(h); ++x)
            for (int a = 0; a < m.num_actions; ++a) {
                int c = m.cell(x, a);
                double d = best[h][c];
                if (d <= 0.0) continue;
                double mu = dist.mu[h][c];
                if (mu <= 0.0) {
                    rep.infinite = true;
                    rep.value = std::numeric_limits<double>::infinity();
                    rep.witness_layer = h;
                    rep.witness_state = x;
                    rep.witness_action = a;
                    return rep;
                }
                double ratio = d / mu;
                if (ratio > rep.value) {
                    rep.value = ratio;
                    rep.witness_layer = h;
                    rep.witness_state = x;
                    rep.witness_action = a;
                }
            }
    if (!pols.all && rep.witness_layer >= 0) {
        // recover which explicit policy attains the witness cell
        int h = rep.witness_layer, c = m.cell(rep.witness_state, rep.witness_action);
        double target = best[h][c];
        for (size_t i = 0; i < pols.policies.size(); ++i) {
            OccupancyMeasure d = occupancy(m, pols.policies[i]);
            if (close(d.cell[h][c], target, 1e-12)) {
                rep.witness_policy = static_cast<int>(i);
                break;
            }
        }
    }
    return rep;
}

/// Density ratio restricted to the optimal policy's occupancy (least-index
/// tie-breaking inside optimal_values).
inline CoverageReport single_policy_concentrability(const LayeredMdp& m,
                                                    const DistributionFamily& dist) {
    OptimalValues opt = optimal_values(m);
    PolicySet single = explicit_policies({opt.greedy});
    CoverageReport rep = concentrability(m, single, dist);
    rep.method = "optimal-policy-density-ratio";
    return rep;
}

/// Best achievable concentrability, computed in closed form as the worst
/// layer's cumulative best-case visitation; the witness distribution is the
/// normalized per-cell maximum.
inline CoverageReport coverability(const LayeredMdp& m, const PolicySet& pols) {
    auto best = cellwise_max_occupancy(m, pols);
    CoverageReport rep;
    rep.method = "cumulative-reachability";
    rep.witness_mu.mu.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        double total = 0.0;
        for (double v : best[h]) total += v;
        rep.witness_mu.mu[h] = best[h];
        if (total > 0.0)
            for (double& v : rep.witness_mu.mu[h]) v /= total;
        if (total > rep.value) {
            rep.value = total;
            rep.witness_layer = h;
        }
    }
    return rep;
}

/// Independent check of the same quantity straight from the inf-sup
/// definition: bisection over the candidate coefficient with an exact linear
/// feasibility test of "exists mu_h covering every policy's occupancy at
/// ratio C" at each probe. Requires a finite policy set.
inline CoverageReport coverability_infimum_oracle(const LayeredMdp& m, const PolicySet& pols,
                                                  double rel_tol = 1e-9) {
    if (pols.all) throw std::runtime_error("infimum oracle requires a finite policy set");
    std::vector<OccupancyMeasure> occs;
    occs.reserve(pols.policies.size());
    for (const auto& pi : pols.policies) occs.push_back(occupancy(m, pi));

    // feasible(C) <=> for every layer, some simplex point dominates all
    // occupancies scaled by 1/C: the cellwise requirement max_pi d/C must fit
    // total mass 1.
    auto feasible = [&](double c) {
        for (int h = 0; h < m.horizon; ++h) {
            double needed = 0.0;
            for (int cellIdx = 0; cellIdx < m.cells(h); ++cellIdx) {
                double d = 0.0;
                for (const auto& occ : occs) d = std::max(d, occ.cell[h][cellIdx]);
                needed += d / c;
            }
            if (needed > 1.0 + 1e-13) return false;
        }
        return true;
    };

    CoverageReport rep;
    rep.method = "bisection-linear-feasibility";
    double hi = 1.0;
    int guard = 0;
    while (!feasible(hi)) {
        hi *= 2.0;
        if (++guard > 200) {
            rep.infinite = true;
            rep.value = std::numeric_limits<double>::infinity();
            return rep;
        }
    }
    double lo = 0.0;
    while (hi - lo > rel_tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (mid <= 0.0) break;
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    rep.value = hi;
    rep.lower_bracket = lo;
    rep.upper_bracket = hi;
    rep.achieved_tol = hi - lo;
    return rep;
}

namespace detail {

struct ResidualData {
    // squared residuals per member and layer, plus on-policy masses
    std::vector<MemberTables> sq;                  // [f][h][cell]
    std::vector<std::vector<double>> on_policy;    // [f][pi]: sum_h E_{d^pi}[delta^2]
    bool any_nonzero = false;
};

inline ResidualData residual_data(const LayeredMdp& m, const ValueFunctionFamily& fam,
                                  const std::vector<OccupancyMeasure>& occs) {
    ResidualData out;
    out.sq.reserve(fam.members.size());
    for (const auto& f : fam.members) {
        MemberTables delta = residual_tables(m, f, true);
        for (auto& layer : delta)
            for (double& v : layer) {
                v = v * v;
                if (v > 0.0) out.any_nonzero = true;
            }
        out.sq.push_back(std::move(delta));
    }
    out.on_policy.assign(fam.members.size(), std::vector<double>(occs.size(), 0.0));
    for (size_t fi = 0; fi < fam.members.size(); ++fi)
        for (size_t pi = 0; pi < occs.size(); ++pi) {
            double s = 0.0;
            for (int h = 0; h < m.horizon; ++h)
                for (int c = 0; c < m.cells(h); ++c) s += occs[pi].cell[h][c] * out.sq[fi][h][c];
            out.on_policy[fi][pi] = s;
        }
    return out;
}

}  // namespace detail

/// Least C with sum_h E_{d^pi}[residual_f^2] <= C sum_h E_{mu}[residual_f^2]
/// over all members f and policies pi. Ratio conventions: 0/0 contributes 0
/// (the constraint is vacuous), positive/0 is +infinity. When every residual
/// vanishes the coefficient is reported as 1 with a flag.
inline CoverageReport generalized_concentrability(const LayeredMdp& m,
                                                  const ValueFunctionFamily& fam,
                                                  const PolicySet& pols,
                                                  const DistributionFamily& dist) {
    if (pols.all) throw std::runtime_error("generalized concentrability requires a finite policy set");
    std::vector<OccupancyMeasure> occs;
    for (const auto& pi : pols.policies) occs.push_back(occupancy(m, pi));
    detail::ResidualData rd = detail::residual_data(m, fam, occs);

    CoverageReport rep;
    rep.method = "residual-density-ratio";
    if (!rd.any_nonzero) {
        rep.value = 1.0;
        rep.all_residuals_zero = true;
        return rep;
    }
    for (size_t fi = 0; fi < fam.members.size(); ++fi) {
        double den = 0.0;
        for (int h = 0; h < m.horizon; ++h)
            for (int c = 0; c < m.cells(h); ++c) den += dist.mu[h][c] * rd.sq[fi][h][c];
        for (size_t pi = 0; pi < occs.size(); ++pi) {
            double num = rd.on_policy[fi][pi];
            if (num <= 0.0) continue;
            if (den <= 0.0) {
                rep.infinite = true;
                rep.value = std::numeric_limits<double>::infinity();
                rep.witness_member = static_cast<int>(fi);
                rep.witness_policy = static_cast<int>(pi);
                return rep;
            }
            double ratio = num / den;
            if (ratio > rep.value) {
                rep.value = ratio;
                rep.witness_member = static_cast<int>(fi);
                rep.witness_policy = static_cast<int>(pi);
            }
        }
    }
    return rep;
}

/// Infimum of the generalized coefficient over logging distributions:
/// bisection on C where each probe asks for mu in a product of simplices with
/// sum_h <residual_f^2, mu_h> >= on_policy(f,pi)/C for every (f,pi) pair -- a
/// linear feasibility problem handed to the two-phase simplex.
inline CoverageReport generalized_coverability(const LayeredMdp& m, const ValueFunctionFamily& fam,
                                               const PolicySet& pols, double rel_tol = 1e-7) {
    if (pols.all) throw std::runtime_error("generalized coverability requires a finite policy set");
    std::vector<OccupancyMeasure> occs;
    for (const auto& pi : pols.policies) occs.push_back(occupancy(m, pi));
    detail::ResidualData rd = detail::residual_data(m, fam, occs);

    CoverageReport rep;
    rep.method = "bisection-linear-feasibility";
    if (!rd.any_nonzero) {
        rep.value = 1.0;
        rep.all_residuals_zero = true;
        return rep;
    }

    // One constraint per (residual profile, required mass) pair. Members with
    // identical squared residuals collapse, pairs with zero on-policy mass
    // are vacuous, and for a shared profile only the largest mass binds.
    std::vector<size_t> profile;                 // representative member per profile
    std::vector<double> required;                // max on-policy mass for the profile
    for (size_t fi = 0; fi < fam.members.size(); ++fi) {
        double need = 0.0;
        for (size_t pi = 0; pi < occs.size(); ++pi) need = std::max(need, rd.on_policy[fi][pi]);
        if (need <= 0.0) continue;
        int found = -1;
        for (size_t k = 0; k < profile.size(); ++k) {
            double dist = 0.0;
            for (int h = 0; h < m.horizon; ++h)
                dist = std::max(dist, linf_distance(rd.sq[profile[k]][h], rd.sq[fi][h]));
            if (dist <= 1e-12) { found = static_cast<int>(k); break; }
        }
        if (found >= 0)
            required[found] = std::max(required[found], need);
        else {
            profile.push_back(fi);
            required.push_back(need);
        }
    }

    // variable layout: mu cells stacked by layer, then one slack per profile
    std::vector<int> offset(m.horizon + 1, 0);
    for (int h = 0; h < m.horizon; ++h) offset[h + 1] = offset[h] + m.cells(h);
    const int n_mu = offset[m.horizon];
    const int n_rows = static_cast<int>(profile.size());

    auto probe = [&](double c, DistributionFamily* witness) {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (int h = 0; h < m.horizon; ++h) {  // each layer's mass is 1
            std::vector<double> row(n_mu + n_rows, 0.0);
            for (int j = offset[h]; j < offset[h + 1]; ++j) row[j] = 1.0;
            a.push_back(std::move(row));
            b.push_back(1.0);
        }
        for (int k = 0; k < n_rows; ++k) {
            std::vector<double> row(n_mu + n_rows, 0.0);
            for (int h = 0; h < m.horizon; ++h)
                for (int cl = 0; cl < m.cells(h); ++cl) row[offset[h] + cl] = rd.sq[profile[k]][h][cl];
            row[n_mu + k] = -1.0;  // slack: <b,mu> - s = a/C
            a.push_back(std::move(row));
            b.push_back(required[k] / c);
        }
        LinearFeasibility sol = solve_equality_feasibility(std::move(a), std::move(b));
        if (sol.feasible && witness) {
            witness->mu.resize(m.horizon);
            for (int h = 0; h < m.horizon; ++h)
                witness->mu[h] = std::vector<double>(sol.x.begin() + offset[h],
                                                     sol.x.begin() + offset[h + 1]);
        }
        return sol.feasible;
    };

    double hi = 1.0;
    int guard = 0;
    while (!probe(hi, nullptr)) {
        hi *= 2.0;
        if (++guard > 60) {
            rep.infinite = true;
            rep.value = std::numeric_limits<double>::infinity();
            return rep;
        }
    }
    double lo = 0.0;
    while (hi - lo > rel_tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (mid <= 0.0) break;
        if (probe(mid, nullptr))
            hi = mid;
        else
            lo = mid;
    }
    probe(hi, &rep.witness_mu);
    rep.value = hi;
    rep.lower_bracket = lo;
    rep.upper_bracket = hi;
    rep.achieved_tol = hi - lo;
    return rep;
}

}  // namespace coverlab
