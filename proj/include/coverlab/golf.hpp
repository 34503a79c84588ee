#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coverlab/family.hpp"
#include "coverlab/mdp.hpp"

namespace coverlab {

/// One logged transition (x, a, r, x') at a fixed layer; next_state indexes
/// the following layer (0 stands for the terminal sink after the last layer).
struct DataTuple {
    int state = 0;
    int action = 0;
    double reward = 0.0;
    int next_state = 0;
};

/// Exact squared-loss sum over a layer's dataset for a candidate layer table
/// against the greedy target of a next-layer table. Pass an empty next table
/// for the final layer (continuation value zero). Used directly by tests and
/// as the reference the incremental cache is checked against.
inline double squared_bellman_loss(const LayeredMdp& m, const std::vector<DataTuple>& data,
                                   const LayerTable& f_h, const LayerTable& f_next, int h,
                                   bool with_reward = true) {
    std::vector<double> next_max;
    if (h + 1 < m.horizon && !f_next.empty()) {
        next_max.assign(m.layer_size(h + 1), 0.0);
        for (int y = 0; y < m.layer_size(h + 1); ++y) {
            double best = f_next[m.cell(y, 0)];
            for (int a = 1; a < m.num_actions; ++a) best = std::max(best, f_next[m.cell(y, a)]);
            next_max[y] = best;
        }
    }
    double loss = 0.0;
    for (const auto& tup : data) {
        double target = with_reward ? tup.reward : 0.0;
        if (!next_max.empty()) target += next_max[tup.next_state];
        double diff = f_h[m.cell(tup.state, tup.action)] - target;
        loss += diff * diff;
    }
    return loss;
}

/// Running squared-loss sums per (layer-h component, layer-(h+1) component)
/// pair. Losses grow by one tuple per layer per round; the cache updates
/// incrementally and recomputes from the raw datasets every `recompute_every`
/// rounds to bound floating-point drift.
class LossCache {
public:
    LossCache() = default;

    LossCache(const LayeredMdp& m, const ValueFunctionFamily& fam, bool with_reward)
        : mdp_(&m), fam_(&fam), with_reward_(with_reward) {
        loss_.resize(m.horizon);
        next_max_.resize(m.horizon);
        for (int h = 0; h < m.horizon; ++h) {
            size_t rows = fam.components[h].size();
            size_t cols = next_count(h);
            loss_[h].assign(rows * cols, 0.0);
            if (h + 1 < m.horizon) {
                next_max_[h].resize(fam.components[h + 1].size());
                for (size_t j = 0; j < fam.components[h + 1].size(); ++j) {
                    next_max_[h][j].assign(m.layer_size(h + 1), 0.0);
                    for (int y = 0; y < m.layer_size(h + 1); ++y) {
                        const auto& tab = fam.components[h + 1][j];
                        double best = tab[m.cell(y, 0)];
                        for (int a = 1; a < m.num_actions; ++a)
                            best = std::max(best, tab[m.cell(y, a)]);
                        next_max_[h][j][y] = best;
                    }
                }
            }
        }
    }

    size_t next_count(int h) const {
        return h + 1 < mdp_->horizon ? fam_->components[h + 1].size() : 1;
    }

    void add_tuple(int h, const DataTuple& tup) {
        const auto& comps = fam_->components[h];
        size_t cols = next_count(h);
        for (size_t j = 0; j < cols; ++j) {
            double target = with_reward_ ? tup.reward : 0.0;
            if (h + 1 < mdp_->horizon) target += next_max_[h][j][tup.next_state];
            for (size_t i = 0; i < comps.size(); ++i) {
                double diff = comps[i][mdp_->cell(tup.state, tup.action)] - target;
                loss_[h][i * cols + j] += diff * diff;
            }
        }
    }

    void recompute(const std::vector<std::vector<DataTuple>>& datasets) {
        for (int h = 0; h < mdp_->horizon; ++h) {
            size_t cols = next_count(h);
            std::fill(loss_[h].begin(), loss_[h].end(), 0.0);
            for (const auto& tup : datasets[h])
                for (size_t j = 0; j < cols; ++j) {
                    double target = with_reward_ ? tup.reward : 0.0;
                    if (h + 1 < mdp_->horizon) target += next_max_[h][j][tup.next_state];
                    const auto& comps = fam_->components[h];
                    for (size_t i = 0; i < comps.size(); ++i) {
                        double diff = comps[i][mdp_->cell(tup.state, tup.action)] - target;
                        loss_[h][i * cols + j] += diff * diff;
                    }
                }
        }
    }

    double loss(int h, int comp_h, int comp_next) const {
        return loss_[h][static_cast<size_t>(comp_h) * next_count(h) + comp_next];
    }

    double min_loss(int h, int comp_next) const {
        size_t cols = next_count(h);
        double best = loss_[h][comp_next];
        for (size_t i = 1; i < fam_->components[h].size(); ++i)
            best = std::min(best, loss_[h][i * cols + comp_next]);
        return best;
    }

private:
    const LayeredMdp* mdp_ = nullptr;
    const ValueFunctionFamily* fam_ = nullptr;
    bool with_reward_ = true;
    std::vector<std::vector<double>> loss_;                  // [h][i*cols+j]
    std::vector<std::vector<std::vector<double>>> next_max_;  // [h][j][y]
};

/// Members whose per-layer loss gap stays within beta at every layer. With no
/// data or an effectively infinite beta this is the whole family.
inline std::vector<int> confidence_set(const LayeredMdp& m, const ValueFunctionFamily& fam,
                                       const LossCache& cache, double beta) {
    std::vector<int> survivors;
    for (size_t mi = 0; mi < fam.members.size(); ++mi) {
        bool ok = true;
        for (int h = 0; h < m.horizon && ok; ++h) {
            int i = fam.member_component[mi][h];
            int j = h + 1 < m.horizon ? fam.member_component[mi][h + 1] : 0;
            if (cache.loss(h, i, j) - cache.min_loss(h, j) > beta) ok = false;
        }
        if (ok) survivors.push_back(static_cast<int>(mi));
    }
    return survivors;
}

/// Stand-alone confidence-set computation from raw datasets (exact losses,
/// no cache); the primary path inside runs uses the cache.
inline std::vector<int> confidence_set(const LayeredMdp& m, const ValueFunctionFamily& fam,
                                       const std::vector<std::vector<DataTuple>>& datasets,
                                       double beta, bool with_reward = true) {
    LossCache cache(m, fam, with_reward);
    cache.recompute(datasets);
    return confidence_set(m, fam, cache, beta);
}

struct GolfConfig {
    int rounds = 0;
    double beta = 0.0;
    std::uint64_t seed = 0;
    bool oracle_diagnostics = false;  // track membership masks and Q*-in-set
    int recompute_every = 256;
};

/// beta = c * log(T H |F| / delta); the constant defaults to 2 and is
/// exposed because only its functional form is pinned down.
inline double default_beta(int rounds, int horizon, size_t family_size, double delta = 0.05,
                           double c = 2.0) {
    return c * std::log(static_cast<double>(rounds) * horizon * static_cast<double>(family_size) /
                        delta);
}

struct GolfRound {
    int chosen = -1;
    double optimistic_value = 0.0;
    double policy_value = 0.0;  // exact J(pi^(t))
    double cum_regret = 0.0;
    int set_size = 0;           // |F^(t)| after this round's update
    bool qstar_in_set = false;  // Q*-matching member survives F^(t)
    Trajectory trajectory;
};

struct RunLog {
    std::vector<GolfRound> rounds;
    std::vector<std::vector<DataTuple>> datasets;  // per layer, in round order
    bool aborted = false;                          // empty confidence set
    std::string abort_reason;
    int qstar_member = -1;  // member matching Q* within 1e-9, or -1
    double optimal_value = 0.0;
    std::vector<std::vector<std::uint8_t>> membership;  // [t][member], diagnostics only

    std::vector<std::vector<DataTuple>> datasets_before_round(int t) const {
        std::vector<std::vector<DataTuple>> out(datasets.size());
        size_t keep = static_cast<size_t>(std::max(0, t - 1));
        for (size_t h = 0; h < datasets.size(); ++h)
            out[h].assign(datasets[h].begin(),
                          datasets[h].begin() + std::min(keep, datasets[h].size()));
        return out;
    }
};

/// Live state of an optimistic online run: the survivors from the previous
/// round, the incremental loss sums, the generator, and the accumulated log.
struct GolfState {
    const LayeredMdp* mdp = nullptr;
    const ValueFunctionFamily* family = nullptr;
    GolfConfig config;
    LossCache cache;
    std::vector<int> survivors;  // confidence set entering the next round
    Rng rng;
    int round = 0;
    RunLog log;
    // static per-member data
    std::vector<Policy> greedy;
    std::vector<double> claimed;     // optimistic initial values
    std::vector<double> exact;       // J of each member's greedy policy

    GolfState(const LayeredMdp& m, const ValueFunctionFamily& fam, const GolfConfig& cfg)
        : mdp(&m), family(&fam), config(cfg), cache(m, fam, true), rng(cfg.seed) {
        log.datasets.resize(m.horizon);
        OptimalValues opt = optimal_values(m);
        log.optimal_value = opt.value;
        for (size_t mi = 0; mi < fam.members.size(); ++mi) {
            double dist = 0.0;
            for (int h = 0; h < m.horizon; ++h)
                dist = std::max(dist, linf_distance(fam.members[mi][h], opt.q[h]));
            if (dist <= 1e-9) {
                log.qstar_member = static_cast<int>(mi);
                break;
            }
        }
        greedy.resize(fam.members.size());
        claimed.resize(fam.members.size());
        exact.resize(fam.members.size());
        for (size_t mi = 0; mi < fam.members.size(); ++mi) {
            greedy[mi] = greedy_policy(m, fam.members[mi]);
            claimed[mi] = optimistic_value(m, fam.members[mi]);
            exact[mi] = policy_value(m, greedy[mi]).total;
        }
        survivors.resize(fam.members.size());
        for (size_t i = 0; i < survivors.size(); ++i) survivors[i] = static_cast<int>(i);
    }
};

/// One round: select the most optimistic survivor (least index on ties),
/// execute its greedy policy for an episode, append the transitions, and
/// re-derive the confidence set. Returns false and marks the log aborted
/// when the confidence set has emptied (beta too small) rather than
/// inflating beta behind the caller's back.
inline bool golf_step(GolfState& st) {
    const LayeredMdp& m = *st.mdp;
    const ValueFunctionFamily& fam = *st.family;
    ++st.round;
    if (st.survivors.empty()) {
        st.log.aborted = true;
        st.log.abort_reason =
            "confidence set empty at round " + std::to_string(st.round) + "; beta too small";
        return false;
    }
    int chosen = st.survivors[0];
    for (int mi : st.survivors)
        if (st.claimed[mi] > st.claimed[chosen]) chosen = mi;

    GolfRound round;
    round.chosen = chosen;
    round.optimistic_value = st.claimed[chosen];
    round.policy_value = st.exact[chosen];
    round.trajectory = sample_trajectory(m, st.greedy[chosen], st.rng);
    double prev = st.log.rounds.empty() ? 0.0 : st.log.rounds.back().cum_regret;
    round.cum_regret = prev + st.log.optimal_value - round.policy_value;

    for (int h = 0; h < m.horizon; ++h) {
        const auto& step = round.trajectory[h];
        DataTuple tup{step.state, step.action, step.reward, step.next_state};
        st.log.datasets[h].push_back(tup);
        st.cache.add_tuple(h, tup);
    }
    if (st.config.recompute_every > 0 && st.round % st.config.recompute_every == 0)
        st.cache.recompute(st.log.datasets);

    st.survivors = confidence_set(m, fam, st.cache, st.config.beta);
    round.set_size = static_cast<int>(st.survivors.size());
    round.qstar_in_set = st.log.qstar_member >= 0 &&
                         std::find(st.survivors.begin(), st.survivors.end(),
                                   st.log.qstar_member) != st.survivors.end();
    if (st.config.oracle_diagnostics) {
        std::vector<std::uint8_t> mask(fam.members.size(), 0);
        for (int mi : st.survivors) mask[mi] = 1;
        st.log.membership.push_back(std::move(mask));
    }
    st.log.rounds.push_back(std::move(round));
    return true;
}

/// Full run: T rounds or until abort; deterministic given the seed.
inline RunLog golf_run(const LayeredMdp& m, const ValueFunctionFamily& fam,
                       const GolfConfig& cfg) {
    GolfState st(m, fam, cfg);
    while (st.round < cfg.rounds && golf_step(st)) {
    }
    return std::move(st.log);
}

struct BatchConversion {
    double mixture_value = 0.0;   // J of the uniform mixture of executed policies
    double suboptimality = 0.0;   // J(pi*) - J(mixture) = Reg(T)/T
};

inline BatchConversion online_to_batch(const RunLog& log) {
    BatchConversion out;
    if (log.rounds.empty()) return out;
    double sum = 0.0;
    for (const auto& r : log.rounds) sum += r.policy_value;
    out.mixture_value = sum / static_cast<double>(log.rounds.size());
    out.suboptimality = log.optimal_value - out.mixture_value;
    return out;
}

}  // namespace coverlab
