#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "coverlab/constructions.hpp"
#include "coverlab/coverage.hpp"
#include "coverlab/family.hpp"
#include "coverlab/mdp.hpp"

namespace coverlab {

using nlohmann::json;

// --- MDP ---------------------------------------------------------------
// {"H", "actions": [...], "layers": [{"states": [...]}, ...],
//  "transitions": t[h][x][a] = [{"state": idx, "prob": p}, ...],
//  "rewards": r[h][x][a], "initial_state": idx}
// Probabilities round-trip exactly: the serializer emits shortest-form
// decimals that parse back to the same double.

inline json to_json(const LayeredMdp& m) {
    json j;
    j["H"] = m.horizon;
    j["actions"] = m.action_labels;
    j["layers"] = json::array();
    for (int h = 0; h < m.horizon; ++h) j["layers"].push_back({{"states", m.state_labels[h]}});
    json trans = json::array();
    json rew = json::array();
    for (int h = 0; h < m.horizon; ++h) {
        json th = json::array(), rh = json::array();
        for (int x = 0; x < m.layer_size(h); ++x) {
            json tx = json::array(), rx = json::array();
            for (int a = 0; a < m.num_actions; ++a) {
                json row = json::array();
                const auto& p = m.row(h, x, a);
                for (int y = 0; y < static_cast<int>(p.size()); ++y)
                    if (p[y] != 0.0) row.push_back({{"state", y}, {"prob", p[y]}});
                tx.push_back(row);
                rx.push_back(m.reward(h, x, a));
            }
            th.push_back(tx);
            rh.push_back(rx);
        }
        trans.push_back(th);
        rew.push_back(rh);
    }
    j["transitions"] = trans;
    j["rewards"] = rew;
    j["initial_state"] = m.initial_state;
    return j;
}

inline LayeredMdp mdp_from_json(const json& j) {
    LayeredMdp m;
    m.horizon = j.at("H").get<int>();
    m.action_labels = j.at("actions").get<std::vector<std::string>>();
    m.num_actions = static_cast<int>(m.action_labels.size());
    std::vector<int> sizes;
    for (const auto& layer : j.at("layers"))
        sizes.push_back(static_cast<int>(layer.at("states").size()));
    if (static_cast<int>(sizes.size()) != m.horizon)
        throw std::runtime_error("mdp json: layer count does not match H");
    LayeredMdp shaped = make_mdp(sizes, m.num_actions);
    shaped.action_labels = m.action_labels;
    for (int h = 0; h < shaped.horizon; ++h)
        shaped.state_labels[h] = j.at("layers")[h].at("states").get<std::vector<std::string>>();
    const auto& trans = j.at("transitions");
    const auto& rew = j.at("rewards");
    for (int h = 0; h < shaped.horizon; ++h)
        for (int x = 0; x < shaped.layer_size(h); ++x)
            for (int a = 0; a < shaped.num_actions; ++a) {
                shaped.rewards[h][shaped.cell(x, a)] = rew[h][x][a].get<double>();
                if (h + 1 == shaped.horizon) continue;
                auto& row = shaped.transitions[h][shaped.cell(x, a)];
                for (const auto& entry : trans[h][x][a])
                    row.at(entry.at("state").get<int>()) = entry.at("prob").get<double>();
            }
    shaped.initial_state = j.at("initial_state").get<int>();
    return shaped;
}

// --- value-function family ----------------------------------------------
// {"H", "num_actions", "members": f[m][h][x][a],
//  "components": optional c[h][k][x][a]}

inline json to_json(const ValueFunctionFamily& fam) {
    json j;
    j["H"] = fam.horizon;
    j["num_actions"] = fam.num_actions;
    json members = json::array();
    for (const auto& f : fam.members) {
        json fm = json::array();
        for (int h = 0; h < fam.horizon; ++h) {
            json fh = json::array();
            int states = static_cast<int>(f[h].size()) / fam.num_actions;
            for (int x = 0; x < states; ++x) {
                json fx = json::array();
                for (int a = 0; a < fam.num_actions; ++a) fx.push_back(f[h][x * fam.num_actions + a]);
                fh.push_back(fx);
            }
            fm.push_back(fh);
        }
        members.push_back(fm);
    }
    j["members"] = members;
    json comps = json::array();
    for (int h = 0; h < fam.horizon; ++h) {
        json ch = json::array();
        for (const auto& table : fam.components[h]) {
            json ck = json::array();
            int states = static_cast<int>(table.size()) / fam.num_actions;
            for (int x = 0; x < states; ++x) {
                json cx = json::array();
                for (int a = 0; a < fam.num_actions; ++a) cx.push_back(table[x * fam.num_actions + a]);
                ck.push_back(cx);
            }
            ch.push_back(ck);
        }
        comps.push_back(ch);
    }
    j["components"] = comps;
    return j;
}

inline ValueFunctionFamily family_from_json(const json& j, const LayeredMdp& m) {
    ValueFunctionFamily fam;
    fam.horizon = j.at("H").get<int>();
    fam.num_actions = j.at("num_actions").get<int>();
    if (fam.horizon != m.horizon || fam.num_actions != m.num_actions)
        throw std::runtime_error("family json: shape does not match the mdp");
    auto read_table = [&](const json& jt, int h) {
        LayerTable t(m.cells(h), 0.0);
        for (int x = 0; x < m.layer_size(h); ++x)
            for (int a = 0; a < m.num_actions; ++a) t[m.cell(x, a)] = jt[x][a].get<double>();
        return t;
    };
    for (const auto& jm : j.at("members")) {
        MemberTables f(fam.horizon);
        for (int h = 0; h < fam.horizon; ++h) f[h] = read_table(jm[h], h);
        fam.members.push_back(std::move(f));
    }
    if (j.contains("components") && !j.at("components").empty()) {
        fam.components.resize(fam.horizon);
        for (int h = 0; h < fam.horizon; ++h)
            for (const auto& jc : j.at("components")[h])
                fam.components[h].push_back(read_table(jc, h));
    }
    build_components(fam);
    return fam;
}

// --- logging distributions: mu[h][x][a] ----------------------------------

inline json to_json_mu(const LayeredMdp& m, const DistributionFamily& dist) {
    json j = json::array();
    for (int h = 0; h < m.horizon; ++h) {
        json jh = json::array();
        for (int x = 0; x < m.layer_size(h); ++x) {
            json jx = json::array();
            for (int a = 0; a < m.num_actions; ++a) jx.push_back(dist.mu[h][m.cell(x, a)]);
            jh.push_back(jx);
        }
        j.push_back(jh);
    }
    return j;
}

inline DistributionFamily mu_from_json(const json& j, const LayeredMdp& m) {
    DistributionFamily dist;
    dist.mu.resize(m.horizon);
    for (int h = 0; h < m.horizon; ++h) {
        dist.mu[h].assign(m.cells(h), 0.0);
        for (int x = 0; x < m.layer_size(h); ++x)
            for (int a = 0; a < m.num_actions; ++a) dist.mu[h][m.cell(x, a)] = j[h][x][a].get<double>();
    }
    return dist;
}

// reward tables share the mu layout
inline std::vector<LayerTable> reward_from_json(const json& j, const LayeredMdp& m) {
    DistributionFamily d = mu_from_json(j, m);
    return d.mu;
}

inline json coverage_report_to_json(const LayeredMdp& m, const CoverageReport& rep) {
    json j;
    j["value"] = rep.infinite ? json("inf") : json(rep.value);
    j["method"] = rep.method;
    if (rep.witness_layer >= 0) j["witness_layer"] = rep.witness_layer;
    if (rep.witness_state >= 0) j["witness_state"] = rep.witness_state;
    if (rep.witness_action >= 0) j["witness_action"] = rep.witness_action;
    if (rep.witness_policy >= 0) j["witness_policy"] = rep.witness_policy;
    if (rep.witness_member >= 0) j["witness_member"] = rep.witness_member;
    if (!rep.witness_mu.mu.empty()) j["witness_mu"] = to_json_mu(m, rep.witness_mu);
    if (rep.all_residuals_zero) j["all_residuals_zero"] = true;
    if (rep.upper_bracket > 0.0) {
        j["bracket"] = {rep.lower_bracket, rep.upper_bracket};
        j["achieved_tol"] = rep.achieved_tol;
    }
    return j;
}

inline json manifest_to_json(const ConstructionManifest& man) {
    json j;
    j["name"] = man.name;
    j["params"] = man.params;
    j["expect_complete"] = man.expect_complete;
    if (man.c_cov_bound >= 0) j["c_cov_bound"] = man.c_cov_bound;
    if (man.c_gen_bound >= 0) j["c_gen_bound"] = man.c_gen_bound;
    if (man.dim_sq_lower >= 0) {
        j["dim_sq_lower"] = man.dim_sq_lower;
        j["dim_eps_below"] = man.dim_eps_below;
        j["dim_layer"] = man.dim_layer;
    }
    if (man.optimal_value >= 0) j["optimal_value"] = man.optimal_value;
    if (man.log_family_bound >= 0) j["log_family_bound"] = man.log_family_bound;
    return j;
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace coverlab
