// coverlab: exact coverage coefficients, complexity measures, optimistic
// exploration runs, and claim verification on finite layered MDPs.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "coverlab/experiment.hpp"

using namespace coverlab;

namespace {

LayeredMdp load_mdp(const std::string& path) { return mdp_from_json(load_json(path)); }

ValueFunctionFamily load_family(const std::string& path, const LayeredMdp& m) {
    return family_from_json(load_json(path), m);
}

PolicySet resolve_policies(const std::string& which, const LayeredMdp& m,
                           const ValueFunctionFamily* fam) {
    if (which == "all") return all_markov_policies();
    if (which == "induced") {
        if (!fam) throw std::runtime_error("--policies induced needs --family");
        return induced_policies(m, *fam);
    }
    throw std::runtime_error("--policies must be 'induced' or 'all'");
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        save_json(out_path, j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coverage / complexity laboratory for finite layered MDPs"};
    app.require_subcommand(1);

    // ---- validate ----------------------------------------------------
    auto* validate_cmd = app.add_subcommand("validate", "check an MDP file's invariants");
    std::string v_mdp;
    validate_cmd->add_option("--mdp", v_mdp, "MDP json")->required();
    validate_cmd->callback([&] {
        ValidationReport rep = validate(load_mdp(v_mdp));
        if (rep.ok) {
            std::printf("valid\n");
        } else {
            for (const auto& v : rep.violations) std::printf("violation: %s\n", v.c_str());
            throw CLI::RuntimeError(1);
        }
    });

    // ---- construct ----------------------------------------------------
    auto* construct_cmd = app.add_subcommand("construct", "generate a benchmark instance");
    std::string c_name, c_out_mdp, c_out_family, c_out_gfamily, c_out_manifest;
    int c_H = 4, c_X = 16, c_leaf_pair = 9, c_instance = 0, c_S = 2, c_Xi = 2, c_A = 2, c_mult = 2;
    double c_eps = 0.25;
    std::uint64_t c_seed = 0;
    construct_cmd->add_option("name", c_name, "tree|bandit|two-layer|two-layer-rf|exbmdp")
        ->required();
    construct_cmd->add_option("--H", c_H, "horizon");
    construct_cmd->add_option("--X", c_X, "state budget (tree)");
    construct_cmd->add_option("--leaf-pair", c_leaf_pair, "rewarded leaf*2+action (tree)");
    construct_cmd->add_option("--eps", c_eps, "branch/gap parameter (bandit, two-layer)");
    construct_cmd->add_option("--instance", c_instance, "payoff arm index");
    construct_cmd->add_option("--S", c_S, "endogenous states (exbmdp)");
    construct_cmd->add_option("--Xi", c_Xi, "noise states (exbmdp)");
    construct_cmd->add_option("--A", c_A, "actions (exbmdp)");
    construct_cmd->add_option("--obs-mult", c_mult, "observations per latent pair (exbmdp)");
    construct_cmd->add_option("--seed", c_seed, "generator seed (exbmdp)");
    construct_cmd->add_option("--out-mdp", c_out_mdp, "MDP output path");
    construct_cmd->add_option("--out-family", c_out_family, "family output path");
    construct_cmd->add_option("--out-gfamily", c_out_gfamily, "exploration family output path");
    construct_cmd->add_option("--out-manifest", c_out_manifest, "manifest output path");
    construct_cmd->callback([&] {
        LayeredMdp mdp;
        ValueFunctionFamily family, gfamily;
        ConstructionManifest manifest;
        bool has_family = true, has_g = false;
        if (c_name == "tree") {
            auto b = build_tree(c_H, c_X, c_leaf_pair);
            mdp = b.mdp; family = b.family; manifest = b.manifest;
        } else if (c_name == "two-layer") {
            auto b = build_two_layer(c_eps, c_instance);
            mdp = b.mdp; family = b.family; manifest = b.manifest;
        } else if (c_name == "two-layer-rf") {
            auto b = build_two_layer_rf(c_eps, c_instance);
            mdp = b.mdp; family = b.f_family; gfamily = b.g_family;
            manifest = b.manifest; has_g = true;
        } else if (c_name == "bandit") {
            auto b = build_bandit_family(c_eps);
            mdp = b.instances.at(c_instance); family = b.family; manifest = b.manifest;
        } else if (c_name == "exbmdp") {
            auto b = build_exbmdp(c_S, c_Xi, c_A, c_H, c_mult, c_seed);
            mdp = b.mdp; manifest = b.manifest; has_family = false;
        } else {
            throw CLI::ValidationError("unknown construction " + c_name);
        }
        if (!c_out_mdp.empty()) save_json(c_out_mdp, to_json(mdp));
        if (!c_out_family.empty() && has_family) save_json(c_out_family, to_json(family));
        if (!c_out_gfamily.empty() && has_g) save_json(c_out_gfamily, to_json(gfamily));
        if (!c_out_manifest.empty()) save_json(c_out_manifest, manifest_to_json(manifest));
        std::printf("constructed %s: %d layers, %d actions%s\n", c_name.c_str(), mdp.horizon,
                    mdp.num_actions,
                    has_family ? (", " + std::to_string(family.size()) + " members").c_str() : "");
    });

    // ---- measure -------------------------------------------------------
    auto* measure_cmd = app.add_subcommand("measure", "compute a coverage/complexity coefficient");
    std::string m_what, m_mdp, m_family, m_mu, m_policies = "induced", m_type = "q", m_out;
    double m_eps = 0.1;
    int m_T = 4;
    measure_cmd->add_option("what", m_what, "conc|spc|cov|gen-conc|gen-cov|be-dim|be-dim-sq|sec")
        ->required();
    measure_cmd->add_option("--mdp", m_mdp, "MDP json")->required();
    measure_cmd->add_option("--family", m_family, "family json");
    measure_cmd->add_option("--mu", m_mu, "logging distribution json");
    measure_cmd->add_option("--policies", m_policies, "induced|all");
    measure_cmd->add_option("--eps", m_eps, "dimension threshold");
    measure_cmd->add_option("--T", m_T, "sequence length");
    measure_cmd->add_option("--type", m_type, "q|v test functions");
    measure_cmd->add_option("--out", m_out, "write the report here instead of stdout");
    measure_cmd->callback([&] {
        LayeredMdp mdp = load_mdp(m_mdp);
        ValueFunctionFamily family;
        bool has_family = !m_family.empty();
        if (has_family) family = load_family(m_family, mdp);
        PolicySet pols = resolve_policies(m_policies, mdp, has_family ? &family : nullptr);
        TestType type = m_type == "v" ? TestType::kV : TestType::kQ;

        json report;
        if (m_what == "conc" || m_what == "spc" || m_what == "gen-conc") {
            if (m_mu.empty()) throw CLI::ValidationError("--mu required for " + m_what);
            DistributionFamily mu = mu_from_json(load_json(m_mu), mdp);
            CoverageReport rep = m_what == "conc" ? concentrability(mdp, pols, mu)
                                 : m_what == "spc"
                                     ? single_policy_concentrability(mdp, mu)
                                     : generalized_concentrability(mdp, family, pols, mu);
            report = coverage_report_to_json(mdp, rep);
        } else if (m_what == "cov") {
            report = coverage_report_to_json(mdp, coverability(mdp, pols));
        } else if (m_what == "gen-cov") {
            report = coverage_report_to_json(mdp, generalized_coverability(mdp, family, pols));
        } else if (m_what == "be-dim" || m_what == "be-dim-sq") {
            EluderVariant variant =
                m_what == "be-dim-sq" ? EluderVariant::kSquared : EluderVariant::kAverage;
            ComplexityReport rep = be_dim(mdp, family, pols, m_eps, variant, type);
            report["measure"] = rep.measure;
            report["value"] = rep.value;
            report["exact"] = rep.exact;
            report["layer"] = rep.layer;
            report["per_layer"] = rep.per_layer;
            json wit = json::array();
            for (const auto& s : rep.witness)
                wit.push_back({{"dist", s.dist},
                               {"test", s.test},
                               {"expectation", s.expectation},
                               {"accumulated", s.accumulated}});
            report["witness"] = wit;
        } else if (m_what == "sec") {
            json wit = json::array();
            try {
                ComplexityReport rep = sec_rl(mdp, family, pols, m_T, type, true);
                report["measure"] = rep.measure;
                report["value"] = rep.value;
                report["layer"] = rep.layer;
                report["per_layer"] = rep.per_layer;
                for (const auto& s : rep.witness)
                    wit.push_back({{"dist", s.dist}, {"test", s.test},
                                   {"expectation", s.expectation}});
            } catch (const std::exception&) {
                // sequence space too large for the exact search: report the
                // certified greedy lower bound and the coverability upper bound
                ComplexityReport lo = sec_rl(mdp, family, pols, m_T, type, false);
                double cov = coverability(mdp, pols).value;
                report["measure"] = "sequential-extrapolation-interval";
                report["lower"] = lo.value;
                report["upper"] = 2.0 * cov * (1.0 + 2.0 * std::log(m_T + 1.0));
                for (const auto& s : lo.witness)
                    wit.push_back({{"dist", s.dist}, {"test", s.test},
                                   {"expectation", s.expectation}});
            }
            report["witness"] = wit;
        } else {
            throw CLI::ValidationError("unknown measure " + m_what);
        }
        emit(report, m_out);
    });

    // ---- run -----------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute an algorithm or an experiment config");
    run_cmd->require_subcommand(1);

    auto* golf_cmd = run_cmd->add_subcommand("golf", "optimistic online run");
    std::string g_mdp, g_family, g_beta = "auto", g_out;
    int g_T = 100;
    double g_delta = 0.05;
    std::uint64_t g_seed = 0;
    golf_cmd->add_option("--mdp", g_mdp)->required();
    golf_cmd->add_option("--family", g_family)->required();
    golf_cmd->add_option("--T", g_T, "rounds")->required();
    golf_cmd->add_option("--beta", g_beta, "confidence width or 'auto'");
    golf_cmd->add_option("--delta", g_delta, "failure budget for auto beta");
    golf_cmd->add_option("--seed", g_seed);
    golf_cmd->add_option("--out", g_out, "per-round csv")->required();
    golf_cmd->callback([&] {
        LayeredMdp mdp = load_mdp(g_mdp);
        ValueFunctionFamily family = load_family(g_family, mdp);
        GolfConfig cfg;
        cfg.rounds = g_T;
        cfg.beta = g_beta == "auto" ? default_beta(g_T, mdp.horizon, family.size(), g_delta)
                                    : std::stod(g_beta);
        cfg.seed = g_seed;
        RunLog log = golf_run(mdp, family, cfg);
        write_golf_csv(g_out, log);
        BatchConversion batch = online_to_batch(log);
        std::printf("rounds=%zu final_regret=%s mixture_suboptimality=%s%s\n", log.rounds.size(),
                    format_double(log.rounds.empty() ? 0.0 : log.rounds.back().cum_regret).c_str(),
                    format_double(batch.suboptimality).c_str(),
                    log.aborted ? (" aborted: " + log.abort_reason).c_str() : "");
        if (log.aborted) throw CLI::RuntimeError(2);
    });

    auto* rf_cmd = run_cmd->add_subcommand("reward-free", "exploration then offline selection");
    std::string rf_mdp, rf_gfamily, rf_ffamily, rf_reward, rf_out;
    int rf_T = 100;
    double rf_beta_rf = -1.0, rf_beta_off = -1.0, rf_delta = 0.05;
    std::uint64_t rf_seed = 0;
    rf_cmd->add_option("--mdp", rf_mdp)->required();
    rf_cmd->add_option("--gfamily", rf_gfamily, "exploration class")->required();
    rf_cmd->add_option("--ffamily", rf_ffamily, "exploitation class")->required();
    rf_cmd->add_option("--reward", rf_reward, "target reward table json (defaults to the MDP's)");
    rf_cmd->add_option("--T", rf_T)->required();
    rf_cmd->add_option("--beta-rf", rf_beta_rf, "exploration width (default 3 log(TH|G|/delta))");
    rf_cmd->add_option("--beta-off", rf_beta_off, "offline width (default 2 log(TH|G|/delta))");
    rf_cmd->add_option("--delta", rf_delta);
    rf_cmd->add_option("--seed", rf_seed);
    rf_cmd->add_option("--out", rf_out, "per-round csv")->required();
    rf_cmd->callback([&] {
        LayeredMdp mdp = load_mdp(rf_mdp);
        ValueFunctionFamily gfam = load_family(rf_gfamily, mdp);
        ValueFunctionFamily ffam = load_family(rf_ffamily, mdp);
        std::vector<LayerTable> reward =
            rf_reward.empty() ? mdp.rewards : reward_from_json(load_json(rf_reward), mdp);
        size_t bigger = std::max(ffam.size(), gfam.size());
        double scale = std::log(rf_T * mdp.horizon * static_cast<double>(bigger) / rf_delta);
        RfConfig cfg{rf_T, rf_beta_rf > 0 ? rf_beta_rf : 3.0 * scale, rf_seed};
        ExplorationOutput out = rf_explore(mdp, gfam, cfg);
        std::ofstream csv(rf_out);
        csv << "t,chosen,claimed_value,set_size\n";
        for (size_t t = 0; t < out.rounds.size(); ++t)
            csv << (t + 1) << ',' << out.rounds[t].chosen << ','
                << format_double(out.rounds[t].explored_value) << ',' << out.rounds[t].set_size
                << '\n';
        ExploitResult fit =
            rf_exploit(mdp, ffam, reward, out, rf_beta_off > 0 ? rf_beta_off : 2.0 * scale);
        if (fit.aborted) {
            std::printf("offline selection aborted: %s\n", fit.abort_reason.c_str());
            throw CLI::RuntimeError(2);
        }
        double j = policy_value(mdp, fit.policy).total;
        std::printf("t_star=%d chosen=%d policy_value=%s suboptimality=%s\n", out.t_star,
                    fit.chosen, format_double(j).c_str(),
                    format_double(optimal_values(mdp).value - j).c_str());
    });

    auto* off_cmd = run_cmd->add_subcommand("offline", "fit a dataset from a logging distribution");
    std::string o_algo = "msbo", o_mdp, o_family, o_mu, o_out;
    int o_n = 1000;
    std::uint64_t o_seed = 0;
    off_cmd->add_option("algo", o_algo, "msbo|fqi")->required();
    off_cmd->add_option("--mdp", o_mdp)->required();
    off_cmd->add_option("--family", o_family)->required();
    off_cmd->add_option("--mu", o_mu, "logging distribution json (defaults to the covering witness)");
    off_cmd->add_option("--n", o_n, "samples per layer")->required();
    off_cmd->add_option("--seed", o_seed);
    off_cmd->add_option("--out", o_out, "result csv")->required();
    off_cmd->callback([&] {
        LayeredMdp mdp = load_mdp(o_mdp);
        ValueFunctionFamily family = load_family(o_family, mdp);
        DistributionFamily mu =
            o_mu.empty() ? coverability(mdp, induced_policies(mdp, family)).witness_mu
                         : mu_from_json(load_json(o_mu), mdp);
        OfflineDataset ds = generate_offline(mdp, mu, o_n, o_seed);
        OfflineFit fit = o_algo == "fqi" ? fqi(mdp, family, ds) : msbo(mdp, family, ds);
        double j = policy_value(mdp, fit.policy).total;
        double gap = optimal_values(mdp).value - j;
        std::ofstream csv(o_out);
        csv << "algo,n,seed,chosen,objective,policy_value,suboptimality\n";
        csv << o_algo << ',' << o_n << ',' << o_seed << ',' << fit.chosen << ','
            << format_double(fit.objective) << ',' << format_double(j) << ','
            << format_double(gap) << '\n';
        std::printf("%s: suboptimality=%s\n", o_algo.c_str(), format_double(gap).c_str());
    });

    auto* exp_cmd = run_cmd->add_subcommand("experiment", "seeded sweep from a config file");
    std::string e_config, e_out_dir;
    exp_cmd->add_option("config", e_config, "experiment json")->required();
    exp_cmd->add_option("--out-dir", e_out_dir, "override the config's output directory");
    exp_cmd->callback([&] {
        ExperimentConfig cfg = parse_experiment_config(load_json(e_config));
        if (!e_out_dir.empty()) cfg.out_dir = e_out_dir;
        int failures = run_experiment(cfg);
        std::printf("experiment done: %d failed assertions, outputs in %s\n", failures,
                    cfg.out_dir.c_str());
        if (failures > 0) throw CLI::RuntimeError(3);
    });

    // ---- verify ----------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "run a claim suite and print the ledger");
    std::string s_suite = "all", s_out;
    verify_cmd->add_option("--suite", s_suite, "suite name or 'all'");
    verify_cmd->add_option("--out", s_out, "ledger json path");
    verify_cmd->callback([&] {
        std::vector<ClaimRow> rows = run_claim_suite(s_suite);
        json ledger = json::array();
        int failures = 0;
        for (const auto& r : rows) {
            std::printf("[%s] %s / %s: computed=%s bound=%s %s\n", r.pass ? "pass" : "FAIL",
                        r.suite.c_str(), r.name.c_str(), format_double(r.computed).c_str(),
                        format_double(r.bound).c_str(), r.note.c_str());
            ledger.push_back({{"suite", r.suite},
                              {"name", r.name},
                              {"computed", r.computed},
                              {"bound", r.bound},
                              {"pass", r.pass},
                              {"note", r.note}});
            if (!r.pass) ++failures;
        }
        if (!s_out.empty()) save_json(s_out, ledger);
        std::printf("%d checks, %d failures\n", static_cast<int>(rows.size()), failures);
        if (failures > 0) throw CLI::RuntimeError(1);
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}
