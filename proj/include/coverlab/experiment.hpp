#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "coverlab/claims.hpp"
#include "coverlab/json_io.hpp"
#include "coverlab/reward_free.hpp"

namespace coverlab {

/// A declarative experiment: an instance (named construction or files), the
/// algorithm parameters, an explicit seed list, and a sweep axis. Everything
/// a run needs lives in the config, so identical configs yield identical
/// output bytes (the SVG is numerically, not byte, pinned).
struct ExperimentConfig {
    std::string kind;          // golf | reward-free | offline | claims
    json instance;             // {"construction": name, ...params} or {"mdp": path, ...}
    json params = json::object();  // kind-specific knobs
    std::vector<std::uint64_t> seeds;
    std::vector<int> sweep;    // rounds (online kinds) or sample budgets (offline)
    std::string out_dir = ".";
    bool emit_svg = false;
};

inline ExperimentConfig parse_experiment_config(const json& j) {
    ExperimentConfig cfg;
    if (!j.contains("kind")) throw std::runtime_error("config: missing key \"kind\"");
    cfg.kind = j.at("kind").get<std::string>();
    if (cfg.kind != "claims") {
        if (!j.contains("instance")) throw std::runtime_error("config: missing key \"instance\"");
        cfg.instance = j.at("instance");
        if (!j.contains("seeds")) throw std::runtime_error("config: missing key \"seeds\"");
        cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (!j.contains("sweep")) throw std::runtime_error("config: missing key \"sweep\"");
        cfg.sweep = j.at("sweep").get<std::vector<int>>();
    }
    if (j.contains("params")) cfg.params = j.at("params");
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("emit_svg")) cfg.emit_svg = j.at("emit_svg").get<bool>();
    return cfg;
}

struct BuiltInstance {
    LayeredMdp mdp;
    ValueFunctionFamily family;    // exploitation class
    ValueFunctionFamily g_family;  // exploration class, when applicable
    bool has_g = false;
};

/// Instance resolution shared by the config runner and the CLI: either a
/// construction by name with parameters, or explicit JSON files.
inline BuiltInstance build_instance(const json& spec) {
    BuiltInstance out;
    if (spec.contains("construction")) {
        std::string name = spec.at("construction").get<std::string>();
        if (name == "tree") {
            auto b = build_tree(spec.value("H", 4), spec.value("X", 16), spec.value("leaf_pair", 9));
            out.mdp = std::move(b.mdp);
            out.family = std::move(b.family);
        } else if (name == "two-layer") {
            auto b = build_two_layer(spec.value("eps2", 0.25), spec.value("instance", 0));
            out.mdp = std::move(b.mdp);
            out.family = std::move(b.family);
        } else if (name == "two-layer-rf") {
            auto b = build_two_layer_rf(spec.value("eps2", 0.25), spec.value("instance", 0));
            out.mdp = std::move(b.mdp);
            out.family = std::move(b.f_family);
            out.g_family = std::move(b.g_family);
            out.has_g = true;
        } else if (name == "bandit") {
            auto b = build_bandit_family(spec.value("eps1", 0.25));
            out.mdp = b.instances.at(spec.value("instance", 0));
            out.family = std::move(b.family);
        } else if (name == "exbmdp") {
            auto b = build_exbmdp(spec.value("S", 2), spec.value("Xi", 2), spec.value("A", 2),
                                  spec.value("H", 3), spec.value("obs_multiplicity", 2),
                                  spec.value("seed", 0));
            out.mdp = std::move(b.mdp);
        } else if (name == "gap-ladder") {
            auto b = claims::build_gap_ladder_bandit();
            out.mdp = std::move(b.mdp);
            out.family = std::move(b.family);
        } else {
            throw std::runtime_error("unknown construction: " + name);
        }
        return out;
    }
    if (!spec.contains("mdp")) throw std::runtime_error("instance: need \"construction\" or \"mdp\"");
    out.mdp = mdp_from_json(load_json(spec.at("mdp").get<std::string>()));
    if (spec.contains("family"))
        out.family = family_from_json(load_json(spec.at("family").get<std::string>()), out.mdp);
    if (spec.contains("gfamily")) {
        out.g_family = family_from_json(load_json(spec.at("gfamily").get<std::string>()), out.mdp);
        out.has_g = true;
    }
    return out;
}

inline void write_golf_csv(const std::string& path, const RunLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,fstar_in_set,set_size,optimistic_value,J_pi_t,cum_regret\n";
    for (size_t t = 0; t < log.rounds.size(); ++t) {
        const auto& r = log.rounds[t];
        out << (t + 1) << ',' << (r.qstar_in_set ? 1 : 0) << ',' << r.set_size << ','
            << format_double(r.optimistic_value) << ',' << format_double(r.policy_value) << ','
            << format_double(r.cum_regret) << '\n';
    }
}

/// Static median-regret curve. Numeric content is deterministic; the file is
/// meant for eyeballs, not diffing.
inline void write_regret_svg(const std::string& path, const std::vector<double>& xs,
                             const std::vector<double>& ys, const std::string& title) {
    const int w = 640, h = 400, margin = 50;
    double xmax = xs.empty() ? 1.0 : xs.back();
    double ymax = 1e-12;
    for (double y : ys) ymax = std::max(ymax, y);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\"" << w - margin
        << "\" y2=\"" << h - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << h - margin << "\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i) {
        double px = margin + (w - 2 * margin) * xs[i] / xmax;
        double py = h - margin - (h - 2 * margin) * ys[i] / ymax;
        out << format_double(px) << ',' << format_double(py) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << w - margin << "\" y=\"" << h - margin + 30
        << "\" text-anchor=\"end\" font-size=\"12\">rounds (max " << format_double(xmax)
        << ")</text>\n";
    out << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\" font-size=\"12\">max "
        << format_double(ymax) << "</text>\n";
    out << "</svg>\n";
}

namespace detail {

/// Runs jobs 0..n-1 on a small pool; each worker owns its run state and
/// results land in a pre-sized slot per job, so the merged output never
/// depends on completion order. COVERLAB_THREADS caps the pool.
template <typename Fn>
inline void parallel_for_jobs(int jobs, Fn&& fn) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("COVERLAB_THREADS")) threads = std::max(1, std::atoi(cap));
    threads = std::max(1, std::min(threads, jobs));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int job = next.fetch_add(1); job < jobs; job = next.fetch_add(1)) fn(job);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Executes a config and emits per-run CSV plus an aggregate JSON (medians
/// and interquartile ranges across seeds per sweep point; regret at small
/// horizons is heavy-tailed, so means are avoided). Returns the number of
/// failed declared assertions (claims kind) or 0.
inline int run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    if (cfg.kind == "claims") {
        std::vector<std::string> suites;
        if (cfg.params.contains("suites"))
            suites = cfg.params.at("suites").get<std::vector<std::string>>();
        else
            suites = claim_suite_names();
        json ledger = json::array();
        int failures = 0;
        for (const auto& suite : suites)
            for (const auto& r : run_claim_suite(suite)) {
                ledger.push_back({{"suite", r.suite},
                                  {"name", r.name},
                                  {"computed", r.computed},
                                  {"bound", r.bound},
                                  {"pass", r.pass},
                                  {"note", r.note}});
                if (!r.pass) ++failures;
            }
        save_json(cfg.out_dir + "/claims.json", ledger);
        return failures;
    }

    BuiltInstance inst = build_instance(cfg.instance);
    const int jobs = static_cast<int>(cfg.sweep.size() * cfg.seeds.size());
    json aggregate;
    aggregate["kind"] = cfg.kind;
    aggregate["points"] = json::array();

    if (cfg.kind == "golf") {
        double delta = cfg.params.value("delta", 0.05);
        double beta_c = cfg.params.value("beta_constant", 2.0);
        bool beta_auto = !cfg.params.contains("beta") || cfg.params.at("beta").is_string();
        std::vector<RunLog> logs(jobs);
        detail::parallel_for_jobs(jobs, [&](int job) {
            int ti = job / static_cast<int>(cfg.seeds.size());
            int si = job % static_cast<int>(cfg.seeds.size());
            int rounds = cfg.sweep[ti];
            GolfConfig gc;
            gc.rounds = rounds;
            gc.beta = beta_auto
                          ? default_beta(rounds, inst.mdp.horizon, inst.family.size(), delta, beta_c)
                          : cfg.params.at("beta").get<double>();
            gc.seed = cfg.seeds[si];
            logs[job] = golf_run(inst.mdp, inst.family, gc);
        });
        for (size_t ti = 0; ti < cfg.sweep.size(); ++ti) {
            std::vector<double> finals;
            std::vector<double> curve;  // median cum regret per round (first seed grid)
            for (size_t si = 0; si < cfg.seeds.size(); ++si) {
                const RunLog& log = logs[ti * cfg.seeds.size() + si];
                std::ostringstream name;
                name << cfg.out_dir << "/golf_T" << cfg.sweep[ti] << "_seed" << cfg.seeds[si]
                     << ".csv";
                write_golf_csv(name.str(), log);
                finals.push_back(log.rounds.empty() ? 0.0 : log.rounds.back().cum_regret);
            }
            json point;
            point["rounds"] = cfg.sweep[ti];
            point["median_regret"] = median(finals);
            point["iqr"] = {quantile(finals, 0.25), quantile(finals, 0.75)};
            aggregate["points"].push_back(point);
            if (cfg.emit_svg) {
                int rounds = cfg.sweep[ti];
                std::vector<double> xs, ys;
                for (int t = 0; t < rounds; ++t) {
                    std::vector<double> at;
                    for (size_t si = 0; si < cfg.seeds.size(); ++si) {
                        const RunLog& log = logs[ti * cfg.seeds.size() + si];
                        if (t < static_cast<int>(log.rounds.size()))
                            at.push_back(log.rounds[t].cum_regret);
                    }
                    if (!at.empty()) {
                        xs.push_back(t + 1);
                        ys.push_back(median(at));
                    }
                }
                std::ostringstream name;
                name << cfg.out_dir << "/golf_T" << cfg.sweep[ti] << "_median.svg";
                write_regret_svg(name.str(), xs, ys, "median cumulative regret");
            }
        }
    } else if (cfg.kind == "reward-free") {
        if (!inst.has_g) throw std::runtime_error("reward-free experiment needs an exploration class");
        double delta = cfg.params.value("delta", 0.05);
        double c_off = cfg.params.value("beta_off_constant", 2.0);
        double c_rf = cfg.params.value("beta_rf_constant", 3.0);
        double jstar = optimal_values(inst.mdp).value;
        std::vector<double> subopt(jobs);
        detail::parallel_for_jobs(jobs, [&](int job) {
            int ti = job / static_cast<int>(cfg.seeds.size());
            int si = job % static_cast<int>(cfg.seeds.size());
            int rounds = cfg.sweep[ti];
            size_t bigger = std::max(inst.family.size(), inst.g_family.size());
            double scale = std::log(rounds * inst.mdp.horizon * static_cast<double>(bigger) / delta);
            RfConfig rc{rounds, c_rf * scale, cfg.seeds[si]};
            ExplorationOutput out = rf_explore(inst.mdp, inst.g_family, rc);
            ExploitResult fit =
                rf_exploit(inst.mdp, inst.family, inst.mdp.rewards, out, c_off * scale);
            subopt[job] =
                fit.aborted ? jstar : jstar - policy_value(inst.mdp, fit.policy).total;
        });
        std::ofstream csv(cfg.out_dir + "/reward_free.csv");
        csv << "rounds,seed,suboptimality\n";
        for (size_t ti = 0; ti < cfg.sweep.size(); ++ti) {
            std::vector<double> at;
            for (size_t si = 0; si < cfg.seeds.size(); ++si) {
                double v = subopt[ti * cfg.seeds.size() + si];
                at.push_back(v);
                csv << cfg.sweep[ti] << ',' << cfg.seeds[si] << ',' << format_double(v) << '\n';
            }
            json point;
            point["rounds"] = cfg.sweep[ti];
            point["median_suboptimality"] = median(at);
            point["iqr"] = {quantile(at, 0.25), quantile(at, 0.75)};
            aggregate["points"].push_back(point);
        }
    } else if (cfg.kind == "offline") {
        std::string algo = cfg.params.value("algo", "msbo");
        DistributionFamily mu;
        if (cfg.params.contains("mu"))
            mu = mu_from_json(load_json(cfg.params.at("mu").get<std::string>()), inst.mdp);
        else
            mu = coverability(inst.mdp, induced_policies(inst.mdp, inst.family)).witness_mu;
        double jstar = optimal_values(inst.mdp).value;
        std::vector<double> subopt(jobs);
        detail::parallel_for_jobs(jobs, [&](int job) {
            int ni = job / static_cast<int>(cfg.seeds.size());
            int si = job % static_cast<int>(cfg.seeds.size());
            OfflineDataset ds = generate_offline(inst.mdp, mu, cfg.sweep[ni], cfg.seeds[si]);
            OfflineFit fit = algo == "fqi" ? fqi(inst.mdp, inst.family, ds)
                                           : msbo(inst.mdp, inst.family, ds);
            subopt[job] = jstar - policy_value(inst.mdp, fit.policy).total;
        });
        std::ofstream csv(cfg.out_dir + "/offline_" + algo + ".csv");
        csv << "n,seed,suboptimality\n";
        for (size_t ni = 0; ni < cfg.sweep.size(); ++ni) {
            std::vector<double> at;
            for (size_t si = 0; si < cfg.seeds.size(); ++si) {
                double v = subopt[ni * cfg.seeds.size() + si];
                at.push_back(v);
                csv << cfg.sweep[ni] << ',' << cfg.seeds[si] << ',' << format_double(v) << '\n';
            }
            json point;
            point["n"] = cfg.sweep[ni];
            point["median_suboptimality"] = median(at);
            point["iqr"] = {quantile(at, 0.25), quantile(at, 0.75)};
            aggregate["points"].push_back(point);
        }
    } else {
        throw std::runtime_error("unknown experiment kind: " + cfg.kind);
    }

    save_json(cfg.out_dir + "/aggregate.json", aggregate);
    return 0;
}

}  // namespace coverlab
