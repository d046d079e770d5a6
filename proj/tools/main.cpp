#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "beliefsynth/io.hpp"

namespace bs = beliefsynth;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitNonConvergence = 3;

struct Manifest {
    std::string model;
    std::string automaton;
    std::string template_name;
    std::string aps_csv;
    std::string ap_table;
    std::string formula;
    std::string config;
    std::string out;
    std::string policy;
    std::optional<std::uint64_t> seed;
    bool resume = false;
    std::size_t threads = 1;
    std::uint64_t runs = 100;
    std::uint64_t horizon = 200;
    std::uint64_t window = 50;
};

struct Bundle {
    bs::Pomdp model;
    bs::Ldba aut;
    std::vector<bs::AtomicProposition> aps;
};

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string out_dir(const Manifest& mf) {
    if (!mf.out.empty()) return mf.out;
    if (const char* env = std::getenv("BELIEFSYNTH_OUT")) return env;
    return ".";
}

/// Loads model + automaton + aligned propositions; throws on any problem.
Bundle load_bundle(const Manifest& mf) {
    Bundle b;
    b.model = bs::load_model(mf.model);
    const auto violations = bs::validate_model(b.model);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
        throw bs::ValidationError("model failed validation (" + std::to_string(violations.size())
                                  + " violations)");
    }
    std::vector<bs::AtomicProposition> table;
    if (!mf.ap_table.empty()) table = bs::load_ap_table(mf.ap_table, b.model);

    if (!mf.automaton.empty()) {
        b.aut = bs::load_ldba(mf.automaton);
    } else if (!mf.formula.empty()) {
        b.aut = bs::automaton_for_formula(bs::parse_formula(mf.formula, table));
    } else if (!mf.template_name.empty()) {
        bs::TemplateKind kind;
        if (mf.template_name == "gf")
            kind = bs::TemplateKind::GF;
        else if (mf.template_name == "fg")
            kind = bs::TemplateKind::FG;
        else if (mf.template_name == "fg-or-fg")
            kind = bs::TemplateKind::FGOrFG;
        else
            throw bs::ValidationError("unknown template '" + mf.template_name
                                      + "' (expected gf, fg, or fg-or-fg)");
        b.aut = bs::template_automaton(kind, split_csv(mf.aps_csv));
    } else {
        b.aut = bs::universal_automaton({});  // unconstrained
    }
    b.aps = bs::align_aps(table, b.aut.ap_names);
    bs::check_ap_alignment(b.aut, b.aps);
    return b;
}

int cmd_validate(const Manifest& mf) {
    std::vector<std::string> violations;
    const bs::Pomdp m = bs::load_model(mf.model);
    for (const auto& v : bs::validate_model(m)) violations.push_back("model: " + v);
    std::vector<bs::AtomicProposition> table;
    if (!mf.ap_table.empty()) table = bs::load_ap_table(mf.ap_table, m);
    if (!mf.automaton.empty()) {
        std::vector<std::string> av;
        const bs::Ldba aut = bs::load_ldba(mf.automaton, &av);
        for (const auto& v : av) violations.push_back("automaton: " + v);
        if (av.empty()) {
            try {
                bs::check_ap_alignment(aut, bs::align_aps(table, aut.ap_names));
            } catch (const bs::Error& e) {
                violations.push_back(std::string("aps: ") + e.what());
            }
        }
    }
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    std::cout << (violations.empty() ? "ok" : "invalid") << "\n";
    return violations.empty() ? kExitOk : kExitValidation;
}

int cmd_solve(const Manifest& mf) {
    const Bundle b = load_bundle(mf);
    bs::SolveConfig cfg;
    if (!mf.config.empty()) cfg = bs::solve_config_from_json(bs::read_json_file(mf.config));
    const std::vector<bs::Belief> beliefs = bs::build_belief_set(b.model, cfg);
    const bs::SolveResult res = bs::solve_pbvi(b.model, b.aut, b.aps, beliefs, cfg);

    const bs::ProductState init{b.model.initial, b.aut.initial};
    const double vr = bs::reward_value(res, b.aut, init, cfg);
    const double vp = bs::probability_value(res, b.aut, init);

    const fs::path dir = out_dir(mf);
    fs::create_directories(dir);
    bs::write_text_file((dir / "values.json").string(),
                        bs::value_export_json(res, b.model, b.aut).dump(2) + "\n");
    bs::write_text_file((dir / "policy.json").string(),
                        bs::policy_export_json(res.fr, res.fp, cfg.safe_threshold).dump(2) + "\n");
    const bs::json summary = {{"v_r", vr},
                              {"v_p", vp},
                              {"sweeps_r", res.sweeps_r},
                              {"sweeps_p", res.sweeps_p},
                              {"residual_r", res.residual_r},
                              {"residual_p", res.residual_p},
                              {"converged", res.converged_r && res.converged_p},
                              {"beliefs", beliefs.size()}};
    bs::write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return (res.converged_r && res.converged_p) ? kExitOk : kExitNonConvergence;
}

int cmd_learn(const Manifest& mf) {
    const Bundle b = load_bundle(mf);
    bs::LearnerConfig cfg;
    if (!mf.config.empty()) cfg = bs::learner_config_from_json(bs::read_json_file(mf.config));
    if (mf.seed) cfg.seed = *mf.seed;

    const fs::path dir = out_dir(mf);
    fs::create_directories(dir);
    const std::string records_path = (dir / "records.jsonl").string();
    const std::string state_path = (dir / "state.json").string();

    bs::LearnerState st = mf.resume
                              ? bs::load_checkpoint(records_path, state_path, b.model, b.aut, b.aps)
                              : bs::init_learner(b.model, b.aut, b.aps, cfg);
    std::vector<bs::MetricsRow> metrics;
    bs::run_learner(st, b.model, b.aut, b.aps, cfg, &metrics);

    bs::save_checkpoint(records_path, state_path, st);
    bs::write_metrics_csv((dir / "metrics.csv").string(), metrics, mf.resume);
    bs::write_text_file((dir / "policy.json").string(),
                        bs::policy_export_json(st.fr, st.fp, cfg.safe_threshold).dump(2) + "\n");
    const bs::ProductState init{b.model.initial, b.aut.initial};
    const bs::json summary = {
        {"steps", st.step},
        {"records", st.store.records.size()},
        {"converged", st.converged},
        {"residual_r", st.last_residual_r},
        {"residual_p", st.last_residual_p},
        {"v_r", bs::eval_v_constrained(st.fr, st.fp, b.aut, init, cfg.safe_threshold)},
        {"v_p", bs::eval_v(st.fp, b.aut, init)}};
    bs::write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    const bool wanted_convergence = cfg.convergence_window > 0;
    return (!wanted_convergence || st.converged) ? kExitOk : kExitNonConvergence;
}

int cmd_evaluate(const Manifest& mf) {
    const Bundle b = load_bundle(mf);
    const fs::path dir = out_dir(mf);
    const std::string policy_path =
        mf.policy.empty() ? (dir / "policy.json").string() : mf.policy;
    const bs::PolicyExport policy = bs::policy_from_json(bs::read_json_file(policy_path));
    const std::uint64_t seed = mf.seed.value_or(1);
    const bs::EvalReport report =
        bs::evaluate_policy(b.model, b.aut, b.aps, policy.fr, policy.fp, mf.runs, mf.horizon,
                            seed, mf.window, policy.threshold, mf.threads);
    fs::create_directories(dir);
    bs::write_eval_csv((dir / "eval.csv").string(), report);
    bs::write_text_file((dir / "eval_summary.json").string(),
                        bs::eval_summary_json(report).dump(2) + "\n");
    std::cout << bs::eval_summary_json(report).dump(2) << "\n";
    return kExitOk;
}

int cmd_simulate(const Manifest& mf) {
    const Bundle b = load_bundle(mf);
    const fs::path dir = out_dir(mf);
    const std::string policy_path =
        mf.policy.empty() ? (dir / "policy.json").string() : mf.policy;
    const bs::PolicyExport policy = bs::policy_from_json(bs::read_json_file(policy_path));
    std::mt19937_64 rng(mf.seed.value_or(1));

    bs::Belief belief = b.model.initial;
    std::size_t q = b.aut.initial;
    std::size_t s = bs::sample_from_belief(belief, rng);
    double reward = 0.0;
    double disc = 1.0;
    std::ostringstream trace;
    bool stuck = false;

    for (std::uint64_t t = 0; t < mf.horizon && !stuck; ++t) {
        std::size_t guard = 0;
        bs::ProductAction act{};
        for (;; ++guard) {
            try {
                act = bs::action_from_code(
                    bs::extract_policy(policy.fr, policy.fp, b.aut,
                                       bs::ProductState{belief, q}, policy.threshold),
                    b.model.n_actions());
            } catch (const bs::NoSafeAction&) {
                stuck = true;
                break;
            }
            if (!act.is_eps) break;
            if (guard >= b.aut.n_states()) {
                stuck = true;
                break;
            }
            trace << bs::json({{"t", t},
                               {"belief", belief},
                               {"q", b.aut.states[q]},
                               {"action", "eps->" + b.aut.states[act.eps_target]},
                               {"reward", 0.0}})
                         .dump()
                  << "\n";
            q = act.eps_target;
        }
        if (stuck) break;
        const double r = bs::belief_reward(b.model, belief, act.base);
        reward += disc * r;
        disc *= b.model.discount;
        const auto [s2, o] = bs::simulate_step(b.model, s, act.base, rng);
        const std::size_t q2 = b.aut.step(q, bs::label_mask(b.aps, belief));
        trace << bs::json({{"t", t},
                           {"belief", belief},
                           {"q", b.aut.states[q]},
                           {"action", b.model.actions[act.base]},
                           {"observation", b.model.observations[o]},
                           {"reward", r}})
                     .dump()
              << "\n";
        s = s2;
        belief = bs::belief_update(b.model, belief, act.base, o);
        q = q2;
    }

    fs::create_directories(dir);
    bs::write_text_file((dir / "trace.jsonl").string(), trace.str());
    const bs::json summary = {{"discounted_reward", reward},
                              {"horizon", mf.horizon},
                              {"stuck", stuck}};
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

void add_common(CLI::App* cmd, Manifest& mf, bool needs_model = true) {
    auto* model = cmd->add_option("--model", mf.model, "POMDP model file (JSON)");
    if (needs_model) model->required();
    cmd->add_option("--automaton", mf.automaton, "LDBA file (JSON)");
    cmd->add_option("--template", mf.template_name, "automaton template: gf, fg, fg-or-fg");
    cmd->add_option("--aps", mf.aps_csv, "comma-separated proposition names for --template");
    cmd->add_option("--ap-table", mf.ap_table, "atomic proposition table file (JSON)");
    cmd->add_option("--formula", mf.formula, "formula string (template shapes only)");
    cmd->add_option("--config", mf.config, "configuration file (JSON)");
    cmd->add_option("--out", mf.out, "output directory (default $BELIEFSYNTH_OUT or .)");
    cmd->add_option("--seed", mf.seed, "RNG seed override");
    cmd->add_option("--threads", mf.threads, "worker cap for evaluation fan-out");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"beliefsynth: controller synthesis for POMDPs under iLTL belief constraints"};
    app.require_subcommand(1);
    Manifest mf;

    CLI::App* validate = app.add_subcommand("validate", "check model/automaton files");
    add_common(validate, mf);

    CLI::App* solve = app.add_subcommand("solve", "model-based synthesis (value iteration)");
    add_common(solve, mf);

    CLI::App* learn = app.add_subcommand("learn", "safe Q-learning on the belief product");
    add_common(learn, mf);
    learn->add_flag("--resume", mf.resume, "continue from the checkpoint in the output dir");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Monte-Carlo policy evaluation");
    add_common(evaluate, mf);
    evaluate->add_option("--policy", mf.policy, "policy export file (default <out>/policy.json)");
    evaluate->add_option("--runs", mf.runs, "number of episodes");
    evaluate->add_option("--horizon", mf.horizon, "steps per episode");
    evaluate->add_option("--window", mf.window, "accepting-visit window width");

    CLI::App* simulate = app.add_subcommand("simulate", "trace one episode under a policy");
    add_common(simulate, mf);
    simulate->add_option("--policy", mf.policy, "policy export file (default <out>/policy.json)");
    simulate->add_option("--horizon", mf.horizon, "steps to simulate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIo;
    }

    try {
        if (validate->parsed()) return cmd_validate(mf);
        if (solve->parsed()) return cmd_solve(mf);
        if (learn->parsed()) return cmd_learn(mf);
        if (evaluate->parsed()) return cmd_evaluate(mf);
        if (simulate->parsed()) return cmd_simulate(mf);
    } catch (const bs::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const bs::SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const bs::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const bs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
