#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "learner.hpp"

namespace beliefsynth {

using nlohmann::json;

namespace detail {

/// Rejects unknown fields and demands the required ones.
inline void check_fields(const json& j, const char* what,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) throw FormatError(std::string(what) + ": expected a JSON object");
    for (const char* field : required)
        if (!j.contains(field))
            throw FormatError(std::string(what) + ": missing field '" + field + "'");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* field : required) known = known || key == field;
        for (const char* field : optional) known = known || key == field;
        if (!known) throw FormatError(std::string(what) + ": unknown field '" + key + "'");
    }
}

inline std::size_t name_index(const std::vector<std::string>& names, const std::string& name,
                              const char* what) {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw FormatError(std::string(what) + ": unknown identifier '" + name + "'");
}

/// %.17g: shortest text that still round-trips a double exactly.
inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError("cannot parse '" + path + "': " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw FormatError("write failed for '" + path + "'");
}

/**
 * Model schema: states/actions/observations as string arrays, sparse nested
 * probability maps (absent entries are zero), reward map, initial
 * distribution, discount.  Structural problems raise FormatError; semantic
 * checks are validate_model's job.
 */
inline Pomdp model_from_json(const json& j) {
    try {
        detail::check_fields(j, "model",
                             {"states", "actions", "observations", "transition",
                              "observation_model", "initial", "reward", "discount"});
        Pomdp m;
        m.states = j.at("states").get<std::vector<std::string>>();
        m.actions = j.at("actions").get<std::vector<std::string>>();
        m.observations = j.at("observations").get<std::vector<std::string>>();
        m.discount = j.at("discount").get<double>();
        m.allocate();
        for (const auto& [sname, row] : j.at("transition").items()) {
            const std::size_t s = detail::name_index(m.states, sname, "transition");
            for (const auto& [aname, cells] : row.items()) {
                const std::size_t a = detail::name_index(m.actions, aname, "transition");
                for (const auto& [tname, p] : cells.items())
                    m.trans(s, a, detail::name_index(m.states, tname, "transition")) =
                        p.get<double>();
            }
        }
        for (const auto& [sname, cells] : j.at("observation_model").items()) {
            const std::size_t s = detail::name_index(m.states, sname, "observation_model");
            for (const auto& [oname, p] : cells.items())
                m.omega(s, detail::name_index(m.observations, oname, "observation_model")) =
                    p.get<double>();
        }
        for (const auto& [sname, p] : j.at("initial").items())
            m.initial[detail::name_index(m.states, sname, "initial")] = p.get<double>();
        for (const auto& [sname, row] : j.at("reward").items()) {
            const std::size_t s = detail::name_index(m.states, sname, "reward");
            for (const auto& [aname, r] : row.items())
                m.rew(s, detail::name_index(m.actions, aname, "reward")) = r.get<double>();
        }
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("model: ") + e.what());
    }
}

inline Pomdp load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

/**
 * AP table schema: name -> {weights, offset} or {indicator, scale, shift}.
 * Entries come back in the file's (alphabetical map) order; align_aps picks
 * and orders them for a concrete automaton.
 */
inline std::vector<AtomicProposition> ap_table_from_json(const json& j, const Pomdp& m) {
    try {
        if (!j.is_object()) throw FormatError("ap table: expected a JSON object");
        std::vector<AtomicProposition> out;
        for (const auto& [name, spec] : j.items()) {
            if (spec.contains("weights")) {
                detail::check_fields(spec, "ap entry", {"weights", "offset"});
                AtomicProposition ap;
                ap.name = name;
                ap.weights = spec.at("weights").get<std::vector<double>>();
                ap.offset = spec.at("offset").get<double>();
                if (ap.weights.size() != m.n_states())
                    throw FormatError("ap '" + name + "': weight dimension "
                                      + std::to_string(ap.weights.size()) + " != |S| = "
                                      + std::to_string(m.n_states()));
                out.push_back(std::move(ap));
            } else {
                detail::check_fields(spec, "ap entry", {"indicator"}, {"scale", "shift"});
                const auto members = spec.at("indicator").get<std::vector<std::string>>();
                const double scale = spec.value("scale", 1.0);
                const double shift = spec.value("shift", 0.0);
                try {
                    out.push_back(indicator_ap(name, m.states, members, scale, shift));
                } catch (const ValidationError& e) {
                    throw FormatError("ap '" + name + "': " + e.what());
                }
            }
        }
        return out;
    } catch (const json::exception& e) {
        throw FormatError(std::string("ap table: ") + e.what());
    }
}

inline std::vector<AtomicProposition> load_ap_table(const std::string& path, const Pomdp& m) {
    return ap_table_from_json(read_json_file(path), m);
}

/// Selects and orders table entries to match the given proposition names.
inline std::vector<AtomicProposition> align_aps(const std::vector<AtomicProposition>& table,
                                                const std::vector<std::string>& names) {
    std::vector<AtomicProposition> out;
    out.reserve(names.size());
    for (const std::string& name : names) {
        bool found = false;
        for (const AtomicProposition& ap : table)
            if (ap.name == name) {
                out.push_back(ap);
                found = true;
                break;
            }
        if (!found) throw UnknownProposition(name);
    }
    return out;
}

/**
 * LDBA schema: states/aps arrays, initial name, accepting set B, the
 * initial/accepting component partition, guarded transitions, epsilon moves.
 * Guards expand over all label masks; exactly one transition must apply per
 * (state, mask).  With `violations` given the loader records problems and
 * returns a best-effort automaton; otherwise it throws ValidationError.
 */
inline Ldba ldba_from_json(const json& j, std::vector<std::string>* violations = nullptr) {
    std::vector<std::string> local;
    std::vector<std::string>& viol = violations ? *violations : local;
    Ldba a;
    try {
        detail::check_fields(j, "automaton",
                             {"states", "aps", "initial", "accepting", "initial_component",
                              "accepting_component", "transitions", "epsilon"});
        a.states = j.at("states").get<std::vector<std::string>>();
        a.ap_names = j.at("aps").get<std::vector<std::string>>();
        a.initial = detail::name_index(a.states, j.at("initial").get<std::string>(), "initial");
        a.accepting.assign(a.n_states(), false);
        for (const auto& name : j.at("accepting"))
            a.accepting[detail::name_index(a.states, name.get<std::string>(), "accepting")] = true;
        std::vector<int> comp(a.n_states(), -1);
        for (const auto& name : j.at("initial_component")) {
            const std::size_t q =
                detail::name_index(a.states, name.get<std::string>(), "initial_component");
            comp[q] = 0;
        }
        for (const auto& name : j.at("accepting_component")) {
            const std::size_t q =
                detail::name_index(a.states, name.get<std::string>(), "accepting_component");
            if (comp[q] == 0)
                viol.push_back("state '" + a.states[q] + "' listed in both components");
            comp[q] = 1;
        }
        a.in_accepting_component.assign(a.n_states(), false);
        for (std::size_t q = 0; q < a.n_states(); ++q) {
            if (comp[q] == -1)
                viol.push_back("state '" + a.states[q] + "' missing from both components");
            a.in_accepting_component[q] = comp[q] == 1;
        }

        struct Edge {
            std::string guard_text;
            FormulaPtr guard;
            std::size_t to;
        };
        std::vector<std::vector<Edge>> edges(a.n_states());
        for (const auto& t : j.at("transitions")) {
            detail::check_fields(t, "transition entry", {"from", "guard", "to"});
            const std::size_t from =
                detail::name_index(a.states, t.at("from").get<std::string>(), "transitions");
            const std::size_t to =
                detail::name_index(a.states, t.at("to").get<std::string>(), "transitions");
            const std::string text = t.at("guard").get<std::string>();
            edges[from].push_back(Edge{text, parse_guard(text, a.ap_names), to});
        }
        a.step_table.assign(a.n_states(), std::vector<std::size_t>(a.n_masks(), 0));
        for (std::size_t q = 0; q < a.n_states(); ++q)
            for (std::uint32_t mask = 0; mask < a.n_masks(); ++mask) {
                const Edge* hit = nullptr;
                for (const Edge& e : edges[q]) {
                    if (!eval_guard(e.guard, a.ap_names, mask)) continue;
                    if (hit)
                        viol.push_back("guard overlap at state '" + a.states[q] + "', label mask "
                                       + std::to_string(mask) + ": '" + hit->guard_text
                                       + "' and '" + e.guard_text + "'");
                    else
                        hit = &e;
                }
                if (!hit) {
                    viol.push_back("state '" + a.states[q] + "' has no transition for label mask "
                                   + std::to_string(mask));
                    a.step_table[q][mask] = q;  // best-effort self loop
                } else {
                    a.step_table[q][mask] = hit->to;
                }
            }

        a.eps_moves.assign(a.n_states(), {});
        for (const auto& e : j.at("epsilon")) {
            detail::check_fields(e, "epsilon entry", {"from", "to", "name"});
            const std::size_t from =
                detail::name_index(a.states, e.at("from").get<std::string>(), "epsilon");
            const std::size_t to =
                detail::name_index(a.states, e.at("to").get<std::string>(), "epsilon");
            a.eps_moves[from].push_back(EpsilonMove{to, e.at("name").get<std::string>()});
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("automaton: ") + e.what());
    }

    for (const std::string& v : validate_ldba(a)) viol.push_back(v);
    if (!violations && !viol.empty()) throw ValidationError("automaton: " + viol.front());
    return a;
}

inline Ldba load_ldba(const std::string& path, std::vector<std::string>* violations = nullptr) {
    return ldba_from_json(read_json_file(path), violations);
}

inline json ldba_to_json(const Ldba& a) {
    json j;
    j["states"] = a.states;
    j["aps"] = a.ap_names;
    j["initial"] = a.states[a.initial];
    json accepting = json::array();
    json comp_i = json::array();
    json comp_a = json::array();
    for (std::size_t q = 0; q < a.n_states(); ++q) {
        if (a.accepting[q]) accepting.push_back(a.states[q]);
        (a.in_accepting_component[q] ? comp_a : comp_i).push_back(a.states[q]);
    }
    j["accepting"] = std::move(accepting);
    j["initial_component"] = std::move(comp_i);
    j["accepting_component"] = std::move(comp_a);
    json transitions = json::array();
    for (std::size_t q = 0; q < a.n_states(); ++q)
        for (std::uint32_t mask = 0; mask < a.n_masks(); ++mask) {
            std::string guard;
            if (a.ap_names.empty()) {
                guard = "true";
            } else {
                for (std::size_t i = 0; i < a.ap_names.size(); ++i) {
                    if (i) guard += " & ";
                    if (!((mask >> i) & 1u)) guard += "!";
                    guard += a.ap_names[i];
                }
            }
            transitions.push_back(
                {{"from", a.states[q]}, {"guard", guard}, {"to", a.states[a.step_table[q][mask]]}});
        }
    j["transitions"] = std::move(transitions);
    json eps = json::array();
    for (std::size_t q = 0; q < a.n_states(); ++q)
        for (const EpsilonMove& e : a.eps_moves[q])
            eps.push_back({{"from", a.states[q]}, {"to", a.states[e.target]}, {"name", e.name}});
    j["epsilon"] = std::move(eps);
    return j;
}

inline json family_to_json(const AlphaFamily& fam) {
    json slots = json::array();
    for (std::size_t q = 0; q < fam.n_q; ++q)
        for (std::size_t code = 0; code < fam.n_codes(); ++code) {
            const AlphaSet& t = fam.slot(q, code);
            if (t.vecs.empty()) continue;
            json vecs = json::array();
            for (const AlphaVector& v : t.vecs)
                vecs.push_back({{"theta", v.theta},
                                {"owner_q", v.owner_q},
                                {"owner_code", v.owner_code},
                                {"generation", v.generation}});
            json witness = json::array();
            for (const auto& [key, idx] : t.by_witness)
                witness.push_back({{"key", key}, {"index", idx}});
            slots.push_back(
                {{"q", q}, {"code", code}, {"vectors", vecs}, {"witness", witness}});
        }
    return {{"kind", fam.kind == AlphaFamily::Kind::Reward ? "reward" : "probability"},
            {"n_states", fam.n_states},
            {"n_base", fam.n_base},
            {"n_q", fam.n_q},
            {"slots", slots}};
}

inline AlphaFamily family_from_json(const json& j) {
    try {
        detail::check_fields(j, "family", {"kind", "n_states", "n_base", "n_q", "slots"});
        AlphaFamily fam;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "reward")
            fam.kind = AlphaFamily::Kind::Reward;
        else if (kind == "probability")
            fam.kind = AlphaFamily::Kind::Probability;
        else
            throw FormatError("family: unknown kind '" + kind + "'");
        fam.n_states = j.at("n_states").get<std::size_t>();
        fam.n_base = j.at("n_base").get<std::size_t>();
        fam.n_q = j.at("n_q").get<std::size_t>();
        fam.sets.assign(fam.n_q * fam.n_codes(), {});
        for (const auto& slot : j.at("slots")) {
            detail::check_fields(slot, "family slot", {"q", "code", "vectors", "witness"});
            const std::size_t q = slot.at("q").get<std::size_t>();
            const std::size_t code = slot.at("code").get<std::size_t>();
            if (q >= fam.n_q || code >= fam.n_codes())
                throw FormatError("family: slot index out of range");
            AlphaSet& t = fam.slot(q, code);
            for (const auto& v : slot.at("vectors")) {
                detail::check_fields(v, "alpha vector",
                                     {"theta", "owner_q", "owner_code", "generation"});
                AlphaVector vec;
                vec.theta = v.at("theta").get<std::vector<double>>();
                if (vec.theta.size() != fam.n_states)
                    throw FormatError("family: vector dimension mismatch");
                vec.owner_q = v.at("owner_q").get<std::size_t>();
                vec.owner_code = v.at("owner_code").get<std::size_t>();
                vec.generation = v.at("generation").get<std::uint64_t>();
                t.vecs.push_back(std::move(vec));
            }
            for (const auto& w : slot.at("witness")) {
                detail::check_fields(w, "witness entry", {"key", "index"});
                const std::size_t idx = w.at("index").get<std::size_t>();
                if (idx >= t.vecs.size()) throw FormatError("family: witness index out of range");
                t.by_witness[w.at("key").get<BeliefKey>()] = idx;
            }
        }
        return fam;
    } catch (const json::exception& e) {
        throw FormatError(std::string("family: ") + e.what());
    }
}

/// Solve artifact: both families per (q, action) plus convergence metadata.
inline json value_export_json(const SolveResult& res, const Pomdp& m, const Ldba& aut) {
    return {{"model_states", m.states},
            {"automaton_states", aut.states},
            {"reward_family", family_to_json(res.fr)},
            {"probability_family", family_to_json(res.fp)},
            {"belief_set", res.belief_set},
            {"metadata",
             {{"sweeps_r", res.sweeps_r},
              {"sweeps_p", res.sweeps_p},
              {"residual_r", res.residual_r},
              {"residual_p", res.residual_p},
              {"converged_r", res.converged_r},
              {"converged_p", res.converged_p}}}};
}

/// Greedy-policy artifact: the families plus the threshold that filters them.
inline json policy_export_json(const AlphaFamily& fr, const AlphaFamily& fp, double threshold) {
    return {{"threshold", threshold},
            {"reward_family", family_to_json(fr)},
            {"probability_family", family_to_json(fp)}};
}

struct PolicyExport {
    AlphaFamily fr;
    AlphaFamily fp;
    double threshold = 1.0 - 1e-6;
};

inline PolicyExport policy_from_json(const json& j) {
    try {
        detail::check_fields(j, "policy", {"threshold", "reward_family", "probability_family"});
        PolicyExport p;
        p.threshold = j.at("threshold").get<double>();
        p.fr = family_from_json(j.at("reward_family"));
        p.fp = family_from_json(j.at("probability_family"));
        return p;
    } catch (const json::exception& e) {
        throw FormatError(std::string("policy: ") + e.what());
    }
}

inline SolveConfig solve_config_from_json(const json& j) {
    try {
        detail::check_fields(j, "solve config", {},
                             {"tolerance", "max_sweeps", "gamma_b", "safe_threshold",
                              "constrained", "max_beliefs", "grid_points", "pointbased_cap"});
        SolveConfig cfg;
        cfg.tolerance = j.value("tolerance", cfg.tolerance);
        cfg.max_sweeps = j.value("max_sweeps", cfg.max_sweeps);
        cfg.gamma_b = j.value("gamma_b", cfg.gamma_b);
        cfg.safe_threshold = j.value("safe_threshold", cfg.safe_threshold);
        cfg.constrained = j.value("constrained", cfg.constrained);
        cfg.max_beliefs = j.value("max_beliefs", cfg.max_beliefs);
        cfg.grid_points = j.value("grid_points", cfg.grid_points);
        cfg.pointbased_cap = j.value("pointbased_cap", cfg.pointbased_cap);
        return cfg;
    } catch (const json::exception& e) {
        throw FormatError(std::string("solve config: ") + e.what());
    }
}

inline LearnerConfig learner_config_from_json(const json& j) {
    try {
        detail::check_fields(j, "learner config", {},
                             {"epsilon", "gamma_b", "safe_threshold", "samples_per_update",
                              "max_steps", "seed", "greedy_exploit", "strict_safety",
                              "constrained", "witness_prune", "convergence_tolerance",
                              "convergence_window"});
        LearnerConfig cfg;
        cfg.epsilon = j.value("epsilon", cfg.epsilon);
        cfg.gamma_b = j.value("gamma_b", cfg.gamma_b);
        cfg.safe_threshold = j.value("safe_threshold", cfg.safe_threshold);
        cfg.samples_per_update = j.value("samples_per_update", cfg.samples_per_update);
        cfg.max_steps = j.value("max_steps", cfg.max_steps);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.greedy_exploit = j.value("greedy_exploit", cfg.greedy_exploit);
        cfg.strict_safety = j.value("strict_safety", cfg.strict_safety);
        cfg.constrained = j.value("constrained", cfg.constrained);
        cfg.witness_prune = j.value("witness_prune", cfg.witness_prune);
        cfg.convergence_tolerance = j.value("convergence_tolerance", cfg.convergence_tolerance);
        cfg.convergence_window = j.value("convergence_window", cfg.convergence_window);
        validate_learner_config(cfg);
        return cfg;
    } catch (const json::exception& e) {
        throw FormatError(std::string("learner config: ") + e.what());
    }
}

inline json record_to_json(const TransitionRecord& rec) {
    return {{"b", rec.b},     {"q", rec.q},   {"code", rec.code}, {"obs", rec.obs},
            {"b2", rec.b2},   {"q2", rec.q2}, {"tag", static_cast<int>(rec.tag)},
            {"step", rec.step}};
}

inline TransitionRecord record_from_json(const json& j) {
    try {
        detail::check_fields(j, "record", {"b", "q", "code", "obs", "b2", "q2", "tag", "step"});
        TransitionRecord rec;
        rec.b = j.at("b").get<Belief>();
        rec.q = j.at("q").get<std::size_t>();
        rec.code = j.at("code").get<std::size_t>();
        rec.obs = j.at("obs").get<std::int64_t>();
        rec.b2 = j.at("b2").get<Belief>();
        rec.q2 = j.at("q2").get<std::size_t>();
        const int tag = j.at("tag").get<int>();
        if (tag < 0 || tag > 2) throw FormatError("record: bad tag");
        rec.tag = static_cast<StepTag>(tag);
        rec.step = j.at("step").get<std::uint64_t>();
        return rec;
    } catch (const json::exception& e) {
        throw FormatError(std::string("record: ") + e.what());
    }
}

/// Checkpoint = append-only JSONL record log + one state snapshot.
inline void save_checkpoint(const std::string& records_path, const std::string& state_path,
                            const LearnerState& st) {
    std::ostringstream lines;
    for (const TransitionRecord& rec : st.store.records) lines << record_to_json(rec).dump() << '\n';
    write_text_file(records_path, lines.str());

    std::ostringstream rng_text;
    rng_text << st.rng;
    json state = {{"rng", rng_text.str()},
                  {"b", st.b},
                  {"q", st.q},
                  {"step", st.step},
                  {"residual_window", std::vector<double>(st.residual_window.begin(),
                                                          st.residual_window.end())},
                  {"converged", st.converged},
                  {"last_residual_r", st.last_residual_r},
                  {"last_residual_p", st.last_residual_p},
                  {"reward_family", family_to_json(st.fr)},
                  {"probability_family", family_to_json(st.fp)}};
    write_text_file(state_path, state.dump(2) + "\n");
}

/**
 * Restores a learner state.  The store and empirical model are rebuilt by
 * replaying the record log through record_transition, which re-validates
 * every transition against the model; the families, stream state, and
 * counters come from the snapshot.
 */
inline LearnerState load_checkpoint(const std::string& records_path,
                                    const std::string& state_path, const Pomdp& m,
                                    const Ldba& aut,
                                    const std::vector<AtomicProposition>& aps) {
    LearnerState st;
    st.store.note_state(m.initial, aut.initial);
    std::ifstream in(records_path);
    if (!in) throw FormatError("cannot open '" + records_path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(records_path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        record_transition(st.store, st.empirical, record_from_json(j), m, aut, aps);
    }

    const json state = read_json_file(state_path);
    try {
        detail::check_fields(state, "learner state",
                             {"rng", "b", "q", "step", "residual_window", "converged",
                              "last_residual_r", "last_residual_p", "reward_family",
                              "probability_family"});
        std::istringstream rng_text(state.at("rng").get<std::string>());
        rng_text >> st.rng;
        if (!rng_text) throw FormatError("learner state: bad rng text");
        st.b = state.at("b").get<Belief>();
        st.q = state.at("q").get<std::size_t>();
        st.step = state.at("step").get<std::uint64_t>();
        for (double r : state.at("residual_window").get<std::vector<double>>())
            st.residual_window.push_back(r);
        st.converged = state.at("converged").get<bool>();
        st.last_residual_r = state.at("last_residual_r").get<double>();
        st.last_residual_p = state.at("last_residual_p").get<double>();
        st.fr = family_from_json(state.at("reward_family"));
        st.fp = family_from_json(state.at("probability_family"));
    } catch (const json::exception& e) {
        throw FormatError(std::string("learner state: ") + e.what());
    }
    return st;
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows,
                              bool append = false) {
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    if (!append) out << "step,residual_r,residual_p,size_r,size_p,safe_size\n";
    for (const MetricsRow& row : rows)
        out << row.step << ',' << detail::num(row.residual_r) << ','
            << detail::num(row.residual_p) << ',' << row.size_r << ',' << row.size_p << ','
            << row.safe_size << '\n';
    if (!out) throw FormatError("write failed for '" + path + "'");
}

inline void write_eval_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << "run,discounted_reward,windows_total,windows_hit,all_windows_hit,aborted\n";
    for (std::size_t r = 0; r < report.per_run.size(); ++r) {
        const RunReport& rep = report.per_run[r];
        out << r << ',' << detail::num(rep.discounted_reward) << ',' << rep.windows_total << ','
            << rep.windows_hit << ',' << (rep.all_windows_hit ? 1 : 0) << ','
            << (rep.aborted ? 1 : 0) << '\n';
    }
    if (!out) throw FormatError("write failed for '" + path + "'");
}

inline json eval_summary_json(const EvalReport& report) {
    return {{"runs", report.runs},
            {"horizon", report.horizon},
            {"window", report.window},
            {"mean_discounted_reward", report.mean_discounted_reward},
            {"window_visit_rate", report.window_visit_rate}};
}

} // namespace beliefsynth
