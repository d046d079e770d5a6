#pragma once

#include <deque>
#include <thread>

#include "solver.hpp"

namespace beliefsynth {

enum class StepTag : std::uint8_t { Exploration = 0, Safe = 1, Fallback = 2 };

/// One product transition ((b,q), act, o, (b',q')) plus audit metadata.
struct TransitionRecord {
    Belief b;
    std::size_t q = 0;
    std::size_t code = 0;
    std::int64_t obs = -1;  ///< observation index, -1 for epsilon moves
    Belief b2;
    std::size_t q2 = 0;
    StepTag tag = StepTag::Exploration;
    std::uint64_t step = 0;
};

/// Append-only episode store with a source index and a representative belief
/// per (belief-key, q) ever seen, source or successor.  The representative
/// map doubles as the restart pool.
struct EpisodeStore {
    std::vector<TransitionRecord> records;
    std::map<std::pair<BeliefKey, std::size_t>, std::vector<std::size_t>> index;
    std::map<std::pair<BeliefKey, std::size_t>, Belief> reps;

    void note_state(const Belief& b, std::size_t q) { reps.emplace(std::make_pair(belief_key(b), q), b); }

    void append(TransitionRecord rec) {
        index[{belief_key(rec.b), rec.q}].push_back(records.size());
        note_state(rec.b, rec.q);
        note_state(rec.b2, rec.q2);
        records.push_back(std::move(rec));
    }
};

/// Empirical successor-belief distribution per (belief-key, base action),
/// accumulated globally across restarts.
struct EmpiricalModel {
    std::map<std::pair<BeliefKey, std::size_t>, std::map<BeliefKey, std::uint64_t>> counts;
    std::map<std::pair<BeliefKey, std::size_t>, std::uint64_t> totals;
    std::map<BeliefKey, Belief> successor_reps;

    void add(const Belief& src, std::size_t action, const Belief& succ) {
        const BeliefKey sk = belief_key(succ);
        counts[{belief_key(src), action}][sk] += 1;
        totals[{belief_key(src), action}] += 1;
        successor_reps.emplace(sk, succ);
    }

    std::uint64_t total(const Belief& src, std::size_t action) const {
        auto it = totals.find({belief_key(src), action});
        return it == totals.end() ? 0 : it->second;
    }

    /// (representative successor, count) pairs for backup_empirical.
    std::vector<std::pair<Belief, std::uint64_t>> samples(const Belief& src,
                                                          std::size_t action) const {
        std::vector<std::pair<Belief, std::uint64_t>> out;
        auto it = counts.find({belief_key(src), action});
        if (it == counts.end()) return out;
        for (const auto& [sk, n] : it->second) out.emplace_back(successor_reps.at(sk), n);
        return out;
    }

    /// Estimated transition distribution, count/total per successor key.
    std::map<BeliefKey, double> distribution(const Belief& src, std::size_t action) const {
        std::map<BeliefKey, double> out;
        auto it = counts.find({belief_key(src), action});
        if (it == counts.end()) return out;
        const double n = static_cast<double>(totals.at({belief_key(src), action}));
        for (const auto& [sk, c] : it->second) out[sk] = static_cast<double>(c) / n;
        return out;
    }
};

/**
 * Validates a record against the model and automaton (successor must be
 * reproducible via belief_update/product_step), then appends it to the store
 * and, for base actions, to the empirical model.
 */
inline void record_transition(EpisodeStore& store, EmpiricalModel& empirical,
                              TransitionRecord rec, const Pomdp& m, const Ldba& aut,
                              const std::vector<AtomicProposition>& aps) {
    const ProductAction act = action_from_code(rec.code, m.n_actions());
    if (act.is_eps) {
        require_epsilon(aut, rec.q, act.eps_target);
        if (rec.obs != -1 || rec.q2 != act.eps_target || !belief_equal(rec.b, rec.b2))
            throw InconsistentRecord("epsilon record does not match the jump semantics");
        store.append(std::move(rec));
        return;
    }
    if (rec.obs < 0 || rec.obs >= static_cast<std::int64_t>(m.n_observations()))
        throw InconsistentRecord("observation index out of range");
    if (rec.q2 != aut.step(rec.q, label_mask(aps, rec.b)))
        throw InconsistentRecord("automaton successor does not match delta(q, L(b))");
    Belief expected;
    try {
        expected = belief_update(m, rec.b, act.base, static_cast<std::size_t>(rec.obs));
    } catch (const ZeroLikelihoodObservation&) {
        throw InconsistentRecord("recorded observation has zero likelihood at the source belief");
    }
    if (!belief_equal(expected, rec.b2))
        throw InconsistentRecord("successor belief does not match belief_update");
    empirical.add(rec.b, act.base, rec.b2);
    store.append(std::move(rec));
}

/**
 * Epsilon-greedy selection.  With probability epsilon a uniform member of
 * `all`; otherwise a uniform member of `safe`.  An empty safe set throws
 * NoSafeAction in strict mode and yields `fallback` (the caller's max-Q_p
 * action) otherwise.  Greedy exploitation is expressed by passing the argmax
 * singleton as `safe`.
 */
inline ProductAction choose_action(const std::vector<ProductAction>& safe,
                                   const std::vector<ProductAction>& all, double epsilon,
                                   std::mt19937_64& rng, bool strict = false,
                                   const ProductAction* fallback = nullptr,
                                   StepTag* tag = nullptr) {
    if (all.empty()) throw ValidationError("empty action set");
    if (uniform01(rng) < epsilon) {
        const double u = uniform01(rng);
        std::size_t i = static_cast<std::size_t>(u * static_cast<double>(all.size()));
        if (i >= all.size()) i = all.size() - 1;
        if (tag) *tag = StepTag::Exploration;
        return all[i];
    }
    if (safe.empty()) {
        if (strict || !fallback) throw NoSafeAction("empty safe set at selection time");
        if (tag) *tag = StepTag::Fallback;
        return *fallback;
    }
    const double u = uniform01(rng);
    std::size_t i = static_cast<std::size_t>(u * static_cast<double>(safe.size()));
    if (i >= safe.size()) i = safe.size() - 1;
    if (tag) *tag = StepTag::Safe;
    return safe[i];
}

struct LearnerConfig {
    double epsilon = 0.1;               ///< exploration rate, [0,1)
    double gamma_b = 0.99;              ///< Buchi discount, (0,1)
    double safe_threshold = 1.0 - 1e-6; ///< (0,1]
    std::uint64_t samples_per_update = 1;
    std::uint64_t max_steps = 100000;
    std::uint64_t seed = 1;
    bool greedy_exploit = true;   ///< exploit = reward argmax over safe; else uniform over safe
    bool strict_safety = false;   ///< NoSafeAction instead of max-Q_p fallback
    bool constrained = true;      ///< filter reward continuations by the safe set
    bool witness_prune = false;   ///< optional store-witness pruning of reward slots
    double convergence_tolerance = 0.0;  ///< residual target; 0 disables early stop
    std::uint64_t convergence_window = 0;
};

inline void validate_learner_config(const LearnerConfig& cfg) {
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0))
        throw ValidationError("epsilon must lie in [0,1)");
    if (!(cfg.gamma_b > 0.0 && cfg.gamma_b < 1.0))
        throw ValidationError("gamma_b must lie in (0,1)");
    if (!(cfg.safe_threshold > 0.0 && cfg.safe_threshold <= 1.0))
        throw ValidationError("safe_threshold must lie in (0,1]");
    if (cfg.samples_per_update == 0)
        throw ValidationError("samples_per_update must be positive");
}

struct MetricsRow {
    std::uint64_t step = 0;
    double residual_r = 0.0;
    double residual_p = 0.0;
    std::size_t size_r = 0;    ///< total vectors across reward slots
    std::size_t size_p = 0;
    std::size_t safe_size = 0; ///< |safe set| at the state acted from
};

inline std::size_t family_size(const AlphaFamily& fam) {
    std::size_t n = 0;
    for (const AlphaSet& t : fam.sets) n += t.vecs.size();
    return n;
}

/// Complete resumable learner state.
struct LearnerState {
    AlphaFamily fr;
    AlphaFamily fp;
    EpisodeStore store;
    EmpiricalModel empirical;
    std::mt19937_64 rng;
    Belief b;
    std::size_t q = 0;
    std::uint64_t step = 0;
    std::deque<double> residual_window;
    bool converged = false;
    double last_residual_r = std::numeric_limits<double>::infinity();
    double last_residual_p = std::numeric_limits<double>::infinity();
};

inline LearnerState init_learner(const Pomdp& m, const Ldba& aut,
                                 const std::vector<AtomicProposition>& aps,
                                 const LearnerConfig& cfg) {
    validate_learner_config(cfg);
    check_ap_alignment(aut, aps);
    LearnerState st;
    st.fr = init_reward_family(m, aut);
    st.fp = init_probability_family(m, aut);
    st.rng.seed(cfg.seed);
    st.b = m.initial;
    st.q = aut.initial;
    st.store.note_state(st.b, st.q);
    return st;
}

namespace detail {

inline void witness_prune_slot(AlphaFamily& fam, std::size_t q, std::size_t code) {
    // Keep exactly the witnessed chain vectors: floor seeds and superseded
    // leftovers never feed back into an update, and dropping them must not
    // disturb the per-key values, so the survivors are carried over verbatim.
    AlphaSet& t = fam.slot(q, code);
    if (t.vecs.size() < 2 || t.by_witness.empty()) return;
    AlphaSet next;
    for (const auto& [key, idx] : t.by_witness) {
        next.by_witness[key] = next.vecs.size();
        next.vecs.push_back(t.vecs[idx]);
    }
    t = std::move(next);
}

} // namespace detail

/**
 * One learning step: select an action at the current product state
 * (epsilon-greedy over the threshold-safe set), simulate samples_per_update
 * transitions from the current belief, record them, back up both families at
 * the visited (q, action) slot with replace-at-witness semantics, then
 * restart uniformly from the states seen so far.
 */
inline MetricsRow learner_step(LearnerState& st, const Pomdp& m, const Ldba& aut,
                               const std::vector<AtomicProposition>& aps,
                               const LearnerConfig& cfg) {
    const ProductState ps{st.b, st.q};
    const std::size_t n_base = m.n_actions();

    const std::vector<ProductAction> all = available_actions(aut, st.q, n_base);
    const std::vector<std::size_t> safe = safe_codes(st.fp, aut, ps, cfg.safe_threshold);
    std::vector<ProductAction> exploit;
    if (cfg.greedy_exploit && !safe.empty()) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_code = safe.front();
        for (std::size_t code : safe) {
            const double v = eval_q(st.fr, ps, code);
            if (v > best) {
                best = v;
                best_code = code;
            }
        }
        exploit.push_back(action_from_code(best_code, n_base));
    } else {
        for (std::size_t code : safe) exploit.push_back(action_from_code(code, n_base));
    }
    const ProductAction fb = action_from_code(fallback_code(st.fp, aut, ps), n_base);
    StepTag tag = StepTag::Exploration;
    const ProductAction act =
        choose_action(exploit, all, cfg.epsilon, st.rng, cfg.strict_safety, &fb, &tag);
    const std::size_t code = action_code(act, n_base);

    if (act.is_eps) {
        TransitionRecord rec{st.b, st.q, code, -1, st.b, act.eps_target, tag, st.step};
        record_transition(st.store, st.empirical, std::move(rec), m, aut, aps);
    } else {
        const std::size_t q2 = aut.step(st.q, label_mask(aps, st.b));
        for (std::uint64_t i = 0; i < cfg.samples_per_update; ++i) {
            const std::size_t s = sample_from_belief(st.b, st.rng);
            const auto [s2, o] = simulate_step(m, s, act.base, st.rng);
            (void)s2;
            TransitionRecord rec{st.b,  st.q, code, static_cast<std::int64_t>(o),
                                 belief_update(m, st.b, act.base, o), q2, tag, st.step};
            record_transition(st.store, st.empirical, std::move(rec), m, aut, aps);
        }
    }

    const BeliefKey key = belief_key(st.b);
    const double before_p = eval_q(st.fp, ps, code);
    const double before_r = eval_q(st.fr, ps, code);
    const BackupContext ctx_p{&m, &aut, &aps, cfg.gamma_b, cfg.safe_threshold, nullptr};
    const BackupContext ctx_r{&m, &aut, &aps, cfg.gamma_b, cfg.safe_threshold,
                              cfg.constrained ? &st.fp : nullptr};
    AlphaVector vec_p, vec_r;
    if (act.is_eps) {
        vec_p = backup_exact(st.fp, ctx_p, st.b, st.q, code, st.step + 1);
        st.fp.insert_replace(st.q, code, std::move(vec_p), key);
        vec_r = backup_exact(st.fr, ctx_r, st.b, st.q, code, st.step + 1);
    } else {
        const auto samples = st.empirical.samples(st.b, act.base);
        vec_p = backup_empirical(st.fp, ctx_p, st.b, st.q, code, samples, st.step + 1);
        st.fp.insert_replace(st.q, code, std::move(vec_p), key);
        vec_r = backup_empirical(st.fr, ctx_r, st.b, st.q, code, samples, st.step + 1);
    }
    st.fr.insert_replace(st.q, code, std::move(vec_r), key);
    if (cfg.witness_prune) detail::witness_prune_slot(st.fr, st.q, code);

    MetricsRow row;
    row.step = st.step + 1;
    row.residual_p = std::abs(eval_q(st.fp, ps, code) - before_p);
    row.residual_r = std::abs(eval_q(st.fr, ps, code) - before_r);
    row.size_r = family_size(st.fr);
    row.size_p = family_size(st.fp);
    row.safe_size = safe.size();
    st.last_residual_r = row.residual_r;
    st.last_residual_p = row.residual_p;

    if (cfg.convergence_window > 0) {
        st.residual_window.push_back(std::max(row.residual_r, row.residual_p));
        while (st.residual_window.size() > cfg.convergence_window) st.residual_window.pop_front();
        if (st.residual_window.size() == cfg.convergence_window) {
            double worst = 0.0;
            for (double r : st.residual_window) worst = std::max(worst, r);
            if (worst <= cfg.convergence_tolerance) st.converged = true;
        }
    }

    const double u = uniform01(st.rng);
    std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(st.store.reps.size()));
    if (idx >= st.store.reps.size()) idx = st.store.reps.size() - 1;
    auto it = std::next(st.store.reps.begin(), static_cast<std::ptrdiff_t>(idx));
    st.b = it->second;
    st.q = it->first.second;

    st.step += 1;
    return row;
}

/// Runs the loop until the step budget or residual convergence.
inline void run_learner(LearnerState& st, const Pomdp& m, const Ldba& aut,
                        const std::vector<AtomicProposition>& aps, const LearnerConfig& cfg,
                        std::vector<MetricsRow>* metrics = nullptr) {
    while (st.step < cfg.max_steps && !st.converged) {
        MetricsRow row = learner_step(st, m, aut, aps, cfg);
        if (metrics) metrics->push_back(row);
    }
}

/// Algorithm entry point: fresh state, full run.
inline LearnerState learn(const Pomdp& m, const Ldba& aut,
                          const std::vector<AtomicProposition>& aps, const LearnerConfig& cfg,
                          std::vector<MetricsRow>* metrics = nullptr) {
    LearnerState st = init_learner(m, aut, aps, cfg);
    run_learner(st, m, aut, aps, cfg, metrics);
    return st;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct RunReport {
    double discounted_reward = 0.0;
    std::uint64_t windows_total = 0;
    std::uint64_t windows_hit = 0;
    bool all_windows_hit = true;
    bool aborted = false;
};

struct EvalReport {
    std::uint64_t runs = 0;
    std::uint64_t horizon = 0;
    std::uint64_t window = 0;
    double mean_discounted_reward = 0.0;
    double window_visit_rate = 0.0;  ///< fraction of runs with every window hit
    std::vector<RunReport> per_run;
};

namespace detail {

inline RunReport evaluate_one_run(const Pomdp& m, const Ldba& aut,
                                  const std::vector<AtomicProposition>& aps,
                                  const AlphaFamily& fr, const AlphaFamily& fp, double threshold,
                                  std::uint64_t horizon, std::uint64_t window,
                                  std::uint64_t run_seed) {
    RunReport rep;
    if (horizon == 0) return rep;
    const std::uint64_t n_windows = (horizon + window - 1) / window;
    std::vector<bool> hit(n_windows, false);
    std::mt19937_64 rng(run_seed);

    Belief b = m.initial;
    std::size_t q = aut.initial;
    std::size_t s = sample_from_belief(b, rng);
    double reward = 0.0;
    double disc = 1.0;

    auto mark = [&](std::uint64_t t) {
        if (aut.accepting[q] && t < horizon) hit[t / window] = true;
    };

    for (std::uint64_t t = 0; t < horizon && !rep.aborted; ++t) {
        mark(t);
        ProductAction act{};
        std::size_t guard = 0;
        for (;; ++guard) {
            // Same rule as exploitation in the learner: greedy over the safe
            // set by Q_r, falling back to the max-Q_p action when the safe
            // set is empty (the surrogate keeps Q_p below the threshold at
            // non-accepting q even for winning actions).
            const ProductState ps{b, q};
            const std::vector<std::size_t> safe = safe_codes(fp, aut, ps, threshold);
            std::size_t code;
            if (safe.empty()) {
                code = fallback_code(fp, aut, ps);
            } else {
                code = safe.front();
                double best = eval_q(fr, ps, code);
                for (std::size_t c : safe) {
                    const double v = eval_q(fr, ps, c);
                    if (v > best) {
                        best = v;
                        code = c;
                    }
                }
            }
            act = action_from_code(code, m.n_actions());
            if (!act.is_eps) break;
            if (guard >= aut.n_states()) {  // epsilon cycle, policy is stuck
                rep.aborted = true;
                break;
            }
            q = act.eps_target;
            mark(t);
        }
        if (rep.aborted) break;
        reward += disc * belief_reward(m, b, act.base);
        disc *= m.discount;
        const auto [s2, o] = simulate_step(m, s, act.base, rng);
        s = s2;
        const std::size_t q2 = aut.step(q, label_mask(aps, b));
        try {
            b = belief_update(m, b, act.base, o);
        } catch (const ZeroLikelihoodObservation&) {
            rep.aborted = true;  // belief lost track of the state; should not happen
            break;
        }
        q = q2;
    }

    rep.discounted_reward = reward;
    rep.windows_total = n_windows;
    for (bool h : hit) rep.windows_hit += h ? 1 : 0;
    rep.all_windows_hit = !rep.aborted && rep.windows_hit == rep.windows_total;
    return rep;
}

} // namespace detail

/**
 * Simulates `runs` episodes under the greedy safe policy.  Reports the mean
 * discounted reward and, per run, whether an accepting product state was
 * visited in every length-`window` block of steps (finite-horizon Buchi
 * proxy).  Runs use independent seed streams derived from `seed`, so a
 * thread fan-out cannot change the results.
 */
inline EvalReport evaluate_policy(const Pomdp& m, const Ldba& aut,
                                  const std::vector<AtomicProposition>& aps,
                                  const AlphaFamily& fr, const AlphaFamily& fp,
                                  std::uint64_t runs, std::uint64_t horizon, std::uint64_t seed,
                                  std::uint64_t window = 50, double threshold = 1.0 - 1e-6,
                                  std::size_t threads = 1) {
    EvalReport report;
    report.runs = runs;
    report.horizon = horizon;
    report.window = window == 0 ? (horizon == 0 ? 1 : horizon) : window;
    report.per_run.resize(runs);

    auto work = [&](std::size_t worker, std::size_t stride) {
        for (std::size_t r = worker; r < runs; r += stride)
            report.per_run[r] = detail::evaluate_one_run(m, aut, aps, fr, fp, threshold, horizon,
                                                         report.window,
                                                         splitmix64(seed + 0x51ED2700ULL + r));
    };
    if (threads <= 1 || runs <= 1) {
        work(0, 1);
    } else {
        const std::size_t n = std::min<std::size_t>(threads, runs);
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work, w, n);
        for (std::thread& th : pool) th.join();
    }

    std::uint64_t full = 0;
    for (const RunReport& rep : report.per_run) {
        report.mean_discounted_reward += rep.discounted_reward;
        full += rep.all_windows_hit ? 1 : 0;
    }
    if (runs > 0) {
        report.mean_discounted_reward /= static_cast<double>(runs);
        report.window_visit_rate = static_cast<double>(full) / static_cast<double>(runs);
    }
    return report;
}

} // namespace beliefsynth
