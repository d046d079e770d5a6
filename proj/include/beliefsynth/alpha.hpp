#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lp.hpp"
#include "product.hpp"

namespace beliefsynth {

/// Quantized belief, 6 decimal places per entry; the identity used by the
/// episode store and the per-witness probability sets.
using BeliefKey = std::vector<std::int64_t>;

inline constexpr double kKeyQuantum = 1e-6;

inline BeliefKey belief_key(const Belief& b, double quantum = kKeyQuantum) {
    BeliefKey key(b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        key[i] = static_cast<std::int64_t>(std::llround(b[i] / quantum));
    return key;
}

/// Linear value-function piece theta with bookkeeping: the product state
/// family it belongs to and the backup generation that produced it.
struct AlphaVector {
    std::vector<double> theta;
    std::size_t owner_q = 0;
    std::size_t owner_code = 0;
    std::uint64_t generation = 0;
};

/// One (q, action-code) slot.  Reward slots grow by union and are pruned;
/// probability slots keep one vector per witness key so that re-backing up
/// the same belief replaces (and may lower) the previous estimate.
struct AlphaSet {
    std::vector<AlphaVector> vecs;
    std::map<BeliefKey, std::size_t> by_witness;
};

/// max_theta theta.b over a plain vector list; first maximizer wins ties.
inline double set_max(const std::vector<AlphaVector>& vecs, const Belief& b,
                      std::size_t* arg = nullptr) {
    if (vecs.empty()) throw EmptySet("no alpha vectors in set");
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        double v = 0.0;
        for (std::size_t s = 0; s < b.size(); ++s) v += vecs[i].theta[s] * b[s];
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    if (arg) *arg = best_i;
    return best;
}

namespace detail {

inline double dot(const std::vector<double>& theta, const Belief& b) {
    double v = 0.0;
    for (std::size_t s = 0; s < b.size(); ++s) v += theta[s] * b[s];
    return v;
}

} // namespace detail

/**
 * Family of alpha-vector sets indexed by (automaton state, action code).
 * Kind::Reward approximates Q_r from below; Kind::Probability approximates
 * the Buchi-surrogate Q_p, clamped to [0,1] on evaluation.
 */
struct AlphaFamily {
    enum class Kind { Reward, Probability };
    Kind kind = Kind::Reward;
    std::size_t n_states = 0;  ///< POMDP state count (vector dimension)
    std::size_t n_base = 0;    ///< base action count
    std::size_t n_q = 0;       ///< automaton state count
    std::vector<AlphaSet> sets;  ///< dense, [q * (n_base + n_q) + code]

    std::size_t n_codes() const { return n_base + n_q; }
    AlphaSet& slot(std::size_t q, std::size_t code) { return sets[q * n_codes() + code]; }
    const AlphaSet& slot(std::size_t q, std::size_t code) const {
        return sets[q * n_codes() + code];
    }

    /// Union insert for reward sets, replace-at-witness for probability
    /// sets.  The first witness insert into a probability slot evicts the
    /// initialization seed, so later refinements can lower the surface.
    void insert(std::size_t q, std::size_t code, AlphaVector vec, const BeliefKey& witness) {
        if (kind == Kind::Probability) {
            insert_replace(q, code, std::move(vec), witness);
            return;
        }
        slot(q, code).vecs.push_back(std::move(vec));
    }

    /// Replace-at-witness insert regardless of kind.  The learner uses this
    /// for both families: its safe-action filter evolves while learning, so
    /// stale union members would freeze obsolete optimistic values into the
    /// envelope.  One vector per witness keys the surfaces to the tabular
    /// iterates at the stored beliefs.
    void insert_replace(std::size_t q, std::size_t code, AlphaVector vec,
                        const BeliefKey& witness) {
        AlphaSet& t = slot(q, code);
        if (kind == Kind::Probability && t.by_witness.empty() && !t.vecs.empty()) t.vecs.clear();
        auto it = t.by_witness.find(witness);
        if (it != t.by_witness.end()) {
            t.vecs[it->second] = std::move(vec);
            return;
        }
        t.by_witness.emplace(witness, t.vecs.size());
        t.vecs.push_back(std::move(vec));
    }
};

/// Reward family at the pessimistic constant (min r) / (1 - gamma) everywhere.
inline AlphaFamily init_reward_family(const Pomdp& m, const Ldba& aut) {
    AlphaFamily fam;
    fam.kind = AlphaFamily::Kind::Reward;
    fam.n_states = m.n_states();
    fam.n_base = m.n_actions();
    fam.n_q = aut.n_states();
    fam.sets.assign(fam.n_q * fam.n_codes(), {});
    double rmin = std::numeric_limits<double>::infinity();
    for (double r : m.reward) rmin = std::min(rmin, r);
    const double floor_value = rmin / (1.0 - m.discount);
    for (std::size_t q = 0; q < fam.n_q; ++q)
        for (std::size_t code : available_codes(aut, q, fam.n_base))
            fam.slot(q, code).vecs.push_back(
                AlphaVector{std::vector<double>(fam.n_states, floor_value), q, code, 0});
    return fam;
}

/// Probability family at zero, except accepting states which start at one.
inline AlphaFamily init_probability_family(const Pomdp& m, const Ldba& aut) {
    AlphaFamily fam;
    fam.kind = AlphaFamily::Kind::Probability;
    fam.n_states = m.n_states();
    fam.n_base = m.n_actions();
    fam.n_q = aut.n_states();
    fam.sets.assign(fam.n_q * fam.n_codes(), {});
    for (std::size_t q = 0; q < fam.n_q; ++q) {
        const double v0 = aut.accepting[q] ? 1.0 : 0.0;
        for (std::size_t code : available_codes(aut, q, fam.n_base))
            fam.slot(q, code).vecs.push_back(
                AlphaVector{std::vector<double>(fam.n_states, v0), q, code, 0});
    }
    return fam;
}

namespace detail {

/**
 * Defining vector of a slot at a belief.  Witness-indexed slots answer with
 * the vector registered for exactly this quantized belief when one exists
 * (the tabular estimate for that key); otherwise the max over the set.
 * Without the witness-first rule a vector backed up at another key could
 * extrapolate above the key's own estimate and corrupt threshold decisions.
 */
inline const AlphaVector* slot_best(const AlphaSet& t, const Belief& b, double* value) {
    if (t.vecs.empty()) return nullptr;
    if (!t.by_witness.empty()) {
        auto it = t.by_witness.find(belief_key(b));
        if (it != t.by_witness.end()) {
            if (value) *value = dot(t.vecs[it->second].theta, b);
            return &t.vecs[it->second];
        }
    }
    std::size_t arg = 0;
    const double v = set_max(t.vecs, b, &arg);
    if (value) *value = v;
    return &t.vecs[arg];
}

} // namespace detail

/// Q-value surface of one action code at a product state.
inline double eval_q(const AlphaFamily& fam, const ProductState& ps, std::size_t code) {
    const AlphaSet& t = fam.slot(ps.q, code);
    double v = 0.0;
    if (!detail::slot_best(t, ps.belief, &v))
        throw EmptySet("no alpha vectors at q=" + std::to_string(ps.q)
                       + " code=" + std::to_string(code));
    if (fam.kind == AlphaFamily::Kind::Probability) v = std::min(1.0, std::max(0.0, v));
    return v;
}

/**
 * State value: the max of eval_q over the actions available at q, which
 * equals the max over the union set Theta_q.  For the probability family the
 * boundary condition pins accepting states to exactly 1.
 */
inline double eval_v(const AlphaFamily& fam, const Ldba& aut, const ProductState& ps) {
    if (fam.kind == AlphaFamily::Kind::Probability && aut.accepting[ps.q]) return 1.0;
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t code : available_codes(aut, ps.q, fam.n_base)) {
        const AlphaSet& t = fam.slot(ps.q, code);
        if (t.vecs.empty()) continue;
        any = true;
        best = std::max(best, eval_q(fam, ps, code));
    }
    if (!any) throw EmptySet("no alpha vectors at q=" + std::to_string(ps.q));
    return best;
}

/// Action codes whose Q_p clears the safety threshold, in code order.
inline std::vector<std::size_t> safe_codes(const AlphaFamily& fp, const Ldba& aut,
                                           const ProductState& ps, double threshold) {
    std::vector<std::size_t> out;
    for (std::size_t code : available_codes(aut, ps.q, fp.n_base))
        if (!fp.slot(ps.q, code).vecs.empty() && eval_q(fp, ps, code) >= threshold)
            out.push_back(code);
    return out;
}

/// Code with maximal Q_p (first maximizer); the fallback when nothing is safe.
inline std::size_t fallback_code(const AlphaFamily& fp, const Ldba& aut, const ProductState& ps) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_code = 0;
    bool any = false;
    for (std::size_t code : available_codes(aut, ps.q, fp.n_base)) {
        if (fp.slot(ps.q, code).vecs.empty()) continue;
        const double v = eval_q(fp, ps, code);
        if (!any || v > best) {
            best = v;
            best_code = code;
            any = true;
        }
    }
    if (!any) throw EmptySet("no alpha vectors at q=" + std::to_string(ps.q));
    return best_code;
}

/**
 * Reward value restricted to threshold-safe actions; the value the
 * constraint-respecting greedy policy actually achieves.  With an empty safe
 * set the max-Q_p fallback action is scored instead.
 */
inline double eval_v_constrained(const AlphaFamily& fr, const AlphaFamily& fp, const Ldba& aut,
                                 const ProductState& ps, double threshold) {
    const std::vector<std::size_t> safe = safe_codes(fp, aut, ps, threshold);
    if (safe.empty()) return eval_q(fr, ps, fallback_code(fp, aut, ps));
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t code : safe) best = std::max(best, eval_q(fr, ps, code));
    return best;
}

/// Model-side context shared by every backup.
struct BackupContext {
    const Pomdp* model = nullptr;
    const Ldba* aut = nullptr;
    const std::vector<AtomicProposition>* aps = nullptr;
    double gamma_b = 0.99;          ///< Buchi surrogate discount
    double safe_threshold = 1.0 - 1e-6;
    const AlphaFamily* fp_filter = nullptr;  ///< when set, reward continuations
                                             ///< are restricted to safe actions
};

namespace detail {

/// Argmax vector over the slots of the allowed codes at (bb, qq); each slot
/// answers witness-first, ties go to the lowest code.
inline const AlphaVector* best_vector(const AlphaFamily& fam, std::size_t qq, const Belief& bb,
                                      const std::vector<std::size_t>& allowed) {
    const AlphaVector* best = nullptr;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t code : allowed) {
        double v = 0.0;
        const AlphaVector* cand = slot_best(fam.slot(qq, code), bb, &v);
        if (cand && (!best || v > best_v)) {
            best = cand;
            best_v = v;
        }
    }
    if (!best) throw EmptySet("no continuation vectors at q=" + std::to_string(qq));
    return best;
}

/// Continuation candidates at a successor product state: every available
/// code, or just the safe ones (fallback: the max-Q_p code) when filtering.
inline std::vector<std::size_t> continuation_codes(const AlphaFamily& fam,
                                                   const BackupContext& ctx, std::size_t qq,
                                                   const Belief& bb) {
    if (fam.kind == AlphaFamily::Kind::Reward && ctx.fp_filter) {
        const ProductState ps{bb, qq};
        std::vector<std::size_t> safe =
            safe_codes(*ctx.fp_filter, *ctx.aut, ps, ctx.safe_threshold);
        if (safe.empty()) safe.push_back(fallback_code(*ctx.fp_filter, *ctx.aut, ps));
        return safe;
    }
    return available_codes(*ctx.aut, qq, fam.n_base);
}

/**
 * Tabular continuation value at a successor product state: the max over the
 * allowed codes of the witnessed value at exactly this key, with codes that
 * have no entry for the key contributing their initialization (the accepting
 * boundary, or the reward floor).  Extrapolating other witnesses' vectors
 * here would seed new chains with values a tabular iteration never sees.
 */
inline double witness_value(const AlphaFamily& fam, const BackupContext& ctx, std::size_t qq,
                            const Belief& bb) {
    double init;
    if (fam.kind == AlphaFamily::Kind::Probability) {
        init = ctx.aut->accepting[qq] ? 1.0 : 0.0;
    } else {
        double rmin = std::numeric_limits<double>::infinity();
        for (double r : ctx.model->reward) rmin = std::min(rmin, r);
        init = rmin / (1.0 - ctx.model->discount);
    }
    const BeliefKey key = belief_key(bb);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t code : continuation_codes(fam, ctx, qq, bb)) {
        const AlphaSet& t = fam.slot(qq, code);
        const auto it = t.by_witness.find(key);
        best = std::max(best, it == t.by_witness.end() ? init : dot(t.vecs[it->second].theta, bb));
    }
    return best;
}

} // namespace detail

/**
 * Exact point-based backup at (b, q, code).
 *
 * Base action a:  the automaton reads the label of the current belief,
 * q' = delta(q, L(b)), and for every observation with likelihood above the
 * zero threshold the argmax continuation vector is taken at the updated
 * belief.  Reward kind:
 *     theta(s) = r(s,a) + gamma * sum_o sum_s' Omega(s',o) T(s,a,s') theta*_o(s')
 * Probability kind replaces r with the surrogate (1-gamma_b) on accepting q
 * and discounts by gamma_b.
 *
 * Epsilon jump: deterministic zero-reward move with no discount step; the
 * backup copies the argmax continuation vector at (b, target).
 */
inline AlphaVector backup_exact(const AlphaFamily& fam, const BackupContext& ctx, const Belief& b,
                                std::size_t q, std::size_t code, std::uint64_t generation) {
    const Pomdp& m = *ctx.model;
    const Ldba& aut = *ctx.aut;
    const bool prob = fam.kind == AlphaFamily::Kind::Probability;
    const ProductAction act = action_from_code(code, fam.n_base);
    AlphaVector out;
    out.owner_q = q;
    out.owner_code = code;
    out.generation = generation;

    if (act.is_eps) {
        require_epsilon(aut, q, act.eps_target);
        const auto allowed = detail::continuation_codes(fam, ctx, act.eps_target, b);
        out.theta = detail::best_vector(fam, act.eps_target, b, allowed)->theta;
        return out;
    }

    const std::size_t a = act.base;
    const std::size_t q2 = aut.step(q, label_mask(*ctx.aps, b));
    const double gamma = prob ? ctx.gamma_b : m.discount;
    const double base = prob ? (aut.accepting[q] ? 1.0 - ctx.gamma_b : 0.0) : 0.0;
    out.theta.assign(m.n_states(), base);
    if (!prob)
        for (std::size_t s = 0; s < m.n_states(); ++s) out.theta[s] += m.rew(s, a);

    for (std::size_t o = 0; o < m.n_observations(); ++o) {
        Belief b2;
        try {
            b2 = belief_update(m, b, a, o);
        } catch (const ZeroLikelihoodObservation&) {
            continue;  // observation unreachable from b; contributes nothing at b
        }
        const auto allowed = detail::continuation_codes(fam, ctx, q2, b2);
        const AlphaVector* star = detail::best_vector(fam, q2, b2, allowed);
        for (std::size_t s = 0; s < m.n_states(); ++s) {
            double acc = 0.0;
            for (std::size_t s2 = 0; s2 < m.n_states(); ++s2)
                acc += m.omega(s2, o) * m.trans(s, a, s2) * star->theta[s2];
            out.theta[s] += gamma * acc;
        }
    }
    return out;
}

/**
 * Empirical backup from stored successor samples of (b, a): the continuation
 * term averages the witnessed values at the sampled successor beliefs,
 *     theta = r(.,a) + (gamma / n) * sum_i v*_i,
 * with n the total sample count.  Samples arrive as (successor, count) pairs;
 * each successor must be reproducible as belief_update(b, a, o) for some o,
 * otherwise InconsistentSamples is raised.  Epsilon codes ignore the samples
 * and behave exactly like the exact backup.
 */
inline AlphaVector backup_empirical(const AlphaFamily& fam, const BackupContext& ctx,
                                    const Belief& b, std::size_t q, std::size_t code,
                                    const std::vector<std::pair<Belief, std::uint64_t>>& samples,
                                    std::uint64_t generation) {
    const Pomdp& m = *ctx.model;
    const Ldba& aut = *ctx.aut;
    const bool prob = fam.kind == AlphaFamily::Kind::Probability;
    const ProductAction act = action_from_code(code, fam.n_base);
    if (act.is_eps) return backup_exact(fam, ctx, b, q, code, generation);

    const std::size_t a = act.base;
    std::uint64_t n = 0;
    for (const auto& [succ, count] : samples) {
        bool reachable = false;
        for (std::size_t o = 0; o < m.n_observations() && !reachable; ++o) {
            try {
                reachable = belief_equal(belief_update(m, b, a, o), succ);
            } catch (const ZeroLikelihoodObservation&) {
            }
        }
        if (!reachable)
            throw InconsistentSamples("successor sample is not reachable from the source belief"
                                      " under action " + m.actions[a]);
        n += count;
    }
    if (n == 0) throw InconsistentSamples("no successor samples for the requested backup");

    const std::size_t q2 = aut.step(q, label_mask(*ctx.aps, b));
    const double gamma = prob ? ctx.gamma_b : m.discount;
    const double base = prob ? (aut.accepting[q] ? 1.0 - ctx.gamma_b : 0.0) : 0.0;
    AlphaVector out;
    out.owner_q = q;
    out.owner_code = code;
    out.generation = generation;
    out.theta.assign(m.n_states(), base);
    if (!prob)
        for (std::size_t s = 0; s < m.n_states(); ++s) out.theta[s] += m.rew(s, a);

    // The continuation is a scalar: these vectors live in witness-keyed
    // chains, so the per-state entries only have to be exact at the witness.
    // Copying the successor vector's entries instead would smuggle its
    // off-support components into every state of this chain.
    const double scale = gamma / static_cast<double>(n);
    double cont = 0.0;
    for (const auto& [succ, count] : samples) {
        const double w = scale * static_cast<double>(count);
        cont += w * detail::witness_value(fam, ctx, q2, succ);
    }
    for (std::size_t s = 0; s < m.n_states(); ++s) out.theta[s] += cont;
    return out;
}

/**
 * Preserved-value pruning (Lark).  Keeps a minimal subset whose upper
 * envelope matches the input everywhere: vectors enter the kept set in the
 * order they win a strict advantage witness; boundary-tied and duplicate
 * vectors are dropped in favor of the first winner.
 */
inline std::vector<AlphaVector> prune_lp(const std::vector<AlphaVector>& set) {
    std::vector<AlphaVector> kept;
    if (set.empty()) return kept;
    const std::size_t dim = set[0].theta.size();
    std::vector<bool> used(set.size(), false);
    std::vector<bool> discarded(set.size(), false);

    auto move_best_at = [&](const Belief& witness) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_i = set.size();
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (used[i] || discarded[i]) continue;
            double v = 0.0;
            for (std::size_t s = 0; s < dim; ++s) v += set[i].theta[s] * witness[s];
            if (v > best) {
                best = v;
                best_i = i;
            }
        }
        used[best_i] = true;
        kept.push_back(set[best_i]);
    };

    for (std::size_t i = 0; i < set.size(); ++i) {
        // stay on candidate i until it is kept or dominated; the winner at its
        // advantage witness may be a different pending vector, in which case i
        // must be retried against the enlarged kept set
        while (!used[i] && !discarded[i]) {
            if (kept.empty()) {
                move_best_at(Belief(dim, 1.0 / static_cast<double>(dim)));
                continue;
            }
            std::vector<const std::vector<double>*> rivals;
            rivals.reserve(kept.size());
            for (const auto& k : kept) rivals.push_back(&k.theta);
            Belief witness;
            const double d = lark_advantage(set[i].theta, rivals, &witness);
            if (d > 1e-12)
                move_best_at(witness);
            else
                discarded[i] = true;
        }
    }
    return kept;
}

/**
 * Witness pruning: keeps exactly the vectors that are the first argmax at
 * one or more of the given beliefs.  Cheap, and exact at the witnesses.
 */
inline std::vector<AlphaVector> prune_pointbased(const std::vector<AlphaVector>& set,
                                                 const std::vector<Belief>& witnesses) {
    std::vector<AlphaVector> kept;
    if (set.empty() || witnesses.empty()) return kept;
    std::vector<bool> keep(set.size(), false);
    for (const Belief& w : witnesses) {
        std::size_t arg = 0;
        set_max(set, w, &arg);
        keep[arg] = true;
    }
    for (std::size_t i = 0; i < set.size(); ++i)
        if (keep[i]) kept.push_back(set[i]);
    return kept;
}

/// Applies prune_lp to one slot.  Witness-indexed slots are left alone: the
/// index is the replacement identity and must not be invalidated.
inline void prune_slot_lp(AlphaFamily& fam, std::size_t q, std::size_t code) {
    AlphaSet& t = fam.slot(q, code);
    if (!t.by_witness.empty() || t.vecs.size() < 2) return;
    t.vecs = prune_lp(t.vecs);
}

/// Applies prune_pointbased to one slot (union-managed slots only, as above).
inline void prune_slot_pointbased(AlphaFamily& fam, std::size_t q, std::size_t code,
                                  const std::vector<Belief>& witnesses) {
    AlphaSet& t = fam.slot(q, code);
    if (!t.by_witness.empty() || t.vecs.size() < 2) return;
    t.vecs = prune_pointbased(t.vecs, witnesses);
}

} // namespace beliefsynth
