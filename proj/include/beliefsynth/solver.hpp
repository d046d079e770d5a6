#pragma once

#include <deque>
#include <set>

#include "alpha.hpp"

namespace beliefsynth {

struct SolveConfig {
    double tolerance = 1e-6;        ///< sup-norm eval_v change over belief_set x Q
    std::size_t max_sweeps = 10000;
    double gamma_b = 0.99;          ///< Buchi surrogate discount
    double safe_threshold = 1.0 - 1e-6;
    bool constrained = true;        ///< restrict reward continuations to safe actions
    std::size_t max_beliefs = 10000;
    std::size_t grid_points = 0;    ///< extra 1-simplex grid (2-state models only)
    std::size_t pointbased_cap = 64;  ///< above this, sweep pruning switches to witness mode
};

struct SolveResult {
    AlphaFamily fr;
    AlphaFamily fp;
    std::vector<Belief> belief_set;
    std::size_t sweeps_r = 0;
    std::size_t sweeps_p = 0;
    double residual_r = std::numeric_limits<double>::infinity();
    double residual_p = std::numeric_limits<double>::infinity();
    bool converged_r = false;
    bool converged_p = false;
};

/**
 * Reachable witness beliefs, breadth first from the initial belief and
 * deduplicated by quantized key.  Belief evolution does not depend on the
 * automaton component, so this is a plain POMDP closure.  With
 * grid_points >= 2 and a two-state model an evenly spaced simplex grid is
 * appended, which helps when the reachable set is thin.
 */
inline std::vector<Belief> build_belief_set(const Pomdp& m, const SolveConfig& cfg) {
    std::vector<Belief> beliefs;
    std::set<BeliefKey> seen;
    std::deque<Belief> frontier;

    auto push = [&](Belief b) {
        if (beliefs.size() >= cfg.max_beliefs) return;
        if (!seen.insert(belief_key(b)).second) return;
        beliefs.push_back(b);
        frontier.push_back(std::move(b));
    };

    push(m.initial);
    while (!frontier.empty()) {
        const Belief b = frontier.front();
        frontier.pop_front();
        for (std::size_t a = 0; a < m.n_actions(); ++a)
            for (std::size_t o = 0; o < m.n_observations(); ++o) {
                try {
                    push(belief_update(m, b, a, o));
                } catch (const ZeroLikelihoodObservation&) {
                }
            }
    }

    if (cfg.grid_points >= 2 && m.n_states() == 2)
        for (std::size_t i = 0; i < cfg.grid_points; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(cfg.grid_points - 1);
            push(Belief{1.0 - t, t});
        }
    return beliefs;
}

namespace detail {

/// Value snapshot over belief_set x Q; the convergence measure.  Constrained
/// reward runs are measured on the safe-restricted value: the unconstrained
/// max can sit on an unsafe action whose Q is already stationary while the
/// safe chains are still climbing.
inline std::vector<double> snapshot_v(const AlphaFamily& fam, const BackupContext& ctx,
                                      const std::vector<Belief>& beliefs) {
    const Ldba& aut = *ctx.aut;
    const bool constrained = fam.kind == AlphaFamily::Kind::Reward && ctx.fp_filter != nullptr;
    std::vector<double> snap;
    snap.reserve(beliefs.size() * aut.n_states());
    for (const Belief& b : beliefs)
        for (std::size_t q = 0; q < aut.n_states(); ++q) {
            const ProductState ps{b, q};
            snap.push_back(constrained ? eval_v_constrained(fam, *ctx.fp_filter, aut, ps,
                                                            ctx.safe_threshold)
                                       : eval_v(fam, aut, ps));
        }
    return snap;
}

/// One sweep: back up every (belief, q, code) in order.  The first sweep is
/// computed jointly from the pre-sweep family, so every witness chain starts
/// from the seed values (in particular, accepting fixpoints start and stay at
/// exactly one); later sweeps update in place.  Constrained reward slots are
/// witness-replaced: their safe continuation sets depend on the belief, which
/// breaks max-of-alphas extrapolation between witnesses.
inline void sweep_family(AlphaFamily& fam, const BackupContext& ctx,
                         const std::vector<Belief>& beliefs, std::uint64_t generation) {
    const bool replace = fam.kind == AlphaFamily::Kind::Reward && ctx.fp_filter != nullptr;
    auto put = [&](std::size_t q, std::size_t code, AlphaVector vec, const BeliefKey& key) {
        if (replace)
            fam.insert_replace(q, code, std::move(vec), key);
        else
            fam.insert(q, code, std::move(vec), key);
    };
    if (generation == 1) {
        struct Pending {
            std::size_t q, code;
            BeliefKey key;
            AlphaVector vec;
        };
        std::vector<Pending> batch;
        for (const Belief& b : beliefs) {
            const BeliefKey key = belief_key(b);
            for (std::size_t q = 0; q < ctx.aut->n_states(); ++q)
                for (std::size_t code : available_codes(*ctx.aut, q, fam.n_base))
                    batch.push_back(
                        {q, code, key, backup_exact(fam, ctx, b, q, code, generation)});
        }
        for (Pending& p : batch) put(p.q, p.code, std::move(p.vec), p.key);
        return;
    }
    for (const Belief& b : beliefs) {
        const BeliefKey key = belief_key(b);
        for (std::size_t q = 0; q < ctx.aut->n_states(); ++q)
            for (std::size_t code : available_codes(*ctx.aut, q, fam.n_base))
                put(q, code, backup_exact(fam, ctx, b, q, code, generation), key);
    }
}

inline double run_family(AlphaFamily& fam, const BackupContext& ctx,
                         const std::vector<Belief>& beliefs, const SolveConfig& cfg,
                         std::size_t& sweeps_out, bool& converged_out) {
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> before = snapshot_v(fam, ctx, beliefs);
    for (std::size_t sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        sweep_family(fam, ctx, beliefs, sweep);
        if (fam.kind == AlphaFamily::Kind::Reward)
            for (std::size_t q = 0; q < fam.n_q; ++q)
                for (std::size_t code : available_codes(*ctx.aut, q, fam.n_base)) {
                    if (fam.slot(q, code).vecs.size() > cfg.pointbased_cap)
                        prune_slot_pointbased(fam, q, code, beliefs);
                    else
                        prune_slot_lp(fam, q, code);
                }
        std::vector<double> after = snapshot_v(fam, ctx, beliefs);
        residual = 0.0;
        for (std::size_t i = 0; i < after.size(); ++i)
            residual = std::max(residual, std::abs(after[i] - before[i]));
        before = std::move(after);
        sweeps_out = sweep;
        if (residual <= cfg.tolerance) {
            converged_out = true;
            break;
        }
    }
    return residual;
}

} // namespace detail

/**
 * Two-phase point-based value iteration on the product.  The probability
 * family is solved to its fixpoint first; its Q surfaces then define the
 * threshold-safe action sets that restrict the reward family's
 * continuations.  Non-convergence is reported through the result flags.
 */
inline SolveResult solve_pbvi(const Pomdp& m, const Ldba& aut,
                              const std::vector<AtomicProposition>& aps,
                              const std::vector<Belief>& belief_set, const SolveConfig& cfg) {
    check_ap_alignment(aut, aps);
    if (belief_set.empty()) throw ValidationError("empty belief set");
    SolveResult res;
    res.belief_set = belief_set;

    res.fp = init_probability_family(m, aut);
    BackupContext ctx_p{&m, &aut, &aps, cfg.gamma_b, cfg.safe_threshold, nullptr};
    res.residual_p = detail::run_family(res.fp, ctx_p, res.belief_set, cfg, res.sweeps_p,
                                        res.converged_p);

    res.fr = init_reward_family(m, aut);
    BackupContext ctx_r{&m, &aut, &aps, cfg.gamma_b, cfg.safe_threshold,
                        cfg.constrained ? &res.fp : nullptr};
    res.residual_r = detail::run_family(res.fr, ctx_r, res.belief_set, cfg, res.sweeps_r,
                                        res.converged_r);
    return res;
}

/// Satisfaction-probability estimate at a product state (boundary-clamped).
inline double probability_value(const SolveResult& res, const Ldba& aut, const ProductState& ps) {
    return eval_v(res.fp, aut, ps);
}

/// Reward value at a product state under the configured constraint regime.
inline double reward_value(const SolveResult& res, const Ldba& aut, const ProductState& ps,
                           const SolveConfig& cfg) {
    if (!cfg.constrained) return eval_v(res.fr, aut, ps);
    return eval_v_constrained(res.fr, res.fp, aut, ps, cfg.safe_threshold);
}

/**
 * Greedy safe action at a product state: the reward argmax over the
 * threshold-safe set, lowest code on ties.  Throws NoSafeAction when the
 * safe set is empty.
 */
inline std::size_t extract_policy(const AlphaFamily& fr, const AlphaFamily& fp, const Ldba& aut,
                                  const ProductState& ps, double threshold) {
    const std::vector<std::size_t> safe = safe_codes(fp, aut, ps, threshold);
    if (safe.empty())
        throw NoSafeAction("no action clears the safety threshold at q=" + std::to_string(ps.q));
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_code = safe.front();
    for (std::size_t code : safe) {
        const double v = eval_q(fr, ps, code);
        if (v > best) {
            best = v;
            best_code = code;
        }
    }
    return best_code;
}

} // namespace beliefsynth
