#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldba.hpp"

namespace beliefsynth {

/// State of the product belief MDP: a belief paired with an automaton state.
struct ProductState {
    Belief belief;
    std::size_t q = 0;
};

/**
 * Action of the product: either a base POMDP action or an epsilon jump of the
 * automaton.  Actions are densely coded as
 *   code = base index                    for base actions,
 *   code = n_base + automaton target     for epsilon jumps,
 * which keeps per-(q, action) tables addressable across all states.
 */
struct ProductAction {
    bool is_eps = false;
    std::size_t base = 0;        ///< base action index when !is_eps
    std::size_t eps_target = 0;  ///< automaton successor when is_eps
};

inline std::size_t action_code(const ProductAction& act, std::size_t n_base) {
    return act.is_eps ? n_base + act.eps_target : act.base;
}

inline ProductAction action_from_code(std::size_t code, std::size_t n_base) {
    if (code < n_base) return ProductAction{false, code, 0};
    return ProductAction{true, 0, code - n_base};
}

/// Base actions first, then the epsilon moves available at q, in table order.
inline std::vector<ProductAction> available_actions(const Ldba& a, std::size_t q,
                                                    std::size_t n_base) {
    std::vector<ProductAction> out;
    out.reserve(n_base + a.eps(q).size());
    for (std::size_t b = 0; b < n_base; ++b) out.push_back(ProductAction{false, b, 0});
    for (const auto& e : a.eps(q)) out.push_back(ProductAction{true, 0, e.target});
    return out;
}

/// Same set as available_actions, already coded.
inline std::vector<std::size_t> available_codes(const Ldba& a, std::size_t q,
                                                std::size_t n_base) {
    std::vector<std::size_t> out;
    out.reserve(n_base + a.eps(q).size());
    for (std::size_t b = 0; b < n_base; ++b) out.push_back(b);
    for (const auto& e : a.eps(q)) out.push_back(n_base + e.target);
    return out;
}

inline void require_epsilon(const Ldba& a, std::size_t q, std::size_t target) {
    for (const auto& e : a.eps(q))
        if (e.target == target) return;
    throw EpsilonUnavailable("no epsilon move from " + a.states[q] + " to "
                             + a.states[target]);
}

/**
 * One product transition.  A base action Bayes-updates the belief with the
 * supplied observation while the automaton reads the label of the *current*
 * belief, q' = delta(q, L(b)).  An epsilon jump moves only the automaton
 * component and consumes no observation (pass any value for o).
 */
inline ProductState product_step(const Pomdp& m, const Ldba& a,
                                 const std::vector<AtomicProposition>& aps,
                                 const ProductState& ps, const ProductAction& act,
                                 std::size_t o, const LabelPolicy& policy = {}) {
    if (act.is_eps) {
        require_epsilon(a, ps.q, act.eps_target);
        return ProductState{ps.belief, act.eps_target};
    }
    const std::uint32_t mask = label_mask(aps, ps.belief, policy);
    ProductState out;
    out.belief = belief_update(m, ps.belief, act.base, o);
    out.q = a.step(ps.q, mask);
    return out;
}

/// Expected immediate reward; epsilon jumps are instantaneous and pay nothing.
inline double product_reward(const Pomdp& m, const ProductState& ps, const ProductAction& act) {
    if (act.is_eps) return 0.0;
    return belief_reward(m, ps.belief, act.base);
}

/// Whether the product state sits in the Buchi set B x dist(S).
inline bool is_buchi(const Ldba& a, const ProductState& ps) { return a.accepting[ps.q]; }

/// The automaton's proposition list must match the table, name for name.
inline void check_ap_alignment(const Ldba& a, const std::vector<AtomicProposition>& aps) {
    if (a.ap_names.size() != aps.size())
        throw ValidationError("automaton lists " + std::to_string(a.ap_names.size())
                              + " propositions, table has " + std::to_string(aps.size()));
    for (std::size_t i = 0; i < aps.size(); ++i)
        if (a.ap_names[i] != aps[i].name)
            throw ValidationError("proposition order mismatch at position " + std::to_string(i)
                                  + ": automaton '" + a.ap_names[i] + "' vs table '"
                                  + aps[i].name + "'");
}

} // namespace beliefsynth
