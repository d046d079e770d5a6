#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iltl.hpp"

namespace beliefsynth {

/// Epsilon move of the automaton: source-local, named, label-free.
struct EpsilonMove {
    std::size_t target = 0;
    std::string name;
};

/**
 * Limit-deterministic Buchi automaton over the alphabet 2^AP.
 *
 * Non-epsilon transitions are total and deterministic: step_table[q][mask]
 * is the unique successor of q under the label given by mask (bit i of the
 * mask is ap_names[i]).  States split into an initial and an accepting
 * component; the accepting component is closed under label transitions and
 * offers no epsilon moves; every accepting state lies in it.  A run is
 * accepting when it visits the accepting set infinitely often.
 */
struct Ldba {
    std::vector<std::string> states;
    std::vector<std::string> ap_names;
    std::size_t initial = 0;
    std::vector<bool> accepting;               ///< Buchi set B
    std::vector<bool> in_accepting_component;  ///< bipartition flag per state
    std::vector<std::vector<std::size_t>> step_table;  ///< [q][mask] -> q'
    std::vector<std::vector<EpsilonMove>> eps_moves;   ///< [q] -> available jumps

    std::size_t n_states() const { return states.size(); }
    std::size_t n_masks() const { return std::size_t{1} << ap_names.size(); }
    std::size_t step(std::size_t q, std::uint32_t mask) const { return step_table[q][mask]; }
    const std::vector<EpsilonMove>& eps(std::size_t q) const { return eps_moves[q]; }

    std::size_t state_index(const std::string& name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        throw ValidationError("unknown automaton state '" + name + "'");
    }
};

/// Structural invariant check; one description per violation.
inline std::vector<std::string> validate_ldba(const Ldba& a) {
    std::vector<std::string> out;
    detail::check_unique(a.states, "automaton states", out);
    detail::check_unique(a.ap_names, "automaton aps", out);
    if (a.states.empty()) out.push_back("automaton has no states");
    if (a.ap_names.size() > 20) out.push_back("more than 20 atomic propositions");
    if (!out.empty()) return out;

    const std::size_t nq = a.n_states(), nm = a.n_masks();
    if (a.initial >= nq) out.push_back("initial state index out of range");
    if (a.accepting.size() != nq || a.in_accepting_component.size() != nq
        || a.step_table.size() != nq || a.eps_moves.size() != nq) {
        out.push_back("per-state tables do not match the state count");
        return out;
    }
    for (std::size_t q = 0; q < nq; ++q) {
        if (a.step_table[q].size() != nm) {
            out.push_back("state " + a.states[q] + ": step row has "
                          + std::to_string(a.step_table[q].size()) + " entries, expected "
                          + std::to_string(nm));
            continue;
        }
        for (std::size_t mask = 0; mask < nm; ++mask) {
            const std::size_t q2 = a.step_table[q][mask];
            if (q2 >= nq) {
                out.push_back("state " + a.states[q] + ": successor out of range");
                continue;
            }
            if (a.in_accepting_component[q] && !a.in_accepting_component[q2])
                out.push_back("accepting component not closed: " + a.states[q] + " -> "
                              + a.states[q2] + " on mask " + std::to_string(mask));
        }
        if (a.accepting[q] && !a.in_accepting_component[q])
            out.push_back("accepting state " + a.states[q] + " outside the accepting component");
        if (a.in_accepting_component[q] && !a.eps_moves[q].empty())
            out.push_back("epsilon move offered inside the accepting component at "
                          + a.states[q]);
        for (const auto& e : a.eps_moves[q])
            if (e.target >= nq)
                out.push_back("state " + a.states[q] + ": epsilon target out of range");
    }
    return out;
}

/// Ultimately periodic run: prefix from the initial state, then a repeated cycle.
struct LassoRun {
    std::vector<std::size_t> prefix;
    std::vector<std::size_t> cycle;
};

namespace detail {

inline bool ldba_adjacent(const Ldba& a, std::size_t q, std::size_t q2) {
    for (std::size_t mask = 0; mask < a.n_masks(); ++mask)
        if (a.step(q, static_cast<std::uint32_t>(mask)) == q2) return true;
    for (const auto& e : a.eps(q))
        if (e.target == q2) return true;
    return false;
}

} // namespace detail

/**
 * Buchi acceptance of a lasso: the cycle meets the accepting set.  The run
 * must be connected (every consecutive pair reachable by some label or an
 * epsilon move, prefix anchored at the initial state, cycle closing on
 * itself); otherwise InvalidRun is raised.
 */
inline bool lasso_accepted(const Ldba& a, const LassoRun& run) {
    if (run.cycle.empty()) throw InvalidRun("empty cycle");
    std::vector<std::size_t> walk = run.prefix;
    walk.insert(walk.end(), run.cycle.begin(), run.cycle.end());
    if (walk.front() != a.initial)
        throw InvalidRun("run does not start at the initial state");
    for (std::size_t i = 0; i + 1 < walk.size(); ++i)
        if (!detail::ldba_adjacent(a, walk[i], walk[i + 1]))
            throw InvalidRun("no transition from " + a.states[walk[i]] + " to "
                             + a.states[walk[i + 1]]);
    if (!detail::ldba_adjacent(a, run.cycle.back(), run.cycle.front()))
        throw InvalidRun("cycle does not close");
    for (std::size_t q : run.cycle)
        if (a.accepting[q]) return true;
    return false;
}

enum class TemplateKind { GF, FG, FGOrFG };

/**
 * Template library for the supported formula shapes.
 *
 *  GF f       - two states, all in the accepting component, no epsilon moves;
 *               the accepting state is visited exactly when f held.
 *  FG f       - initial self-loop state with one epsilon jump into an
 *               f-invariant accepting state backed by an absorbing rejecting
 *               sink (the sink is what keeps the transition table total).
 *  FG f|FG g  - five states: initial state with epsilon jumps eps1/eps2 into
 *               the two FG components.
 */
inline Ldba template_automaton(TemplateKind kind, const std::vector<std::string>& aps) {
    Ldba a;
    a.ap_names = aps;
    auto all_masks = [&]() { return a.n_masks(); };
    switch (kind) {
        case TemplateKind::GF: {
            if (aps.size() != 1) throw UnsupportedPattern("GF template takes one proposition");
            a.states = {"q0", "q1"};
            a.initial = 0;
            a.accepting = {false, true};
            a.in_accepting_component = {true, true};
            a.step_table.assign(2, std::vector<std::size_t>(all_masks()));
            for (std::size_t q = 0; q < 2; ++q)
                for (std::size_t mask = 0; mask < all_masks(); ++mask)
                    a.step_table[q][mask] = (mask & 1u) ? 1 : 0;
            a.eps_moves.assign(2, {});
            return a;
        }
        case TemplateKind::FG: {
            if (aps.size() != 1) throw UnsupportedPattern("FG template takes one proposition");
            a.states = {"q0", "acc0", "rej0"};
            a.initial = 0;
            a.accepting = {false, true, false};
            a.in_accepting_component = {false, true, true};
            a.step_table.assign(3, std::vector<std::size_t>(all_masks()));
            for (std::size_t mask = 0; mask < all_masks(); ++mask) {
                a.step_table[0][mask] = 0;
                a.step_table[1][mask] = (mask & 1u) ? 1 : 2;
                a.step_table[2][mask] = 2;
            }
            a.eps_moves.assign(3, {});
            a.eps_moves[0].push_back({1, "eps1"});
            return a;
        }
        case TemplateKind::FGOrFG: {
            if (aps.size() != 2)
                throw UnsupportedPattern("FG-or-FG template takes two propositions");
            a.states = {"q0", "acc0", "rej0", "acc1", "rej1"};
            a.initial = 0;
            a.accepting = {false, true, false, true, false};
            a.in_accepting_component = {false, true, true, true, true};
            a.step_table.assign(5, std::vector<std::size_t>(all_masks()));
            for (std::size_t mask = 0; mask < all_masks(); ++mask) {
                a.step_table[0][mask] = 0;
                a.step_table[1][mask] = (mask & 1u) ? 1 : 2;
                a.step_table[2][mask] = 2;
                a.step_table[3][mask] = (mask & 2u) ? 3 : 4;
                a.step_table[4][mask] = 4;
            }
            a.eps_moves.assign(5, {});
            a.eps_moves[0].push_back({1, "eps1"});
            a.eps_moves[0].push_back({3, "eps2"});
            return a;
        }
    }
    throw UnsupportedPattern("unknown template kind");
}

/// Universal automaton: one accepting state looping on every label.  Running
/// the product with it reduces everything to the unconstrained POMDP.
inline Ldba universal_automaton(const std::vector<std::string>& aps) {
    Ldba a;
    a.ap_names = aps;
    a.states = {"q0"};
    a.initial = 0;
    a.accepting = {true};
    a.in_accepting_component = {true};
    a.step_table.assign(1, std::vector<std::size_t>(a.n_masks(), 0));
    a.eps_moves.assign(1, {});
    return a;
}

/**
 * Recognizes the supported formula shapes and instantiates the template:
 * GF f, FG f, and FG f | FG g with f, g atomic.  Anything else raises
 * UnsupportedPattern.
 */
inline Ldba automaton_for_formula(const FormulaPtr& f) {
    auto inner_ap = [](const FormulaPtr& g, FormulaOp outer,
                       FormulaOp middle) -> const std::string* {
        if (g->op != outer || g->lhs->op != middle || g->bound || g->lhs->bound) return nullptr;
        if (g->lhs->lhs->op != FormulaOp::Ap) return nullptr;
        return &g->lhs->lhs->ap;
    };
    if (const auto* ap = inner_ap(f, FormulaOp::Always, FormulaOp::Eventually))
        return template_automaton(TemplateKind::GF, {*ap});
    if (const auto* ap = inner_ap(f, FormulaOp::Eventually, FormulaOp::Always))
        return template_automaton(TemplateKind::FG, {*ap});
    if (f->op == FormulaOp::Or) {
        const auto* left = inner_ap(f->lhs, FormulaOp::Eventually, FormulaOp::Always);
        const auto* right = inner_ap(f->rhs, FormulaOp::Eventually, FormulaOp::Always);
        if (left && right) return template_automaton(TemplateKind::FGOrFG, {*left, *right});
    }
    throw UnsupportedPattern("formula is not GF f, FG f, or FG f | FG g with atomic f, g");
}

/// Evaluates a propositional guard (no temporal operators) on a label mask.
inline bool eval_guard(const FormulaPtr& g, const std::vector<std::string>& ap_names,
                       std::uint32_t mask) {
    switch (g->op) {
        case FormulaOp::True: return true;
        case FormulaOp::Ap:
            for (std::size_t i = 0; i < ap_names.size(); ++i)
                if (ap_names[i] == g->ap) return (mask >> i) & 1u;
            throw UnknownProposition(g->ap);
        case FormulaOp::Not: return !eval_guard(g->lhs, ap_names, mask);
        case FormulaOp::And:
            return eval_guard(g->lhs, ap_names, mask) && eval_guard(g->rhs, ap_names, mask);
        case FormulaOp::Or:
            return eval_guard(g->lhs, ap_names, mask) || eval_guard(g->rhs, ap_names, mask);
        case FormulaOp::Implies:
            return !eval_guard(g->lhs, ap_names, mask) || eval_guard(g->rhs, ap_names, mask);
        default: throw FormatError("temporal operator inside a transition guard");
    }
}

namespace detail {

inline void check_propositional(const FormulaPtr& g) {
    switch (g->op) {
        case FormulaOp::True:
        case FormulaOp::Ap: return;
        case FormulaOp::Not: check_propositional(g->lhs); return;
        case FormulaOp::And:
        case FormulaOp::Or:
        case FormulaOp::Implies:
            check_propositional(g->lhs);
            check_propositional(g->rhs);
            return;
        default: throw FormatError("temporal operator inside a transition guard");
    }
}

} // namespace detail

/// Parses a guard over the given proposition names; rejects temporal syntax.
inline FormulaPtr parse_guard(std::string_view text, const std::vector<std::string>& ap_names) {
    std::vector<AtomicProposition> table;
    table.reserve(ap_names.size());
    for (const auto& name : ap_names) table.push_back(AtomicProposition{name, {}, 0.0, {}});
    FormulaPtr g = parse_formula(text, table);
    detail::check_propositional(g);
    return g;
}

} // namespace beliefsynth
