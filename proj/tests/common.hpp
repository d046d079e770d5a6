#pragma once

// Shared model builders and independent oracles for the test suite.  The
// oracles are written straight off the defining equations and never call the
// code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "beliefsynth/io.hpp"

namespace bst {

using namespace beliefsynth;

// ---------------------------------------------------------------- builders

/// 2-state canonical model: identity dynamics, Omega rows (0.8,0.2)/(0.4,0.6).
inline Pomdp canon2() {
    Pomdp m;
    m.states = {"s1", "s2"};
    m.actions = {"a1", "a2"};
    m.observations = {"o1", "o2"};
    m.discount = 0.9;
    m.allocate();
    for (std::size_t a = 0; a < 2; ++a) {
        m.trans(0, a, 0) = 1.0;
        m.trans(1, a, 1) = 1.0;
    }
    m.omega(0, 0) = 0.8;
    m.omega(0, 1) = 0.2;
    m.omega(1, 0) = 0.4;
    m.omega(1, 1) = 0.6;
    m.initial = {0.5, 0.5};
    m.rew(0, 0) = 1.0;
    m.rew(1, 0) = 0.0;
    m.rew(0, 1) = 0.0;
    m.rew(1, 1) = 1.0;
    return m;
}

inline Pomdp tiger() {
    Pomdp m;
    m.states = {"tiger_left", "tiger_right"};
    m.actions = {"listen", "open_left", "open_right"};
    m.observations = {"hear_left", "hear_right"};
    m.discount = 0.95;
    m.allocate();
    m.trans(0, 0, 0) = 1.0;
    m.trans(1, 0, 1) = 1.0;
    for (std::size_t a = 1; a < 3; ++a)
        for (std::size_t s = 0; s < 2; ++s) {
            m.trans(s, a, 0) = 0.5;
            m.trans(s, a, 1) = 0.5;
        }
    m.omega(0, 0) = 0.85;
    m.omega(0, 1) = 0.15;
    m.omega(1, 0) = 0.15;
    m.omega(1, 1) = 0.85;
    m.initial = {0.5, 0.5};
    m.rew(0, 0) = -1.0;
    m.rew(1, 0) = -1.0;
    m.rew(0, 1) = -100.0;
    m.rew(1, 1) = 10.0;
    m.rew(0, 2) = 10.0;
    m.rew(1, 2) = -100.0;
    return m;
}

/// 2-state deterministic-observation bundle: stay keeps the state, risky
/// jumps s2 -> s1 for a large one-shot reward.  s1 is an absorbing dead end.
inline Pomdp patrol2() {
    Pomdp m;
    m.states = {"s1", "s2"};
    m.actions = {"stay", "risky"};
    m.observations = {"o1", "o2"};
    m.discount = 0.95;
    m.allocate();
    m.trans(0, 0, 0) = 1.0;
    m.trans(1, 0, 1) = 1.0;
    m.trans(0, 1, 0) = 1.0;
    m.trans(1, 1, 0) = 1.0;
    m.omega(0, 0) = 1.0;
    m.omega(1, 1) = 1.0;
    m.initial = {0.0, 1.0};
    m.rew(1, 0) = 1.0;
    m.rew(1, 1) = 100.0;
    return m;
}

/// 3-state deterministic-observation bundle: patrol keeps the state, dash
/// walks s3 -> s2 -> s1 with tempting one-shot rewards.
inline Pomdp patrol3() {
    Pomdp m;
    m.states = {"s1", "s2", "s3"};
    m.actions = {"patrol", "dash"};
    m.observations = {"o1", "o2", "o3"};
    m.discount = 0.95;
    m.allocate();
    for (std::size_t s = 0; s < 3; ++s) m.trans(s, 0, s) = 1.0;
    m.trans(0, 1, 0) = 1.0;
    m.trans(1, 1, 0) = 1.0;
    m.trans(2, 1, 1) = 1.0;
    for (std::size_t s = 0; s < 3; ++s) m.omega(s, s) = 1.0;
    m.initial = {0.0, 0.0, 1.0};
    m.rew(1, 0) = 1.0;
    m.rew(1, 1) = 1000.0;
    m.rew(2, 0) = 2.0;
    m.rew(2, 1) = 8.0;
    return m;
}

inline Pomdp one_state(double c, double gamma) {
    Pomdp m;
    m.states = {"s1"};
    m.actions = {"a1"};
    m.observations = {"o1"};
    m.discount = gamma;
    m.allocate();
    m.trans(0, 0, 0) = 1.0;
    m.omega(0, 0) = 1.0;
    m.initial = {1.0};
    m.rew(0, 0) = c;
    return m;
}

/// safe1 = 0.1 - b(s1), goal2 = b(s2) - 0.8 over an n-state model whose
/// first two states are s1, s2.
inline std::vector<AtomicProposition> guard_aps(std::size_t n_states) {
    AtomicProposition safe1;
    safe1.name = "safe1";
    safe1.weights.assign(n_states, 0.0);
    safe1.weights[0] = -1.0;
    safe1.offset = 0.1;
    AtomicProposition goal2;
    goal2.name = "goal2";
    goal2.weights.assign(n_states, 0.0);
    goal2.weights[1] = 1.0;
    goal2.offset = -0.8;
    return {safe1, goal2};
}

// ------------------------------------------------------- random instances

inline Belief random_belief(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> exp1(1.0);
    Belief b(n);
    double total = 0.0;
    for (double& x : b) {
        x = exp1(rng) + 1e-9;
        total += x;
    }
    for (double& x : b) x /= total;
    return b;
}

inline Pomdp random_model(std::mt19937_64& rng, std::size_t ns, std::size_t na, std::size_t no,
                          double gamma = 0.9) {
    Pomdp m;
    for (std::size_t s = 0; s < ns; ++s) m.states.push_back("s" + std::to_string(s + 1));
    for (std::size_t a = 0; a < na; ++a) m.actions.push_back("a" + std::to_string(a + 1));
    for (std::size_t o = 0; o < no; ++o) m.observations.push_back("o" + std::to_string(o + 1));
    m.discount = gamma;
    m.allocate();
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t a = 0; a < na; ++a) {
            const Belief row = random_belief(rng, ns);
            for (std::size_t s2 = 0; s2 < ns; ++s2) m.trans(s, a, s2) = row[s2];
            m.rew(s, a) = unit(rng);
        }
        const Belief orow = random_belief(rng, no);
        for (std::size_t o = 0; o < no; ++o) m.omega(s, o) = orow[o];
    }
    m.initial = random_belief(rng, ns);
    return m;
}

// ------------------------------------------------ oracle: Bayes filtering

/// Literal joint-matrix evaluation of the filter: builds P(s', o | b, a) in
/// full, then conditions on the observed column.
inline std::vector<double> brute_joint(const Pomdp& m, const Belief& b, std::size_t a,
                                       std::size_t o) {
    std::vector<double> joint(m.n_states(), 0.0);
    for (std::size_t s2 = 0; s2 < m.n_states(); ++s2) {
        double mass = 0.0;
        for (std::size_t s = 0; s < m.n_states(); ++s) mass += b[s] * m.trans(s, a, s2);
        joint[s2] = mass * m.omega(s2, o);
    }
    return joint;
}

inline double brute_likelihood(const Pomdp& m, const Belief& b, std::size_t a, std::size_t o) {
    const std::vector<double> joint = brute_joint(m, b, a, o);
    double total = 0.0;
    for (double x : joint) total += x;
    return total;
}

inline Belief brute_update(const Pomdp& m, const Belief& b, std::size_t a, std::size_t o) {
    std::vector<double> joint = brute_joint(m, b, a, o);
    double total = 0.0;
    for (double x : joint) total += x;
    for (double& x : joint) x /= total;
    return joint;
}

// --------------------------- oracle: tabular product VI (det observations)

/// Exact product value iteration over one-hot beliefs for models whose
/// observation function reveals the successor state.  Mirrors the surrogate
/// and constrained-continuation semantics from their definitions, not from
/// the solver code.
struct TabularOracle {
    std::size_t n_states = 0;
    std::size_t n_base = 0;
    std::size_t n_q = 0;
    // indexed [ (s * n_q + q) * codes + code ]; code = action or n_base + q_target
    std::vector<double> qp;
    std::vector<double> qr;
    std::vector<std::vector<std::size_t>> codes_at_q;
    double threshold = 1.0 - 1e-6;

    std::size_t at(std::size_t s, std::size_t q, std::size_t code) const {
        return (s * n_q + q) * (n_base + n_q) + code;
    }
    double vp(std::size_t s, std::size_t q) const {
        double best = 0.0;
        bool any = false;
        for (std::size_t code : codes_at_q[q]) {
            const double v = qp[at(s, q, code)];
            if (!any || v > best) best = v;
            any = true;
        }
        return best;
    }
    std::vector<std::size_t> safe(std::size_t s, std::size_t q) const {
        std::vector<std::size_t> out;
        for (std::size_t code : codes_at_q[q])
            if (qp[at(s, q, code)] >= threshold) out.push_back(code);
        return out;
    }
    std::size_t fallback(std::size_t s, std::size_t q) const {
        std::size_t best_code = codes_at_q[q].front();
        double best = -1.0;
        for (std::size_t code : codes_at_q[q]) {
            const double v = qp[at(s, q, code)];
            if (v > best) {
                best = v;
                best_code = code;
            }
        }
        return best_code;
    }
    double vr(std::size_t s, std::size_t q) const {
        const std::vector<std::size_t> sa = safe(s, q);
        if (sa.empty()) return qr[at(s, q, fallback(s, q))];
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t code : sa) best = std::max(best, qr[at(s, q, code)]);
        return best;
    }
};

inline bool oracle_label_bit(const AtomicProposition& ap, std::size_t s) {
    return ap.weights[s] + ap.offset > 0.0;
}

inline std::uint32_t oracle_mask(const std::vector<AtomicProposition>& aps, std::size_t s) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < aps.size(); ++i)
        if (oracle_label_bit(aps[i], s)) mask |= (1u << i);
    return mask;
}

inline TabularOracle tabular_product_vi(const Pomdp& m, const Ldba& aut,
                                        const std::vector<AtomicProposition>& aps,
                                        double gamma_b = 0.99, double threshold = 1.0 - 1e-6,
                                        bool constrained = true) {
    TabularOracle t;
    t.n_states = m.n_states();
    t.n_base = m.n_actions();
    t.n_q = aut.n_states();
    t.threshold = threshold;
    t.codes_at_q.assign(t.n_q, {});
    for (std::size_t q = 0; q < t.n_q; ++q) {
        for (std::size_t a = 0; a < t.n_base; ++a) t.codes_at_q[q].push_back(a);
        for (const EpsilonMove& e : aut.eps_moves[q]) t.codes_at_q[q].push_back(t.n_base + e.target);
    }
    const std::size_t cells = t.n_states * t.n_q * (t.n_base + t.n_q);
    t.qp.assign(cells, 0.0);
    for (std::size_t s = 0; s < t.n_states; ++s)
        for (std::size_t q = 0; q < t.n_q; ++q)
            if (aut.accepting[q])
                for (std::size_t code : t.codes_at_q[q]) t.qp[t.at(s, q, code)] = 1.0;

    auto sweep_p = [&]() {
        double delta = 0.0;
        std::vector<double> next = t.qp;
        for (std::size_t s = 0; s < t.n_states; ++s)
            for (std::size_t q = 0; q < t.n_q; ++q) {
                const std::size_t q2 = aut.step_table[q][oracle_mask(aps, s)];
                for (std::size_t code : t.codes_at_q[q]) {
                    double v;
                    if (code >= t.n_base) {
                        v = t.vp(s, code - t.n_base);
                    } else {
                        double expect = 0.0;
                        for (std::size_t s2 = 0; s2 < t.n_states; ++s2)
                            expect += m.trans(s, code, s2) * t.vp(s2, q2);
                        v = (aut.accepting[q] ? 1.0 - gamma_b : 0.0) + gamma_b * expect;
                    }
                    delta = std::max(delta, std::abs(v - t.qp[t.at(s, q, code)]));
                    next[t.at(s, q, code)] = v;
                }
            }
        t.qp = next;
        return delta;
    };
    for (int k = 0; k < 20000; ++k)
        if (sweep_p() < 1e-13) break;

    t.qr.assign(cells, 0.0);
    auto sweep_r = [&]() {
        double delta = 0.0;
        std::vector<double> next = t.qr;
        for (std::size_t s = 0; s < t.n_states; ++s)
            for (std::size_t q = 0; q < t.n_q; ++q) {
                const std::size_t q2 = aut.step_table[q][oracle_mask(aps, s)];
                for (std::size_t code : t.codes_at_q[q]) {
                    double v;
                    if (code >= t.n_base) {
                        v = constrained ? t.vr(s, code - t.n_base)
                                        : [&] {
                                              double best =
                                                  -std::numeric_limits<double>::infinity();
                                              for (std::size_t c :
                                                   t.codes_at_q[code - t.n_base])
                                                  best = std::max(
                                                      best, t.qr[t.at(s, code - t.n_base, c)]);
                                              return best;
                                          }();
                    } else {
                        double expect = 0.0;
                        for (std::size_t s2 = 0; s2 < t.n_states; ++s2) {
                            double cont;
                            if (constrained) {
                                cont = t.vr(s2, q2);
                            } else {
                                cont = -std::numeric_limits<double>::infinity();
                                for (std::size_t c : t.codes_at_q[q2])
                                    cont = std::max(cont, t.qr[t.at(s2, q2, c)]);
                            }
                            expect += m.trans(s, code, s2) * cont;
                        }
                        v = m.rew(s, code) + m.discount * expect;
                    }
                    delta = std::max(delta, std::abs(v - t.qr[t.at(s, q, code)]));
                    next[t.at(s, q, code)] = v;
                }
            }
        t.qr = next;
        return delta;
    };
    for (int k = 0; k < 20000; ++k)
        if (sweep_r() < 1e-13) break;
    return t;
}

// ----------------- oracle: controllable Buchi win region (det transitions)

/// For deterministic-transition, deterministic-observation models: the set of
/// product nodes (state, q) from which the controller can visit an accepting
/// q infinitely often.  Win = can reach an accepting node that reaches itself.
inline std::set<std::pair<std::size_t, std::size_t>> buchi_win(
    const Pomdp& m, const Ldba& aut, const std::vector<AtomicProposition>& aps) {
    const std::size_t ns = m.n_states();
    const std::size_t nq = aut.n_states();
    auto det_succ = [&](std::size_t s, std::size_t a) {
        for (std::size_t s2 = 0; s2 < ns; ++s2)
            if (m.trans(s, a, s2) > 0.5) return s2;
        return s;
    };
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>>
        succ;
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t q = 0; q < nq; ++q) {
            const std::size_t q2 = aut.step_table[q][oracle_mask(aps, s)];
            auto& outs = succ[{s, q}];
            for (std::size_t a = 0; a < m.n_actions(); ++a) outs.push_back({det_succ(s, a), q2});
            for (const EpsilonMove& e : aut.eps_moves[q]) outs.push_back({s, e.target});
        }
    auto reaches = [&](std::pair<std::size_t, std::size_t> from,
                       std::pair<std::size_t, std::size_t> to) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        std::vector<std::pair<std::size_t, std::size_t>> frontier{from};
        while (!frontier.empty()) {
            const auto x = frontier.back();
            frontier.pop_back();
            for (const auto& y : succ[x]) {
                if (y == to) return true;
                if (seen.insert(y).second) frontier.push_back(y);
            }
        }
        return false;
    };
    std::set<std::pair<std::size_t, std::size_t>> recurrent;
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t q = 0; q < nq; ++q)
            if (aut.accepting[q] && reaches({s, q}, {s, q})) recurrent.insert({s, q});
    std::set<std::pair<std::size_t, std::size_t>> win = recurrent;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t q = 0; q < nq; ++q) {
                if (win.count({s, q})) continue;
                for (const auto& y : succ[{s, q}])
                    if (win.count(y)) {
                        win.insert({s, q});
                        changed = true;
                        break;
                    }
            }
    }
    return win;
}

// ------------------------------------- oracle: 2-state belief-grid VI

/// Fine-grid value iteration over b(s0) for any 2-state model, with linear
/// interpolation between grid nodes.  Returns V at the query belief.
inline double grid_value_2state(const Pomdp& m, const Belief& query, double step = 1e-3,
                                double tol = 1e-11) {
    const std::size_t n = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
    std::vector<double> v(n, 0.0);
    auto interp = [&](const std::vector<double>& val, double b0) {
        const double x = b0 / step;
        std::size_t i = static_cast<std::size_t>(std::floor(x));
        if (i >= n - 1) i = n - 2;
        const double w = x - static_cast<double>(i);
        return (1.0 - w) * val[i] + w * val[i + 1];
    };
    for (int it = 0; it < 100000; ++it) {
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double b0 = static_cast<double>(i) * step;
            const Belief b{b0, 1.0 - b0};
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < m.n_actions(); ++a) {
                double q = b[0] * m.rew(0, a) + b[1] * m.rew(1, a);
                Belief pred{0.0, 0.0};
                for (std::size_t s = 0; s < 2; ++s)
                    for (std::size_t s2 = 0; s2 < 2; ++s2) pred[s2] += b[s] * m.trans(s, a, s2);
                for (std::size_t o = 0; o < m.n_observations(); ++o) {
                    const double lik = pred[0] * m.omega(0, o) + pred[1] * m.omega(1, o);
                    if (lik < 1e-12) continue;
                    const double post0 = pred[0] * m.omega(0, o) / lik;
                    q += m.discount * lik * interp(v, post0);
                }
                best = std::max(best, q);
            }
            next[i] = best;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - v[i]));
        v = next;
        if (delta < tol) break;
    }
    return interp(v, query[0]);
}

// --------------------------------- oracle: literal bounded-logic evaluator

/// Evaluates the satisfaction rules by materializing every shifted trace.
inline bool literal_eval(const FormulaPtr& f, const std::vector<Belief>& trace,
                         const std::vector<AtomicProposition>& table) {
    auto shifted = [&](std::size_t t) {
        return std::vector<Belief>(trace.begin() + static_cast<std::ptrdiff_t>(t), trace.end());
    };
    switch (f->op) {
        case FormulaOp::True: return true;
        case FormulaOp::Ap:
            for (const auto& ap : table)
                if (ap.name == f->ap) return evaluate_ap(ap, trace.at(0)) > 0.0;
            throw UnknownProposition(f->ap);
        case FormulaOp::Not: return !literal_eval(f->lhs, trace, table);
        case FormulaOp::And:
            return literal_eval(f->lhs, trace, table) && literal_eval(f->rhs, trace, table);
        case FormulaOp::Or:
            return literal_eval(f->lhs, trace, table) || literal_eval(f->rhs, trace, table);
        case FormulaOp::Implies:
            return !literal_eval(f->lhs, trace, table) || literal_eval(f->rhs, trace, table);
        case FormulaOp::Next: return literal_eval(f->lhs, shifted(1), table);
        case FormulaOp::Until:
            for (std::uint32_t k = 0; k <= *f->bound; ++k) {
                bool prefix_ok = true;
                for (std::uint32_t j = 0; j < k; ++j)
                    if (!literal_eval(f->lhs, shifted(j), table)) {
                        prefix_ok = false;
                        break;
                    }
                if (prefix_ok && literal_eval(f->rhs, shifted(k), table)) return true;
            }
            return false;
        case FormulaOp::Eventually:
            for (std::uint32_t k = 0; k <= *f->bound; ++k)
                if (literal_eval(f->lhs, shifted(k), table)) return true;
            return false;
        case FormulaOp::Always:
            for (std::uint32_t k = 0; k <= *f->bound; ++k)
                if (!literal_eval(f->lhs, shifted(k), table)) return false;
            return true;
    }
    return false;
}

// ----------------------- oracle: omega-semantics on label-mask lassos

/// Truth of the template pattern on the infinite word prefix . cycle^omega.
/// Bit 0 of a mask is the first proposition, bit 1 the second.
inline bool omega_holds(TemplateKind kind, const std::vector<std::uint32_t>& cycle) {
    auto all_have = [&](std::uint32_t bit) {
        for (std::uint32_t mask : cycle)
            if (!(mask & bit)) return false;
        return true;
    };
    auto some_has = [&](std::uint32_t bit) {
        for (std::uint32_t mask : cycle)
            if (mask & bit) return true;
        return false;
    };
    switch (kind) {
        case TemplateKind::GF: return some_has(1u);
        case TemplateKind::FG: return all_have(1u);
        case TemplateKind::FGOrFG: return all_have(1u) || all_have(2u);
    }
    return false;
}

/// Acceptance of the ultimately periodic mask word by the LDBA, brute-forced
/// over every epsilon resolution: BFS over (q, word position, saw-accepting)
/// configurations looking for an accepting cycle that consumes letters.
inline bool ldba_accepts_lasso(const Ldba& aut, const std::vector<std::uint32_t>& prefix,
                               const std::vector<std::uint32_t>& cycle) {
    const std::size_t len = prefix.size() + cycle.size();
    auto letter = [&](std::size_t pos) {
        return pos < prefix.size() ? prefix[pos] : cycle[pos - prefix.size()];
    };
    auto next_pos = [&](std::size_t pos) {
        return pos + 1 < len ? pos + 1 : prefix.size();
    };
    using Node = std::pair<std::size_t, std::size_t>;  // (q, pos)
    std::map<Node, std::vector<std::pair<Node, bool>>> succ;  // edge flag: consumed a letter
    for (std::size_t q = 0; q < aut.n_states(); ++q)
        for (std::size_t pos = 0; pos < len; ++pos) {
            auto& outs = succ[{q, pos}];
            outs.push_back({{aut.step_table[q][letter(pos)], next_pos(pos)}, true});
            for (const EpsilonMove& e : aut.eps_moves[q]) outs.push_back({{e.target, pos}, false});
        }
    // reachable configurations from the start (pos 0 reads the first letter
    // whether or not the prefix is empty)
    if (cycle.empty()) return false;
    std::set<Node> reach;
    std::vector<Node> frontier{{aut.initial, 0}};
    reach.insert(frontier.front());
    while (!frontier.empty()) {
        const Node x = frontier.back();
        frontier.pop_back();
        for (const auto& [y, consumed] : succ[x])
            if (reach.insert(y).second) frontier.push_back(y);
    }
    // accepting node in a cycle that consumes at least one letter
    for (const Node& y : reach) {
        if (!aut.accepting[y.first]) continue;
        // BFS over (node, consumed-any) from y's successors back to y
        std::set<std::pair<Node, bool>> seen;
        std::vector<std::pair<Node, bool>> work;
        for (const auto& [z, consumed] : succ[y])
            if (seen.insert({z, consumed}).second) work.push_back({z, consumed});
        bool found = false;
        while (!work.empty() && !found) {
            const auto [x, used] = work.back();
            work.pop_back();
            if (x == y && used) {
                found = true;
                break;
            }
            for (const auto& [z, consumed] : succ[x])
                if (seen.insert({z, used || consumed}).second) work.push_back({z, used || consumed});
        }
        if (found) return true;
    }
    return false;
}

// --------------------------------------------------------------- helpers

inline double tv_distance(const std::map<BeliefKey, double>& p,
                          const std::map<BeliefKey, double>& q) {
    double sum = 0.0;
    std::set<BeliefKey> keys;
    for (const auto& [k, v] : p) keys.insert(k);
    for (const auto& [k, v] : q) keys.insert(k);
    for (const BeliefKey& k : keys) {
        const auto pi = p.find(k);
        const auto qi = q.find(k);
        sum += std::abs((pi == p.end() ? 0.0 : pi->second) - (qi == q.end() ? 0.0 : qi->second));
    }
    return 0.5 * sum;
}

/// Strips witness registrations so eval_* fall back to the pure max-of-affine
/// surface (the PWLC representation itself).
inline AlphaFamily strip_witnesses(AlphaFamily fam) {
    for (AlphaSet& t : fam.sets) t.by_witness.clear();
    return fam;
}

} // namespace bst
