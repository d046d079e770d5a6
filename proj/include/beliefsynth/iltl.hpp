#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pomdp.hpp"

namespace beliefsynth {

/**
 * Atomic proposition over beliefs.  The default shape is affine,
 * f(b) = weights . b + offset; a registered evaluator overrides it for
 * nonlinear propositions.  A belief satisfies f when f(b) > 0.
 */
struct AtomicProposition {
    std::string name;
    std::vector<double> weights;
    double offset = 0.0;
    std::function<double(const Belief&)> evaluator;  ///< optional nonlinear override
};

/// f(b) = scale * I_subset(b) + shift, with I the total mass on the subset.
inline AtomicProposition indicator_ap(std::string name, const std::vector<std::string>& states,
                                      const std::vector<std::string>& members, double scale = 1.0,
                                      double shift = 0.0) {
    AtomicProposition ap;
    ap.name = std::move(name);
    ap.weights.assign(states.size(), 0.0);
    ap.offset = shift;
    for (const auto& member : members) {
        bool found = false;
        for (std::size_t s = 0; s < states.size(); ++s) {
            if (states[s] == member) {
                ap.weights[s] = scale;
                found = true;
                break;
            }
        }
        if (!found) throw ValidationError("indicator member '" + member + "' is not a state");
    }
    return ap;
}

inline double evaluate_ap(const AtomicProposition& ap, const Belief& b) {
    if (ap.evaluator) return ap.evaluator(b);
    if (ap.weights.size() != b.size())
        throw DimensionMismatch("proposition '" + ap.name + "'", ap.weights.size(), b.size());
    double v = ap.offset;
    for (std::size_t i = 0; i < b.size(); ++i) v += ap.weights[i] * b[i];
    return v;
}

/// Controls strictness and boundary reporting of the labeling function.
struct LabelPolicy {
    double epsilon = 0.0;        ///< satisfaction threshold, f(b) > epsilon
    double boundary = 1e-12;     ///< |f(b) - epsilon| <= boundary triggers the callback
    std::function<void(const std::string&, double)> on_boundary;
};

/// Bitmask label: bit i set when aps[i] holds at b.  At most 32 propositions.
inline std::uint32_t label_mask(const std::vector<AtomicProposition>& aps, const Belief& b,
                                const LabelPolicy& policy = {}) {
    if (aps.size() > 32) throw ValidationError("more than 32 atomic propositions");
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < aps.size(); ++i) {
        const double v = evaluate_ap(aps[i], b);
        if (policy.on_boundary && std::abs(v - policy.epsilon) <= policy.boundary)
            policy.on_boundary(aps[i].name, v);
        if (v > policy.epsilon) mask |= (1u << i);
    }
    return mask;
}

/// Names of the propositions holding at b, in table order.
inline std::vector<std::string> label_set(const std::vector<AtomicProposition>& aps,
                                          const Belief& b, const LabelPolicy& policy = {}) {
    const std::uint32_t mask = label_mask(aps, b, policy);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < aps.size(); ++i)
        if (mask & (1u << i)) out.push_back(aps[i].name);
    return out;
}

enum class FormulaOp { True, Ap, Not, And, Or, Implies, Next, Until, Eventually, Always };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable formula node; children are shared, bounds live on U/F/G.
struct Formula {
    FormulaOp op;
    std::string ap;                      ///< leaf name when op == Ap
    FormulaPtr lhs;                      ///< unary child or left operand
    FormulaPtr rhs;                      ///< right operand of binary nodes
    std::optional<std::uint32_t> bound;  ///< window of U/F/G; empty means unbounded
};

inline FormulaPtr f_true() { return std::make_shared<Formula>(Formula{FormulaOp::True, {}, nullptr, nullptr, {}}); }
inline FormulaPtr f_ap(std::string name) {
    return std::make_shared<Formula>(Formula{FormulaOp::Ap, std::move(name), nullptr, nullptr, {}});
}
inline FormulaPtr f_not(FormulaPtr a) { return std::make_shared<Formula>(Formula{FormulaOp::Not, {}, std::move(a), nullptr, {}}); }
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
    return std::make_shared<Formula>(Formula{FormulaOp::And, {}, std::move(a), std::move(b), {}});
}
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
    return std::make_shared<Formula>(Formula{FormulaOp::Or, {}, std::move(a), std::move(b), {}});
}
inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
    return std::make_shared<Formula>(Formula{FormulaOp::Implies, {}, std::move(a), std::move(b), {}});
}
inline FormulaPtr f_next(FormulaPtr a) { return std::make_shared<Formula>(Formula{FormulaOp::Next, {}, std::move(a), nullptr, {}}); }
inline FormulaPtr f_until(FormulaPtr a, FormulaPtr b, std::optional<std::uint32_t> bound = {}) {
    return std::make_shared<Formula>(Formula{FormulaOp::Until, {}, std::move(a), std::move(b), bound});
}
inline FormulaPtr f_eventually(FormulaPtr a, std::optional<std::uint32_t> bound = {}) {
    return std::make_shared<Formula>(Formula{FormulaOp::Eventually, {}, std::move(a), nullptr, bound});
}
inline FormulaPtr f_always(FormulaPtr a, std::optional<std::uint32_t> bound = {}) {
    return std::make_shared<Formula>(Formula{FormulaOp::Always, {}, std::move(a), nullptr, bound});
}

inline bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (!a || !b) return a == b;
    if (a->op != b->op || a->ap != b->ap || a->bound != b->bound) return false;
    return formula_equal(a->lhs, b->lhs) && formula_equal(a->rhs, b->rhs);
}

namespace detail {

/// Recursive-descent parser.  Grammar, loosest to tightest:
///   implies := or ('->' implies)?
///   or      := and ('|' and)*
///   and     := until ('&' until)*
///   until   := unary ('U' bound? unary)*        (left associative)
///   unary   := ('!' | 'X' | 'F' bound? | 'G' bound?) unary | primary
///   primary := '(' implies ')' | 'true' | identifier
/// Bounds are '[' digits ']'.  X, F, G, U and true are reserved words.
/// Unary prefixes juxtapose: a word spelled only with X, F and G that does
/// not name a proposition is read one operator at a time, so GF p = G (F p).
struct FormulaParser {
    std::string_view text;
    std::size_t pos = 0;
    const std::vector<AtomicProposition>* table;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool eat_arrow() {
        skip_ws();
        if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
            pos += 2;
            return true;
        }
        return false;
    }
    std::string peek_word() {
        skip_ws();
        std::size_t end = pos;
        while (end < text.size()
               && (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
            ++end;
        return std::string(text.substr(pos, end - pos));
    }
    static bool reserved(const std::string& w) {
        return w == "X" || w == "F" || w == "G" || w == "U" || w == "true";
    }
    bool is_ap(const std::string& w) const {
        for (const auto& ap : *table)
            if (ap.name == w) return true;
        return false;
    }

    std::optional<std::uint32_t> parse_bound() {
        skip_ws();
        if (pos >= text.size() || text[pos] != '[') return {};
        const std::size_t open = pos;
        ++pos;
        skip_ws();
        std::uint64_t value = 0;
        bool any = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            value = value * 10 + static_cast<std::uint64_t>(text[pos] - '0');
            if (value > 0xffffffffull) throw SyntaxError("bound too large", open + 1);
            ++pos;
            any = true;
        }
        skip_ws();
        if (!any || !eat(']')) throw SyntaxError("malformed bound", open);
        return static_cast<std::uint32_t>(value);
    }

    FormulaPtr parse_primary() {
        skip_ws();
        if (pos >= text.size()) throw SyntaxError("unexpected end of formula", pos);
        if (eat('(')) {
            FormulaPtr inner = parse_implies();
            if (!eat(')')) throw SyntaxError("missing ')'", pos);
            return inner;
        }
        const std::string word = peek_word();
        if (word.empty()) throw SyntaxError("unexpected character", pos);
        if (word == "true") {
            pos += word.size();
            return f_true();
        }
        if (reserved(word)) throw SyntaxError("misplaced operator '" + word + "'", pos);
        pos += word.size();
        for (const auto& ap : *table)
            if (ap.name == word) return f_ap(word);
        throw UnknownProposition(word);
    }

    FormulaPtr parse_unary() {
        skip_ws();
        if (eat('!')) return f_not(parse_unary());
        const std::string word = peek_word();
        if (word == "X") {
            pos += 1;
            return f_next(parse_unary());
        }
        if (word == "F") {
            pos += 1;
            auto bound = parse_bound();
            return f_eventually(parse_unary(), bound);
        }
        if (word == "G") {
            pos += 1;
            auto bound = parse_bound();
            return f_always(parse_unary(), bound);
        }
        if (word.size() > 1 && word.find_first_not_of("XFG") == std::string::npos
            && !is_ap(word)) {
            // juxtaposed prefixes; the next character is another operator
            // letter, never a bound, so no bound can attach here
            const char c = word[0];
            pos += 1;
            if (c == 'X') return f_next(parse_unary());
            if (c == 'F') return f_eventually(parse_unary(), {});
            return f_always(parse_unary(), {});
        }
        return parse_primary();
    }

    FormulaPtr parse_until() {
        FormulaPtr lhs = parse_unary();
        while (true) {
            skip_ws();
            if (peek_word() != "U") return lhs;
            pos += 1;
            auto bound = parse_bound();
            lhs = f_until(lhs, parse_unary(), bound);
        }
    }

    FormulaPtr parse_and() {
        FormulaPtr lhs = parse_until();
        while (eat('&')) lhs = f_and(lhs, parse_until());
        return lhs;
    }

    FormulaPtr parse_or() {
        FormulaPtr lhs = parse_and();
        while (true) {
            skip_ws();
            if (pos < text.size() && text[pos] == '|') {
                ++pos;
                lhs = f_or(lhs, parse_and());
            } else {
                return lhs;
            }
        }
    }

    FormulaPtr parse_implies() {
        FormulaPtr lhs = parse_or();
        if (eat_arrow()) return f_implies(std::move(lhs), parse_implies());
        return lhs;
    }
};

inline int precedence(FormulaOp op) {
    switch (op) {
        case FormulaOp::Implies: return 1;
        case FormulaOp::Or: return 2;
        case FormulaOp::And: return 3;
        case FormulaOp::Until: return 4;
        default: return 5;
    }
}

inline void print_into(const FormulaPtr& f, std::string& out) {
    auto child = [&](const FormulaPtr& c, int parent_prec, bool strict) {
        const bool parens =
            strict ? precedence(c->op) <= parent_prec : precedence(c->op) < parent_prec;
        if (parens) out += '(';
        print_into(c, out);
        if (parens) out += ')';
    };
    switch (f->op) {
        case FormulaOp::True: out += "true"; break;
        case FormulaOp::Ap: out += f->ap; break;
        case FormulaOp::Not:
            out += '!';
            child(f->lhs, 5, false);
            break;
        case FormulaOp::Next:
            out += "X ";
            child(f->lhs, 5, false);
            break;
        case FormulaOp::Eventually:
        case FormulaOp::Always:
            out += (f->op == FormulaOp::Eventually) ? 'F' : 'G';
            if (f->bound) out += '[' + std::to_string(*f->bound) + ']';
            out += ' ';
            child(f->lhs, 5, false);
            break;
        case FormulaOp::Until:
            child(f->lhs, 4, false);
            out += " U";
            if (f->bound) out += '[' + std::to_string(*f->bound) + ']';
            out += ' ';
            child(f->rhs, 4, true);
            break;
        case FormulaOp::And:
            child(f->lhs, 3, false);
            out += " & ";
            child(f->rhs, 3, true);
            break;
        case FormulaOp::Or:
            child(f->lhs, 2, false);
            out += " | ";
            child(f->rhs, 2, true);
            break;
        case FormulaOp::Implies:
            child(f->lhs, 1, true);
            out += " -> ";
            child(f->rhs, 1, false);
            break;
    }
}

} // namespace detail

/// Parses a formula, resolving identifiers against the proposition table.
inline FormulaPtr parse_formula(std::string_view text,
                                const std::vector<AtomicProposition>& table) {
    detail::FormulaParser p{text, 0, &table};
    FormulaPtr out = p.parse_implies();
    p.skip_ws();
    if (p.pos != text.size()) throw SyntaxError("trailing input", p.pos);
    return out;
}

/// Prints with minimal parentheses; parse_formula(print_formula(f)) == f.
inline std::string print_formula(const FormulaPtr& f) {
    std::string out;
    detail::print_into(f, out);
    return out;
}

/// Trace length needed to decide the formula from position 0 (conservative).
inline std::size_t required_length(const FormulaPtr& f) {
    switch (f->op) {
        case FormulaOp::True:
        case FormulaOp::Ap: return 1;
        case FormulaOp::Not: return required_length(f->lhs);
        case FormulaOp::And:
        case FormulaOp::Or:
        case FormulaOp::Implies:
            return std::max(required_length(f->lhs), required_length(f->rhs));
        case FormulaOp::Next: return 1 + required_length(f->lhs);
        case FormulaOp::Until:
            if (!f->bound) throw UnboundedOperator("U");
            return *f->bound + std::max(required_length(f->lhs), required_length(f->rhs));
        case FormulaOp::Eventually:
            if (!f->bound) throw UnboundedOperator("F");
            return *f->bound + required_length(f->lhs);
        case FormulaOp::Always:
            if (!f->bound) throw UnboundedOperator("G");
            return *f->bound + required_length(f->lhs);
    }
    return 1;
}

namespace detail {

inline bool eval_at(const FormulaPtr& f, const std::vector<Belief>& trace, std::size_t t,
                    const std::map<std::string, const AtomicProposition*>& byname) {
    switch (f->op) {
        case FormulaOp::True: return true;
        case FormulaOp::Ap: {
            auto it = byname.find(f->ap);
            if (it == byname.end()) throw UnknownProposition(f->ap);
            return evaluate_ap(*it->second, trace[t]) > 0.0;
        }
        case FormulaOp::Not: return !eval_at(f->lhs, trace, t, byname);
        case FormulaOp::And:
            return eval_at(f->lhs, trace, t, byname) && eval_at(f->rhs, trace, t, byname);
        case FormulaOp::Or:
            return eval_at(f->lhs, trace, t, byname) || eval_at(f->rhs, trace, t, byname);
        case FormulaOp::Implies:
            return !eval_at(f->lhs, trace, t, byname) || eval_at(f->rhs, trace, t, byname);
        case FormulaOp::Next: return eval_at(f->lhs, trace, t + 1, byname);
        case FormulaOp::Until: {
            if (!f->bound) throw UnboundedOperator("U");
            for (std::uint32_t k = 0; k <= *f->bound; ++k) {
                if (eval_at(f->rhs, trace, t + k, byname)) return true;
                if (!eval_at(f->lhs, trace, t + k, byname)) return false;
            }
            return false;
        }
        case FormulaOp::Eventually: {
            if (!f->bound) throw UnboundedOperator("F");
            for (std::uint32_t k = 0; k <= *f->bound; ++k)
                if (eval_at(f->lhs, trace, t + k, byname)) return true;
            return false;
        }
        case FormulaOp::Always: {
            if (!f->bound) throw UnboundedOperator("G");
            for (std::uint32_t k = 0; k <= *f->bound; ++k)
                if (!eval_at(f->lhs, trace, t + k, byname)) return false;
            return true;
        }
    }
    return false;
}

} // namespace detail

/**
 * Decides a bounded formula on a finite belief trace.  The trace must be at
 * least required_length(f) long; unbounded U/F/G raise UnboundedOperator.
 * phi1 U[T] phi2 holds when phi2 holds at some shift t <= T and phi1 holds at
 * every earlier shift.
 */
inline bool eval_bounded(const FormulaPtr& f, const std::vector<Belief>& trace,
                         const std::vector<AtomicProposition>& table) {
    const std::size_t need = required_length(f);
    if (trace.size() < need) throw TraceTooShort(need, trace.size());
    std::map<std::string, const AtomicProposition*> byname;
    for (const auto& ap : table) byname[ap.name] = &ap;
    return detail::eval_at(f, trace, 0, byname);
}

} // namespace beliefsynth
