#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace beliefsynth {

/// Distribution over hidden states, dense in model state order.
using Belief = std::vector<double>;

inline constexpr double kRowSumTol = 1e-9;
inline constexpr double kZeroLikelihoodTol = 1e-12;
inline constexpr double kBeliefEqTol = 1e-9;

/**
 * Finite POMDP (S, A, T, p0, r, gamma, O, Omega).
 *
 * Identifiers are kept as strings for file I/O; every computation runs on
 * dense indices in declaration order.  The observation kernel conditions on
 * the successor state only, Omega(s', o).
 */
struct Pomdp {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::string> observations;
    std::vector<double> transition;  ///< T[s][a][s'], flattened
    std::vector<double> observe;     ///< Omega[s][o], flattened
    std::vector<double> reward;      ///< r[s][a], flattened
    Belief initial;
    double discount = 0.0;

    std::size_t n_states() const { return states.size(); }
    std::size_t n_actions() const { return actions.size(); }
    std::size_t n_observations() const { return observations.size(); }

    double trans(std::size_t s, std::size_t a, std::size_t s2) const {
        return transition[(s * n_actions() + a) * n_states() + s2];
    }
    double& trans(std::size_t s, std::size_t a, std::size_t s2) {
        return transition[(s * n_actions() + a) * n_states() + s2];
    }
    double omega(std::size_t s, std::size_t o) const { return observe[s * n_observations() + o]; }
    double& omega(std::size_t s, std::size_t o) { return observe[s * n_observations() + o]; }
    double rew(std::size_t s, std::size_t a) const { return reward[s * n_actions() + a]; }
    double& rew(std::size_t s, std::size_t a) { return reward[s * n_actions() + a]; }

    /// Allocates zeroed kernels once the identifier lists are set.
    void allocate() {
        transition.assign(n_states() * n_actions() * n_states(), 0.0);
        observe.assign(n_states() * n_observations(), 0.0);
        reward.assign(n_states() * n_actions(), 0.0);
        initial.assign(n_states(), 0.0);
    }

    std::size_t state_index(const std::string& name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        throw ValidationError("unknown state '" + name + "'");
    }
    std::size_t action_index(const std::string& name) const {
        for (std::size_t i = 0; i < actions.size(); ++i)
            if (actions[i] == name) return i;
        throw ValidationError("unknown action '" + name + "'");
    }
};

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

inline void check_unique(const std::vector<std::string>& names, const char* what,
                         std::vector<std::string>& out) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty())
            out.push_back(std::string(what) + "[" + std::to_string(i) + "]: empty identifier");
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                out.push_back(std::string(what) + ": duplicate identifier '" + names[i] + "'");
    }
}

} // namespace detail

/**
 * Checks every model invariant and returns one description per violation,
 * naming the offending row or entry and the magnitude of the defect.  An
 * empty result means the model is well formed.  Nothing is renormalized.
 */
inline std::vector<std::string> validate_model(const Pomdp& m) {
    std::vector<std::string> out;
    detail::check_unique(m.states, "states", out);
    detail::check_unique(m.actions, "actions", out);
    detail::check_unique(m.observations, "observations", out);
    if (m.states.empty()) out.push_back("states: model has no states");
    if (m.actions.empty()) out.push_back("actions: model has no actions");
    if (m.observations.empty()) out.push_back("observations: model has no observations");

    const std::size_t n = m.n_states(), na = m.n_actions(), l = m.n_observations();
    if (m.transition.size() != n * na * n) {
        out.push_back("transition: expected " + std::to_string(n * na * n) + " entries, got "
                      + std::to_string(m.transition.size()));
        return out;
    }
    if (m.observe.size() != n * l) {
        out.push_back("observation_model: expected " + std::to_string(n * l) + " entries, got "
                      + std::to_string(m.observe.size()));
        return out;
    }
    if (m.reward.size() != n * na) {
        out.push_back("reward: expected " + std::to_string(n * na) + " entries, got "
                      + std::to_string(m.reward.size()));
        return out;
    }
    if (m.initial.size() != n) {
        out.push_back("initial: expected " + std::to_string(n) + " entries, got "
                      + std::to_string(m.initial.size()));
        return out;
    }

    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < na; ++a) {
            double sum = 0.0;
            for (std::size_t s2 = 0; s2 < n; ++s2) {
                const double p = m.trans(s, a, s2);
                if (p < 0.0 || p > 1.0)
                    out.push_back("transition[" + m.states[s] + "][" + m.actions[a] + "]["
                                  + m.states[s2] + "]: entry " + detail::fmt(p)
                                  + " outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTol)
                out.push_back("transition[" + m.states[s] + "][" + m.actions[a] + "]: row sums to "
                              + detail::fmt(sum) + ", off by " + detail::fmt(sum - 1.0));
            if (!std::isfinite(m.rew(s, a)))
                out.push_back("reward[" + m.states[s] + "][" + m.actions[a] + "]: not finite");
        }
        double osum = 0.0;
        for (std::size_t o = 0; o < l; ++o) {
            const double p = m.omega(s, o);
            if (p < 0.0 || p > 1.0)
                out.push_back("observation_model[" + m.states[s] + "][" + m.observations[o]
                              + "]: entry " + detail::fmt(p) + " outside [0,1]");
            osum += p;
        }
        if (std::abs(osum - 1.0) > kRowSumTol)
            out.push_back("observation_model[" + m.states[s] + "]: row sums to "
                          + detail::fmt(osum) + ", off by " + detail::fmt(osum - 1.0));
    }

    double psum = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (m.initial[s] < 0.0 || m.initial[s] > 1.0)
            out.push_back("initial[" + m.states[s] + "]: entry " + detail::fmt(m.initial[s])
                          + " outside [0,1]");
        psum += m.initial[s];
    }
    if (std::abs(psum - 1.0) > kRowSumTol)
        out.push_back("initial: sums to " + detail::fmt(psum) + ", off by "
                      + detail::fmt(psum - 1.0));
    if (!(m.discount >= 0.0 && m.discount < 1.0))
        out.push_back("discount: " + detail::fmt(m.discount) + " outside [0,1)");
    return out;
}

/// Componentwise max-norm equality at the belief comparison tolerance.
inline bool belief_equal(const Belief& a, const Belief& b, double tol = kBeliefEqTol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

/// One-step predictive distribution sum_s T(s,a,.) b(s).
inline Belief belief_predict(const Pomdp& m, const Belief& b, std::size_t a) {
    if (b.size() != m.n_states()) throw DimensionMismatch("belief", m.n_states(), b.size());
    Belief out(m.n_states(), 0.0);
    for (std::size_t s = 0; s < m.n_states(); ++s) {
        const double w = b[s];
        if (w == 0.0) continue;
        for (std::size_t s2 = 0; s2 < m.n_states(); ++s2) out[s2] += w * m.trans(s, a, s2);
    }
    return out;
}

/// Probability of observing o after taking a from belief b.
inline double observation_likelihood(const Pomdp& m, const Belief& b, std::size_t a,
                                     std::size_t o) {
    const Belief pred = belief_predict(m, b, a);
    double lik = 0.0;
    for (std::size_t s2 = 0; s2 < m.n_states(); ++s2) lik += m.omega(s2, o) * pred[s2];
    return lik;
}

/**
 * Bayes filter step: b'(s') = Omega(s',o) sum_s T(s,a,s') b(s) / normalizer.
 * Throws ZeroLikelihoodObservation when the normalizer is below 1e-12.
 */
inline Belief belief_update(const Pomdp& m, const Belief& b, std::size_t a, std::size_t o) {
    const Belief pred = belief_predict(m, b, a);
    Belief out(m.n_states(), 0.0);
    double denom = 0.0;
    for (std::size_t s2 = 0; s2 < m.n_states(); ++s2) {
        out[s2] = m.omega(s2, o) * pred[s2];
        denom += out[s2];
    }
    if (denom < kZeroLikelihoodTol) throw ZeroLikelihoodObservation(a, o, denom);
    for (double& x : out) x /= denom;
    return out;
}

/// Expected immediate reward sum_s b(s) r(s,a).
inline double belief_reward(const Pomdp& m, const Belief& b, std::size_t a) {
    if (b.size() != m.n_states()) throw DimensionMismatch("belief", m.n_states(), b.size());
    double r = 0.0;
    for (std::size_t s = 0; s < m.n_states(); ++s) r += b[s] * m.rew(s, a);
    return r;
}

/// Uniform double in [0,1) drawn from the raw engine stream; identical on
/// every platform for the same seed, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Index sampled from nonnegative weights via one uniform draw (CDF scan).
inline std::size_t sample_index(const std::vector<double>& weights, double u) {
    double total = 0.0;
    for (double w : weights) total += w;
    double acc = 0.0;
    std::size_t last = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last = i;
        acc += weights[i];
        if (u * total < acc) return i;
    }
    if (last == weights.size()) throw Error("sample_index: no positive weight");
    return last;
}

/// Simulator side of the environment: the true state plus the RNG stream.
struct HiddenState {
    std::size_t state = 0;
    std::mt19937_64 rng;
};

/// Draws a hidden state from a belief using the simulator stream.
inline std::size_t sample_from_belief(const Belief& b, std::mt19937_64& rng) {
    return sample_index(b, uniform01(rng));
}

/**
 * One environment step from hidden state s under action a: transition first,
 * then the observation of the successor.  Returns (successor, observation).
 */
inline std::pair<std::size_t, std::size_t> simulate_step(const Pomdp& m, std::size_t s,
                                                         std::size_t a, std::mt19937_64& rng) {
    std::vector<double> row(m.n_states());
    for (std::size_t s2 = 0; s2 < m.n_states(); ++s2) row[s2] = m.trans(s, a, s2);
    const std::size_t next = sample_index(row, uniform01(rng));
    std::vector<double> orow(m.n_observations());
    for (std::size_t o = 0; o < m.n_observations(); ++o) orow[o] = m.omega(next, o);
    return {next, sample_index(orow, uniform01(rng))};
}

/// HiddenState convenience wrapper; returns the sampled observation index.
inline std::size_t simulate_step(const Pomdp& m, HiddenState& h, std::size_t a) {
    const auto [next, obs] = simulate_step(m, h.state, a, h.rng);
    h.state = next;
    return obs;
}

} // namespace beliefsynth
