#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"

using namespace beliefsynth;

TEST_CASE("action codes round trip") {
    const std::size_t n_base = 3;
    for (std::size_t code = 0; code < 8; ++code) {
        const ProductAction act = action_from_code(code, n_base);
        CHECK(action_code(act, n_base) == code);
        CHECK(act.is_eps == (code >= n_base));
    }
    CHECK(action_code(ProductAction{false, 2, 0}, 3) == 2);
    CHECK(action_code(ProductAction{true, 0, 4}, 3) == 7);
}

TEST_CASE("available_actions lists base actions then epsilon jumps") {
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});

    const auto at_q0 = available_actions(a, 0, 2);
    REQUIRE(at_q0.size() == 4);
    CHECK_FALSE(at_q0[0].is_eps);
    CHECK(at_q0[0].base == 0);
    CHECK_FALSE(at_q0[1].is_eps);
    CHECK(at_q0[1].base == 1);
    CHECK(at_q0[2].is_eps);
    CHECK(at_q0[2].eps_target == 1);
    CHECK(at_q0[3].is_eps);
    CHECK(at_q0[3].eps_target == 3);
    CHECK(available_codes(a, 0, 2) == std::vector<std::size_t>{0, 1, 3, 5});

    // accepting-component states offer base actions only
    for (std::size_t q = 1; q < 5; ++q) {
        const auto acts = available_actions(a, q, 2);
        REQUIRE(acts.size() == 2);
        CHECK_FALSE(acts[0].is_eps);
        CHECK_FALSE(acts[1].is_eps);
    }

    const Ldba u = universal_automaton({});
    CHECK(available_codes(u, 0, 3) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("require_epsilon guards jump availability") {
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    CHECK_NOTHROW(require_epsilon(a, 0, 1));
    CHECK_NOTHROW(require_epsilon(a, 0, 3));
    CHECK_THROWS_AS(require_epsilon(a, 0, 2), EpsilonUnavailable);
    CHECK_THROWS_AS(require_epsilon(a, 1, 1), EpsilonUnavailable);
}

TEST_CASE("epsilon steps move only the automaton component") {
    const Pomdp m = bst::patrol2();
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    const auto aps = bst::guard_aps(2);
    const ProductState ps{{0.0, 1.0}, 0};
    const ProductAction jump{true, 0, 3};
    // the observation argument is ignored on epsilon moves
    const ProductState out = product_step(m, a, aps, ps, jump, 999);
    CHECK(out.q == 3);
    CHECK(out.belief == ps.belief);
    CHECK(product_reward(m, ps, jump) == 0.0);
}

TEST_CASE("base steps update the belief and read the source label") {
    const Pomdp m = bst::canon2();
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    const auto aps = bst::guard_aps(2);

    // neither proposition holds at the uniform belief, so accept_goal falls
    const ProductState ps{{0.5, 0.5}, 3};
    const ProductState out = product_step(m, a, aps, ps, ProductAction{false, 0, 0}, 0);
    CHECK(out.q == 4);
    CHECK(out.belief[0] == Catch::Approx(2.0 / 3.0).margin(1e-12));
    CHECK(out.belief[1] == Catch::Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("the automaton consumes the label of the current belief, not the successor") {
    const Pomdp m = bst::patrol3();
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    const auto aps = bst::guard_aps(3);
    // at e3 goal2 fails; after dash the posterior is e2 where goal2 holds.
    // accept_goal must still fall: the step reads the source label.
    const ProductState ps{{0.0, 0.0, 1.0}, 3};
    const ProductState out = product_step(m, a, aps, ps, ProductAction{false, 1, 0}, 1);
    CHECK(out.q == 4);
    CHECK(out.belief[1] == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("product_step forwards the label policy") {
    const Pomdp m = bst::canon2();
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    const auto aps = bst::guard_aps(2);
    const ProductState ps{{0.05, 0.95}, 1};
    // by default safe1 holds at b(s1) = 0.05, so accept_safe persists
    CHECK(product_step(m, a, aps, ps, ProductAction{false, 0, 0}, 0).q == 1);
    LabelPolicy strict;
    strict.epsilon = 0.25;
    CHECK(product_step(m, a, aps, ps, ProductAction{false, 0, 0}, 0, strict).q == 2);
}

TEST_CASE("product_step propagates zero-likelihood errors") {
    const Pomdp m = bst::patrol2();
    const Ldba a = universal_automaton({});
    const ProductState ps{{0.0, 1.0}, 0};
    CHECK_THROWS_AS(product_step(m, a, {}, ps, ProductAction{false, 0, 0}, 0),
                    ZeroLikelihoodObservation);
}

TEST_CASE("product_reward matches the belief reward on base actions") {
    const Pomdp m = bst::patrol2();
    CHECK(product_reward(m, ProductState{{0.0, 1.0}, 0}, ProductAction{false, 0, 0}) == 1.0);
    CHECK(product_reward(m, ProductState{{0.0, 1.0}, 0}, ProductAction{false, 1, 0}) == 100.0);
    const Pomdp c = bst::canon2();
    CHECK(product_reward(c, ProductState{{0.25, 0.75}, 2}, ProductAction{false, 0, 0})
          == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("is_buchi depends only on the automaton component") {
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
        const Belief b = bst::random_belief(rng, 2);
        CHECK_FALSE(is_buchi(a, ProductState{b, 0}));
        CHECK(is_buchi(a, ProductState{b, 1}));
        CHECK_FALSE(is_buchi(a, ProductState{b, 2}));
        CHECK(is_buchi(a, ProductState{b, 3}));
    }
    CHECK(is_buchi(universal_automaton({}), ProductState{{1.0}, 0}));
}

TEST_CASE("product runs shadow the plain filter on base actions") {
    const Pomdp m = bst::canon2();
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    const auto aps = bst::guard_aps(2);
    std::mt19937_64 rng(321);

    ProductState ps{{0.5, 0.5}, 0};
    Belief plain{0.5, 0.5};
    int jumps = 0;
    for (int k = 0; k < 300; ++k) {
        if (ps.q == 0 && rng() % 4 == 0) {
            const std::size_t target = rng() % 2 ? 1 : 3;
            ps = product_step(m, a, aps, ps, ProductAction{true, 0, target}, 0);
            ++jumps;
            continue;  // the belief must not move on a jump
        }
        const std::size_t act = rng() % 2;
        const std::size_t obs = rng() % 2;
        if (observation_likelihood(m, plain, act, obs) <= kZeroLikelihoodTol) continue;
        ps = product_step(m, a, aps, ps, ProductAction{false, act, 0}, obs);
        plain = belief_update(m, plain, act, obs);
        REQUIRE(ps.belief.size() == plain.size());
        for (std::size_t s = 0; s < plain.size(); ++s)
            CHECK(ps.belief[s] == Catch::Approx(plain[s]).margin(1e-12));
    }
    CHECK(jumps > 0);
}

TEST_CASE("reachable product of the two-state bundle has four states") {
    const Pomdp m = bst::patrol2();
    const Ldba a = template_automaton(TemplateKind::GF, {"goal2"});
    std::vector<AtomicProposition> aps{bst::guard_aps(2)[1]};

    std::set<std::pair<BeliefKey, std::size_t>> seen;
    std::vector<ProductState> frontier{ProductState{m.initial, a.initial}};
    seen.insert({belief_key(m.initial), a.initial});
    while (!frontier.empty()) {
        const ProductState ps = frontier.back();
        frontier.pop_back();
        for (const ProductAction& act : available_actions(a, ps.q, m.n_actions())) {
            for (std::size_t o = 0; o < m.n_observations(); ++o) {
                if (!act.is_eps
                    && observation_likelihood(m, ps.belief, act.base, o) <= kZeroLikelihoodTol)
                    continue;
                const ProductState next = product_step(m, a, aps, ps, act, o);
                if (seen.insert({belief_key(next.belief), next.q}).second)
                    frontier.push_back(next);
                if (act.is_eps) break;
            }
        }
    }
    CHECK(seen.size() == 4);
    const Belief e1{1.0, 0.0}, e2{0.0, 1.0};
    CHECK(seen.count({belief_key(e2), 0}) == 1);
    CHECK(seen.count({belief_key(e2), 1}) == 1);
    CHECK(seen.count({belief_key(e1), 0}) == 1);
    CHECK(seen.count({belief_key(e1), 1}) == 1);
}

TEST_CASE("check_ap_alignment enforces name-for-name order") {
    const Ldba a = template_automaton(TemplateKind::FGOrFG, {"safe1", "goal2"});
    auto aps = bst::guard_aps(2);
    CHECK_NOTHROW(check_ap_alignment(a, aps));
    std::swap(aps[0], aps[1]);
    CHECK_THROWS_AS(check_ap_alignment(a, aps), ValidationError);
    aps.pop_back();
    CHECK_THROWS_AS(check_ap_alignment(a, aps), ValidationError);
    CHECK_NOTHROW(check_ap_alignment(universal_automaton({}), {}));
}
