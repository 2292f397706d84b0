#include <doctest.h>

#include "xswap/checker.hpp"

using namespace xswap;

namespace {

// Party 2 of the 3-cycle with chosen states on its entering (1->2) and
// leaving (2->3) arc.
OutcomeClass class_for(ContractState entering, ContractState leaving) {
    SwapDigraph g = three_cycle_graph();
    RunOutcome out;
    out.quiescent = true;
    out.final_state[ArcKey{PartyId{1}, PartyId{2}}] = entering;
    out.final_state[ArcKey{PartyId{2}, PartyId{3}}] = leaving;
    return classify(PartyId{2}, out, g);
}

}  // namespace

TEST_CASE("classification of single-arc combinations") {
    using S = ContractState;
    CHECK(class_for(S::Triggered, S::Triggered) == OutcomeClass::Deal);
    CHECK(class_for(S::Refunded, S::Refunded) == OutcomeClass::NoDeal);
    CHECK(class_for(S::Triggered, S::Refunded) == OutcomeClass::FreeRide);
    CHECK(class_for(S::Refunded, S::Triggered) == OutcomeClass::UnderWater);
}

TEST_CASE("classification partition on two-by-two arc counts") {
    // Double cycle: party 3 has entering {1->3, 2->3} and leaving {3->1, 3->2}.
    SwapDigraph g = double_cycle_graph();
    auto ent = g.entering(PartyId{3});
    auto leav = g.leaving(PartyId{3});
    REQUIRE(ent.size() == 2);
    REQUIRE(leav.size() == 2);
    for (int e = 0; e <= 2; ++e) {
        for (int l = 0; l <= 2; ++l) {
            RunOutcome out;
            out.quiescent = true;
            for (int i = 0; i < 2; ++i) {
                out.final_state[ent[i]] =
                    i < e ? ContractState::Triggered : ContractState::Refunded;
                out.final_state[leav[i]] =
                    i < l ? ContractState::Triggered : ContractState::Refunded;
            }
            OutcomeClass c = classify(PartyId{3}, out, g);
            OutcomeClass want;
            if (e == 2 && l == 2) want = OutcomeClass::Deal;
            else if (e == 0 && l == 0) want = OutcomeClass::NoDeal;
            else if (l == 0) want = OutcomeClass::FreeRide;
            else if (e == 2) want = OutcomeClass::Discount;
            else want = OutcomeClass::UnderWater;
            CHECK(c == want);
        }
    }
}

TEST_CASE("uniformity passes on the default corpus") {
    auto be = make_test_backend();
    SweepVerdict v = check_uniformity(default_corpus(), *be);
    CHECK(v.pass);
    CHECK(v.uniformity_witnesses.empty());
    CHECK(v.runs > 100);
}

TEST_CASE("hand-crafted under-water outcome fails with a witness") {
    ScenarioSpec spec = make_scenario("negctrl", three_cycle_graph());
    RunResult rr;
    rr.outcome.quiescent = true;
    rr.outcome.conforming = {PartyId{1}, PartyId{2}, PartyId{3}};
    rr.outcome.final_state[ArcKey{PartyId{1}, PartyId{2}}] = ContractState::Refunded;
    rr.outcome.final_state[ArcKey{PartyId{2}, PartyId{3}}] = ContractState::Triggered;
    rr.outcome.final_state[ArcKey{PartyId{3}, PartyId{1}}] = ContractState::Triggered;
    SweepVerdict v;
    check_run_uniformity(spec, rr, v);
    CHECK_FALSE(v.pass);
    REQUIRE_FALSE(v.uniformity_witnesses.empty());
    CHECK(v.uniformity_witnesses.front().party == PartyId{2});
}

TEST_CASE("unrefunded published leaving arc is a witness") {
    ScenarioSpec spec = make_scenario("negctrl2", three_cycle_graph());
    RunResult rr;
    rr.outcome.quiescent = true;
    rr.outcome.conforming = {PartyId{1}};
    rr.outcome.final_state[ArcKey{PartyId{1}, PartyId{2}}] = ContractState::Published;
    SweepVerdict v;
    check_run_uniformity(spec, rr, v);
    CHECK_FALSE(v.pass);
    REQUIRE(v.uniformity_witnesses.size() == 1);
    CHECK(v.uniformity_witnesses.front().arc == "1->2");
}

TEST_CASE("equilibrium: singletons on the 3-cycle") {
    auto be = make_test_backend();
    ScenarioSpec spec = make_scenario("eq", three_cycle_graph());
    for (PayoffModel m : {PayoffModel::Plain, PayoffModel::Herlihy}) {
        SweepVerdict v = check_equilibrium(spec, m, 1, *be);
        CHECK(v.pass);
        CHECK_FALSE(v.partial);
        CHECK(v.equilibrium_witnesses.empty());
    }
}

TEST_CASE("equilibrium: pairs on the double cycle") {
    auto be = make_test_backend();
    ScenarioSpec spec = make_scenario("eq2", double_cycle_graph());
    SweepVerdict v = check_equilibrium(spec, PayoffModel::Herlihy, 2, *be);
    CHECK(v.pass);
}

TEST_CASE("coalition limit zero degenerates to a trivial pass") {
    auto be = make_test_backend();
    ScenarioSpec spec = make_scenario("eq0", three_cycle_graph());
    SweepVerdict v = check_equilibrium(spec, PayoffModel::Plain, 0, *be);
    CHECK(v.pass);
    CHECK(v.runs == 1);
}

TEST_CASE("run cap produces an explicit partial verdict") {
    auto be = make_test_backend();
    ScenarioSpec spec = make_scenario("eqcap", three_cycle_graph());
    SweepVerdict v = check_equilibrium(spec, PayoffModel::Plain, 2, *be, 5);
    CHECK(v.partial);
    CHECK_FALSE(v.note.empty());
}

TEST_CASE("plain and herlihy payoffs agree when nobody is under water") {
    auto be = make_test_backend();
    for (const ScenarioSpec& base : default_corpus()) {
        RunResult rr = run_scenario(base, *be);
        bool any_uw = false;
        for (PartyId p : base.graph.parties())
            if (classify(p, rr.outcome, base.graph) == OutcomeClass::UnderWater)
                any_uw = true;
        if (any_uw) continue;
        for (PartyId p : base.graph.parties())
            CHECK(payoff(p, rr.outcome, base.graph, PayoffModel::Plain) ==
                  payoff(p, rr.outcome, base.graph, PayoffModel::Herlihy));
    }
}
