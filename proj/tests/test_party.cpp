#include <doctest.h>

#include <algorithm>
#include <queue>

#include "xswap/checker.hpp"

using namespace xswap;

namespace {

RunResult run_with(SwapDigraph g, std::map<PartyId, DeviationSpec> strategies,
                   const std::string& name = "t") {
    ScenarioSpec spec = make_scenario(name, std::move(g));
    spec.strategies = std::move(strategies);
    auto be = make_test_backend();
    return run_scenario(spec, *be);
}

DeviationSpec dev(DeviationSpec::Kind k, Phase ph = Phase::P1,
                  std::set<ArcKey> arcs = {}) {
    return DeviationSpec{k, ph, std::move(arcs)};
}

// Publication depth: leaders 0; a follower waits for every entering arc, so
// its depth is one past the deepest entering tail along leader-free paths
// (well defined since removing the leaders leaves a DAG).
std::map<PartyId, std::uint32_t> publication_depth(const SwapDigraph& g,
                                                   const LeaderSet& L) {
    std::map<PartyId, std::uint32_t> depth;
    for (PartyId l : L.leaders) depth[l] = 0;
    while (depth.size() < g.n()) {
        for (PartyId v : g.parties()) {
            if (depth.count(v)) continue;
            std::uint32_t best = 0;
            bool ready = true;
            for (const ArcKey& a : g.entering(v)) {
                if (L.contains(a.tail)) continue;
                auto it = depth.find(a.tail);
                if (it == depth.end()) {
                    ready = false;
                    break;
                }
                best = std::max(best, it->second);
            }
            if (ready) depth[v] = best + 1;
        }
    }
    return depth;
}

}  // namespace

TEST_CASE("all-conforming 3-cycle completes under the worst-case bound") {
    SwapDigraph g = three_cycle_graph();
    RunResult rr = run_with(g, {});
    CHECK(rr.outcome.quiescent);
    Tick last = 0;
    for (const Arc& a : g.arcs()) {
        CHECK(rr.outcome.triggered(a.key()));
        last = std::max(last, rr.outcome.resolved_at.at(a.key()));
    }
    // 2(diam+1)*delta + 2*eps = 6020 with diam=2.
    CHECK(last <= 6020);
    CHECK(last == 6009);
}

TEST_CASE("all-conforming double-cycle (two leaders) completes") {
    SwapDigraph g = double_cycle_graph();
    RunResult rr = run_with(g, {});
    CHECK(rr.outcome.quiescent);
    CHECK(rr.leaders.size() == 2);
    Tick last = 0;
    for (const Arc& a : g.arcs()) {
        CHECK(rr.outcome.triggered(a.key()));
        last = std::max(last, rr.outcome.resolved_at.at(a.key()));
    }
    CHECK(last <= 4020);  // 2(diam+1)*delta + 2*eps with diam=1
}

TEST_CASE("phase-2 wavefront bound under max latency") {
    for (const ScenarioSpec& spec : default_corpus()) {
        auto be = make_test_backend();
        RunResult rr = run_scenario(spec, *be);
        auto depth = publication_depth(spec.graph, rr.leaders);
        Tick global = spec.sim.epsilon +
                      static_cast<Tick>(diameter(spec.graph) + 1) * spec.sim.delta;
        for (const auto& [arc, entry] : rr.final_ledger) {
            Tick bound = spec.sim.epsilon +
                         static_cast<Tick>(depth.at(arc.tail) + 1) * spec.sim.delta;
            CHECK(entry.published_at <= bound);
            CHECK(entry.published_at <= global);
        }
    }
}

TEST_CASE("conforming parties trigger only their own entering arcs") {
    RunResult rr = run_with(double_cycle_graph(), {});
    for (const TraceRecord& r : rr.trace.records) {
        if (r.action != "TRANSFER") continue;
        auto pos = r.target.find("->");
        REQUIRE(pos != std::string::npos);
        std::uint32_t head =
            static_cast<std::uint32_t>(std::stoul(r.target.substr(pos + 2)));
        CHECK(r.actor.index == head);
    }
}

TEST_CASE("signatures appear first in the signer's own trigger calls") {
    // A conforming party's first TRANSFER is the first time its signature can
    // exist; before that instant no other party's call may have succeeded
    // with x covering it. Weak proxy over the trace: the top-leader's calls
    // carry x=1, each later wavefront step adds exactly one signer.
    RunResult rr = run_with(three_cycle_graph(), {});
    std::vector<std::size_t> xs;
    for (const TraceRecord& r : rr.trace.records)
        if (r.action == "TRANSFER" && r.result.rfind("Triggered", 0) == 0)
            xs.push_back(r.sig_checks);
    CHECK(xs == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("silent crash of a follower aborts with full refunds") {
    SwapDigraph g = three_cycle_graph();
    for (Phase ph : {Phase::P1, Phase::P2}) {
        RunResult rr = run_with(g, {{PartyId{2}, dev(DeviationSpec::Kind::SilentCrash, ph)}});
        CHECK(rr.outcome.quiescent);
        for (const auto& [arc, st] : rr.outcome.final_state)
            CHECK(st == ContractState::Refunded);
        for (PartyId p : {PartyId{1}, PartyId{3}}) {
            OutcomeClass c = classify(p, rr.outcome, g);
            CHECK(c == OutcomeClass::NoDeal);
        }
    }
}

TEST_CASE("fake hashlock leader: followers detect and never publish") {
    SwapDigraph g = three_cycle_graph();
    RunResult rr = run_with(g, {{PartyId{1}, dev(DeviationSpec::Kind::FakeHashlock)}});
    CHECK(rr.outcome.quiescent);
    // Only the deviating leader's own leaving contract ever appears; it
    // refunds. Conforming parties publish nothing and lose nothing.
    for (const auto& [arc, st] : rr.outcome.final_state) {
        CHECK(arc.tail == PartyId{1});
        CHECK(st == ContractState::Refunded);
    }
    CHECK(classify(PartyId{2}, rr.outcome, g) == OutcomeClass::NoDeal);
    CHECK(classify(PartyId{3}, rr.outcome, g) == OutcomeClass::NoDeal);
}

TEST_CASE("fake public key: detected the same way") {
    SwapDigraph g = three_cycle_graph();
    RunResult rr = run_with(g, {{PartyId{2}, dev(DeviationSpec::Kind::FakePublicKey)}});
    CHECK(rr.outcome.quiescent);
    for (PartyId p : {PartyId{1}, PartyId{3}})
        CHECK(classify(p, rr.outcome, g) != OutcomeClass::UnderWater);
}

TEST_CASE("withheld sub-leader secret aborts the swap") {
    SwapDigraph g = double_cycle_graph();  // leaders {1, 2}
    RunResult rr = run_with(g, {{PartyId{2}, dev(DeviationSpec::Kind::WithholdSecret)}});
    CHECK(rr.outcome.quiescent);
    for (const auto& [arc, st] : rr.outcome.final_state)
        CHECK(st == ContractState::Refunded);
}

TEST_CASE("no-trigger top-leader: everything refunds, nobody under water") {
    SwapDigraph g = three_cycle_graph();
    RunResult rr = run_with(g, {{PartyId{1}, dev(DeviationSpec::Kind::NoTrigger)}});
    CHECK(rr.outcome.quiescent);
    for (const auto& [arc, st] : rr.outcome.final_state)
        CHECK(st == ContractState::Refunded);
    for (PartyId p : g.parties())
        CHECK(classify(p, rr.outcome, g) == OutcomeClass::NoDeal);
}

TEST_CASE("eager timeout cannot beat the refund deadline") {
    SwapDigraph g = three_cycle_graph();
    RunResult rr = run_with(g, {{PartyId{3}, dev(DeviationSpec::Kind::EagerTimeout)}});
    CHECK(rr.outcome.quiescent);
    // Early timeout spam all fails TooEarly; the conforming wavefront still
    // triggers every arc whose head cooperates.
    for (const TraceRecord& r : rr.trace.records)
        if (r.action == "TIMEOUT" && r.result == "Refunded")
            CHECK(r.at > 6020);
    for (PartyId p : {PartyId{1}, PartyId{2}})
        CHECK(classify(p, rr.outcome, g) != OutcomeClass::UnderWater);
}

TEST_CASE("conforming-party trace properties hold under every single deviation") {
    for (const ScenarioSpec& base : default_corpus()) {
        auto be = make_test_backend();
        LeaderSet leaders = base.leader_override
                                ? LeaderSet{*base.leader_override}
                                : feedback_vertex_set(base.graph);
        Tick bound = static_cast<Tick>(diameter(base.graph) + base.graph.n() + 2) *
                         base.sim.delta +
                     2 * base.sim.epsilon;
        for (PartyId p : base.graph.parties()) {
            for (const DeviationSpec& d : deviation_catalog(base.graph, leaders, p)) {
                ScenarioSpec spec = base;
                spec.strategies[p] = d;
                RunResult rr = run_scenario(spec, *be);
                REQUIRE(rr.outcome.quiescent);
                for (PartyId v : rr.outcome.conforming) {
                    bool leaving_trig = false, entering_all = true;
                    for (const ArcKey& a : spec.graph.leaving(v)) {
                        if (rr.outcome.triggered(a)) leaving_trig = true;
                        // Published leaving contracts resolve strictly
                        // before the bound.
                        auto it = rr.final_ledger.find(a);
                        if (it != rr.final_ledger.end()) {
                            CHECK(it->second.resolved_at >= 0);
                            CHECK(it->second.resolved_at < bound);
                        }
                    }
                    for (const ArcKey& a : spec.graph.entering(v))
                        if (!rr.outcome.triggered(a)) entering_all = false;
                    // A conforming party only loses a leaving escrow if it
                    // received every entering one.
                    if (leaving_trig) CHECK(entering_all);
                }
            }
        }
    }
}

TEST_CASE("payoff models") {
    SwapDigraph g = three_cycle_graph();
    RunOutcome deal;
    deal.quiescent = true;
    for (const Arc& a : g.arcs()) deal.final_state[a.key()] = ContractState::Triggered;
    for (PartyId p : g.parties()) {
        CHECK(payoff(p, deal, g, PayoffModel::Plain) == Payoff{false, Rat{1}});
        CHECK(payoff(p, deal, g, PayoffModel::Herlihy) == Payoff{false, Rat{1}});
    }
    RunOutcome nothing;
    nothing.quiescent = true;
    for (PartyId p : g.parties())
        CHECK(payoff(p, nothing, g, PayoffModel::Plain) == Payoff{false, Rat{0}});

    // Party 2: entering arc 1->2 untriggered, leaving arc 2->3 triggered.
    RunOutcome uw;
    uw.quiescent = true;
    uw.final_state[ArcKey{PartyId{2}, PartyId{3}}] = ContractState::Triggered;
    uw.final_state[ArcKey{PartyId{1}, PartyId{2}}] = ContractState::Refunded;
    CHECK(payoff(PartyId{2}, uw, g, PayoffModel::Plain) == Payoff{false, Rat{-1}});
    CHECK(payoff(PartyId{2}, uw, g, PayoffModel::Herlihy) == Payoff::minus_infinity());

    RunOutcome live;
    CHECK_THROWS_AS(payoff(PartyId{1}, live = RunOutcome{{}, {}, {}, false}, g,
                           PayoffModel::Plain),
                    std::invalid_argument);
}

TEST_CASE("roles and deadlines") {
    ProtocolContext ctx;
    SwapDigraph g = three_cycle_graph();
    ctx.graph = &g;
    ctx.leaders = feedback_vertex_set(g);
    ctx.diam = diameter(g);
    ctx.delta = 1000;
    ctx.epsilon = 10;
    CHECK(ctx.role_of(PartyId{1}) == Role::TopLeader);
    CHECK(ctx.role_of(PartyId{2}) == Role::Follower);
    CHECK(ctx.publish_deadline() == 3010);
    CHECK(ctx.phase3_deadline() == 3020);
    CHECK(ctx.refund_deadline() == 6020);
}

TEST_CASE("deviation catalog shape") {
    SwapDigraph g = double_cycle_graph();
    LeaderSet L = feedback_vertex_set(g);
    auto top = deviation_catalog(g, L, PartyId{1});
    auto sub = deviation_catalog(g, L, PartyId{2});
    auto fol = deviation_catalog(g, L, PartyId{3});
    auto count = [](const std::vector<DeviationSpec>& v, DeviationSpec::Kind k) {
        return std::count_if(v.begin(), v.end(),
                             [&](const DeviationSpec& d) { return d.kind == k; });
    };
    CHECK(count(top, DeviationSpec::Kind::FakeHashlock) == 1);
    CHECK(count(fol, DeviationSpec::Kind::FakeHashlock) == 0);
    CHECK(count(sub, DeviationSpec::Kind::WithholdSecret) == 1);
    CHECK(count(top, DeviationSpec::Kind::WithholdSecret) == 0);
    CHECK(count(fol, DeviationSpec::Kind::ForwardOnlySome) == 2);
    CHECK(count(fol, DeviationSpec::Kind::WithholdPublish) == 3);  // 2 single + all
    for (const auto& d : fol) CHECK_FALSE(d.conforming());
}
