#include <doctest.h>

#include <functional>

#include "xswap/checker.hpp"

using namespace xswap;

namespace {

SwapContract toy_contract(const CryptoBackend& be) {
    std::vector<PublicKey> pks = {be.gen_keypair(1).public_key,
                                  be.gen_keypair(2).public_key};
    Secret s = be.gen_secret(1);
    return SwapContract(PartyId{1}, PartyId{2}, "c", {be.make_hashlock(s)}, pks, 0, 1,
                        2, 1000, 10);
}

struct Scripted final : Actor {
    std::function<std::vector<Action>(Tick, const Ledger&, Simulator&)> fn;
    std::vector<Action> wake(Tick now, const Ledger& l, Simulator& s) override {
        return fn ? fn(now, l, s) : std::vector<Action>{};
    }
};

}  // namespace

TEST_CASE("empty scenario: no events, immediate quiescence") {
    auto be = make_test_backend();
    Simulator sim({}, *be);
    EventTrace t = sim.run(100000);
    CHECK(t.records.empty());
    CHECK_FALSE(t.horizon_reached);
}

TEST_CASE("latency bounds per policy") {
    auto be = make_test_backend();
    auto probe = [&](LatencyPolicy pol, std::uint64_t seed) {
        SimConfig cfg;
        cfg.latency = pol;
        cfg.seed = seed;
        Simulator sim(cfg, *be);
        Scripted a;
        bool fired = false;
        a.fn = [&](Tick now, const Ledger&, Simulator&) -> std::vector<Action> {
            if (fired || now != 0) return {};
            fired = true;
            Message m{};
            m.to = PartyId{2};
            m.kind = Message::Kind::PubKey;
            m.subject = PartyId{1};
            return {PublishAction{ArcKey{PartyId{1}, PartyId{2}}, toy_contract(*be)},
                    SendAction{m}};
        };
        Scripted b;
        sim.add_actor(PartyId{1}, &a);
        sim.add_actor(PartyId{2}, &b);
        return sim.run(5000);
    };
    SUBCASE("max: on-chain exactly delta, off-chain strictly inside epsilon") {
        EventTrace t = probe(LatencyPolicy::Max, 0);
        for (const TraceRecord& r : t.records) {
            if (r.action == "PUBLISH") CHECK(r.at == 1000);
            if (r.action == "MSG") CHECK(r.at == 9);
        }
    }
    SUBCASE("unit: one tick") {
        EventTrace t = probe(LatencyPolicy::Unit, 0);
        for (const TraceRecord& r : t.records) CHECK(r.at == 1);
    }
    SUBCASE("seeded: within [1, delta] and [1, epsilon-1]") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            EventTrace t = probe(LatencyPolicy::Seeded, seed);
            for (const TraceRecord& r : t.records) {
                if (r.action == "PUBLISH") {
                    CHECK(r.at >= 1);
                    CHECK(r.at <= 1000);
                }
                if (r.action == "MSG") {
                    CHECK(r.at >= 1);
                    CHECK(r.at <= 9);
                }
            }
        }
    }
}

TEST_CASE("two calls to one contract at the same tick: one winner") {
    auto be = make_test_backend();
    SimConfig cfg;
    cfg.latency = LatencyPolicy::Unit;
    Simulator sim(cfg, *be);
    Secret s = be->gen_secret(1);
    KeyPair k2 = be->gen_keypair(2);
    Scripted owner, caller;
    bool published = false, called = false;
    owner.fn = [&](Tick now, const Ledger&, Simulator&) -> std::vector<Action> {
        if (published || now != 0) return {};
        published = true;
        return {PublishAction{ArcKey{PartyId{1}, PartyId{2}}, toy_contract(*be)}};
    };
    caller.fn = [&](Tick, const Ledger& l, Simulator&) -> std::vector<Action> {
        if (called || !l.count(ArcKey{PartyId{1}, PartyId{2}})) return {};
        called = true;
        TupleSignature sig = be->sign_tuple(k2, PartyId{2}, {s});
        TransferAction t{ArcKey{PartyId{1}, PartyId{2}}, {s}, {sig}};
        return {t, t};  // both land on the same tick
    };
    sim.add_actor(PartyId{1}, &owner);
    sim.add_actor(PartyId{2}, &caller);
    EventTrace t = sim.run(100000);
    int wins = 0, invalid = 0;
    Tick win_at = -1, lose_at = -2;
    for (const TraceRecord& r : t.records) {
        if (r.action != "TRANSFER") continue;
        if (r.result.rfind("Triggered", 0) == 0) {
            ++wins;
            win_at = r.at;
        }
        if (r.result == "InvalidState") {
            ++invalid;
            lose_at = r.at;
        }
    }
    CHECK(wins == 1);
    CHECK(invalid == 1);
    CHECK(win_at == lose_at);
}

TEST_CASE("effects are observable at their effect tick (inclusive)") {
    auto be = make_test_backend();
    SimConfig cfg;
    cfg.latency = LatencyPolicy::Max;
    Simulator sim(cfg, *be);
    Scripted pub, watch;
    bool published = false;
    Tick seen_at = -1;
    pub.fn = [&](Tick now, const Ledger&, Simulator&) -> std::vector<Action> {
        if (published || now != 0) return {};
        published = true;
        return {PublishAction{ArcKey{PartyId{1}, PartyId{2}}, toy_contract(*be)}};
    };
    watch.fn = [&](Tick now, const Ledger& l, Simulator&) -> std::vector<Action> {
        if (seen_at < 0 && l.count(ArcKey{PartyId{1}, PartyId{2}})) seen_at = now;
        return {};
    };
    sim.add_actor(PartyId{1}, &pub);
    sim.add_actor(PartyId{2}, &watch);
    sim.run(100000);
    CHECK(seen_at == 1000);
}

TEST_CASE("identical scenario and seed give byte-identical traces") {
    auto be = make_test_backend();
    for (LatencyPolicy pol :
         {LatencyPolicy::Max, LatencyPolicy::Unit, LatencyPolicy::Seeded}) {
        ScenarioSpec spec = make_scenario("det", three_cycle_graph());
        spec.sim.latency = pol;
        spec.sim.seed = 1234;
        RunResult a = run_scenario(spec, *be);
        RunResult b = run_scenario(spec, *be);
        CHECK(a.trace.dump() == b.trace.dump());
        CHECK(a.trace.dump().size() > 0);
    }
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.epsilon = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.epsilon = 200;
    cfg.delta = 1000;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_latency("bogus"), std::invalid_argument);
}
