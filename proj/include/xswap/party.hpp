#pragma once

#include <set>

#include "xswap/sim.hpp"

namespace xswap {

enum class Role { TopLeader, SubLeader, Follower };
enum class Phase { P1, P2, P3, P4, Regain, Halted };

const char* to_string(Role r);
const char* to_string(Phase p);

// Immutable per-run protocol context shared by all parties: everyone derives
// the same leaders from the same digraph.
struct ProtocolContext {
    const SwapDigraph* graph = nullptr;
    LeaderSet leaders;
    std::uint32_t diam = 0;
    Tick start = 0;
    Tick delta = 0;
    Tick epsilon = 0;
    const CryptoBackend* crypto = nullptr;

    std::uint32_t n() const { return graph->n(); }
    std::uint32_t k() const { return static_cast<std::uint32_t>(leaders.size()); }
    Role role_of(PartyId p) const;

    // Follower publication window closes after (diam+1)*delta + epsilon.
    Tick publish_deadline() const;
    // Secret-sharing window closes after (diam+1)*delta + 2*epsilon.
    Tick phase3_deadline() const;
    // Refund deadline, same for every contract: (diam+n+1)*delta + 2*epsilon.
    Tick refund_deadline() const;
    // Event-loop horizon: one extra delta of slack catches stragglers as bugs.
    Tick horizon() const;
};

// A deviation is the conforming engine with one behavior hook changed; all of
// them act only through legal simulator actions.
struct DeviationSpec {
    enum class Kind {
        Conforming,
        SilentCrash,       // performs nothing from crash_phase on
        FakeHashlock,      // leaders: broadcast a wrong hashlock in Phase 1
        FakePublicKey,     // broadcast a wrong public key in Phase 1
        WithholdSecret,    // sub-leaders: never send the secret to l1
        WithholdPublish,   // skip publishing the leaving arcs in `arcs`
        NoTrigger,         // never trigger/forward in Phase 4
        EagerTimeout,      // no Phase 4; spam timeout calls from the start
        ForwardOnlySome,   // trigger only the entering arcs in `arcs`
        RevealSecretEarly, // leaders: broadcast the secret in Phase 1
    };
    Kind kind = Kind::Conforming;
    Phase crash_phase = Phase::P1;
    std::set<ArcKey> arcs;

    bool conforming() const { return kind == Kind::Conforming; }
    std::string name() const;
};

// Every deviation applicable to party p, with concrete parameters
// (single-arc and all-arc subsets for the arc-parameterized entries).
std::vector<DeviationSpec> deviation_catalog(const SwapDigraph& g, const LeaderSet& L,
                                             PartyId p);

// Instant intra-coalition sharing of secrets and signatures.
struct CoalitionPool {
    std::map<std::uint32_t, Secret> secrets;  // by leader rank
    std::map<PartyId, TupleSignature> signatures;
};

// Observable per-party protocol state.
struct PartyState {
    PartyId id;
    Role role = Role::Follower;
    Phase phase = Phase::P1;
    std::map<std::uint32_t, Hashlock> known_hashlocks;  // by leader rank
    std::map<PartyId, PublicKey> known_keys;
    std::optional<Secret> own_secret;                 // leaders only
    std::map<std::uint32_t, Secret> collected_secrets;  // top-leader, by rank
    bool forwarded = false;
    bool signature_created = false;
};

// One party: phase machine plus strategy hooks, stepped by the event loop at
// its wake times.
class PartyActor final : public Actor {
public:
    PartyActor(const ProtocolContext& ctx, PartyId id, KeyPair keys,
               std::optional<Secret> own_secret, DeviationSpec deviation,
               CoalitionPool* pool = nullptr);

    std::vector<Action> wake(Tick now, const Ledger& ledger, Simulator& sim) override;

    const PartyState& state() const { return st_; }
    const DeviationSpec& deviation() const { return dev_; }

private:
    void absorb_inbox(Simulator& sim);
    bool phase1_data_complete() const;
    // Published and matching the Phase 1 data field for field.
    bool contract_consistent(const LedgerEntry& e, ArcKey arc) const;
    // nullopt: still waiting; true: all entering consistent; false: some
    // published entering contract contradicts Phase 1 data (quit).
    std::optional<bool> entering_status(const Ledger& ledger) const;

    SwapContract build_contract(ArcKey arc) const;
    std::vector<Secret> assemble_secrets() const;
    void step_conforming(Tick now, const Ledger& ledger, std::vector<Action>& out);
    void phase4_forward(Tick now, const Ledger& ledger, std::vector<Action>& out);
    void regain_step(Tick now, const Ledger& ledger, std::vector<Action>& out,
                     Tick earliest_issue);

    const ProtocolContext& ctx_;
    PartyId id_;
    KeyPair keys_;
    DeviationSpec dev_;
    CoalitionPool* pool_;

    PartyState st_;
    bool phase1_sent_ = false;
    bool wakes_scheduled_ = false;
    bool bad_secret_seen_ = false;
    std::set<ArcKey> published_;
    bool sent_secret_ = false;
    std::map<ArcKey, Tick> timeout_inflight_until_;
};

enum class PayoffModel { Plain, Herlihy };

PayoffModel parse_payoff_model(const std::string& s);
const char* to_string(PayoffModel m);

// Final per-arc resolution of a finished run.
struct RunOutcome {
    std::map<ArcKey, ContractState> final_state;  // arcs never published absent
    std::map<ArcKey, Tick> resolved_at;
    std::set<PartyId> conforming;
    bool quiescent = true;

    bool triggered(ArcKey a) const {
        auto it = final_state.find(a);
        return it != final_state.end() && it->second == ContractState::Triggered;
    }
};

// Plain: entering value gained minus leaving value lost over triggered arcs.
// Herlihy adds the exception value: -infinity whenever some entering arc is
// untriggered while some leaving arc is triggered.
Payoff payoff(PartyId p, const RunOutcome& out, const SwapDigraph& g, PayoffModel m);

}  // namespace xswap
