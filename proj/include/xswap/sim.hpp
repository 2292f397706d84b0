#pragma once

#include <map>
#include <memory>
#include <queue>
#include <variant>
#include <vector>

#include "xswap/contract.hpp"

namespace xswap {

enum class LatencyPolicy { Max, Unit, Seeded };

LatencyPolicy parse_latency(const std::string& s);
const char* to_string(LatencyPolicy p);

struct SimConfig {
    Tick delta = 1000;
    Tick epsilon = 10;
    LatencyPolicy latency = LatencyPolicy::Max;
    std::uint64_t seed = 0;

    // epsilon << delta, and >= 2 so off-chain traffic can land strictly
    // inside its epsilon budget.
    void validate() const;
};

// Off-chain payloads: Phase 1 announcements and Phase 3 secret shares.
// Adversaries deviate by content, not by the channel.
struct Message {
    enum class Kind { Hashlock, PubKey, Secret };
    PartyId from;
    PartyId to;
    Kind kind;
    PartyId subject;  // whose hashlock/key/secret this claims to be
    Hashlock hashlock{};
    PublicKey pubkey{};
    Secret secret{};
};

// What a party can do at a wake. All adversary behavior goes through these
// same legal actions.
struct PublishAction {
    ArcKey arc;
    SwapContract contract;
};
struct TransferAction {
    ArcKey arc;
    std::vector<Secret> secrets;
    std::vector<TupleSignature> signatures;
};
struct TimeoutAction {
    ArcKey arc;
};
struct SendAction {
    Message msg;  // msg.from is overwritten with the acting party
};
struct WakeRequest {
    Tick at;
};
using Action = std::variant<PublishAction, TransferAction, TimeoutAction, SendAction,
                            WakeRequest>;

struct LedgerEntry {
    SwapContract contract;
    Tick published_at = 0;  // effect time of the publication
    Tick resolved_at = -1;  // effect time of trigger/refund, -1 while Published
};

// Per-chain state folded into one map: each arc carries exactly one contract.
// A contract action at time t is visible to every party from t on (public
// ledgers, act-and-detect folded into the one-Delta latency).
using Ledger = std::map<ArcKey, LedgerEntry>;

struct TraceRecord {
    std::uint64_t seq = 0;
    Tick at = 0;
    PartyId actor;       // issuing party (0 for engine events)
    std::string action;  // PUBLISH / TRANSFER / TIMEOUT / MSG
    std::string target;  // arc "u->v" or recipient party id
    std::string result;
    std::size_t hash_checks = 0;  // verification ops, TRANSFER only
    std::size_t sig_checks = 0;

    std::string line() const;
};

struct EventTrace {
    std::vector<TraceRecord> records;
    bool horizon_reached = false;
    Tick quiescent_at = 0;

    std::string dump() const;  // line-delimited, stable field order
};

class Simulator;

// A simulated participant. wake() observes the ledger (already filtered to
// effects at or before `now`) and its delivered messages, and returns actions.
class Actor {
public:
    virtual ~Actor() = default;
    virtual std::vector<Action> wake(Tick now, const Ledger& ledger,
                                     Simulator& sim) = 0;
};

class Simulator {
public:
    Simulator(SimConfig cfg, const CryptoBackend& crypto);
    ~Simulator();

    // Actors indexed by party id; all of them are woken after every applied
    // event plus at any requested wake ticks.
    void add_actor(PartyId id, Actor* actor);
    void request_wake(PartyId id, Tick at);

    // Runs the event loop to quiescence or to the horizon.
    EventTrace run(Tick horizon);

    const Ledger& ledger() const { return ledger_; }
    const SimConfig& config() const { return cfg_; }
    Tick now() const { return now_; }

    // Messages delivered to `id` and not yet consumed.
    std::vector<Message> take_inbox(PartyId id);

private:
    struct Event;

    void submit_actions(PartyId id, std::vector<Action> actions);
    void apply(const Event& ev);
    void wake_all(Tick at);
    Tick chain_latency();
    Tick offchain_latency();

    SimConfig cfg_;
    const CryptoBackend& crypto_;
    Tick now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t rng_state_;
    Ledger ledger_;
    std::map<PartyId, Actor*> actors_;
    std::map<PartyId, std::vector<Message>> inboxes_;
    std::vector<std::unique_ptr<Event>> queue_;  // heap by (time, rank, actor, seq)
    EventTrace trace_;
};

}  // namespace xswap
