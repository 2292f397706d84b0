#include "xswap/sim.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace xswap {

LatencyPolicy parse_latency(const std::string& s) {
    if (s == "max") return LatencyPolicy::Max;
    if (s == "unit") return LatencyPolicy::Unit;
    if (s == "seeded") return LatencyPolicy::Seeded;
    throw std::invalid_argument("unknown latency policy: " + s);
}

const char* to_string(LatencyPolicy p) {
    switch (p) {
        case LatencyPolicy::Max: return "max";
        case LatencyPolicy::Unit: return "unit";
        case LatencyPolicy::Seeded: return "seeded";
    }
    return "?";
}

void SimConfig::validate() const {
    if (delta <= 0 || epsilon <= 0) throw std::invalid_argument("delta and epsilon must be positive");
    if (epsilon < 2) throw std::invalid_argument("epsilon must be >= 2 ticks");
    if (10 * epsilon > delta)
        throw std::invalid_argument("epsilon must be much smaller than delta (10*eps <= delta)");
}

std::string TraceRecord::line() const {
    std::ostringstream os;
    os << seq << '\t' << at << '\t' << actor.index << '\t' << action << '\t' << target
       << '\t' << result;
    return os.str();
}

std::string EventTrace::dump() const {
    std::ostringstream os;
    for (const TraceRecord& r : records) os << r.line() << '\n';
    os << "# quiescent_at=" << quiescent_at << " horizon_reached=" << horizon_reached
       << '\n';
    return os.str();
}

namespace {
// Deterministic tie order at equal timestamps: publications land before calls,
// calls before messages, messages before wakes.
int rank_of_kind(std::size_t variant_index) { return static_cast<int>(variant_index); }

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

struct Simulator::Event {
    Tick at;
    int rank;  // kind rank; wakes last
    PartyId issuer;
    std::uint64_t seq;
    // Payload: either an Action taking effect, or a wake marker (no payload).
    std::optional<Action> action;

    bool before(const Event& o) const {
        if (at != o.at) return at < o.at;
        if (rank != o.rank) return rank < o.rank;
        if (issuer != o.issuer) return issuer < o.issuer;
        return seq < o.seq;
    }
};

Simulator::Simulator(SimConfig cfg, const CryptoBackend& crypto)
    : cfg_(cfg), crypto_(crypto), rng_state_(cfg.seed ^ 0xd1f7a2ULL) {
    cfg_.validate();
}

Simulator::~Simulator() = default;

void Simulator::add_actor(PartyId id, Actor* actor) { actors_[id] = actor; }

void Simulator::request_wake(PartyId id, Tick at) {
    auto ev = std::make_unique<Event>();
    ev->at = std::max(at, now_);
    ev->rank = 100;  // wakes after all deliveries at the same tick
    ev->issuer = id;
    ev->seq = seq_++;
    queue_.push_back(std::move(ev));
    std::push_heap(queue_.begin(), queue_.end(),
                   [](const auto& a, const auto& b) { return b->before(*a); });
}

Tick Simulator::chain_latency() {
    switch (cfg_.latency) {
        case LatencyPolicy::Max: return cfg_.delta;
        case LatencyPolicy::Unit: return 1;
        case LatencyPolicy::Seeded:
            return 1 + static_cast<Tick>(splitmix64(rng_state_) %
                                         static_cast<std::uint64_t>(cfg_.delta));
    }
    return cfg_.delta;
}

// Off-chain traffic (Phase 1/3) completes strictly inside its epsilon budget:
// the contract deadlines are met with equality when both epsilon hops and
// every Delta hop land at their worst case, and the trigger comparison is a
// strict '<'.
Tick Simulator::offchain_latency() {
    switch (cfg_.latency) {
        case LatencyPolicy::Max: return cfg_.epsilon - 1;
        case LatencyPolicy::Unit: return 1;
        case LatencyPolicy::Seeded:
            return 1 + static_cast<Tick>(splitmix64(rng_state_) %
                                         static_cast<std::uint64_t>(cfg_.epsilon - 1));
    }
    return cfg_.epsilon - 1;
}

void Simulator::submit_actions(PartyId id, std::vector<Action> actions) {
    for (Action& a : actions) {
        if (auto* wr = std::get_if<WakeRequest>(&a)) {
            request_wake(id, wr->at);
            continue;
        }
        auto ev = std::make_unique<Event>();
        bool offchain = std::holds_alternative<SendAction>(a);
        ev->at = now_ + (offchain ? offchain_latency() : chain_latency());
        ev->rank = rank_of_kind(a.index());
        ev->issuer = id;
        ev->seq = seq_++;
        if (auto* s = std::get_if<SendAction>(&a)) s->msg.from = id;
        ev->action = std::move(a);
        queue_.push_back(std::move(ev));
        std::push_heap(queue_.begin(), queue_.end(),
                       [](const auto& x, const auto& y) { return y->before(*x); });
    }
}

void Simulator::apply(const Event& ev) {
    if (!ev.action) return;  // wake marker, handled by caller
    TraceRecord rec;
    rec.seq = ev.seq;
    rec.at = ev.at;
    rec.actor = ev.issuer;

    if (const auto* p = std::get_if<PublishAction>(&*ev.action)) {
        rec.action = "PUBLISH";
        rec.target = p->arc.str();
        if (ledger_.count(p->arc)) {
            rec.result = "AlreadyPublished";
        } else {
            LedgerEntry e{p->contract, ev.at, -1};
            ledger_.emplace(p->arc, std::move(e));
            rec.result = "Published";
        }
    } else if (const auto* t = std::get_if<TransferAction>(&*ev.action)) {
        rec.action = "TRANSFER";
        rec.target = t->arc.str();
        auto it = ledger_.find(t->arc);
        if (it == ledger_.end()) {
            rec.result = "NoContract";
        } else {
            TriggerCall call{ev.issuer, t->secrets, t->signatures, ev.at};
            TransferResult res = it->second.contract.transfer(call, crypto_);
            rec.result = res.describe();
            rec.hash_checks = res.hash_checks;
            rec.sig_checks = res.sig_checks;
            if (res.ok) it->second.resolved_at = ev.at;
        }
    } else if (const auto* to = std::get_if<TimeoutAction>(&*ev.action)) {
        rec.action = "TIMEOUT";
        rec.target = to->arc.str();
        auto it = ledger_.find(to->arc);
        if (it == ledger_.end()) {
            rec.result = "NoContract";
        } else {
            RefundResult res = it->second.contract.timeout(ev.issuer, ev.at);
            rec.result = res.describe();
            if (res.ok) it->second.resolved_at = ev.at;
        }
    } else if (const auto* s = std::get_if<SendAction>(&*ev.action)) {
        rec.action = "MSG";
        rec.target = std::to_string(s->msg.to.index);
        inboxes_[s->msg.to].push_back(s->msg);
        switch (s->msg.kind) {
            case Message::Kind::Hashlock: rec.result = "Hashlock"; break;
            case Message::Kind::PubKey: rec.result = "PubKey"; break;
            case Message::Kind::Secret: rec.result = "Secret"; break;
        }
        rec.result += "(" + std::to_string(s->msg.subject.index) + ")";
    }
    trace_.records.push_back(std::move(rec));
}

std::vector<Message> Simulator::take_inbox(PartyId id) {
    std::vector<Message> out;
    out.swap(inboxes_[id]);
    return out;
}

void Simulator::wake_all(Tick at) {
    for (auto& [id, actor] : actors_) {
        auto actions = actor->wake(at, ledger_, *this);
        submit_actions(id, std::move(actions));
    }
}

EventTrace Simulator::run(Tick horizon) {
    auto cmp = [](const std::unique_ptr<Event>& a, const std::unique_ptr<Event>& b) {
        return b->before(*a);
    };
    std::make_heap(queue_.begin(), queue_.end(), cmp);
    // Initial wake at t = 0 (Phase 1 starts at the protocol start time).
    now_ = 0;
    wake_all(0);
    std::make_heap(queue_.begin(), queue_.end(), cmp);

    while (!queue_.empty()) {
        std::pop_heap(queue_.begin(), queue_.end(), cmp);
        auto ev = std::move(queue_.back());
        queue_.pop_back();
        if (ev->at > horizon) {
            trace_.horizon_reached = true;
            break;
        }
        now_ = ev->at;
        if (ev->action) {
            apply(*ev);
            // Any applied effect is immediately observable; everyone gets to
            // react at the same tick. Coalesce: only wake if no wake marker is
            // already pending at this tick.
            bool pending = std::any_of(queue_.begin(), queue_.end(), [&](const auto& e) {
                return !e->action && e->at == now_;
            });
            if (!pending) request_wake(PartyId{0}, now_);
        } else {
            wake_all(now_);
        }
    }
    trace_.quiescent_at = now_;
    return std::move(trace_);
}

}  // namespace xswap
