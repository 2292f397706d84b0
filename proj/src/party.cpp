#include "xswap/party.hpp"

#include <algorithm>
#include <stdexcept>

namespace xswap {

const char* to_string(Role r) {
    switch (r) {
        case Role::TopLeader: return "top-leader";
        case Role::SubLeader: return "sub-leader";
        case Role::Follower: return "follower";
    }
    return "?";
}

const char* to_string(Phase p) {
    switch (p) {
        case Phase::P1: return "P1";
        case Phase::P2: return "P2";
        case Phase::P3: return "P3";
        case Phase::P4: return "P4";
        case Phase::Regain: return "Regain";
        case Phase::Halted: return "Halted";
    }
    return "?";
}

Role ProtocolContext::role_of(PartyId p) const {
    std::uint32_t r = leaders.rank(p);
    if (r == 1) return Role::TopLeader;
    if (r > 1) return Role::SubLeader;
    return Role::Follower;
}

Tick ProtocolContext::publish_deadline() const {
    return start + static_cast<Tick>(diam + 1) * delta + epsilon;
}

Tick ProtocolContext::phase3_deadline() const {
    return start + static_cast<Tick>(diam + 1) * delta + 2 * epsilon;
}

Tick ProtocolContext::refund_deadline() const {
    return start + static_cast<Tick>(diam + n() + 1) * delta + 2 * epsilon;
}

Tick ProtocolContext::horizon() const {
    return start + static_cast<Tick>(diam + n() + 2) * delta + 2 * epsilon + delta;
}

std::string DeviationSpec::name() const {
    auto arcs_str = [this]() {
        std::string s;
        for (const ArcKey& a : arcs) s += (s.empty() ? "" : ",") + a.str();
        return s;
    };
    switch (kind) {
        case Kind::Conforming: return "conforming";
        case Kind::SilentCrash: return std::string("silent_crash@") + to_string(crash_phase);
        case Kind::FakeHashlock: return "fake_hashlock";
        case Kind::FakePublicKey: return "fake_public_key";
        case Kind::WithholdSecret: return "withhold_secret";
        case Kind::WithholdPublish: return "withhold_publish[" + arcs_str() + "]";
        case Kind::NoTrigger: return "no_trigger";
        case Kind::EagerTimeout: return "eager_timeout";
        case Kind::ForwardOnlySome: return "forward_only[" + arcs_str() + "]";
        case Kind::RevealSecretEarly: return "reveal_secret_early";
    }
    return "?";
}

std::vector<DeviationSpec> deviation_catalog(const SwapDigraph& g, const LeaderSet& L,
                                             PartyId p) {
    std::vector<DeviationSpec> out;
    const bool leader = L.contains(p);
    const bool sub = leader && L.rank(p) > 1;
    for (Phase ph : {Phase::P1, Phase::P2, Phase::P3, Phase::P4})
        out.push_back({DeviationSpec::Kind::SilentCrash, ph, {}});
    if (leader) {
        out.push_back({DeviationSpec::Kind::FakeHashlock, Phase::P1, {}});
        out.push_back({DeviationSpec::Kind::RevealSecretEarly, Phase::P1, {}});
    }
    out.push_back({DeviationSpec::Kind::FakePublicKey, Phase::P1, {}});
    if (sub) out.push_back({DeviationSpec::Kind::WithholdSecret, Phase::P1, {}});
    auto leaving = g.leaving(p);
    for (const ArcKey& a : leaving)
        out.push_back({DeviationSpec::Kind::WithholdPublish, Phase::P1, {a}});
    if (leaving.size() > 1)
        out.push_back({DeviationSpec::Kind::WithholdPublish, Phase::P1,
                       std::set<ArcKey>(leaving.begin(), leaving.end())});
    out.push_back({DeviationSpec::Kind::NoTrigger, Phase::P1, {}});
    out.push_back({DeviationSpec::Kind::EagerTimeout, Phase::P1, {}});
    auto entering = g.entering(p);
    if (entering.size() > 1)
        for (const ArcKey& a : entering)
            out.push_back({DeviationSpec::Kind::ForwardOnlySome, Phase::P1, {a}});
    return out;
}

namespace {

int phase_order(Phase p) {
    switch (p) {
        case Phase::P1: return 1;
        case Phase::P2: return 2;
        case Phase::P3: return 3;
        case Phase::P4: return 4;
        case Phase::Regain: return 5;
        case Phase::Halted: return 6;
    }
    return 0;
}

template <typename Array>
Array flipped(Array a) {
    a[0] ^= 0xff;
    return a;
}

}  // namespace

PartyActor::PartyActor(const ProtocolContext& ctx, PartyId id, KeyPair keys,
                       std::optional<Secret> own_secret, DeviationSpec deviation,
                       CoalitionPool* pool)
    : ctx_(ctx), id_(id), keys_(std::move(keys)), dev_(std::move(deviation)), pool_(pool) {
    st_.id = id;
    st_.role = ctx.role_of(id);
    st_.own_secret = own_secret;
    if (st_.role != Role::Follower && !own_secret)
        throw std::invalid_argument("leader party needs a secret");
    if (pool_ && st_.own_secret) pool_->secrets[ctx_.leaders.rank(id_)] = *st_.own_secret;
}

bool PartyActor::phase1_data_complete() const {
    return st_.known_hashlocks.size() == ctx_.k() && st_.known_keys.size() == ctx_.n();
}

void PartyActor::absorb_inbox(Simulator& sim) {
    for (const Message& m : sim.take_inbox(id_)) {
        // Only self-announcements carry authority; first value received wins.
        if (m.subject != m.from) continue;
        switch (m.kind) {
            case Message::Kind::Hashlock: {
                std::uint32_t r = ctx_.leaders.rank(m.subject);
                if (r != 0) st_.known_hashlocks.emplace(r, m.hashlock);
                break;
            }
            case Message::Kind::PubKey:
                st_.known_keys.emplace(m.subject, m.pubkey);
                break;
            case Message::Kind::Secret: {
                std::uint32_t r = ctx_.leaders.rank(m.subject);
                if (r == 0) break;
                if (pool_) pool_->secrets.emplace(r, m.secret);
                if (st_.role == Role::TopLeader && r > 1) {
                    auto it = st_.known_hashlocks.find(r);
                    if (it != st_.known_hashlocks.end() &&
                        !ctx_.crypto->verify_hashlock(m.secret, it->second)) {
                        bad_secret_seen_ = true;
                    } else {
                        st_.collected_secrets.emplace(r, m.secret);
                    }
                }
                break;
            }
        }
    }
}

bool PartyActor::contract_consistent(const LedgerEntry& e, ArcKey arc) const {
    const SwapContract& c = e.contract;
    if (c.party() != arc.tail || c.counterparty() != arc.head) return false;
    if (c.chain() != ctx_.graph->arc(arc).chain) return false;
    if (c.start() != ctx_.start || c.diam() != ctx_.diam || c.n() != ctx_.n()) return false;
    if (c.delta() != ctx_.delta || c.epsilon() != ctx_.epsilon) return false;
    if (c.hashlocks().size() != ctx_.k()) return false;
    for (std::uint32_t r = 1; r <= ctx_.k(); ++r) {
        auto it = st_.known_hashlocks.find(r);
        if (it == st_.known_hashlocks.end() || c.hashlocks()[r - 1] != it->second)
            return false;
    }
    if (c.public_keys().size() != ctx_.n()) return false;
    for (std::uint32_t i = 1; i <= ctx_.n(); ++i) {
        auto it = st_.known_keys.find(PartyId{i});
        if (it == st_.known_keys.end() || c.public_keys()[i - 1] != it->second)
            return false;
    }
    return true;
}

std::optional<bool> PartyActor::entering_status(const Ledger& ledger) const {
    if (!phase1_data_complete()) return std::nullopt;
    bool all_present = true;
    for (const ArcKey& a : ctx_.graph->entering(id_)) {
        auto it = ledger.find(a);
        if (it == ledger.end()) {
            all_present = false;
            continue;
        }
        if (!contract_consistent(it->second, a)) return false;
    }
    if (!all_present) return std::nullopt;
    return true;
}

SwapContract PartyActor::build_contract(ArcKey arc) const {
    std::vector<Hashlock> hl;
    for (std::uint32_t r = 1; r <= ctx_.k(); ++r) hl.push_back(st_.known_hashlocks.at(r));
    std::vector<PublicKey> keys;
    for (std::uint32_t i = 1; i <= ctx_.n(); ++i)
        keys.push_back(st_.known_keys.at(PartyId{i}));
    return SwapContract(arc.tail, arc.head, ctx_.graph->arc(arc).chain, std::move(hl),
                        std::move(keys), ctx_.start, ctx_.diam, ctx_.n(), ctx_.delta,
                        ctx_.epsilon);
}

std::vector<Secret> PartyActor::assemble_secrets() const {
    std::vector<Secret> out;
    for (std::uint32_t r = 1; r <= ctx_.k(); ++r) {
        if (r == ctx_.leaders.rank(id_)) {
            out.push_back(*st_.own_secret);
        } else {
            auto it = st_.collected_secrets.find(r);
            if (it != st_.collected_secrets.end()) {
                out.push_back(it->second);
            } else if (pool_ && pool_->secrets.count(r)) {
                out.push_back(pool_->secrets.at(r));
            } else {
                throw std::logic_error("assemble_secrets called before completion");
            }
        }
    }
    return out;
}

std::vector<Action> PartyActor::wake(Tick now, const Ledger& ledger, Simulator& sim) {
    if (st_.phase == Phase::Halted) return {};
    std::vector<Action> out;
    absorb_inbox(sim);

    auto crash_here = [&](Phase p) {
        if (dev_.kind == DeviationSpec::Kind::SilentCrash &&
            phase_order(p) >= phase_order(dev_.crash_phase)) {
            st_.phase = Phase::Halted;
            return true;
        }
        return false;
    };

    if (!wakes_scheduled_) {
        wakes_scheduled_ = true;
        out.push_back(WakeRequest{ctx_.publish_deadline() + 1});
        out.push_back(WakeRequest{ctx_.phase3_deadline()});
        out.push_back(WakeRequest{ctx_.phase3_deadline() + 1});
        out.push_back(WakeRequest{ctx_.refund_deadline() - 1});
        out.push_back(WakeRequest{ctx_.refund_deadline() + 1});
    }

    // Phase 1: announce own public key (and hashlock if leader) to everyone.
    if (st_.phase == Phase::P1) {
        if (crash_here(Phase::P1)) return out;
        if (!phase1_sent_) {
            phase1_sent_ = true;
            // Record own data locally; the channel copy to self is implicit.
            st_.known_keys.emplace(id_, keys_.public_key);
            std::uint32_t my_rank = ctx_.leaders.rank(id_);
            if (my_rank != 0)
                st_.known_hashlocks.emplace(my_rank,
                                            ctx_.crypto->make_hashlock(*st_.own_secret));
            for (PartyId other : ctx_.graph->parties()) {
                if (other == id_) continue;
                Message mk{};
                mk.to = other;
                mk.kind = Message::Kind::PubKey;
                mk.subject = id_;
                mk.pubkey = dev_.kind == DeviationSpec::Kind::FakePublicKey
                                ? PublicKey{flipped(keys_.public_key.bytes)}
                                : keys_.public_key;
                out.push_back(SendAction{mk});
                if (my_rank != 0) {
                    Message mh{};
                    mh.to = other;
                    mh.kind = Message::Kind::Hashlock;
                    mh.subject = id_;
                    Hashlock real = ctx_.crypto->make_hashlock(*st_.own_secret);
                    mh.hashlock = dev_.kind == DeviationSpec::Kind::FakeHashlock
                                      ? Hashlock{flipped(real.digest)}
                                      : real;
                    out.push_back(SendAction{mh});
                    if (dev_.kind == DeviationSpec::Kind::RevealSecretEarly) {
                        Message ms{};
                        ms.to = other;
                        ms.kind = Message::Kind::Secret;
                        ms.subject = id_;
                        ms.secret = *st_.own_secret;
                        out.push_back(SendAction{ms});
                    }
                }
            }
        }
        st_.phase = Phase::P2;
    }

    // Phase 2: leaders publish spontaneously once Phase 1 data is in;
    // followers wait for all entering contracts and verify them first.
    if (st_.phase == Phase::P2) {
        auto publish_leaving = [&]() {
            for (const ArcKey& a : ctx_.graph->leaving(id_)) {
                if (dev_.kind == DeviationSpec::Kind::WithholdPublish && dev_.arcs.count(a))
                    continue;
                if (published_.count(a)) continue;
                published_.insert(a);
                out.push_back(PublishAction{a, build_contract(a)});
            }
        };
        if (st_.role != Role::Follower) {
            if (phase1_data_complete()) {
                if (crash_here(Phase::P2)) return out;
                publish_leaving();
                st_.phase = Phase::P3;
            }
        } else {
            auto es = entering_status(ledger);
            if (es.has_value() && !*es) {
                st_.phase = Phase::Regain;  // inconsistent contract: quit, publish nothing
            } else if (es.has_value() && *es && now <= ctx_.publish_deadline()) {
                if (crash_here(Phase::P2)) return out;
                publish_leaving();
                st_.phase = Phase::P4;
            } else if (now > ctx_.publish_deadline()) {
                st_.phase = Phase::Regain;
            }
        }
    }

    // Phase 3: sub-leaders reveal the secret to the top-leader; the
    // top-leader collects and validates everything before Phase 4.
    if (st_.phase == Phase::P3) {
        if (st_.role == Role::TopLeader) {
            auto es = entering_status(ledger);
            bool secrets_ok = true;
            for (std::uint32_t r = 2; r <= ctx_.k(); ++r)
                if (!st_.collected_secrets.count(r) && !(pool_ && pool_->secrets.count(r)))
                    secrets_ok = false;
            if (bad_secret_seen_ || (es.has_value() && !*es)) {
                st_.phase = Phase::Regain;
            } else if (secrets_ok && es.has_value() && *es &&
                       now < ctx_.phase3_deadline()) {
                if (crash_here(Phase::P3)) return out;
                st_.phase = Phase::P4;
            } else if (now >= ctx_.phase3_deadline()) {
                st_.phase = Phase::Regain;
            }
        } else {
            auto es = entering_status(ledger);
            if (es.has_value() && !*es) {
                st_.phase = Phase::Regain;
            } else if (es.has_value() && *es && now <= ctx_.phase3_deadline()) {
                if (crash_here(Phase::P3)) return out;
                if (dev_.kind != DeviationSpec::Kind::WithholdSecret && !sent_secret_) {
                    sent_secret_ = true;
                    Message ms{};
                    ms.to = ctx_.leaders.top();
                    ms.kind = Message::Kind::Secret;
                    ms.subject = id_;
                    ms.secret = *st_.own_secret;
                    out.push_back(SendAction{ms});
                }
                st_.phase = Phase::P4;
            } else if (now > ctx_.phase3_deadline()) {
                st_.phase = Phase::Regain;
            }
        }
    }

    // Phase 4: the top-leader triggers all entering arcs with the k secrets
    // and its own signature; everyone else waits for a leaving arc to trigger
    // and forwards the observed signatures plus their own.
    if (st_.phase == Phase::P4) {
        if (crash_here(Phase::P4)) return out;
        bool suppressed = dev_.kind == DeviationSpec::Kind::NoTrigger ||
                          dev_.kind == DeviationSpec::Kind::EagerTimeout;
        if (st_.role == Role::TopLeader) {
            if (!st_.forwarded && !suppressed) {
                st_.forwarded = true;
                st_.signature_created = true;
                std::vector<Secret> secrets = assemble_secrets();
                TupleSignature own =
                    ctx_.crypto->sign_tuple(keys_, id_, secrets);
                if (pool_) pool_->signatures.emplace(id_, own);
                for (const ArcKey& a : ctx_.graph->entering(id_)) {
                    if (dev_.kind == DeviationSpec::Kind::ForwardOnlySome &&
                        !dev_.arcs.count(a))
                        continue;
                    out.push_back(TransferAction{a, secrets, {own}});
                }
            }
        } else {
            if (!st_.forwarded && !suppressed) phase4_forward(now, ledger, out);
            if (!st_.forwarded && now > ctx_.refund_deadline()) st_.phase = Phase::Regain;
        }
    }

    // Regain applies to everyone still alive: any leaving arc not triggered by
    // the deadline is timed out. The call is issued one tick early so that a
    // worst-case Delta hop still resolves strictly inside the
    // (diam+n+2)Delta + 2eps bound; the contract itself enforces 'now > deadline'
    // at arrival, so an early arrival just fails TooEarly and is retried.
    Tick earliest = dev_.kind == DeviationSpec::Kind::EagerTimeout
                        ? ctx_.start
                        : ctx_.refund_deadline() - 1;
    regain_step(now, ledger, out, earliest);
    return out;
}

void PartyActor::phase4_forward(Tick now, const Ledger& ledger,
                                std::vector<Action>& out) {
    for (const ArcKey& leave : ctx_.graph->leaving(id_)) {
        auto it = ledger.find(leave);
        if (it == ledger.end() ||
            it->second.contract.state() != ContractState::Triggered)
            continue;
        const TriggerRecord& rec = *it->second.contract.trigger_record();
        st_.forwarded = true;
        st_.signature_created = true;
        TupleSignature own = ctx_.crypto->sign_tuple(keys_, id_, rec.secrets);
        std::vector<TupleSignature> sigs = rec.signatures;
        auto have = [&](PartyId p) {
            return std::any_of(sigs.begin(), sigs.end(),
                               [&](const TupleSignature& s) { return s.signer == p; });
        };
        if (!have(id_)) sigs.push_back(own);
        if (pool_) {
            pool_->signatures.emplace(id_, own);
            for (const TupleSignature& s : rec.signatures)
                pool_->signatures.emplace(s.signer, s);
            for (const auto& [p, s] : pool_->signatures)
                if (!have(p)) sigs.push_back(s);
        }
        for (const ArcKey& a : ctx_.graph->entering(id_)) {
            if (dev_.kind == DeviationSpec::Kind::ForwardOnlySome && !dev_.arcs.count(a))
                continue;
            out.push_back(TransferAction{a, rec.secrets, sigs});
        }
        (void)now;
        return;
    }
}

void PartyActor::regain_step(Tick now, const Ledger& ledger, std::vector<Action>& out,
                             Tick earliest_issue) {
    if (now < earliest_issue) return;
    for (const ArcKey& a : ctx_.graph->leaving(id_)) {
        auto it = ledger.find(a);
        if (it == ledger.end()) continue;  // never published, nothing escrowed
        if (it->second.contract.state() != ContractState::Published) continue;
        auto inflight = timeout_inflight_until_.find(a);
        if (inflight != timeout_inflight_until_.end() && now <= inflight->second)
            continue;
        timeout_inflight_until_[a] = now + ctx_.delta;
        out.push_back(TimeoutAction{a});
        // Retry slot in case the call arrives at the deadline and fails TooEarly.
        out.push_back(WakeRequest{now + ctx_.delta + 1});
    }
}

PayoffModel parse_payoff_model(const std::string& s) {
    if (s == "plain") return PayoffModel::Plain;
    if (s == "herlihy") return PayoffModel::Herlihy;
    throw std::invalid_argument("unknown payoff model: " + s);
}

const char* to_string(PayoffModel m) {
    return m == PayoffModel::Plain ? "plain" : "herlihy";
}

Payoff payoff(PartyId p, const RunOutcome& out, const SwapDigraph& g, PayoffModel m) {
    if (!out.quiescent) throw std::invalid_argument("payoff over a non-quiescent trace");
    Payoff result;
    bool entering_untriggered = false, leaving_triggered = false;
    for (const Arc& a : g.arcs()) {
        bool trig = out.triggered(a.key());
        if (a.head == p) {
            if (trig)
                result.value += a.value_to_head;
            else
                entering_untriggered = true;
        }
        if (a.tail == p) {
            if (trig) {
                result.value -= a.value_to_tail;
                leaving_triggered = true;
            }
        }
    }
    if (m == PayoffModel::Herlihy && entering_untriggered && leaving_triggered)
        return Payoff::minus_infinity();
    return result;
}

}  // namespace xswap
