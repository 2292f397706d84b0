#include "xswap/contract.hpp"

#include <map>
#include <stdexcept>

namespace xswap {

const char* to_string(ContractState s) {
    switch (s) {
        case ContractState::Published: return "Published";
        case ContractState::Triggered: return "Triggered";
        case ContractState::Refunded: return "Refunded";
    }
    return "?";
}

std::string TransferResult::describe() const {
    if (ok) return "Triggered(x=" + std::to_string(distinct_valid) + ")";
    switch (*error) {
        case TransferError::InvalidState: return "InvalidState";
        case TransferError::CallerNotCounterparty: return "CallerNotCounterparty";
        case TransferError::MalformedCall: return "MalformedCall";
        case TransferError::BadSecret: return "BadSecret(" + std::to_string(bad_index) + ")";
        case TransferError::NoValidSignature: return "NoValidSignature";
        case TransferError::DeadlinePassed:
            return "DeadlinePassed(x=" + std::to_string(distinct_valid) + ")";
    }
    return "?";
}

std::string RefundResult::describe() const {
    if (ok) return "Refunded";
    switch (*error) {
        case RefundError::InvalidState: return "InvalidState";
        case RefundError::CallerNotOwner: return "CallerNotOwner";
        case RefundError::TooEarly: return "TooEarly";
    }
    return "?";
}

SwapContract::SwapContract(PartyId party, PartyId counterparty, ChainId chain,
                           std::vector<Hashlock> hashlocks,
                           std::vector<PublicKey> public_keys, Tick start,
                           std::uint32_t diam, std::uint32_t n, Tick delta,
                           Tick epsilon)
    : party_(party),
      counterparty_(counterparty),
      chain_(std::move(chain)),
      hashlocks_(std::move(hashlocks)),
      public_keys_(std::move(public_keys)),
      start_(start),
      diam_(diam),
      n_(n),
      delta_(delta),
      epsilon_(epsilon) {
    if (public_keys_.size() != n_)
        throw std::invalid_argument("contract needs one public key per party");
    if (party_ == counterparty_)
        throw std::invalid_argument("party and counterparty must differ");
}

Tick SwapContract::transfer_deadline(std::size_t x) const {
    return start_ + static_cast<Tick>(diam_ + x + 1) * delta_ + 2 * epsilon_;
}

Tick SwapContract::refund_deadline() const {
    return start_ + static_cast<Tick>(diam_ + n_ + 1) * delta_ + 2 * epsilon_;
}

TransferResult SwapContract::transfer(const TriggerCall& call,
                                      const CryptoBackend& crypto) {
    TransferResult res;
    if (state_ != ContractState::Published) {
        res.error = TransferError::InvalidState;
        return res;
    }
    if (call.caller != counterparty_) {
        res.error = TransferError::CallerNotCounterparty;
        return res;
    }
    if (call.secrets.size() != hashlocks_.size()) {
        res.error = TransferError::MalformedCall;
        return res;
    }
    for (std::size_t i = 0; i < call.secrets.size(); ++i) {
        ++res.hash_checks;
        if (!crypto.verify_hashlock(call.secrets[i], hashlocks_[i])) {
            res.error = TransferError::BadSecret;
            res.bad_index = i;
            return res;
        }
    }
    // Count distinct valid signers from the stored key list; duplicates and
    // invalid extras are ignored rather than rejecting the call.
    std::map<PartyId, TupleSignature> valid;
    for (const TupleSignature& sig : call.signatures) {
        if (!sig.signer.valid() || sig.signer.index > n_) continue;
        if (valid.count(sig.signer)) continue;
        ++res.sig_checks;
        if (crypto.verify_tuple_sig(public_keys_[sig.signer.index - 1], sig,
                                    call.secrets))
            valid.emplace(sig.signer, sig);
    }
    res.distinct_valid = valid.size();
    if (valid.empty()) {
        res.error = TransferError::NoValidSignature;
        return res;
    }
    if (!(call.now < transfer_deadline(valid.size()))) {
        res.error = TransferError::DeadlinePassed;
        return res;
    }
    state_ = ContractState::Triggered;
    TriggerRecord rec;
    rec.caller = call.caller;
    rec.secrets = call.secrets;
    for (const auto& [id, sig] : valid) rec.signatures.push_back(sig);
    rec.at = call.now;
    record_ = std::move(rec);
    res.ok = true;
    return res;
}

RefundResult SwapContract::timeout(PartyId caller, Tick now) {
    RefundResult res;
    if (state_ != ContractState::Published) {
        res.error = RefundError::InvalidState;
        return res;
    }
    if (caller != party_) {
        res.error = RefundError::CallerNotOwner;
        return res;
    }
    if (!(now > refund_deadline())) {
        res.error = RefundError::TooEarly;
        return res;
    }
    state_ = ContractState::Refunded;
    res.ok = true;
    return res;
}

namespace {

void push_u32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void push_u64(Bytes& out, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <std::size_t N>
void push_bytes(Bytes& out, const std::array<std::uint8_t, N>& b) {
    push_u32(out, static_cast<std::uint32_t>(N));
    out.insert(out.end(), b.begin(), b.end());
}

}  // namespace

// Canonical field order: hashlocks, public keys, party, counterparty, start,
// diam, n, delta, epsilon, state, trigger record. Big-endian integers,
// length-prefixed byte strings.
Bytes SwapContract::serialize() const {
    Bytes out;
    push_u32(out, static_cast<std::uint32_t>(hashlocks_.size()));
    for (const Hashlock& h : hashlocks_) push_bytes(out, h.digest);
    push_u32(out, static_cast<std::uint32_t>(public_keys_.size()));
    for (const PublicKey& k : public_keys_) push_bytes(out, k.bytes);
    push_u32(out, party_.index);
    push_u32(out, counterparty_.index);
    push_u64(out, static_cast<std::uint64_t>(start_));
    push_u32(out, diam_);
    push_u32(out, n_);
    push_u64(out, static_cast<std::uint64_t>(delta_));
    push_u64(out, static_cast<std::uint64_t>(epsilon_));
    out.push_back(static_cast<std::uint8_t>(state_));
    if (record_) {
        push_u32(out, record_->caller.index);
        push_u64(out, static_cast<std::uint64_t>(record_->at));
        push_u32(out, static_cast<std::uint32_t>(record_->secrets.size()));
        for (const Secret& s : record_->secrets) push_bytes(out, s.bytes);
        push_u32(out, static_cast<std::uint32_t>(record_->signatures.size()));
        for (const TupleSignature& sig : record_->signatures) {
            push_u32(out, sig.signer.index);
            push_bytes(out, sig.sig_bytes);
        }
    }
    return out;
}

}  // namespace xswap
