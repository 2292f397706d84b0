#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "xswap/crypto.hpp"
#include "xswap/graph.hpp"

namespace xswap {

enum class ContractState { Published, Triggered, Refunded };

const char* to_string(ContractState s);

struct TriggerRecord {
    PartyId caller;
    std::vector<Secret> secrets;            // k-tuple in leader order
    std::vector<TupleSignature> signatures; // the distinct valid ones, x >= 1
    Tick at = 0;
};

struct TriggerCall {
    PartyId caller;
    std::vector<Secret> secrets;
    std::vector<TupleSignature> signatures;
    Tick now = 0;
};

enum class TransferError {
    InvalidState,
    CallerNotCounterparty,
    MalformedCall,   // secret count != k
    BadSecret,       // index in TransferResult::bad_index
    NoValidSignature,
    DeadlinePassed,
};

struct TransferResult {
    bool ok = false;
    std::optional<TransferError> error;
    std::size_t bad_index = 0;       // for BadSecret
    std::size_t distinct_valid = 0;  // x, for DeadlinePassed and ok
    std::size_t hash_checks = 0;     // verification-op accounting
    std::size_t sig_checks = 0;
    std::string describe() const;
};

enum class RefundError { InvalidState, CallerNotOwner, TooEarly };

struct RefundResult {
    bool ok = false;
    std::optional<RefundError> error;
    std::string describe() const;
};

// The per-arc smart contract. Stores no swap topology: only diam(D) and n as
// plain integers, the hashlocks, and the public-key list. Transitions are
// Published -> Triggered or Published -> Refunded, applied one call at a time
// in timestamp order by the ledger.
class SwapContract {
public:
    SwapContract() = default;
    SwapContract(PartyId party, PartyId counterparty, ChainId chain,
                 std::vector<Hashlock> hashlocks, std::vector<PublicKey> public_keys,
                 Tick start, std::uint32_t diam, std::uint32_t n, Tick delta,
                 Tick epsilon);

    PartyId party() const { return party_; }
    PartyId counterparty() const { return counterparty_; }
    const ChainId& chain() const { return chain_; }
    const std::vector<Hashlock>& hashlocks() const { return hashlocks_; }
    const std::vector<PublicKey>& public_keys() const { return public_keys_; }
    Tick start() const { return start_; }
    std::uint32_t diam() const { return diam_; }
    std::uint32_t n() const { return n_; }
    Tick delta() const { return delta_; }
    Tick epsilon() const { return epsilon_; }
    ContractState state() const { return state_; }
    const std::optional<TriggerRecord>& trigger_record() const { return record_; }

    // Trigger deadline with x distinct signers: start + (diam+x+1)*delta + 2*epsilon,
    // strict '<' at the boundary.
    Tick transfer_deadline(std::size_t x) const;
    // Refund deadline: start + (diam+n+1)*delta + 2*epsilon, strict '>'.
    Tick refund_deadline() const;

    TransferResult transfer(const TriggerCall& call, const CryptoBackend& crypto);
    RefundResult timeout(PartyId caller, Tick now);

    Bytes serialize() const;
    std::size_t storage_bits() const { return serialize().size() * 8; }

private:
    PartyId party_;
    PartyId counterparty_;
    ChainId chain_;
    std::vector<Hashlock> hashlocks_;
    std::vector<PublicKey> public_keys_;  // indexed by party id - 1
    Tick start_ = 0;
    std::uint32_t diam_ = 0;
    std::uint32_t n_ = 0;
    Tick delta_ = 0;
    Tick epsilon_ = 0;
    ContractState state_ = ContractState::Published;
    std::optional<TriggerRecord> record_;
};

}  // namespace xswap
