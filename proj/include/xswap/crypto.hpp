#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "xswap/types.hpp"

namespace xswap {

inline constexpr std::size_t kSecretBytes = 32;
inline constexpr std::size_t kDigestBytes = 32;
inline constexpr std::size_t kPubKeyBytes = 32;
inline constexpr std::size_t kSigBytes = 64;

using Bytes = std::vector<std::uint8_t>;

struct Secret {
    std::array<std::uint8_t, kSecretBytes> bytes{};
    auto operator<=>(const Secret&) const = default;
};

struct Hashlock {
    std::array<std::uint8_t, kDigestBytes> digest{};
    auto operator<=>(const Hashlock&) const = default;
};

struct PublicKey {
    std::array<std::uint8_t, kPubKeyBytes> bytes{};
    auto operator<=>(const PublicKey&) const = default;
};

struct KeyPair {
    PublicKey public_key;
    Bytes secret_key;  // backend-defined length
};

// Signature over the canonical serialization of a secret tuple.
struct TupleSignature {
    PartyId signer;
    std::array<std::uint8_t, kSigBytes> sig_bytes{};
    auto operator<=>(const TupleSignature&) const = default;
};

// Length-prefixed concatenation of the secrets in leader order. Injective on
// tuples of fixed-length secrets.
Bytes canonical_tuple(const std::vector<Secret>& secrets);

// Hash + signature primitives behind one interface. The "real" backend uses
// SHA-256 and Ed25519; the test backend is a transparent keyed permutation,
// fast enough for exhaustive sweeps.
class CryptoBackend {
public:
    virtual ~CryptoBackend() = default;

    // Deterministic under a fixed seed; a run derives per-party seeds from
    // the scenario seed.
    virtual Secret gen_secret(std::uint64_t seed) const = 0;
    virtual Hashlock make_hashlock(const Secret& s) const = 0;
    virtual KeyPair gen_keypair(std::uint64_t seed) const = 0;
    virtual TupleSignature sign_tuple(const KeyPair& keys, PartyId signer,
                                      const std::vector<Secret>& payload) const = 0;
    // False for any mismatch or malformed bytes, never a crash.
    virtual bool verify_tuple_sig(const PublicKey& pk, const TupleSignature& sig,
                                  const std::vector<Secret>& payload) const = 0;

    bool verify_hashlock(const Secret& s, const Hashlock& h) const {
        return make_hashlock(s) == h;
    }
};

std::unique_ptr<CryptoBackend> make_real_backend();
std::unique_ptr<CryptoBackend> make_test_backend();
std::unique_ptr<CryptoBackend> make_backend(const std::string& name);

// Number of distinct signer ids in a signature list.
std::size_t distinct_signers(const std::vector<TupleSignature>& sigs);

}  // namespace xswap
