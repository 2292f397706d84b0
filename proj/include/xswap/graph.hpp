#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xswap/types.hpp"

namespace xswap {

using ChainId = std::string;

// Ordered pair (tail, head): the asset moves from tail to head.
struct ArcKey {
    PartyId tail;
    PartyId head;
    constexpr auto operator<=>(const ArcKey&) const = default;
    std::string str() const;
};

struct Arc {
    PartyId tail;
    PartyId head;
    ChainId chain;
    Rat value_to_tail{0};  // what the asset is worth to its current owner
    Rat value_to_head{0};  // what it is worth to the recipient

    ArcKey key() const { return ArcKey{tail, head}; }
};

// The swap digraph: parties 1..n, at most one arc per ordered pair.
// Construction rejects self-loops and duplicate arcs; strong connectivity
// is checked separately (the scenario loader insists on it).
class SwapDigraph {
public:
    SwapDigraph() = default;
    SwapDigraph(std::uint32_t n, std::vector<Arc> arcs);

    std::uint32_t n() const { return n_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    const Arc& arc(ArcKey k) const;
    bool has_arc(ArcKey k) const { return by_key_.count(k) != 0; }

    std::vector<ArcKey> entering(PartyId v) const;
    std::vector<ArcKey> leaving(PartyId v) const;

    std::vector<PartyId> parties() const;

private:
    std::uint32_t n_ = 0;
    std::vector<Arc> arcs_;
    std::map<ArcKey, std::size_t> by_key_;
};

// Ordered leader list; the first element is the top-leader.
struct LeaderSet {
    std::vector<PartyId> leaders;

    PartyId top() const { return leaders.front(); }
    bool contains(PartyId p) const;
    // 1-based position of p in leader order, 0 if not a leader.
    std::uint32_t rank(PartyId p) const;
    std::size_t size() const { return leaders.size(); }
};

bool is_strongly_connected(const SwapDigraph& g);

// First ordered pair (u, v) with v unreachable from u, if any.
std::optional<std::pair<PartyId, PartyId>> find_unreachable_pair(const SwapDigraph& g);

// Max over ordered pairs of shortest-path length. Throws std::invalid_argument
// if g is not strongly connected (distances would be undefined).
std::uint32_t diameter(const SwapDigraph& g);

// Deterministic feedback vertex set, returned in ascending PartyId order.
// Exact (smallest, lexicographically first) for n <= 12, greedy above.
LeaderSet feedback_vertex_set(const SwapDigraph& g);

// True iff the graph restricted to V \ removed is acyclic.
bool is_acyclic_without(const SwapDigraph& g, const std::set<PartyId>& removed);

struct SubswapWitness {
    std::vector<ArcKey> subgraph_arcs;  // A' of the better sub-swap D'
    std::vector<PartyId> coalition;     // C, strictly better off in D'
};

struct ValidationReport {
    bool participation_ok = false;           // value+ > value- for every party
    std::optional<PartyId> participation_witness;
    bool subswap_checked = false;            // false => size limit exceeded
    bool subswap_ok = false;
    std::optional<SubswapWitness> subswap_witness;

    bool valid() const { return participation_ok && subswap_checked && subswap_ok; }
};

// Checks the participation condition and, for |A| <= max_arcs, searches every
// connected sub-swap and coalition for a profitable defection. Never silently
// passes a skipped check.
ValidationReport validate_swap_values(const SwapDigraph& g, std::size_t max_arcs = 10);

Rat entering_value(const SwapDigraph& g, PartyId v);
Rat leaving_value(const SwapDigraph& g, PartyId v);

}  // namespace xswap
