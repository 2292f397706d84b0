#include "xswap/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace xswap {

std::string ArcKey::str() const {
    return std::to_string(tail.index) + "->" + std::to_string(head.index);
}

SwapDigraph::SwapDigraph(std::uint32_t n, std::vector<Arc> arcs)
    : n_(n), arcs_(std::move(arcs)) {
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        const Arc& a = arcs_[i];
        if (!a.tail.valid() || !a.head.valid() || a.tail.index > n_ || a.head.index > n_)
            throw std::invalid_argument("arc endpoint out of range: " + a.key().str());
        if (a.tail == a.head)
            throw std::invalid_argument("self-loop arc: " + a.key().str());
        if (a.value_to_tail < Rat{0} || a.value_to_head < Rat{0})
            throw std::invalid_argument("negative valuation on arc " + a.key().str());
        if (!by_key_.emplace(a.key(), i).second)
            throw std::invalid_argument("duplicate arc: " + a.key().str());
    }
}

const Arc& SwapDigraph::arc(ArcKey k) const {
    auto it = by_key_.find(k);
    if (it == by_key_.end()) throw std::invalid_argument("no such arc: " + k.str());
    return arcs_[it->second];
}

std::vector<ArcKey> SwapDigraph::entering(PartyId v) const {
    std::vector<ArcKey> out;
    for (const auto& [k, i] : by_key_)
        if (k.head == v) out.push_back(k);
    return out;
}

std::vector<ArcKey> SwapDigraph::leaving(PartyId v) const {
    std::vector<ArcKey> out;
    for (const auto& [k, i] : by_key_)
        if (k.tail == v) out.push_back(k);
    return out;
}

std::vector<PartyId> SwapDigraph::parties() const {
    std::vector<PartyId> out;
    for (std::uint32_t i = 1; i <= n_; ++i) out.push_back(PartyId{i});
    return out;
}

bool LeaderSet::contains(PartyId p) const {
    return std::find(leaders.begin(), leaders.end(), p) != leaders.end();
}

std::uint32_t LeaderSet::rank(PartyId p) const {
    for (std::size_t i = 0; i < leaders.size(); ++i)
        if (leaders[i] == p) return static_cast<std::uint32_t>(i + 1);
    return 0;
}

namespace {

// BFS distances from src; unreachable = UINT32_MAX.
std::vector<std::uint32_t> bfs_dist(const SwapDigraph& g, PartyId src) {
    constexpr auto inf = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(g.n() + 1, inf);
    std::vector<std::vector<std::uint32_t>> adj(g.n() + 1);
    for (const Arc& a : g.arcs()) adj[a.tail.index].push_back(a.head.index);
    std::deque<std::uint32_t> q{src.index};
    dist[src.index] = 0;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        for (auto v : adj[u])
            if (dist[v] == inf) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

}  // namespace

std::optional<std::pair<PartyId, PartyId>> find_unreachable_pair(const SwapDigraph& g) {
    constexpr auto inf = std::numeric_limits<std::uint32_t>::max();
    for (std::uint32_t u = 1; u <= g.n(); ++u) {
        auto dist = bfs_dist(g, PartyId{u});
        for (std::uint32_t v = 1; v <= g.n(); ++v)
            if (dist[v] == inf) return std::make_pair(PartyId{u}, PartyId{v});
    }
    return std::nullopt;
}

bool is_strongly_connected(const SwapDigraph& g) {
    if (g.n() == 0) return false;
    return !find_unreachable_pair(g).has_value();
}

std::uint32_t diameter(const SwapDigraph& g) {
    std::uint32_t best = 0;
    for (std::uint32_t u = 1; u <= g.n(); ++u) {
        auto dist = bfs_dist(g, PartyId{u});
        for (std::uint32_t v = 1; v <= g.n(); ++v) {
            if (u == v) continue;
            if (dist[v] == std::numeric_limits<std::uint32_t>::max())
                throw std::invalid_argument("diameter undefined: " + std::to_string(v) +
                                            " unreachable from " + std::to_string(u));
            best = std::max(best, dist[v]);
        }
    }
    return best;
}

bool is_acyclic_without(const SwapDigraph& g, const std::set<PartyId>& removed) {
    // Kahn's algorithm on the remaining vertices.
    std::vector<bool> gone(g.n() + 1, false);
    for (PartyId p : removed) gone[p.index] = true;
    std::vector<std::uint32_t> indeg(g.n() + 1, 0);
    std::vector<std::vector<std::uint32_t>> adj(g.n() + 1);
    std::uint32_t remaining = 0;
    for (std::uint32_t v = 1; v <= g.n(); ++v)
        if (!gone[v]) ++remaining;
    for (const Arc& a : g.arcs()) {
        if (gone[a.tail.index] || gone[a.head.index]) continue;
        adj[a.tail.index].push_back(a.head.index);
        ++indeg[a.head.index];
    }
    std::deque<std::uint32_t> q;
    for (std::uint32_t v = 1; v <= g.n(); ++v)
        if (!gone[v] && indeg[v] == 0) q.push_back(v);
    std::uint32_t seen = 0;
    while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        ++seen;
        for (auto v : adj[u])
            if (--indeg[v] == 0) q.push_back(v);
    }
    return seen == remaining;
}

namespace {

// Number of simple cycles through each vertex would be expensive; the greedy
// fallback scores vertices by (indeg * outdeg) on the still-cyclic part,
// which is a standard FVS heuristic and deterministic with the id tie-break.
LeaderSet greedy_fvs(const SwapDigraph& g) {
    std::set<PartyId> removed;
    while (!is_acyclic_without(g, removed)) {
        PartyId best{0};
        std::uint64_t best_score = 0;
        for (std::uint32_t v = 1; v <= g.n(); ++v) {
            PartyId p{v};
            if (removed.count(p)) continue;
            std::uint64_t in = 0, out = 0;
            for (const Arc& a : g.arcs()) {
                if (removed.count(a.tail) || removed.count(a.head)) continue;
                if (a.head == p) ++in;
                if (a.tail == p) ++out;
            }
            std::uint64_t score = in * out;
            if (!best.valid() || score > best_score) {
                best = p;
                best_score = score;
            }
        }
        removed.insert(best);
    }
    LeaderSet ls;
    ls.leaders.assign(removed.begin(), removed.end());
    return ls;
}

}  // namespace

LeaderSet feedback_vertex_set(const SwapDigraph& g) {
    if (g.n() > 12) return greedy_fvs(g);
    // Exact: try subsets in order of size, lexicographically smallest first.
    // Subsets of a given size are enumerated in ascending bitmask order over
    // ids 1..n, which makes the result a pure function of the digraph.
    const std::uint32_t n = g.n();
    for (std::uint32_t size = 0; size <= n; ++size) {
        // Enumerate all masks with popcount == size in ascending numeric
        // order of the id set {lowest ids first}.
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (static_cast<std::uint32_t>(__builtin_popcount(mask)) != size) continue;
            std::set<PartyId> cand;
            for (std::uint32_t v = 0; v < n; ++v)
                if (mask & (1u << v)) cand.insert(PartyId{v + 1});
            if (is_acyclic_without(g, cand)) {
                LeaderSet ls;
                ls.leaders.assign(cand.begin(), cand.end());
                return ls;
            }
        }
    }
    // Unreachable: removing all vertices always leaves an acyclic graph.
    throw std::logic_error("feedback_vertex_set: no set found");
}

Rat entering_value(const SwapDigraph& g, PartyId v) {
    Rat sum{0};
    for (const Arc& a : g.arcs())
        if (a.head == v) sum += a.value_to_head;
    return sum;
}

Rat leaving_value(const SwapDigraph& g, PartyId v) {
    Rat sum{0};
    for (const Arc& a : g.arcs())
        if (a.tail == v) sum += a.value_to_tail;
    return sum;
}

namespace {

bool weakly_connected(const SwapDigraph& g, const std::vector<ArcKey>& arcs) {
    if (arcs.empty()) return false;
    std::set<PartyId> verts;
    for (const ArcKey& k : arcs) {
        verts.insert(k.tail);
        verts.insert(k.head);
    }
    std::set<PartyId> seen{arcs.front().tail};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const ArcKey& k : arcs) {
            bool t = seen.count(k.tail), h = seen.count(k.head);
            if (t != h) {
                seen.insert(t ? k.head : k.tail);
                grew = true;
            }
        }
    }
    return seen.size() == verts.size();
}

}  // namespace

ValidationReport validate_swap_values(const SwapDigraph& g, std::size_t max_arcs) {
    ValidationReport rep;
    rep.participation_ok = true;
    for (PartyId v : g.parties()) {
        if (!(entering_value(g, v) > leaving_value(g, v))) {
            rep.participation_ok = false;
            rep.participation_witness = v;
            break;
        }
    }
    if (g.arcs().size() > max_arcs) {
        rep.subswap_checked = false;  // explicit "check skipped"
        return rep;
    }
    rep.subswap_checked = true;
    rep.subswap_ok = true;

    const auto& arcs = g.arcs();
    const std::size_t m = arcs.size();
    auto benefit_in = [&](const std::vector<ArcKey>& sub, PartyId v) {
        Rat b{0};
        for (const ArcKey& k : sub) {
            const Arc& a = g.arc(k);
            if (a.head == v) b += a.value_to_head;
            if (a.tail == v) b -= a.value_to_tail;
        }
        return b;
    };
    std::vector<Rat> full_benefit(g.n() + 1, Rat{0});
    for (PartyId v : g.parties())
        full_benefit[v.index] = entering_value(g, v) - leaving_value(g, v);

    for (std::size_t amask = 1; amask < (std::size_t{1} << m); ++amask) {
        std::vector<ArcKey> sub;
        for (std::size_t i = 0; i < m; ++i)
            if (amask & (std::size_t{1} << i)) sub.push_back(arcs[i].key());
        if (sub.size() == m) continue;  // D' = D never gives a strict gain
        if (!weakly_connected(g, sub)) continue;
        std::vector<PartyId> verts;
        {
            std::set<PartyId> vs;
            for (const ArcKey& k : sub) {
                vs.insert(k.tail);
                vs.insert(k.head);
            }
            verts.assign(vs.begin(), vs.end());
        }
        std::vector<Rat> sub_benefit;
        sub_benefit.reserve(verts.size());
        for (PartyId v : verts) sub_benefit.push_back(benefit_in(sub, v));

        const std::size_t nv = verts.size();
        for (std::size_t cmask = 1; cmask < (std::size_t{1} << nv); ++cmask) {
            Rat coalition_gain{0};
            bool outsiders_ok = true;
            for (std::size_t i = 0; i < nv && outsiders_ok; ++i) {
                Rat diff = sub_benefit[i] - full_benefit[verts[i].index];
                if (cmask & (std::size_t{1} << i))
                    coalition_gain += diff;
                else if (diff < Rat{0})
                    outsiders_ok = false;
            }
            if (outsiders_ok && coalition_gain > Rat{0}) {
                rep.subswap_ok = false;
                SubswapWitness w;
                w.subgraph_arcs = sub;
                for (std::size_t i = 0; i < nv; ++i)
                    if (cmask & (std::size_t{1} << i)) w.coalition.push_back(verts[i]);
                rep.subswap_witness = std::move(w);
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace xswap
