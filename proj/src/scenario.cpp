#include "xswap/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace xswap {

using nlohmann::json;

void ScenarioSpec::validate() const {
    sim.validate();
    if (graph.n() < 2) throw std::invalid_argument("scenario needs at least two parties");
    if (auto pair = find_unreachable_pair(graph)) {
        throw std::invalid_argument(
            "graph is not strongly connected: party " +
            std::to_string(pair->second.index) + " is unreachable from party " +
            std::to_string(pair->first.index));
    }
    for (PartyId v : graph.parties()) {
        if (graph.entering(v).empty() || graph.leaving(v).empty())
            throw std::invalid_argument("party " + std::to_string(v.index) +
                                        " lacks an entering or leaving arc");
    }
    if (leader_override) {
        std::set<PartyId> s(leader_override->begin(), leader_override->end());
        if (s.size() != leader_override->size())
            throw std::invalid_argument("duplicate party in leader override");
        if (!is_acyclic_without(graph, s))
            throw std::invalid_argument("leader override is not a feedback vertex set");
    }
    std::set<PartyId> seen;
    for (const CoalitionSpec& c : coalitions) {
        if (c.members.empty()) throw std::invalid_argument("empty coalition");
        for (PartyId m : c.members)
            if (!seen.insert(m).second)
                throw std::invalid_argument("party " + std::to_string(m.index) +
                                            " appears in two coalitions");
    }
}

DeviationSpec ScenarioSpec::strategy_of(PartyId p) const {
    for (const CoalitionSpec& c : coalitions) {
        auto it = c.strategies.find(p);
        if (it != c.strategies.end()) return it->second;
    }
    auto it = strategies.find(p);
    return it == strategies.end() ? DeviationSpec{} : it->second;
}

bool ScenarioSpec::in_coalition(PartyId p) const {
    for (const CoalitionSpec& c : coalitions)
        if (std::find(c.members.begin(), c.members.end(), p) != c.members.end())
            return true;
    return false;
}

namespace {

Phase parse_phase(const std::string& s) {
    if (s == "P1") return Phase::P1;
    if (s == "P2") return Phase::P2;
    if (s == "P3") return Phase::P3;
    if (s == "P4") return Phase::P4;
    throw std::invalid_argument("bad phase: " + s);
}

ArcKey parse_arc_key(const std::string& s) {
    auto pos = s.find("->");
    if (pos == std::string::npos) throw std::invalid_argument("bad arc key: " + s);
    return ArcKey{PartyId{static_cast<std::uint32_t>(std::stoul(s.substr(0, pos)))},
                  PartyId{static_cast<std::uint32_t>(std::stoul(s.substr(pos + 2)))}};
}

DeviationSpec deviation_from_json(const json& j) {
    DeviationSpec d;
    std::string name = j.at("name").get<std::string>();
    using K = DeviationSpec::Kind;
    if (name == "conforming") d.kind = K::Conforming;
    else if (name == "silent_crash") d.kind = K::SilentCrash;
    else if (name == "fake_hashlock") d.kind = K::FakeHashlock;
    else if (name == "fake_public_key") d.kind = K::FakePublicKey;
    else if (name == "withhold_secret") d.kind = K::WithholdSecret;
    else if (name == "withhold_publish") d.kind = K::WithholdPublish;
    else if (name == "no_trigger") d.kind = K::NoTrigger;
    else if (name == "eager_timeout") d.kind = K::EagerTimeout;
    else if (name == "forward_only") d.kind = K::ForwardOnlySome;
    else if (name == "reveal_secret_early") d.kind = K::RevealSecretEarly;
    else throw std::invalid_argument("unknown strategy name: " + name);
    if (j.contains("phase")) d.crash_phase = parse_phase(j.at("phase").get<std::string>());
    if (j.contains("arcs"))
        for (const auto& a : j.at("arcs")) d.arcs.insert(parse_arc_key(a.get<std::string>()));
    return d;
}

json deviation_to_json(const DeviationSpec& d) {
    json j;
    using K = DeviationSpec::Kind;
    switch (d.kind) {
        case K::Conforming: j["name"] = "conforming"; break;
        case K::SilentCrash:
            j["name"] = "silent_crash";
            j["phase"] = to_string(d.crash_phase);
            break;
        case K::FakeHashlock: j["name"] = "fake_hashlock"; break;
        case K::FakePublicKey: j["name"] = "fake_public_key"; break;
        case K::WithholdSecret: j["name"] = "withhold_secret"; break;
        case K::WithholdPublish: j["name"] = "withhold_publish"; break;
        case K::NoTrigger: j["name"] = "no_trigger"; break;
        case K::EagerTimeout: j["name"] = "eager_timeout"; break;
        case K::ForwardOnlySome: j["name"] = "forward_only"; break;
        case K::RevealSecretEarly: j["name"] = "reveal_secret_early"; break;
    }
    if (d.kind == K::WithholdPublish || d.kind == K::ForwardOnlySome) {
        json arr = json::array();
        for (const ArcKey& a : d.arcs) arr.push_back(a.str());
        j["arcs"] = arr;
    }
    return j;
}

}  // namespace

ScenarioSpec scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario parse error: ") + e.what());
    }
    ScenarioSpec s;
    s.name = j.value("name", "unnamed");
    auto n = j.at("parties").get<std::uint32_t>();
    std::vector<Arc> arcs;
    for (const auto& ja : j.at("arcs")) {
        Arc a;
        a.tail = PartyId{ja.at("from").get<std::uint32_t>()};
        a.head = PartyId{ja.at("to").get<std::uint32_t>()};
        a.chain = ja.value("chain", "chain-" + a.key().str());
        a.value_to_head = parse_rat(ja.value("value_to_head", "2"));
        a.value_to_tail = parse_rat(ja.value("value_to_tail", "1"));
        arcs.push_back(a);
    }
    s.graph = SwapDigraph(n, std::move(arcs));
    if (j.contains("leaders")) {
        std::vector<PartyId> ls;
        for (const auto& l : j.at("leaders")) ls.push_back(PartyId{l.get<std::uint32_t>()});
        s.leader_override = ls;
    }
    s.sim.delta = j.value("delta", Tick{1000});
    s.sim.epsilon = j.value("epsilon", Tick{10});
    s.sim.seed = j.value("seed", std::uint64_t{0});
    s.sim.latency = parse_latency(j.value("latency", "max"));
    s.payoff_model = parse_payoff_model(j.value("payoff_model", "plain"));
    s.backend = j.value("backend", "test");
    if (j.contains("strategies"))
        for (auto it = j.at("strategies").begin(); it != j.at("strategies").end(); ++it)
            s.strategies[PartyId{static_cast<std::uint32_t>(std::stoul(it.key()))}] =
                deviation_from_json(it.value());
    if (j.contains("coalitions")) {
        for (const auto& jc : j.at("coalitions")) {
            CoalitionSpec c;
            for (const auto& m : jc.at("members"))
                c.members.push_back(PartyId{m.get<std::uint32_t>()});
            if (jc.contains("strategies"))
                for (auto it = jc.at("strategies").begin(); it != jc.at("strategies").end();
                     ++it)
                    c.strategies[PartyId{static_cast<std::uint32_t>(
                        std::stoul(it.key()))}] = deviation_from_json(it.value());
            s.coalitions.push_back(std::move(c));
        }
    }
    s.validate();
    return s;
}

std::string scenario_to_json(const ScenarioSpec& s) {
    json j;
    j["name"] = s.name;
    j["parties"] = s.graph.n();
    json arcs = json::array();
    for (const Arc& a : s.graph.arcs()) {
        json ja;
        ja["from"] = a.tail.index;
        ja["to"] = a.head.index;
        ja["chain"] = a.chain;
        ja["value_to_head"] = rat_str(a.value_to_head);
        ja["value_to_tail"] = rat_str(a.value_to_tail);
        arcs.push_back(ja);
    }
    j["arcs"] = arcs;
    if (s.leader_override) {
        json ls = json::array();
        for (PartyId p : *s.leader_override) ls.push_back(p.index);
        j["leaders"] = ls;
    }
    j["delta"] = s.sim.delta;
    j["epsilon"] = s.sim.epsilon;
    j["seed"] = s.sim.seed;
    j["latency"] = to_string(s.sim.latency);
    j["payoff_model"] = to_string(s.payoff_model);
    j["backend"] = s.backend;
    if (!s.strategies.empty()) {
        json st;
        for (const auto& [p, d] : s.strategies)
            st[std::to_string(p.index)] = deviation_to_json(d);
        j["strategies"] = st;
    }
    if (!s.coalitions.empty()) {
        json cs = json::array();
        for (const CoalitionSpec& c : s.coalitions) {
            json jc;
            json ms = json::array();
            for (PartyId m : c.members) ms.push_back(m.index);
            jc["members"] = ms;
            json st;
            for (const auto& [p, d] : c.strategies)
                st[std::to_string(p.index)] = deviation_to_json(d);
            jc["strategies"] = st;
            cs.push_back(jc);
        }
        j["coalitions"] = cs;
    }
    return j.dump(2);
}

ScenarioSpec load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot read scenario file: " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return scenario_from_json(ss.str());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(file.string() + ": " + e.what());
    }
}

void save_scenario(const ScenarioSpec& s, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write scenario file: " + file.string());
    out << scenario_to_json(s) << '\n';
}

std::uint64_t secret_seed(std::uint64_t run_seed, PartyId p) {
    return run_seed * 0x100000001b3ULL + p.index * 2654435761ULL + 0x5ecULL;
}

std::uint64_t key_seed(std::uint64_t run_seed, PartyId p) {
    return run_seed * 0x100000001b3ULL + p.index * 2654435761ULL + 0x4e7ULL;
}

RunResult run_scenario(const ScenarioSpec& spec, const CryptoBackend& crypto) {
    spec.validate();
    RunResult rr;
    rr.sim = spec.sim;
    if (spec.leader_override) {
        rr.leaders.leaders = *spec.leader_override;
    } else {
        rr.leaders = feedback_vertex_set(spec.graph);
    }
    rr.diam = diameter(spec.graph);

    ProtocolContext ctx;
    ctx.graph = &spec.graph;
    ctx.leaders = rr.leaders;
    ctx.diam = rr.diam;
    ctx.start = 0;
    ctx.delta = spec.sim.delta;
    ctx.epsilon = spec.sim.epsilon;
    ctx.crypto = &crypto;

    std::vector<std::unique_ptr<CoalitionPool>> pools;
    std::map<PartyId, CoalitionPool*> pool_of;
    for (const CoalitionSpec& c : spec.coalitions) {
        pools.push_back(std::make_unique<CoalitionPool>());
        for (PartyId m : c.members) pool_of[m] = pools.back().get();
    }

    Simulator sim(spec.sim, crypto);
    std::vector<std::unique_ptr<PartyActor>> actors;
    for (PartyId p : spec.graph.parties()) {
        KeyPair keys = crypto.gen_keypair(key_seed(spec.sim.seed, p));
        std::optional<Secret> secret;
        if (rr.leaders.contains(p))
            secret = crypto.gen_secret(secret_seed(spec.sim.seed, p));
        auto it = pool_of.find(p);
        actors.push_back(std::make_unique<PartyActor>(
            ctx, p, std::move(keys), secret, spec.strategy_of(p),
            it == pool_of.end() ? nullptr : it->second));
        sim.add_actor(p, actors.back().get());
    }

    rr.trace = sim.run(ctx.horizon());
    rr.final_ledger = sim.ledger();
    rr.outcome.quiescent = !rr.trace.horizon_reached;
    for (const auto& [arc, entry] : rr.final_ledger) {
        rr.outcome.final_state[arc] = entry.contract.state();
        if (entry.resolved_at >= 0) rr.outcome.resolved_at[arc] = entry.resolved_at;
    }
    for (PartyId p : spec.graph.parties())
        if (spec.strategy_of(p).conforming() && !spec.in_coalition(p))
            rr.outcome.conforming.insert(p);
    return rr;
}

SwapDigraph three_cycle_graph() {
    std::vector<Arc> arcs = {
        {PartyId{1}, PartyId{2}, "copyright", Rat{1}, Rat{2}},
        {PartyId{2}, PartyId{3}, "altcoin", Rat{1}, Rat{2}},
        {PartyId{3}, PartyId{1}, "bitcoin", Rat{1}, Rat{2}},
    };
    return SwapDigraph(3, std::move(arcs));
}

SwapDigraph double_cycle_graph() {
    std::vector<Arc> arcs;
    for (std::uint32_t u = 1; u <= 3; ++u)
        for (std::uint32_t v = 1; v <= 3; ++v)
            if (u != v)
                arcs.push_back({PartyId{u}, PartyId{v},
                                "chain-" + std::to_string(u) + std::to_string(v), Rat{1},
                                Rat{2}});
    return SwapDigraph(3, std::move(arcs));
}

SwapDigraph four_party_two_leader_graph() {
    // Parties 2 and 4 each have two leaving arcs; halved tail values keep
    // every party's entering total strictly above its leaving total.
    std::vector<Arc> arcs = {
        {PartyId{1}, PartyId{2}, "c12", Rat{1}, Rat{2}},
        {PartyId{2}, PartyId{1}, "c21", Rat{1, 2}, Rat{2}},
        {PartyId{3}, PartyId{4}, "c34", Rat{1}, Rat{2}},
        {PartyId{4}, PartyId{3}, "c43", Rat{1, 2}, Rat{2}},
        {PartyId{2}, PartyId{3}, "c23", Rat{1, 2}, Rat{2}},
        {PartyId{4}, PartyId{1}, "c41", Rat{1, 2}, Rat{2}},
    };
    return SwapDigraph(4, std::move(arcs));
}

ScenarioSpec make_scenario(std::string name, SwapDigraph g) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.graph = std::move(g);
    return s;
}

namespace {

// Canonical form of an arc set under vertex relabeling, for isomorphism dedup.
std::set<std::pair<std::uint32_t, std::uint32_t>> canonical_arcset(
    std::uint32_t n, const std::set<std::pair<std::uint32_t, std::uint32_t>>& arcs) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 1u);
    std::set<std::pair<std::uint32_t, std::uint32_t>> best = arcs;
    do {
        std::set<std::pair<std::uint32_t, std::uint32_t>> mapped;
        for (auto [u, v] : arcs) mapped.emplace(perm[u - 1], perm[v - 1]);
        if (mapped < best) best = mapped;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

std::vector<ScenarioSpec> default_corpus() {
    std::vector<ScenarioSpec> out;
    // All strongly connected digraphs on n in {2, 3}, up to isomorphism.
    for (std::uint32_t n : {2u, 3u}) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> all_pairs;
        for (std::uint32_t u = 1; u <= n; ++u)
            for (std::uint32_t v = 1; v <= n; ++v)
                if (u != v) all_pairs.emplace_back(u, v);
        std::set<std::set<std::pair<std::uint32_t, std::uint32_t>>> seen;
        for (std::uint32_t mask = 0; mask < (1u << all_pairs.size()); ++mask) {
            std::set<std::pair<std::uint32_t, std::uint32_t>> arcset;
            for (std::size_t i = 0; i < all_pairs.size(); ++i)
                if (mask & (1u << i)) arcset.insert(all_pairs[i]);
            std::map<std::uint32_t, long long> outdeg;
            for (auto [u, v] : arcset) ++outdeg[u];
            std::vector<Arc> arcs;
            // value_to_tail = 1/outdeg keeps the participation condition
            // strict for every in/out degree profile.
            for (auto [u, v] : arcset)
                arcs.push_back({PartyId{u}, PartyId{v},
                                "chain-" + std::to_string(u) + std::to_string(v),
                                Rat{1, outdeg[u]}, Rat{2}});
            SwapDigraph g(n, std::move(arcs));
            if (!is_strongly_connected(g)) continue;
            auto canon = canonical_arcset(n, arcset);
            if (!seen.insert(canon).second) continue;
            out.push_back(make_scenario(
                "sc" + std::to_string(n) + "_" + std::to_string(out.size()), std::move(g)));
        }
    }
    out.push_back(make_scenario("three_cycle", three_cycle_graph()));
    out.push_back(make_scenario("double_cycle", double_cycle_graph()));
    out.push_back(make_scenario("four_party_two_leader", four_party_two_leader_graph()));
    return out;
}

}  // namespace xswap
