#pragma once

#include <filesystem>

#include "xswap/party.hpp"

namespace xswap {

struct CoalitionSpec {
    std::vector<PartyId> members;
    std::map<PartyId, DeviationSpec> strategies;  // default Conforming
};

struct ScenarioSpec {
    std::string name;
    SwapDigraph graph;
    std::optional<std::vector<PartyId>> leader_override;
    SimConfig sim;
    PayoffModel payoff_model = PayoffModel::Plain;
    std::string backend = "test";
    std::map<PartyId, DeviationSpec> strategies;  // default Conforming
    std::vector<CoalitionSpec> coalitions;

    // Throws std::invalid_argument with a line-anchorable diagnostic; the
    // connectivity failure names an unreachable pair.
    void validate() const;

    DeviationSpec strategy_of(PartyId p) const;
    bool in_coalition(PartyId p) const;
};

ScenarioSpec scenario_from_json(const std::string& json_text);
ScenarioSpec load_scenario(const std::filesystem::path& file);
std::string scenario_to_json(const ScenarioSpec& s);
void save_scenario(const ScenarioSpec& s, const std::filesystem::path& file);

struct RunResult {
    EventTrace trace;
    RunOutcome outcome;
    Ledger final_ledger;
    LeaderSet leaders;
    std::uint32_t diam = 0;
    SimConfig sim;
};

// Wires graph, crypto, parties and the event loop together and runs to
// quiescence or the horizon.
RunResult run_scenario(const ScenarioSpec& spec, const CryptoBackend& crypto);

// Derived deterministic seeds, shared by the runner and tests.
std::uint64_t secret_seed(std::uint64_t run_seed, PartyId p);
std::uint64_t key_seed(std::uint64_t run_seed, PartyId p);

// The default verification corpus: every strongly connected digraph on
// n <= 3 parties up to isomorphism, the 3-cycle, the three-party
// double-cycle (all six arcs), and a 4-party two-leader graph. Uniform
// valuations: each arc worth 2 to its head, 1 to its tail.
std::vector<ScenarioSpec> default_corpus();

// The named corner graphs, also used directly by tests.
SwapDigraph three_cycle_graph();
SwapDigraph double_cycle_graph();
SwapDigraph four_party_two_leader_graph();

ScenarioSpec make_scenario(std::string name, SwapDigraph g);

}  // namespace xswap
