#pragma once

#include "xswap/scenario.hpp"

namespace xswap {

enum class OutcomeClass { Deal, NoDeal, FreeRide, Discount, UnderWater };

const char* to_string(OutcomeClass c);

// Computed solely from the triggered/untriggered partition of p's entering
// and leaving arcs; exactly one class holds for every (party, outcome).
OutcomeClass classify(PartyId p, const RunOutcome& out, const SwapDigraph& g);

struct UniformityWitness {
    std::string scenario;  // replayable scenario JSON
    PartyId party;
    std::string arc;  // offending arc, empty when the whole run misbehaved
    std::string detail;
};

struct EquilibriumWitness {
    std::string scenario;  // replayable scenario JSON, coalition included
    std::vector<PartyId> coalition;
    std::vector<std::string> strategies;
    PayoffModel model = PayoffModel::Plain;
    Payoff conforming_total;
    Payoff deviating_total;
};

struct SweepVerdict {
    bool pass = true;
    bool partial = false;  // search space truncated; note says what was covered
    std::size_t runs = 0;
    std::vector<UniformityWitness> uniformity_witnesses;
    std::vector<EquilibriumWitness> equilibrium_witnesses;
    std::string note;

    std::string summary() const;
};

// Clause (b) obligations of one finished run; appends witnesses and clears
// verdict.pass on violation. Public so negative-control tests can feed it
// hand-crafted outcomes.
void check_run_uniformity(const ScenarioSpec& spec, const RunResult& rr,
                          SweepVerdict& verdict);

// Clause (a): the all-conforming run triggers every arc and goes quiescent.
// Clause (b): for every single-party deviation from the catalog, no conforming
// party ends some-entering-untriggered with a triggered leaving arc, and every
// untriggered leaving arc of a conforming party is Refunded.
SweepVerdict check_uniformity(const std::vector<ScenarioSpec>& corpus,
                              const CryptoBackend& crypto);

// Enumerates every coalition up to the size limit and every joint strategy
// from the catalog (plus Conforming per member, all-conforming excluded), with
// instant intra-coalition secret/signature sharing. Passes iff no run gives
// the coalition a total payoff strictly above its all-conforming total. The
// verdict means "no counterexample found in the catalog", nothing stronger.
SweepVerdict check_equilibrium(const ScenarioSpec& base, PayoffModel model,
                               std::size_t coalition_size_limit,
                               const CryptoBackend& crypto,
                               std::size_t max_runs = 1000000);

}  // namespace xswap
