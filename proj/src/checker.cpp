#include "xswap/checker.hpp"

#include <sstream>

namespace xswap {

const char* to_string(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::Deal: return "DEAL";
        case OutcomeClass::NoDeal: return "NO_DEAL";
        case OutcomeClass::FreeRide: return "FREE_RIDE";
        case OutcomeClass::Discount: return "DISCOUNT";
        case OutcomeClass::UnderWater: return "UNDER_WATER";
    }
    return "?";
}

OutcomeClass classify(PartyId p, const RunOutcome& out, const SwapDigraph& g) {
    std::size_t ent = 0, ent_trig = 0, leav = 0, leav_trig = 0;
    for (const ArcKey& a : g.entering(p)) {
        ++ent;
        if (out.triggered(a)) ++ent_trig;
    }
    for (const ArcKey& a : g.leaving(p)) {
        ++leav;
        if (out.triggered(a)) ++leav_trig;
    }
    if (ent_trig == ent && leav_trig == leav) return OutcomeClass::Deal;
    if (ent_trig == 0 && leav_trig == 0) return OutcomeClass::NoDeal;
    if (leav_trig == 0) return OutcomeClass::FreeRide;
    if (ent_trig == ent) return OutcomeClass::Discount;
    return OutcomeClass::UnderWater;
}

std::string SweepVerdict::summary() const {
    std::ostringstream os;
    os << (pass ? "PASS" : "FAIL");
    if (partial) os << " (partial)";
    os << " runs=" << runs;
    for (const UniformityWitness& w : uniformity_witnesses)
        os << "\n  uniformity witness: party=" << w.party.index << " arc=" << w.arc
           << " " << w.detail;
    for (const EquilibriumWitness& w : equilibrium_witnesses) {
        os << "\n  equilibrium witness: coalition={";
        for (std::size_t i = 0; i < w.coalition.size(); ++i)
            os << (i ? "," : "") << w.coalition[i].index;
        os << "} strategies={";
        for (std::size_t i = 0; i < w.strategies.size(); ++i)
            os << (i ? "," : "") << w.strategies[i];
        os << "} model=" << to_string(w.model)
           << " conforming=" << w.conforming_total.str()
           << " deviating=" << w.deviating_total.str();
    }
    if (!note.empty()) os << "\n  " << note;
    return os.str();
}

// Conforming-party obligations in one finished run. The allowed classes
// follow from the refund rule: a conforming party may end DEAL, NO_DEAL,
// FREE_RIDE or DISCOUNT (a counterparty that refuses to trigger leaves a
// refunded leaving arc), never UNDER_WATER.
void check_run_uniformity(const ScenarioSpec& spec, const RunResult& rr,
                          SweepVerdict& verdict) {
    std::string replay = scenario_to_json(spec);
    if (!rr.outcome.quiescent) {
        verdict.pass = false;
        verdict.uniformity_witnesses.push_back(
            {replay, PartyId{0}, "", "run hit the horizon without quiescing"});
        return;
    }
    for (PartyId p : rr.outcome.conforming) {
        if (classify(p, rr.outcome, spec.graph) == OutcomeClass::UnderWater) {
            verdict.pass = false;
            verdict.uniformity_witnesses.push_back(
                {replay, p, "", "conforming party ended UNDER_WATER"});
        }
        for (const ArcKey& a : spec.graph.leaving(p)) {
            if (rr.outcome.triggered(a)) continue;
            // A never-published arc escrowed nothing; only a published and
            // untriggered contract must end Refunded.
            auto it = rr.outcome.final_state.find(a);
            if (it != rr.outcome.final_state.end() &&
                it->second != ContractState::Refunded) {
                verdict.pass = false;
                verdict.uniformity_witnesses.push_back(
                    {replay, p, a.str(), "untriggered leaving arc not Refunded"});
            }
        }
    }
}

SweepVerdict check_uniformity(const std::vector<ScenarioSpec>& corpus,
                              const CryptoBackend& crypto) {
    SweepVerdict verdict;
    for (const ScenarioSpec& base : corpus) {
        RunResult all_conf = run_scenario(base, crypto);
        ++verdict.runs;
        std::string replay = scenario_to_json(base);
        if (!all_conf.outcome.quiescent) {
            verdict.pass = false;
            verdict.uniformity_witnesses.push_back(
                {replay, PartyId{0}, "", "all-conforming run did not quiesce"});
        }
        for (const Arc& a : base.graph.arcs()) {
            if (!all_conf.outcome.triggered(a.key())) {
                verdict.pass = false;
                verdict.uniformity_witnesses.push_back(
                    {replay, a.tail, a.key().str(),
                     "arc untriggered in the all-conforming run"});
            }
        }
        LeaderSet leaders = all_conf.leaders;
        for (PartyId p : base.graph.parties()) {
            for (const DeviationSpec& dev :
                 deviation_catalog(base.graph, leaders, p)) {
                ScenarioSpec spec = base;
                spec.name = base.name + "/" + std::to_string(p.index) + ":" + dev.name();
                spec.strategies[p] = dev;
                RunResult rr = run_scenario(spec, crypto);
                ++verdict.runs;
                check_run_uniformity(spec, rr, verdict);
            }
        }
    }
    return verdict;
}

SweepVerdict check_equilibrium(const ScenarioSpec& base, PayoffModel model,
                               std::size_t coalition_size_limit,
                               const CryptoBackend& crypto, std::size_t max_runs) {
    SweepVerdict verdict;
    RunResult baseline = run_scenario(base, crypto);
    ++verdict.runs;
    std::map<PartyId, Payoff> base_payoff;
    for (PartyId p : base.graph.parties())
        base_payoff[p] = payoff(p, baseline.outcome, base.graph, model);

    auto parties = base.graph.parties();
    std::uint32_t n = base.graph.n();

    // Subsets by bitmask, sizes 1..limit.
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<PartyId> members;
        for (std::uint32_t i = 0; i < n; ++i)
            if (mask & (1u << i)) members.push_back(parties[i]);
        if (members.size() > coalition_size_limit) continue;

        std::vector<std::vector<DeviationSpec>> options;
        for (PartyId m : members) {
            auto opts = deviation_catalog(base.graph, baseline.leaders, m);
            opts.push_back(DeviationSpec{});  // Conforming member
            options.push_back(std::move(opts));
        }

        Payoff baseline_total;
        for (PartyId m : members) baseline_total += base_payoff.at(m);

        std::vector<std::size_t> idx(members.size(), 0);
        while (true) {
            bool all_conforming = true;
            for (std::size_t i = 0; i < members.size(); ++i)
                if (!options[i][idx[i]].conforming()) all_conforming = false;
            if (!all_conforming) {
                if (verdict.runs >= max_runs) {
                    verdict.partial = true;
                    verdict.note = "search truncated at " + std::to_string(max_runs) +
                                   " runs; coalitions up to the current mask covered";
                    return verdict;
                }
                ScenarioSpec spec = base;
                CoalitionSpec c;
                c.members = members;
                std::vector<std::string> strat_names;
                for (std::size_t i = 0; i < members.size(); ++i) {
                    c.strategies[members[i]] = options[i][idx[i]];
                    strat_names.push_back(options[i][idx[i]].name());
                }
                spec.coalitions.push_back(c);
                RunResult rr = run_scenario(spec, crypto);
                ++verdict.runs;
                if (rr.outcome.quiescent) {
                    Payoff total;
                    for (PartyId m : members)
                        total += payoff(m, rr.outcome, base.graph, model);
                    if (total > baseline_total) {
                        verdict.pass = false;
                        verdict.equilibrium_witnesses.push_back(
                            {scenario_to_json(spec), members, strat_names, model,
                             baseline_total, total});
                    }
                } else {
                    verdict.pass = false;
                    verdict.equilibrium_witnesses.push_back(
                        {scenario_to_json(spec), members, strat_names, model,
                         baseline_total, Payoff{}});
                    verdict.note = "a coalition run did not quiesce";
                }
            }
            std::size_t d = 0;
            while (d < idx.size() && ++idx[d] == options[d].size()) idx[d++] = 0;
            if (d == idx.size()) break;
        }
    }
    return verdict;
}

}  // namespace xswap
