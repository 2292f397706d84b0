#pragma once

#include "xswap/sim.hpp"

namespace xswap {

struct ComplexityReport {
    std::size_t contracts = 0;
    std::size_t total_space_bits = 0;
    std::size_t max_contract_bits = 0;
    std::size_t max_hash_checks = 0;  // over successful triggers only
    std::size_t max_sig_checks = 0;
    std::size_t max_verify_ops = 0;   // hash + sig inside one successful trigger
    Tick completion_ticks = -1;       // last trigger effect time, -1 if none

    std::string summary() const;
};

// Pure post-processing: space from the final ledger, verification counts and
// completion from the trace records.
ComplexityReport measure(const EventTrace& trace, const Ledger& ledger);

// Asymptotic-order comparisons only, instantiated for g: the counts carry no
// primitive-size constants.
struct Baselines {
    std::size_t n = 0;
    std::size_t arcs = 0;
    std::size_t leaders = 0;
    std::size_t herlihy_space = 0;  // |A|^2
    std::size_t herlihy_local = 0;  // |V|*|L|
    std::size_t ours_space = 0;     // |A|*|V|
    std::size_t ours_local = 0;     // |V|

    std::string summary() const;
};

Baselines baselines(const SwapDigraph& g, std::size_t leader_count);

}  // namespace xswap
