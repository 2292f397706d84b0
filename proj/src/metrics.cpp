#include "xswap/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace xswap {

std::string ComplexityReport::summary() const {
    std::ostringstream os;
    os << "contracts=" << contracts << " total_space_bits=" << total_space_bits
       << " max_contract_bits=" << max_contract_bits
       << " max_hash_checks=" << max_hash_checks << " max_sig_checks=" << max_sig_checks
       << " max_verify_ops=" << max_verify_ops << " completion_ticks=" << completion_ticks;
    return os.str();
}

ComplexityReport measure(const EventTrace& trace, const Ledger& ledger) {
    ComplexityReport r;
    for (const auto& [arc, entry] : ledger) {
        ++r.contracts;
        std::size_t bits = entry.contract.storage_bits();
        r.total_space_bits += bits;
        r.max_contract_bits = std::max(r.max_contract_bits, bits);
        if (entry.contract.state() == ContractState::Triggered)
            r.completion_ticks = std::max(r.completion_ticks, entry.resolved_at);
    }
    for (const TraceRecord& rec : trace.records) {
        if (rec.action != "TRANSFER" || rec.result.rfind("Triggered", 0) != 0) continue;
        r.max_hash_checks = std::max(r.max_hash_checks, rec.hash_checks);
        r.max_sig_checks = std::max(r.max_sig_checks, rec.sig_checks);
        r.max_verify_ops = std::max(r.max_verify_ops, rec.hash_checks + rec.sig_checks);
    }
    return r;
}

std::string Baselines::summary() const {
    std::ostringstream os;
    os << "n=" << n << " |A|=" << arcs << " |L|=" << leaders
       << " space ours(|A|*|V|)=" << ours_space << " herlihy(|A|^2)=" << herlihy_space
       << " local ours(|V|)=" << ours_local << " herlihy(|V|*|L|)=" << herlihy_local;
    return os.str();
}

Baselines baselines(const SwapDigraph& g, std::size_t leader_count) {
    Baselines b;
    b.n = g.n();
    b.arcs = g.arcs().size();
    b.leaders = leader_count;
    b.herlihy_space = b.arcs * b.arcs;
    b.herlihy_local = b.n * b.leaders;
    b.ours_space = b.arcs * b.n;
    b.ours_local = b.n;
    return b;
}

}  // namespace xswap
