#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "xswap/checker.hpp"
#include "xswap/metrics.hpp"

namespace fs = std::filesystem;
using namespace xswap;

namespace {

struct CommonFlags {
    std::string latency;
    std::optional<std::uint64_t> seed;
    std::string payoff;
    std::size_t coalitions = 1;
    std::string out_dir = "./out";
};

void apply_overrides(ScenarioSpec& spec, const CommonFlags& f) {
    if (!f.latency.empty()) spec.sim.latency = parse_latency(f.latency);
    if (f.seed) spec.sim.seed = *f.seed;
    if (!f.payoff.empty()) spec.payoff_model = parse_payoff_model(f.payoff);
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

std::string outcome_table(const ScenarioSpec& spec, const RunResult& rr) {
    std::ostringstream os;
    os << "scenario\t" << spec.name << "\n";
    os << "leaders\t";
    for (std::size_t i = 0; i < rr.leaders.leaders.size(); ++i)
        os << (i ? "," : "") << rr.leaders.leaders[i].index;
    os << "\ndiam\t" << rr.diam << "\nquiescent\t" << rr.outcome.quiescent << "\n";
    for (const auto& [arc, entry] : rr.final_ledger)
        os << "arc\t" << arc.str() << "\t" << to_string(entry.contract.state())
           << "\tpublished=" << entry.published_at << "\tresolved=" << entry.resolved_at
           << "\n";
    for (PartyId p : spec.graph.parties()) {
        Payoff pay = payoff(p, rr.outcome, spec.graph, spec.payoff_model);
        os << "party\t" << p.index << "\t" << to_string(classify(p, rr.outcome, spec.graph))
           << "\tpayoff=" << pay.str() << "\tstrategy=" << spec.strategy_of(p).name()
           << "\n";
    }
    return os.str();
}

// Per-run checks behind the exit code: quiescence, conforming-party
// obligations, and the verification-op bound on every successful trigger.
bool run_checks(const ScenarioSpec& spec, const RunResult& rr, std::ostream& diag) {
    bool ok = true;
    if (!rr.outcome.quiescent) {
        diag << "FAIL " << spec.name << ": run hit the horizon without quiescing\n";
        ok = false;
    }
    for (PartyId p : rr.outcome.conforming) {
        if (classify(p, rr.outcome, spec.graph) == OutcomeClass::UnderWater) {
            diag << "FAIL " << spec.name << ": conforming party " << p.index
                 << " ended UNDER_WATER\n";
            ok = false;
        }
        for (const ArcKey& a : spec.graph.leaving(p)) {
            if (rr.outcome.triggered(a)) continue;
            auto it = rr.outcome.final_state.find(a);
            if (it != rr.outcome.final_state.end() &&
                it->second != ContractState::Refunded) {
                diag << "FAIL " << spec.name << ": leaving arc " << a.str()
                     << " of conforming party " << p.index << " not refunded\n";
                ok = false;
            }
        }
    }
    ComplexityReport rep = measure(rr.trace, rr.final_ledger);
    std::size_t k = rr.leaders.size(), n = spec.graph.n();
    if (rep.max_verify_ops > 0 &&
        (rep.max_hash_checks != k || rep.max_sig_checks > n)) {
        diag << "FAIL " << spec.name << ": verify-op bound violated ("
             << rep.max_hash_checks << " hash, " << rep.max_sig_checks << " sig)\n";
        ok = false;
    }
    return ok;
}

int cmd_run(const std::string& path, const CommonFlags& flags) {
    ScenarioSpec spec = load_scenario(path);
    apply_overrides(spec, flags);
    auto crypto = make_backend(spec.backend);
    RunResult rr = run_scenario(spec, *crypto);

    fs::create_directories(flags.out_dir);
    fs::path out(flags.out_dir);
    write_file(out / (spec.name + ".trace.txt"), rr.trace.dump());
    write_file(out / (spec.name + ".outcome.txt"), outcome_table(spec, rr));
    ComplexityReport rep = measure(rr.trace, rr.final_ledger);
    Baselines base = baselines(spec.graph, rr.leaders.size());
    write_file(out / (spec.name + ".report.txt"),
               rep.summary() + "\n" + base.summary() + "\n");

    bool ok = run_checks(spec, rr, std::cerr);
    std::cout << outcome_table(spec, rr);
    std::cout << rep.summary() << "\n" << base.summary() << "\n";
    std::cout << (ok ? "PASS" : "FAIL") << " " << spec.name << "\n";
    return ok ? 0 : 1;
}

int cmd_sweep(const std::string& dir, const CommonFlags& flags) {
    std::vector<ScenarioSpec> corpus;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "no .json scenario files in " << dir << "\n";
        return 2;
    }
    for (const fs::path& f : files) {
        ScenarioSpec spec = load_scenario(f);
        apply_overrides(spec, flags);
        corpus.push_back(std::move(spec));
    }
    auto crypto = make_backend(corpus.front().backend);

    bool ok = true;
    SweepVerdict uni = check_uniformity(corpus, *crypto);
    std::cout << "uniformity: " << uni.summary() << "\n";
    ok = ok && uni.pass;

    for (const ScenarioSpec& spec : corpus) {
        for (PayoffModel m : {PayoffModel::Plain, PayoffModel::Herlihy}) {
            SweepVerdict eq = check_equilibrium(spec, m, flags.coalitions, *crypto);
            std::cout << "equilibrium[" << spec.name << "," << to_string(m)
                      << "]: " << eq.summary() << "\n";
            ok = ok && eq.pass && !eq.partial;
        }
        RunResult rr = run_scenario(spec, *crypto);
        ComplexityReport rep = measure(rr.trace, rr.final_ledger);
        std::cout << "metrics[" << spec.name << "]: " << rep.summary() << " | "
                  << baselines(spec.graph, rr.leaders.size()).summary() << "\n";
    }
    std::cout << (ok ? "PASS" : "FAIL") << " sweep over " << files.size()
              << " scenarios\n";
    return ok ? 0 : 1;
}

int cmd_corpus(const std::string& dir) {
    fs::create_directories(dir);
    for (const ScenarioSpec& spec : default_corpus())
        save_scenario(spec, fs::path(dir) / (spec.name + ".json"));
    std::cout << "wrote " << default_corpus().size() << " scenarios to " << dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swapsim: cross-chain swap protocol simulator"};
    app.require_subcommand(1);
    CommonFlags flags;

    std::string scenario_path, corpus_dir, out_corpus_dir;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--latency", flags.latency, "latency policy: max|unit|seeded");
        cmd->add_option("--seed", flags.seed, "run seed");
        cmd->add_option("--payoff", flags.payoff, "payoff model: plain|herlihy");
        cmd->add_option("--coalitions", flags.coalitions, "max coalition size")
            ->default_val(1);
        cmd->add_option("--out", flags.out_dir, "output directory")->default_val("./out");
    };

    CLI::App* run = app.add_subcommand("run", "run one scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "uniformity/equilibrium/metrics sweep");
    sweep->add_option("corpus", corpus_dir, "directory of scenario JSON files")
        ->required();
    add_common(sweep);

    CLI::App* corpus = app.add_subcommand("corpus", "write the default corpus");
    corpus->add_option("dir", out_corpus_dir, "target directory")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return cmd_run(scenario_path, flags);
        if (sweep->parsed()) return cmd_sweep(corpus_dir, flags);
        return cmd_corpus(out_corpus_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
