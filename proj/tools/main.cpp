#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sotest/errors.hpp"
#include "sotest/report.hpp"

using namespace sotest;

namespace {

bool any_detection(const ResultFile& f) {
    for (const auto& s : f.sequences)
        if (s.gray_steps > 0 || s.black_steps > 0 || s.smoke) return true;
    return false;
}

struct Options {
    std::uint64_t seed = 1;
    std::string mode = "online";
    int suites = -1;      // -1 = keep config value
    int sequences = -1;
    std::string fault;    // empty = no fault
    std::string algorithm = "psopp";
    std::string config_path;
    std::string in_path;
    std::string out_path;
    bool fail_on_detect = false;
};

CampaignConfig load_config(const Options& o) {
    CampaignConfig cc = o.config_path.empty() ? CampaignConfig{} : load_campaign_config(o.config_path);
    if (o.suites >= 0) cc.suites = o.suites;
    if (o.sequences >= 0) cc.model.sequences_per_suite = o.sequences;
    return cc;
}

std::optional<FaultId> parse_fault(const Options& o) {
    if (o.fault.empty()) return std::nullopt;
    return fault_from_string(o.fault);
}

Algorithm pick_algorithm(const Options& o, std::optional<FaultId> fault) {
    if (fault) return algorithm_of(*fault);
    return algorithm_from_string(o.algorithm);
}

int cmd_generate(const Options& o) {
    CampaignConfig cc = load_config(o);
    auto fault = parse_fault(o);
    Algorithm alg = pick_algorithm(o, fault);
    auto suites = make_suites(cc, alg, fault, o.seed, cc.suites);
    SuiteFileMeta meta{o.seed, alg, fault, static_cast<int>(suites.size())};
    std::string out = o.out_path.empty() ? "suites.jsonl" : o.out_path;
    write_suites(out, meta, suites);
    std::cout << "wrote " << suites.size() << " suites to " << out << "\n";
    return 0;
}

int cmd_execute(const Options& o) {
    CampaignConfig cc = load_config(o);
    auto fault = parse_fault(o);

    std::vector<TestSuite> suites;
    ResultHeader header;
    header.mode = suite_mode_from_string(o.mode);
    if (header.mode == SuiteMode::offline) {
        if (o.in_path.empty()) throw ConfigError("offline mode needs --in <suite file>");
        SuiteFileMeta meta;
        suites = read_suites(o.in_path, &meta);
        if (fault && meta.fault && *fault != *meta.fault)
            throw ConfigError("--fault disagrees with the suite file");
        if (!fault) fault = meta.fault;
        header.seed = meta.seed;
        header.algorithm = meta.algorithm;
    } else {
        Algorithm alg = pick_algorithm(o, fault);
        suites = make_suites(cc, alg, fault, o.seed, cc.suites);
        header.seed = o.seed;
        header.algorithm = alg;
    }
    header.fault = fault;

    std::string out = o.out_path.empty() ? "results.jsonl" : o.out_path;
    ResultWriter writer(out, header);
    ResultFile results = execute_suites(cc, suites, fault, header, &writer);
    MetricsRow row = aggregate(results, fault ? to_string(*fault) : "baseline");
    std::cout << format_metrics({row});
    std::cout << "wrote " << out << "\n";
    if (o.fail_on_detect && any_detection(results)) return 2;
    return 0;
}

int cmd_report(const Options& o) {
    if (o.in_path.empty()) throw ConfigError("report needs --in <result file>");
    ResultFile f = read_results(o.in_path);
    MetricsRow row = aggregate(f, f.header.fault ? to_string(*f.header.fault) : "baseline");
    std::cout << format_metrics({row});
    return 0;
}

int cmd_all(const Options& o) {
    CampaignConfig cc = load_config(o);
    auto outcomes = run_campaign(cc, o.seed, o.out_path, &std::cout);
    std::vector<MetricsRow> rows;
    bool detected = false;
    for (const auto& oc : outcomes) {
        rows.push_back(oc.row);
        detected = detected || any_detection(oc.results);
    }
    std::cout << "\n" << format_metrics(rows);
    if (o.fail_on_detect && detected) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"test bench for self-organizing partitioning algorithms"};
    app.require_subcommand(1);

    Options o;
    auto add_common = [&o](CLI::App* c) {
        c->add_option("--seed", o.seed, "master seed");
        c->add_option("--mode", o.mode, "online or offline")
            ->check(CLI::IsMember({"online", "offline"}));
        c->add_option("--suites", o.suites, "number of test suites");
        c->add_option("--sequences", o.sequences, "sequences per suite");
        c->add_option("--fault", o.fault, "fault to inject (e.g. psopp-f1)");
        c->add_option("--algorithm", o.algorithm, "spada or psopp (baseline runs)")
            ->check(CLI::IsMember({"spada", "psopp"}));
        c->add_option("--config", o.config_path, "campaign config file (json)");
        c->add_option("--in", o.in_path, "input file (suites for execute, results for report)");
        c->add_option("--out", o.out_path, "output file (directory for `all`)");
        c->add_flag("--fail-on-detect", o.fail_on_detect,
                    "exit nonzero when any failure is detected");
    };

    CLI::App* generate = app.add_subcommand("generate", "sample test suites and write them");
    CLI::App* execute = app.add_subcommand("execute", "run suites against the configured target");
    CLI::App* report = app.add_subcommand("report", "aggregate a result file");
    CLI::App* all = app.add_subcommand("all", "generate, execute and report the full campaign");
    for (CLI::App* c : {generate, execute, report, all}) add_common(c);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(o);
        if (execute->parsed()) return cmd_execute(o);
        if (report->parsed()) return cmd_report(o);
        if (all->parsed()) return cmd_all(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
