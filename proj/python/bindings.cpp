// python face of the framework. Mirrors the CLI verbs: generate suite files,
// execute them (online or offline), aggregate result files, run the whole
// campaign. Configs cross the boundary as plain dicts via json text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "sotest/errors.hpp"
#include "sotest/report.hpp"

namespace py = pybind11;
using namespace sotest;

namespace {

py::object to_py(const jsn& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

jsn to_jsn(const py::object& obj) {
    auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return jsn::parse(text);
}

// config argument: None for defaults, a dict, or a path to a config file
CampaignConfig config_from_arg(const py::object& config, std::optional<int> suites,
                               std::optional<int> sequences) {
    CampaignConfig cc;
    if (py::isinstance<py::str>(config)) {
        cc = load_campaign_config(config.cast<std::string>());
    } else if (!config.is_none()) {
        cc = campaign_config_from_json(to_jsn(config));
    }
    if (suites) cc.suites = *suites;
    if (sequences) cc.model.sequences_per_suite = *sequences;
    return cc;
}

std::optional<FaultId> fault_from_arg(const std::optional<std::string>& fault) {
    if (!fault || fault->empty()) return std::nullopt;
    return fault_from_string(*fault);
}

jsn encode_row(const MetricsRow& r) {
    jsn j;
    j["label"] = r.label;
    j["algorithm"] = r.algorithm;
    j["fault"] = r.fault;
    j["suites"] = r.suites;
    j["sequences"] = r.sequences;
    j["agents_mean"] = r.agents_mean;
    j["groups_mean"] = r.groups_mean;
    j["ep_states_mean"] = r.ep_states_mean;
    j["ep_states_sd"] = r.ep_states_sd;
    j["ep_transitions_mean"] = r.ep_transitions_mean;
    j["ep_transitions_sd"] = r.ep_transitions_sd;
    j["cases_mean"] = r.cases_mean;
    j["cases_sd"] = r.cases_sd;
    j["applied_pct"] = r.applied_pct;
    j["state_coverage_pct"] = r.state_coverage_pct;
    j["transition_coverage_pct"] = r.transition_coverage_pct;
    j["reorgs_total"] = r.reorgs_total;
    j["activations_total"] = r.activations_total;
    j["activations_per_seq"] = r.activations_per_seq;
    j["masked_activation_pct"] = r.masked_activation_pct;
    j["seq_no_failure_pct"] = r.seq_no_failure_pct;
    j["seq_gray_pct"] = r.seq_gray_pct;
    j["seq_black_pct"] = r.seq_black_pct;
    j["seq_smoke_pct"] = r.seq_smoke_pct;
    j["gray_only_pct"] = r.gray_only_pct;
    j["first_fail_depth_mean"] = r.first_fail_depth_mean;
    j["first_gray_depth_mean"] = r.first_gray_depth_mean;
    j["first_black_depth_mean"] = r.first_black_depth_mean;
    j["containment_violations"] = r.containment_violations;
    return j;
}

bool any_detection(const ResultFile& f) {
    for (const auto& s : f.sequences)
        if (s.gray_steps > 0 || s.black_steps > 0 || s.smoke) return true;
    return false;
}

int py_generate(const std::string& out_path, std::uint64_t seed, const py::object& config,
                std::optional<int> suites, std::optional<int> sequences,
                std::optional<std::string> fault, const std::string& algorithm) {
    CampaignConfig cc = config_from_arg(config, suites, sequences);
    auto f = fault_from_arg(fault);
    Algorithm alg = f ? algorithm_of(*f) : algorithm_from_string(algorithm);
    auto made = make_suites(cc, alg, f, seed, cc.suites);
    write_suites(out_path, SuiteFileMeta{seed, alg, f, static_cast<int>(made.size())}, made);
    return static_cast<int>(made.size());
}

py::object py_execute(const std::string& out_path, const std::string& mode, std::uint64_t seed,
                    std::optional<std::string> in_path, const py::object& config,
                    std::optional<int> suites_n, std::optional<int> sequences,
                    std::optional<std::string> fault, const std::string& algorithm) {
    CampaignConfig cc = config_from_arg(config, suites_n, sequences);
    auto f = fault_from_arg(fault);

    std::vector<TestSuite> suites;
    ResultHeader header;
    header.mode = suite_mode_from_string(mode);
    if (header.mode == SuiteMode::offline) {
        if (!in_path || in_path->empty()) throw ConfigError("offline mode needs in_path");
        SuiteFileMeta meta;
        suites = read_suites(*in_path, &meta);
        if (f && meta.fault && *f != *meta.fault)
            throw ConfigError("fault disagrees with the suite file");
        if (!f) f = meta.fault;
        header.seed = meta.seed;
        header.algorithm = meta.algorithm;
    } else {
        Algorithm alg = f ? algorithm_of(*f) : algorithm_from_string(algorithm);
        suites = make_suites(cc, alg, f, seed, cc.suites);
        header.seed = seed;
        header.algorithm = alg;
    }
    header.fault = f;

    ResultFile results;
    if (out_path.empty()) {
        results = execute_suites(cc, suites, f, header, nullptr);
    } else {
        ResultWriter writer(out_path, header);
        results = execute_suites(cc, suites, f, header, &writer);
    }
    jsn row = encode_row(aggregate(results, f ? to_string(*f) : "baseline"));
    row["detected"] = any_detection(results);
    return to_py(row);
}

py::object py_report(const std::string& in_path) {
    ResultFile f = read_results(in_path);
    jsn row = encode_row(aggregate(f, f.header.fault ? to_string(*f.header.fault) : "baseline"));
    row["detected"] = any_detection(f);
    return to_py(row);
}

py::list py_campaign(const std::string& out_dir, std::uint64_t seed, const py::object& config) {
    CampaignConfig cc = config_from_arg(config, std::nullopt, std::nullopt);
    auto outcomes = run_campaign(cc, seed, out_dir, nullptr);
    py::list rows;
    for (const auto& oc : outcomes) {
        jsn row = encode_row(oc.row);
        row["detected"] = any_detection(oc.results);
        rows.append(to_py(row));
    }
    return rows;
}

std::string py_metrics_table(const std::vector<std::string>& paths) {
    std::vector<MetricsRow> rows;
    for (const auto& p : paths) {
        ResultFile f = read_results(p);
        rows.push_back(aggregate(f, f.header.fault ? to_string(*f.header.fault) : "baseline"));
    }
    return format_metrics(rows);
}

}  // namespace

PYBIND11_MODULE(_sotest, m) {
    m.doc() = "isolated model-based testing of self-organizing partitioning algorithms";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<GenerationError>(m, "GenerationError");
    py::register_exception<IoError>(m, "IoError");

    m.attr("SUITE_SCHEMA") = kSuiteSchema;
    m.attr("RESULT_SCHEMA") = kResultSchema;

    m.def("fault_names", [] {
        std::vector<std::string> names;
        for (FaultId f : all_faults()) names.push_back(to_string(f));
        return names;
    }, "names of the ten injectable faults");

    m.def("fault_algorithm", [](const std::string& name) {
        return to_string(algorithm_of(fault_from_string(name)));
    }, py::arg("fault"), "which algorithm a fault id targets");

    m.def("default_config", [] { return to_py(encode(CampaignConfig{})); },
          "the desk-scale campaign configuration as a dict");

    m.def("load_config", [](const std::string& path) { return to_py(encode(load_campaign_config(path))); },
          py::arg("path"), "read a config file (missing keys filled with defaults)");

    m.def("save_config", [](const std::string& path, const py::object& config) {
        save_campaign_config(path, config_from_arg(config, std::nullopt, std::nullopt));
    }, py::arg("path"), py::arg("config"), "write a config dict to a file");

    m.def("generate", &py_generate, py::arg("out_path"), py::arg("seed") = 1,
          py::arg("config") = py::none(), py::arg("suites") = py::none(),
          py::arg("sequences") = py::none(), py::arg("fault") = py::none(),
          py::arg("algorithm") = "psopp",
          "generate test suites and write them to a suite file; returns the count");

    m.def("execute", &py_execute, py::arg("out_path") = "", py::arg("mode") = "online",
          py::arg("seed") = 1, py::arg("in_path") = py::none(), py::arg("config") = py::none(),
          py::arg("suites") = py::none(), py::arg("sequences") = py::none(),
          py::arg("fault") = py::none(), py::arg("algorithm") = "psopp",
          "run suites (offline: from in_path; online: freshly generated) and "
          "return the aggregated metrics; out_path empty keeps results in memory");

    m.def("report", &py_report, py::arg("in_path"), "aggregate one result file into a metrics dict");

    m.def("run_campaign", &py_campaign, py::arg("out_dir") = "", py::arg("seed") = 1,
          py::arg("config") = py::none(),
          "run baselines plus every fault target; returns one metrics dict per target");

    m.def("metrics_table", &py_metrics_table, py::arg("paths"),
          "format result files as the two aligned summary tables");
}
