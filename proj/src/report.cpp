#include "sotest/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace sotest {

namespace {

struct Stat {
    double sum = 0.0;
    double sq = 0.0;
    long long n = 0;

    void add(double x) {
        sum += x;
        sq += x * x;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double sd() const {
        if (n < 2) return 0.0;
        double m = mean();
        double var = (sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return var > 0 ? std::sqrt(var) : 0.0;
    }
};

}  // namespace

MetricsRow aggregate(const ResultFile& f, const std::string& label) {
    MetricsRow row;
    row.label = label;
    row.algorithm = to_string(f.header.algorithm);
    row.fault = f.header.fault ? to_string(*f.header.fault) : "-";
    row.suites = static_cast<int>(f.suites.size());
    row.sequences = static_cast<int>(f.sequences.size());

    Stat agents, groups, states, transitions;
    for (const auto& s : f.suites) {
        agents.add(s.agents);
        groups.add(s.groups);
        states.add(s.ep_states_mean);
        transitions.add(s.ep_transitions_mean);
    }
    row.agents_mean = agents.mean();
    row.groups_mean = groups.mean();
    row.ep_states_mean = states.mean();
    row.ep_states_sd = states.sd();
    row.ep_transitions_mean = transitions.mean();
    row.ep_transitions_sd = transitions.sd();

    Stat cases, cov_s, cov_t, d_fail, d_gray, d_black;
    long long planned = 0, applied = 0;
    long long n_gray = 0, n_black = 0, n_smoke = 0, n_clean = 0, n_any = 0, n_gray_only = 0;
    for (const auto& s : f.sequences) {
        cases.add(s.cases);
        planned += s.cases;
        applied += s.applied;
        cov_s.add(s.state_coverage);
        cov_t.add(s.transition_coverage);
        row.reorgs_total += s.reorgs;
        row.activations_total += s.activations;

        bool gray = s.gray_steps > 0;
        bool black = s.black_steps > 0;
        if (gray) ++n_gray;
        if (black) ++n_black;
        if (s.smoke) ++n_smoke;
        bool any = gray || black || s.smoke;
        if (!any) ++n_clean;
        if (any) ++n_any;
        if (gray && !black && !s.smoke) ++n_gray_only;
        if (s.first_fail > 0) d_fail.add(s.first_fail);
        if (s.first_gray > 0) d_gray.add(s.first_gray);
        if (s.first_black > 0) d_black.add(s.first_black);
    }
    row.cases_mean = cases.mean();
    row.cases_sd = cases.sd();
    row.applied_pct = planned ? 100.0 * static_cast<double>(applied) / static_cast<double>(planned) : 0.0;
    row.state_coverage_pct = 100.0 * cov_s.mean();
    row.transition_coverage_pct = 100.0 * cov_t.mean();
    row.activations_per_seq =
        row.sequences ? static_cast<double>(row.activations_total) / row.sequences : 0.0;

    long long masked = 0;
    for (const auto& s : f.sequences) masked += s.masked_activations;
    row.masked_activation_pct =
        row.activations_total
            ? 100.0 * static_cast<double>(masked) / static_cast<double>(row.activations_total)
            : 0.0;

    const double nseq = row.sequences ? static_cast<double>(row.sequences) : 1.0;
    row.seq_no_failure_pct = 100.0 * static_cast<double>(n_clean) / nseq;
    row.seq_gray_pct = 100.0 * static_cast<double>(n_gray) / nseq;
    row.seq_black_pct = 100.0 * static_cast<double>(n_black) / nseq;
    row.seq_smoke_pct = 100.0 * static_cast<double>(n_smoke) / nseq;
    row.gray_only_pct =
        n_any ? 100.0 * static_cast<double>(n_gray_only) / static_cast<double>(n_any) : 0.0;
    row.first_fail_depth_mean = d_fail.mean();
    row.first_gray_depth_mean = d_gray.mean();
    row.first_black_depth_mean = d_black.mean();

    for (const auto& st : f.steps)
        if (st.black_violations > 0 && st.gray_violations == 0 && !st.smoke)
            ++row.containment_violations;
    return row;
}

std::string format_metrics(const std::vector<MetricsRow>& rows) {
    std::ostringstream os;
    os << std::fixed;

    auto head = [&os](const std::vector<std::pair<std::string, int>>& cols) {
        for (const auto& [name, w] : cols) os << std::setw(w) << name;
        os << '\n';
    };

    os << "system shape\n";
    head({{"target", 16},
          {"suites", 8},
          {"seqs", 6},
          {"agents", 8},
          {"groups", 8},
          {"states", 8},
          {"(sd)", 7},
          {"trans", 8},
          {"(sd)", 7},
          {"cases", 8},
          {"(sd)", 7}});
    for (const auto& r : rows) {
        os << std::setw(16) << r.label << std::setw(8) << r.suites << std::setw(6) << r.sequences
           << std::setprecision(1) << std::setw(8) << r.agents_mean << std::setw(8) << r.groups_mean
           << std::setw(8) << r.ep_states_mean << std::setw(7) << r.ep_states_sd << std::setw(8)
           << r.ep_transitions_mean << std::setw(7) << r.ep_transitions_sd << std::setw(8)
           << r.cases_mean << std::setw(7) << r.cases_sd << '\n';
    }

    os << "\ndetection\n";
    head({{"target", 16},
          {"appl%", 7},
          {"covS%", 7},
          {"covT%", 7},
          {"reorg", 7},
          {"activ", 7},
          {"mask%", 7},
          {"ok%", 7},
          {"gray%", 7},
          {"black%", 7},
          {"smoke%", 7},
          {"gonly%", 7},
          {"depth", 7},
          {"dGray", 7},
          {"dBlck", 7}});
    for (const auto& r : rows) {
        os << std::setw(16) << r.label << std::setprecision(1) << std::setw(7) << r.applied_pct
           << std::setw(7) << r.state_coverage_pct << std::setw(7) << r.transition_coverage_pct
           << std::setw(7) << r.reorgs_total << std::setw(7) << r.activations_total << std::setw(7)
           << r.masked_activation_pct << std::setw(7) << r.seq_no_failure_pct << std::setw(7)
           << r.seq_gray_pct << std::setw(7) << r.seq_black_pct << std::setw(7) << r.seq_smoke_pct
           << std::setw(7) << r.gray_only_pct << std::setw(7) << r.first_fail_depth_mean
           << std::setw(7) << r.first_gray_depth_mean << std::setw(7) << r.first_black_depth_mean
           << '\n';
    }
    return os.str();
}

SuiteRecord describe_suite(const TestSuite& suite, int index) {
    SuiteRecord r;
    r.suite = index;
    r.agents = static_cast<int>(suite.config.agents.size());
    r.groups = static_cast<int>(suite.config.groups.size());
    Stat states, transitions;
    for (const auto& g : suite.config.groups) {
        states.add(static_cast<double>(g.profile.states.size()));
        long long positive = 0;
        for (const auto& row : g.profile.transitions)
            for (double p : row)
                if (p > 0.0) ++positive;
        transitions.add(static_cast<double>(positive));
    }
    r.ep_states_mean = states.mean();
    r.ep_transitions_mean = transitions.mean();
    return r;
}

void summarize_sequence(int suite_index, int seq_index, const SystemConfiguration& config,
                        const TestSequence& sequence, const SequenceResult& result,
                        SequenceRecord& out_seq, std::vector<StepRecord>& out_steps) {
    out_seq = SequenceRecord{};
    out_seq.suite = suite_index;
    out_seq.seq = seq_index;
    out_seq.status = to_string(result.status);
    out_seq.cases = static_cast<int>(sequence.cases.size());
    out_seq.applied = static_cast<int>(result.reports.size());
    out_seq.activations = result.activations_total;

    for (const auto& rep : result.reports) {
        StepRecord st;
        st.suite = suite_index;
        st.seq = seq_index;
        st.depth = rep.step_index + 1;
        st.states = rep.applied_states;
        st.triggered = rep.triggered;
        st.gray_violations =
            rep.gray && !rep.gray->passed ? static_cast<int>(rep.gray->violations.size()) : 0;
        st.black_violations =
            rep.black && !rep.black->passed ? static_cast<int>(rep.black->violations.size()) : 0;
        st.smoke = rep.smoke;
        st.activations = rep.activations_delta;
        st.compute_seconds = rep.compute_seconds;
        out_steps.push_back(st);
        if (!rep.triggered) continue;

        ++out_seq.reorgs;
        bool gray = st.gray_violations > 0;
        bool black = st.black_violations > 0;
        if (gray) {
            ++out_seq.gray_steps;
            if (!out_seq.first_gray) out_seq.first_gray = st.depth;
        }
        if (black) {
            ++out_seq.black_steps;
            if (!out_seq.first_black) out_seq.first_black = st.depth;
        }
        if (rep.smoke) out_seq.smoke = true;
        if ((gray || black || rep.smoke) && !out_seq.first_fail) out_seq.first_fail = st.depth;
        if (!gray && !rep.smoke) out_seq.masked_activations += rep.activations_delta;
    }

    Stat cov_s, cov_t;
    for (const auto& g : config.groups) {
        auto it = result.traces.find(g.id);
        if (it == result.traces.end()) continue;
        Coverage c = coverage(g.profile, it->second);
        cov_s.add(c.state_coverage);
        cov_t.add(c.transition_coverage);
    }
    out_seq.state_coverage = cov_s.mean();
    out_seq.transition_coverage = cov_t.mean();
}

std::vector<TestSuite> make_suites(const CampaignConfig& cc, Algorithm algorithm,
                                   std::optional<FaultId> fault, std::uint64_t seed, int count) {
    ModelOfSuT model = cc.model;
    if (fault && forces_equal_partition_count(*fault)) model.force_equal_partition_count = true;
    SuiteSource source(model, algorithm, seed);
    std::vector<TestSuite> suites;
    suites.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) suites.push_back(source.next());
    return suites;
}

ResultFile execute_suites(const CampaignConfig& cc, const std::vector<TestSuite>& suites,
                          std::optional<FaultId> fault, ResultHeader header, ResultWriter* writer) {
    ResultFile out;
    header.suites = static_cast<int>(suites.size());
    header.sequences = suites.empty() ? 0 : static_cast<int>(suites.front().sequences.size());
    out.header = header;

    Engine engine(cc.engine);
    for (size_t si = 0; si < suites.size(); ++si) {
        const TestSuite& suite = suites[si];
        SuiteRecord srec = describe_suite(suite, static_cast<int>(si));
        if (writer) writer->write(srec);
        out.suites.push_back(srec);

        Monitor monitor(suite.config.universe(), suite.config.constraints, suite.config.algorithm);
        for (size_t qi = 0; qi < suite.sequences.size(); ++qi) {
            ActivationCounter counter;
            auto controller = wrap_with_fault(suite.config, fault, cc.faults, counter);
            SimClock clock(cc.seconds_per_iteration);
            SequenceResult res = engine.run_sequence(suite.config, suite.sequences[qi],
                                                     *controller, monitor, clock, &counter);
            SequenceRecord qrec;
            std::vector<StepRecord> steps;
            summarize_sequence(static_cast<int>(si), static_cast<int>(qi), suite.config,
                               suite.sequences[qi], res, qrec, steps);
            for (const auto& st : steps) {
                if (writer) writer->write(st);
                out.steps.push_back(st);
            }
            if (writer) writer->write(qrec);
            out.sequences.push_back(qrec);
        }
    }
    return out;
}

const std::vector<CampaignTarget>& default_campaign_targets() {
    static const std::vector<CampaignTarget> k = [] {
        std::vector<CampaignTarget> t;
        t.push_back({"baseline-spada", Algorithm::spada, std::nullopt});
        t.push_back({"baseline-psopp", Algorithm::psopp, std::nullopt});
        for (FaultId f : all_faults()) t.push_back({to_string(f), algorithm_of(f), f});
        return t;
    }();
    return k;
}

std::uint64_t target_seed(std::uint64_t master_seed, size_t target_index) {
    return mix_seed(master_seed, 0x7a0 + static_cast<std::uint64_t>(target_index));
}

ResultFile run_target(const CampaignConfig& cc, std::uint64_t master_seed, size_t target_index,
                      const CampaignTarget& target, const std::string& out_path) {
    std::uint64_t seed = target_seed(master_seed, target_index);
    std::vector<TestSuite> suites = make_suites(cc, target.algorithm, target.fault, seed, cc.suites);
    ResultHeader header;
    header.seed = seed;
    header.mode = SuiteMode::online;
    header.algorithm = target.algorithm;
    header.fault = target.fault;
    std::optional<ResultWriter> writer;
    if (!out_path.empty()) writer.emplace(out_path, header);
    return execute_suites(cc, suites, target.fault, header, writer ? &*writer : nullptr);
}

std::vector<CampaignOutcome> run_campaign(const CampaignConfig& cc, std::uint64_t master_seed,
                                          const std::string& out_dir, std::ostream* progress) {
    std::vector<CampaignOutcome> outcomes;
    const auto& targets = default_campaign_targets();
    for (size_t i = 0; i < targets.size(); ++i) {
        std::string path;
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            path = (std::filesystem::path(out_dir) / (targets[i].name + ".jsonl")).string();
        }
        CampaignOutcome oc;
        oc.target = targets[i];
        oc.results = run_target(cc, master_seed, i, targets[i], path);
        oc.row = aggregate(oc.results, targets[i].name);
        if (progress)
            (*progress) << targets[i].name << ": " << oc.row.sequences << " sequences, "
                        << oc.row.reorgs_total << " reorganisations, gray " << oc.row.seq_gray_pct
                        << "%, black " << oc.row.seq_black_pct << "%\n";
        outcomes.push_back(std::move(oc));
    }
    return outcomes;
}

}  // namespace sotest
