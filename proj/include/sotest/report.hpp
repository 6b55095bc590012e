#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sotest/io.hpp"

namespace sotest {

// Aggregated view over one result file, one row per the usual campaign
// summary tables. Percentages are 0..100.
struct MetricsRow {
    std::string label;
    std::string algorithm;
    std::string fault = "-";
    int suites = 0;
    int sequences = 0;

    double agents_mean = 0.0;
    double groups_mean = 0.0;
    double ep_states_mean = 0.0;
    double ep_states_sd = 0.0;
    double ep_transitions_mean = 0.0;
    double ep_transitions_sd = 0.0;
    double cases_mean = 0.0;
    double cases_sd = 0.0;

    double applied_pct = 0.0;             // executed test cases / planned
    double state_coverage_pct = 0.0;      // mean over sequences
    double transition_coverage_pct = 0.0;

    long long reorgs_total = 0;
    long long activations_total = 0;
    double activations_per_seq = 0.0;
    double masked_activation_pct = 0.0;   // activations never flagged gray

    double seq_no_failure_pct = 0.0;
    double seq_gray_pct = 0.0;            // sequences with >= 1 gray finding
    double seq_black_pct = 0.0;
    double seq_smoke_pct = 0.0;
    double gray_only_pct = 0.0;           // among sequences with any finding

    double first_fail_depth_mean = 0.0;   // over failing sequences, 1-based
    double first_gray_depth_mean = 0.0;
    double first_black_depth_mean = 0.0;

    long long containment_violations = 0; // reorganisations with black but no gray finding
};

MetricsRow aggregate(const ResultFile& f, const std::string& label);

// Two aligned text tables (system shape, then detection outcomes).
std::string format_metrics(const std::vector<MetricsRow>& rows);

SuiteRecord describe_suite(const TestSuite& suite, int index);

// Flattens one engine run into file records.
void summarize_sequence(int suite_index, int seq_index, const SystemConfiguration& config,
                        const TestSequence& sequence, const SequenceResult& result,
                        SequenceRecord& out_seq, std::vector<StepRecord>& out_steps);

// Generates `count` suites for one target, honouring the fault's generation
// side effects (the duplication-biased variant pins the partition count).
std::vector<TestSuite> make_suites(const CampaignConfig& cc, Algorithm algorithm,
                                   std::optional<FaultId> fault, std::uint64_t seed, int count);

// Runs every sequence of every suite with a fresh instrumented controller and
// a fresh simulated clock, recording to `writer` when given.
ResultFile execute_suites(const CampaignConfig& cc, const std::vector<TestSuite>& suites,
                          std::optional<FaultId> fault, ResultHeader header, ResultWriter* writer);

struct CampaignTarget {
    std::string name;
    Algorithm algorithm = Algorithm::psopp;
    std::optional<FaultId> fault;
};

// Two baselines plus one target per fault.
const std::vector<CampaignTarget>& default_campaign_targets();

std::uint64_t target_seed(std::uint64_t master_seed, size_t target_index);

ResultFile run_target(const CampaignConfig& cc, std::uint64_t master_seed, size_t target_index,
                      const CampaignTarget& target, const std::string& out_path);

struct CampaignOutcome {
    CampaignTarget target;
    ResultFile results;
    MetricsRow row;
};

// The full sweep. `out_dir` empty keeps everything in memory; `progress`
// (optional) gets one line per finished target.
std::vector<CampaignOutcome> run_campaign(const CampaignConfig& cc, std::uint64_t master_seed,
                                          const std::string& out_dir, std::ostream* progress);

}  // namespace sotest
