#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sotest/engine.hpp"
#include "sotest/faults.hpp"

namespace sotest {

using jsn = nlohmann::ordered_json;

// -- value <-> json ---------------------------------------------------------

jsn encode(const EnvironmentProfile& ep);
EnvironmentProfile decode_profile(const jsn& j);

jsn encode(const Partitioning& p);
Partitioning decode_partitioning(const jsn& j);

jsn encode(const SystemStructure& s);
SystemStructure decode_structure(const jsn& j);

jsn encode(const SystemConfiguration& c);
SystemConfiguration decode_config(const jsn& j);

jsn encode(const TestSuite& s);
TestSuite decode_suite(const jsn& j);

// -- suite files (one json object per line, header first) -------------------

inline constexpr const char* kSuiteSchema = "sotest-suites-1";

struct SuiteFileMeta {
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::psopp;
    std::optional<FaultId> fault;
    int count = 0;
};

void write_suites(const std::string& path, const SuiteFileMeta& meta,
                  const std::vector<TestSuite>& suites);
std::vector<TestSuite> read_suites(const std::string& path, SuiteFileMeta* meta = nullptr);

// -- result files (one json record per line, header first) ------------------

inline constexpr const char* kResultSchema = "sotest-results-1";

struct ResultHeader {
    std::uint64_t seed = 0;
    SuiteMode mode = SuiteMode::online;
    Algorithm algorithm = Algorithm::psopp;
    std::optional<FaultId> fault;
    int suites = 0;
    int sequences = 0;
};

// static facts about one generated system under test
struct SuiteRecord {
    int suite = 0;
    int agents = 0;
    int groups = 0;
    double ep_states_mean = 0.0;
    double ep_transitions_mean = 0.0;  // positive entries only
};

// one executed test case; the oracle fields only carry data when the case
// triggered a reorganisation
struct StepRecord {
    int suite = 0;
    int seq = 0;
    int depth = 0;  // 1-based position of the test case in its sequence
    std::map<int, int> states;  // group id -> env state applied this step
    bool triggered = false;
    int gray_violations = 0;
    int black_violations = 0;
    bool smoke = false;
    long long activations = 0;
    double compute_seconds = 0.0;
};

// one executed test sequence
struct SequenceRecord {
    int suite = 0;
    int seq = 0;
    std::string status;  // completed / aborted-black / aborted-smoke
    int cases = 0;    // planned length
    int applied = 0;  // actually executed before any abort
    int reorgs = 0;
    int gray_steps = 0;   // reorganisations with gray findings
    int black_steps = 0;  // reorganisations with black findings
    bool smoke = false;
    int first_gray = 0;   // 1-based depth, 0 = none
    int first_black = 0;
    int first_fail = 0;   // min over gray/black/smoke
    long long activations = 0;
    long long masked_activations = 0;  // charged on reorganisations whose gray check passed
    double state_coverage = 0.0;       // mean over groups
    double transition_coverage = 0.0;
};

class ResultWriter {
public:
    ResultWriter(const std::string& path, const ResultHeader& header);
    void write(const SuiteRecord& r);
    void write(const StepRecord& r);
    void write(const SequenceRecord& r);

private:
    std::ofstream out_;
};

struct ResultFile {
    ResultHeader header;
    std::vector<SuiteRecord> suites;
    std::vector<StepRecord> steps;
    std::vector<SequenceRecord> sequences;
};

ResultFile read_results(const std::string& path);

// -- campaign configuration --------------------------------------------------

// Everything a campaign run depends on besides the seed. The file format is
// a nested object ({"model":{...},"faults":{...},"engine":{...},"campaign":
// {...}}); absent keys keep their defaults so a config file only has to name
// what it changes.
struct CampaignConfig {
    ModelOfSuT model = ModelOfSuT::desk_scale();
    FaultConfig faults;
    EngineOptions engine;
    double seconds_per_iteration = 1e-3;  // simulated clock rate during compute()
    int suites = 10;
};

jsn encode(const CampaignConfig& c);
CampaignConfig campaign_config_from_json(const jsn& j);
CampaignConfig load_campaign_config(const std::string& path);
void save_campaign_config(const std::string& path, const CampaignConfig& c);

}  // namespace sotest
