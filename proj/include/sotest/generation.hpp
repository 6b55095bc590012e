#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "sotest/env.hpp"

namespace sotest {

enum class Algorithm { spada, psopp };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct RealRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Parameter ranges the generator draws each system under test from.
struct ModelOfSuT {
    IntRange agents{2, 1000};
    IntRange cases_per_sequence{50, 1000};
    IntRange ep_states{3, 25};
    RealRange influence_delta{-0.3, 0.3};
    int sequences_per_suite = 10;
    double theta = 0.3;
    bool force_equal_partition_count = false;  // pin n_min == n_max at sampling time

    // ranges for the algorithm parameters
    IntRange spada_acquaintances{1, 20};
    IntRange spada_evaluated{1, 10};
    IntRange spada_integrations{1, 10};
    IntRange psopp_particles{1, 4};
    RealRange psopp_runtime{1.0, 10.0};

    // optional fixed profiles/influences; when set, groups cycle through them
    std::vector<EnvironmentProfile> fixed_profiles;
    std::optional<InfluenceFunction> fixed_influence;

    // laptop sized campaign: small systems, sequences long enough for
    // coverage to saturate
    static ModelOfSuT desk_scale();
};

struct SpadaParams {
    int acquaintances = 5;
    int evaluated_per_round = 3;
    int max_integrations = 3;
};

struct PsoppParams {
    int particles = 2;
    int start_at_current = 1;
    double c_random = 1.0 / 3.0;
    double c_pbest = 1.0 / 3.0;
    double c_gbest = 1.0 / 3.0;
    double max_runtime_seconds = 1.0;
};

struct SystemConfiguration {
    std::vector<Agent> agents;            // initial states, ids 0..n-1
    std::vector<AgentGroup> groups;       // every agent in exactly one group
    SystemStructure initial_structure;
    PartitioningConstraints constraints;
    TriggerConstraint trigger;
    Algorithm algorithm = Algorithm::psopp;
    std::optional<SpadaParams> spada;
    std::optional<PsoppParams> psopp;
    std::uint64_t master_seed = 0;

    std::vector<AgentId> universe() const;
    std::map<AgentId, double> initial_accuracies() const;
};

struct TestCase {
    int step_index = 0;
    std::map<int, int> group_state;  // group id -> next profile state
};

struct TestSequence {
    std::uint64_t seed = 0;
    std::vector<TestCase> cases;
};

struct TestSuite {
    std::uint64_t id = 0;
    SystemConfiguration config;
    std::vector<TestSequence> sequences;
};

SpadaParams sample_spada_parameters(const ModelOfSuT& m, Rng& rng);
PsoppParams sample_psopp_parameters(const ModelOfSuT& m, int current_partitions, Rng& rng);

// Draws a complete system in dependency order: agent count, constraints
// (resampled until feasible), groups, profiles, influences, initial states,
// initial structure, algorithm parameters.
SystemConfiguration sample_system_configuration(const ModelOfSuT& m, Algorithm algorithm, Rng& rng);

// Simulates every group profile `length` steps.
TestSequence generate_test_sequence(const SystemConfiguration& config, int length, Rng& rng);

TestSuite generate_test_suite(const ModelOfSuT& m, Algorithm algorithm, std::uint64_t suite_id,
                              std::uint64_t seed);

// Random but constraint-satisfying partitioning of the universe. Shared by
// initial structure assembly and particle placement.
Partitioning random_constrained_partitioning(const std::vector<AgentId>& universe,
                                             const PartitioningConstraints& c, Rng& rng);

enum class SuiteMode { offline, online };

SuiteMode suite_mode_from_string(const std::string& s);
std::string to_string(SuiteMode m);

// Suite i is derived from (seed, i) alone, so the online stream and an
// offline pre-generated list agree for any prefix.
class SuiteSource {
public:
    SuiteSource(ModelOfSuT model, Algorithm algorithm, std::uint64_t seed);
    TestSuite next();
    std::uint64_t produced() const { return next_id_; }

private:
    ModelOfSuT model_;
    Algorithm algorithm_;
    std::uint64_t seed_;
    std::uint64_t next_id_ = 0;
};

}  // namespace sotest
