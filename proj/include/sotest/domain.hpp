#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sotest/verdict.hpp"

namespace sotest {

using AgentId = int;
using AgentType = std::string;

// Fixed label set used when sampling systems; the type itself is open ended.
const std::vector<AgentType>& default_agent_types();

struct Agent {
    AgentId id = 0;
    AgentType type;
    int group_id = 0;
    double prediction_accuracy = 0.0;  // kept in [0,1]
};

struct Partition {
    std::vector<AgentId> members;      // sorted ascending
    std::optional<AgentId> leader;     // used by the acquaintances based algorithm
};

bool same_members(const Partition& a, const Partition& b);

// A set of partitions. No exact-cover guarantee at this level: solver faults
// produce partitionings with duplicate or missing agents, and the checks below
// must be able to describe them.
struct Partitioning {
    std::vector<Partition> partitions;

    // sort members and order partitions by smallest member, then size
    void normalize();
    bool contains(const std::vector<AgentId>& members) const;
    std::size_t total_members() const;
};

// The adopted organisation: exactly-one membership is an invariant here,
// maintained by the adoption procedure in the engine.
struct SystemStructure {
    std::map<AgentId, int> assignment;   // agent -> avpp id
    std::map<int, Partition> avpps;      // avpp id -> members
    int next_avpp_id = 0;

    Partitioning partitioning() const;
    bool consistent() const;  // assignment and avpps describe each other
};

SystemStructure structure_from_partitioning(const Partitioning& p);

struct PartitioningConstraints {
    int s_min = 1;
    int s_max = 1;
    int n_min = 1;
    int n_max = 1;
};

struct TriggerConstraint {
    double dissimilarity_threshold = 0.3;
};

// Exact cover of the universe: one violation per missing / duplicated /
// foreign agent id.
Verdict validate_partitioning(const Partitioning& p, const std::vector<AgentId>& universe);

// Size and count bounds only; membership is not checked here.
Verdict check_partition_bounds(const Partitioning& p, const PartitioningConstraints& c);

// True iff some partition count n in [n_min, n_max] covers num_agents with
// sizes in [s_min, s_max].
bool feasible(int num_agents, const PartitioningConstraints& c);

double partition_mean(const Partition& p, const std::map<AgentId, double>& accuracies);

// Largest pairwise difference of per-avpp mean accuracies; 0 for fewer than
// two avpps. Drives the reorganisation trigger.
double dissimilarity(const SystemStructure& s, const std::map<AgentId, double>& accuracies);

}  // namespace sotest
