#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "sotest/engine.hpp"

namespace sotest {

// Directed acquaintance overlay. The undirected closure of the marked edges
// IS the partitioning; everything else (members/partition_of/leaders) is
// bookkeeping kept in sync by the mutation helpers.
struct AcquaintancesGraph {
    std::vector<AgentId> nodes;                       // sorted
    std::map<AgentId, std::map<AgentId, bool>> edges; // from -> to -> marked
    std::map<int, std::set<AgentId>> members;         // partition id -> members
    std::map<AgentId, int> partition_of;
    std::map<int, AgentId> leaders;                   // partition id -> leader agent
    std::set<int> terminated;                         // partition ids
    int next_partition_id = 0;
};

// Reproduces the structure exactly: one marked chain per avpp (sorted member
// order), leader = lowest agent id, plus per node up to params.acquaintances
// random unmarked acquaintance edges.
AcquaintancesGraph build_graph(const SystemStructure& structure, const SpadaParams& params,
                               Rng& rng);

// Decodes the partitioning from the marked-edge closure; nodes without marked
// edges are singletons. Leaders are attached where the bookkeeping still
// matches the closure.
Partitioning partitions_of(const AcquaintancesGraph& g);

// Drops a whole partition (nodes, edges, bookkeeping) from the graph.
void remove_partition(AcquaintancesGraph& g, int pid);

// One leader activation: sample acquainted outsiders, greedily integrate the
// ones that improve homogeneity (up to max_integrations), exclude members
// whose removal improves it, then self-mark terminated if nothing changed.
// Returns true when the partition changed.
bool leader_round(AcquaintancesGraph& g, int pid, const std::map<AgentId, double>& accuracies,
                  const SpadaParams& params, Rng& rng);

struct SpadaHooks {
    std::function<void(AcquaintancesGraph&, Rng&)> post_build;
    std::function<Partitioning(Partitioning, Rng&)> post_extract;
};

// Round-robin leader rounds until every partition terminated or the round cap
// (50 * |agents|) is hit, then one result extraction.
Partitioning run_spada(const SystemStructure& structure, const SpadaParams& params,
                       const std::map<AgentId, double>& accuracies, Rng& rng,
                       const SpadaHooks& hooks = {});

std::unique_ptr<Controller> make_spada_controller(SpadaParams params, SpadaHooks hooks = {});

}  // namespace sotest
