#pragma once

#include <vector>

#include "sotest/domain.hpp"
#include "sotest/generation.hpp"

namespace sotest {

// Pre-adoption check of the raw solution: exact cover always; size/count
// bounds only for the constraint-aware algorithm (the acquaintances based one
// ignores them by design, so holding it to them would be a false alarm).
Verdict evaluate_solution(const Partitioning& solution, const std::vector<AgentId>& universe,
                          const PartitioningConstraints& c, Algorithm algorithm);

// Post-adoption check of the adopted organisation, same policy, violations
// tagged with the black view.
Verdict evaluate_structure(const SystemStructure& structure, const std::vector<AgentId>& universe,
                           const PartitioningConstraints& c, Algorithm algorithm);

// Per-sequence oracle frontend the engine reports to.
class Monitor {
public:
    Monitor(std::vector<AgentId> universe, PartitioningConstraints c, Algorithm algorithm)
        : universe_(std::move(universe)), constraints_(c), algorithm_(algorithm) {}

    Verdict check_solution(const Partitioning& solution) const {
        return evaluate_solution(solution, universe_, constraints_, algorithm_);
    }

    Verdict check_structure(const SystemStructure& structure) const {
        return evaluate_structure(structure, universe_, constraints_, algorithm_);
    }

private:
    std::vector<AgentId> universe_;
    PartitioningConstraints constraints_;
    Algorithm algorithm_;
};

}  // namespace sotest
