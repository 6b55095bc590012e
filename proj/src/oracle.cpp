#include "sotest/oracle.hpp"

namespace sotest {

namespace {

Verdict merge(Verdict a, const Verdict& b) {
    if (b.passed) return a;
    a.passed = false;
    a.violations.insert(a.violations.end(), b.violations.begin(), b.violations.end());
    return a;
}

Verdict tag(Verdict v, View view) {
    for (auto& violation : v.violations) violation.view = view;
    return v;
}

}  // namespace

Verdict evaluate_solution(const Partitioning& solution, const std::vector<AgentId>& universe,
                          const PartitioningConstraints& c, Algorithm algorithm) {
    Verdict v = validate_partitioning(solution, universe);
    if (algorithm == Algorithm::psopp) v = merge(std::move(v), check_partition_bounds(solution, c));
    return tag(std::move(v), View::gray);
}

Verdict evaluate_structure(const SystemStructure& structure, const std::vector<AgentId>& universe,
                           const PartitioningConstraints& c, Algorithm algorithm) {
    Partitioning p = structure.partitioning();
    Verdict v = validate_partitioning(p, universe);
    if (algorithm == Algorithm::psopp) v = merge(std::move(v), check_partition_bounds(p, c));
    return tag(std::move(v), View::black);
}

}  // namespace sotest
