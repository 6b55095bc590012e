#include "sotest/domain.hpp"

#include <algorithm>
#include <set>

namespace sotest {

const std::vector<AgentType>& default_agent_types() {
    static const std::vector<AgentType> types = {"solar", "wind", "biogas", "hydro"};
    return types;
}

bool same_members(const Partition& a, const Partition& b) {
    return a.members == b.members;
}

void Partitioning::normalize() {
    for (auto& p : partitions) std::sort(p.members.begin(), p.members.end());
    std::sort(partitions.begin(), partitions.end(), [](const Partition& a, const Partition& b) {
        if (a.members.empty() || b.members.empty()) return b.members.empty() && !a.members.empty();
        if (a.members.front() != b.members.front()) return a.members.front() < b.members.front();
        return a.members < b.members;
    });
}

bool Partitioning::contains(const std::vector<AgentId>& members) const {
    for (const auto& p : partitions)
        if (p.members == members) return true;
    return false;
}

std::size_t Partitioning::total_members() const {
    std::size_t n = 0;
    for (const auto& p : partitions) n += p.members.size();
    return n;
}

Partitioning SystemStructure::partitioning() const {
    Partitioning out;
    for (const auto& [id, part] : avpps) out.partitions.push_back(part);
    out.normalize();
    return out;
}

bool SystemStructure::consistent() const {
    std::size_t assigned = 0;
    for (const auto& [id, part] : avpps) {
        for (AgentId a : part.members) {
            auto it = assignment.find(a);
            if (it == assignment.end() || it->second != id) return false;
            ++assigned;
        }
        if (part.members.empty()) return false;
    }
    return assigned == assignment.size();
}

SystemStructure structure_from_partitioning(const Partitioning& p) {
    SystemStructure s;
    for (const auto& part : p.partitions) {
        if (part.members.empty()) continue;
        int id = s.next_avpp_id++;
        Partition copy = part;
        std::sort(copy.members.begin(), copy.members.end());
        s.avpps[id] = std::move(copy);
        for (AgentId a : s.avpps[id].members) s.assignment[a] = id;
    }
    return s;
}

Verdict validate_partitioning(const Partitioning& p, const std::vector<AgentId>& universe) {
    std::map<AgentId, int> count;
    for (const auto& part : p.partitions)
        for (AgentId a : part.members) ++count[a];

    std::set<AgentId> uni(universe.begin(), universe.end());
    std::vector<Violation> violations;
    for (AgentId a : uni) {
        auto it = count.find(a);
        if (it == count.end())
            violations.push_back({ViolationKind::missing_agent, {a}, View::gray});
        else if (it->second > 1)
            violations.push_back({ViolationKind::duplicate_agent, {a}, View::gray});
    }
    for (const auto& [a, c] : count) {
        (void)c;
        if (!uni.count(a)) violations.push_back({ViolationKind::foreign_agent, {a}, View::gray});
    }
    if (violations.empty()) return Verdict::pass();
    return Verdict::fail(std::move(violations));
}

Verdict check_partition_bounds(const Partitioning& p, const PartitioningConstraints& c) {
    std::vector<Violation> violations;
    for (const auto& part : p.partitions) {
        int size = static_cast<int>(part.members.size());
        if (size < c.s_min || size > c.s_max)
            violations.push_back({ViolationKind::size_bound, part.members, View::gray});
    }
    int n = static_cast<int>(p.partitions.size());
    if (n < c.n_min || n > c.n_max)
        violations.push_back({ViolationKind::count_bound, {}, View::gray});
    if (violations.empty()) return Verdict::pass();
    return Verdict::fail(std::move(violations));
}

bool feasible(int num_agents, const PartitioningConstraints& c) {
    if (num_agents <= 0) return false;
    for (int n = c.n_min; n <= c.n_max; ++n) {
        if (n <= 0) continue;
        long lo = static_cast<long>(n) * c.s_min;
        long hi = static_cast<long>(n) * c.s_max;
        if (lo <= num_agents && num_agents <= hi) return true;
    }
    return false;
}

double partition_mean(const Partition& p, const std::map<AgentId, double>& accuracies) {
    if (p.members.empty()) return 0.0;
    double sum = 0.0;
    for (AgentId a : p.members) {
        auto it = accuracies.find(a);
        if (it != accuracies.end()) sum += it->second;
    }
    return sum / static_cast<double>(p.members.size());
}

double dissimilarity(const SystemStructure& s, const std::map<AgentId, double>& accuracies) {
    if (s.avpps.size() < 2) return 0.0;
    double lo = 2.0, hi = -1.0;
    for (const auto& [id, part] : s.avpps) {
        double m = partition_mean(part, accuracies);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    return hi - lo;
}

}  // namespace sotest
