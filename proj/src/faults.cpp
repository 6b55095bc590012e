#include "sotest/faults.hpp"

#include <algorithm>

#include "sotest/errors.hpp"

namespace sotest {

std::string to_string(FaultId f) {
    switch (f) {
        case FaultId::spada_f1: return "spada-f1";
        case FaultId::spada_f2: return "spada-f2";
        case FaultId::spada_f3: return "spada-f3";
        case FaultId::spada_f4: return "spada-f4";
        case FaultId::psopp_f1: return "psopp-f1";
        case FaultId::psopp_f2: return "psopp-f2";
        case FaultId::psopp_f3: return "psopp-f3";
        case FaultId::psopp_f4: return "psopp-f4";
        case FaultId::psopp_f5: return "psopp-f5";
        case FaultId::psopp_f5d: return "psopp-f5d";
    }
    throw ConfigError("unknown fault id");
}

FaultId fault_from_string(const std::string& s) {
    for (FaultId f : all_faults())
        if (to_string(f) == s) return f;
    throw ConfigError("unknown fault: " + s);
}

Algorithm algorithm_of(FaultId f) {
    switch (f) {
        case FaultId::spada_f1:
        case FaultId::spada_f2:
        case FaultId::spada_f3:
        case FaultId::spada_f4: return Algorithm::spada;
        default: return Algorithm::psopp;
    }
}

bool forces_equal_partition_count(FaultId f) { return f == FaultId::psopp_f5d; }

const std::vector<FaultId>& all_faults() {
    static const std::vector<FaultId> k = {
        FaultId::spada_f1, FaultId::spada_f2, FaultId::spada_f3, FaultId::spada_f4,
        FaultId::psopp_f1, FaultId::psopp_f2, FaultId::psopp_f3, FaultId::psopp_f4,
        FaultId::psopp_f5, FaultId::psopp_f5d,
    };
    return k;
}

namespace {

// fires when any tested partition falls outside the [t1, t2] size window
bool outside_window(const FaultConfig& cfg, size_t a, size_t b) {
    auto bad = [&](size_t s) {
        return static_cast<long>(s) < static_cast<long>(cfg.t1) ||
               static_cast<long>(s) > static_cast<long>(cfg.t2);
    };
    return bad(a) || bad(b);
}

// locate the partition holding exactly these members; SIZE_MAX when absent
size_t find_partition(const Partitioning& p, const std::vector<AgentId>& members) {
    for (size_t i = 0; i < p.partitions.size(); ++i)
        if (p.partitions[i].members == members) return i;
    return static_cast<size_t>(-1);
}

void insert_member(Partition& p, AgentId a) {
    auto it = std::lower_bound(p.members.begin(), p.members.end(), a);
    p.members.insert(it, a);
}

}  // namespace

MoveHook make_psopp_fault_hook(FaultId f, const FaultConfig& cfg, ActivationCounter& counter) {
    if (algorithm_of(f) != Algorithm::psopp)
        throw ConfigError("fault " + to_string(f) + " does not target the swarm algorithm");

    switch (f) {
        case FaultId::psopp_f1:
            // after a random split, one member of the first half is replaced by
            // a member of the second half: one agent duplicated, one missing
            return [&cfg, &counter](const MoveEvent& ev, Partitioning pos, Rng& rng) {
                if (ev.op != MoveEvent::Op::random_split) return pos;
                if (!outside_window(cfg, ev.result_a.size(), ev.result_b.size())) return pos;
                size_t i = find_partition(pos, ev.result_a);
                if (i == static_cast<size_t>(-1) || ev.result_a.empty() || ev.result_b.empty())
                    return pos;
                Partition& l = pos.partitions[i];
                AgentId gone = rng.pick(l.members);
                AgentId dup = rng.pick(ev.result_b);
                l.members.erase(std::find(l.members.begin(), l.members.end(), gone));
                insert_member(l, dup);
                counter.bump();
                return pos;
            };
        case FaultId::psopp_f2:
            // after a random join, one of the joined partitions survives as a
            // stale copy next to the merged partition
            return [&cfg, &counter](const MoveEvent& ev, Partitioning pos, Rng& rng) {
                if (ev.op != MoveEvent::Op::random_join) return pos;
                if (!outside_window(cfg, ev.source_a.size(), ev.source_b.size())) return pos;
                const auto& stale = rng.chance(0.5) ? ev.source_a : ev.source_b;
                if (stale.empty()) return pos;
                Partition ghost;
                ghost.members = stale;
                pos.partitions.push_back(ghost);
                counter.bump();
                return pos;
            };
        case FaultId::psopp_f3:
            // after an approach split, one of the two result partitions is
            // dropped from the partitioning entirely
            return [&cfg, &counter](const MoveEvent& ev, Partitioning pos, Rng& rng) {
                if (ev.op != MoveEvent::Op::approach_split) return pos;
                if (!outside_window(cfg, ev.result_a.size(), ev.result_b.size())) return pos;
                const auto& victim = rng.chance(0.5) ? ev.result_a : ev.result_b;
                size_t i = find_partition(pos, victim);
                if (i == static_cast<size_t>(-1)) return pos;
                pos.partitions.erase(pos.partitions.begin() + static_cast<long>(i));
                counter.bump();
                return pos;
            };
        case FaultId::psopp_f4:
            // after an approach join, an arbitrary member of the merged
            // partition vanishes
            return [&cfg, &counter](const MoveEvent& ev, Partitioning pos, Rng& rng) {
                if (ev.op != MoveEvent::Op::approach_join) return pos;
                if (!outside_window(cfg, ev.source_a.size(), ev.source_b.size())) return pos;
                size_t i = find_partition(pos, ev.result_a);
                if (i == static_cast<size_t>(-1)) return pos;
                Partition& m = pos.partitions[i];
                if (m.members.empty()) return pos;
                AgentId gone = rng.pick(m.members);
                m.members.erase(std::find(m.members.begin(), m.members.end(), gone));
                counter.bump();
                return pos;
            };
        case FaultId::psopp_f5:
        case FaultId::psopp_f5d:
            // after an approach exchange, one exchanged agent ends up in both
            // result partitions
            return [&cfg, &counter](const MoveEvent& ev, Partitioning pos, Rng& rng) {
                if (ev.op != MoveEvent::Op::approach_exchange) return pos;
                if (!outside_window(cfg, ev.result_a.size(), ev.result_b.size())) return pos;
                size_t ia = find_partition(pos, ev.result_a);
                size_t ib = find_partition(pos, ev.result_b);
                if (ia == static_cast<size_t>(-1) || ib == static_cast<size_t>(-1)) return pos;
                if (ia == ib) return pos;
                bool from_a = rng.chance(0.5);
                const auto& donor = from_a ? ev.result_a : ev.result_b;
                if (donor.empty()) return pos;
                AgentId dup = rng.pick(donor);
                insert_member(pos.partitions[from_a ? ib : ia], dup);
                counter.bump();
                return pos;
            };
        default: break;
    }
    throw ConfigError("unhandled swarm fault");
}

SpadaHooks make_spada_fault_hooks(FaultId f, const FaultConfig& cfg, ActivationCounter& counter) {
    if (algorithm_of(f) != Algorithm::spada)
        throw ConfigError("fault " + to_string(f) + " does not target the acquaintances algorithm");

    SpadaHooks hooks;
    switch (f) {
        case FaultId::spada_f1:
            // too many avpps: the graph silently loses one whole avpp
            hooks.post_build = [&cfg, &counter](AcquaintancesGraph& g, Rng& rng) {
                if (static_cast<long>(g.members.size()) <= static_cast<long>(cfg.spada_f1_avpp_count))
                    return;
                std::vector<int> pids;
                pids.reserve(g.members.size());
                for (const auto& [pid, _] : g.members) pids.push_back(pid);
                remove_partition(g, rng.pick(pids));
                counter.bump();
            };
            break;
        case FaultId::spada_f2:
            // too few avpps: same omission, opposite trigger
            hooks.post_build = [&cfg, &counter](AcquaintancesGraph& g, Rng& rng) {
                if (g.members.empty() ||
                    static_cast<long>(g.members.size()) >= static_cast<long>(cfg.spada_f2_avpp_count))
                    return;
                std::vector<int> pids;
                pids.reserve(g.members.size());
                for (const auto& [pid, _] : g.members) pids.push_back(pid);
                remove_partition(g, rng.pick(pids));
                counter.bump();
            };
            break;
        case FaultId::spada_f3:
            // oversized result partitions are truncated down to the limit
            hooks.post_extract = [&cfg, &counter](Partitioning p, Rng& rng) {
                for (auto& part : p.partitions) {
                    if (static_cast<long>(part.members.size()) <=
                        static_cast<long>(cfg.spada_partition_size))
                        continue;
                    rng.shuffle(part.members);
                    part.members.resize(static_cast<size_t>(cfg.spada_partition_size));
                    std::sort(part.members.begin(), part.members.end());
                    counter.bump();
                }
                return p;
            };
            break;
        case FaultId::spada_f4:
            // oversized result partitions are replaced by a randomly selected
            // partition of the same partitioning
            hooks.post_extract = [&cfg, &counter](Partitioning p, Rng& rng) {
                if (p.partitions.size() < 2) return p;
                std::vector<size_t> oversized;
                for (size_t i = 0; i < p.partitions.size(); ++i)
                    if (static_cast<long>(p.partitions[i].members.size()) >
                        static_cast<long>(cfg.spada_partition_size))
                        oversized.push_back(i);
                for (size_t i : oversized) {
                    size_t j = rng.index(p.partitions.size());
                    while (j == i) j = rng.index(p.partitions.size());
                    p.partitions[i] = p.partitions[j];
                    counter.bump();
                }
                return p;
            };
            break;
        default: throw ConfigError("unhandled acquaintances fault");
    }
    return hooks;
}

std::unique_ptr<Controller> wrap_with_fault(const SystemConfiguration& config,
                                            std::optional<FaultId> fault, const FaultConfig& fc,
                                            ActivationCounter& counter) {
    if (fault && algorithm_of(*fault) != config.algorithm)
        throw ConfigError("fault " + to_string(*fault) + " cannot instrument a " +
                          to_string(config.algorithm) + " configuration");

    if (config.algorithm == Algorithm::psopp) {
        if (!config.psopp) throw ConfigError("psopp configuration missing algorithm parameters");
        MoveHook hook;
        if (fault) hook = make_psopp_fault_hook(*fault, fc, counter);
        return make_psopp_controller(*config.psopp, config.constraints, hook);
    }
    if (!config.spada) throw ConfigError("spada configuration missing algorithm parameters");
    SpadaHooks hooks;
    if (fault) hooks = make_spada_fault_hooks(*fault, fc, counter);
    return make_spada_controller(*config.spada, hooks);
}

}  // namespace sotest
