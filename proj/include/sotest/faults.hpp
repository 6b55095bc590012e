#pragma once

#include <memory>
#include <optional>
#include <string>

#include "sotest/psopp.hpp"
#include "sotest/spada.hpp"

namespace sotest {

// The ten injectable implementation faults. The first half corrupts the
// acquaintances based algorithm (graph build / result transformation), the
// second half corrupts swarm move operators at their call sites. psopp_f5d is
// psopp_f5 paired with a generation-side n_min == n_max constraint so the
// exchange operator dominates.
enum class FaultId {
    spada_f1,
    spada_f2,
    spada_f3,
    spada_f4,
    psopp_f1,
    psopp_f2,
    psopp_f3,
    psopp_f4,
    psopp_f5,
    psopp_f5d,
};

std::string to_string(FaultId f);
FaultId fault_from_string(const std::string& s);
Algorithm algorithm_of(FaultId f);
bool forces_equal_partition_count(FaultId f);
const std::vector<FaultId>& all_faults();

struct FaultConfig {
    // size window for the swarm operator faults: a tested partition with size
    // < t1 or > t2 arms the fault
    int t1 = 2;
    int t2 = 100;
    int spada_f1_avpp_count = 100;   // drop an avpp from the graph when count exceeds this
    int spada_f2_avpp_count = 5;     // drop an avpp from the graph when count is below this
    int spada_partition_size = 100;  // result partitions larger than this get corrupted
};

MoveHook make_psopp_fault_hook(FaultId f, const FaultConfig& cfg, ActivationCounter& counter);
SpadaHooks make_spada_fault_hooks(FaultId f, const FaultConfig& cfg, ActivationCounter& counter);

// Builds the controller for the configured algorithm, instrumented with the
// requested fault. Mismatched fault/algorithm pairs are a configuration error.
std::unique_ptr<Controller> wrap_with_fault(const SystemConfiguration& config,
                                            std::optional<FaultId> fault, const FaultConfig& fc,
                                            ActivationCounter& counter);

}  // namespace sotest
