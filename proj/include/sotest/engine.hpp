#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sotest/clock.hpp"
#include "sotest/generation.hpp"
#include "sotest/oracle.hpp"

namespace sotest {

// Adapter contract every system under test implements. initiate() hands over
// the current organisation and agent states, compute() runs one
// reorganisation and returns the raw solution, adopt() turns a solution into
// the next organisation (default: the engine's adoption procedure, which
// preserves exactly-one membership no matter how broken the solution is).
class Controller {
public:
    virtual ~Controller() = default;
    virtual void initiate(const SystemStructure& structure,
                          const std::map<AgentId, double>& accuracies) = 0;
    virtual Partitioning compute(Rng& rng, Clock& clock) = 0;
    virtual SystemStructure adopt(const Partitioning& solution, const SystemStructure& current) const;
    virtual Algorithm kind() const = 0;
};

// Moves every agent named by the result into the avpp of its first result
// partition (partitions taken in normalized order), leaves unnamed agents in
// their old avpp, drops emptied avpps, and mints fresh avpp ids for the new
// partitions.
SystemStructure adopt_result(const SystemStructure& current, const Partitioning& result);

struct StepReport {
    int step_index = 0;
    std::map<int, int> applied_states;  // group id -> profile state
    bool triggered = false;
    std::optional<Verdict> gray;        // present iff triggered
    std::optional<Verdict> black;       // present iff triggered and no smoke
    bool smoke = false;
    std::string smoke_message;
    long long activations_delta = 0;
    double compute_seconds = 0.0;       // per the injected clock
};

enum class SequenceStatus { completed, aborted_black, aborted_smoke };

std::string to_string(SequenceStatus s);

struct SequenceResult {
    std::vector<StepReport> reports;
    std::map<int, EnvTrace> traces;     // group id -> trace
    SequenceStatus status = SequenceStatus::completed;
    long long activations_total = 0;
    SystemStructure final_structure;
};

// Running counter the fault wrappers bump once per faulty intermediate state.
class ActivationCounter {
public:
    void bump() { ++count_; }
    long long value() const { return count_; }

private:
    long long count_ = 0;
};

struct EngineOptions {
    double smoke_runtime_factor = 10.0;  // budget overrun treated as a smoke failure
};

// Stepwise executor: apply environment transitions, update agent states,
// fire the trigger check, run the adapter protocol, consult the oracle.
// Stop policy: continue on gray findings, abort on black or smoke ones.
class Engine {
public:
    explicit Engine(EngineOptions options = {}) : options_(options) {}

    SequenceResult run_sequence(const SystemConfiguration& config, const TestSequence& sequence,
                                Controller& controller, const Monitor& monitor, Clock& clock,
                                const ActivationCounter* activations = nullptr) const;

private:
    EngineOptions options_;
};

}  // namespace sotest
