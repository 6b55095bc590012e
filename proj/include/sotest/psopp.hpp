#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sotest/engine.hpp"

namespace sotest {

// Every operator application is announced through a MoveEvent so fault
// wrappers can corrupt the outcome at the exact call site.
struct MoveEvent {
    enum class Op {
        random_split,
        random_join,
        random_exchange,
        approach_split,
        approach_join,
        approach_exchange,
    };
    Op op;
    std::vector<AgentId> source_a;  // split: K        join: K  exchange: K
    std::vector<AgentId> source_b;  // split: unused   join: L  exchange: L
    std::vector<AgentId> result_a;  // split: L        join: M  exchange: M
    std::vector<AgentId> result_b;  // split: M        join: unused  exchange: N
};

std::string to_string(MoveEvent::Op op);

// Receives the event and the freshly computed position; returns the position
// that actually enters the swarm (possibly corrupted).
using MoveHook = std::function<Partitioning(const MoveEvent&, Partitioning, Rng&)>;

// Applicability-checked operators. nullopt means the call would violate the
// constraints (or is malformed); the input is never modified.
std::optional<Partitioning> split(const Partitioning& p, std::size_t target,
                                  const std::vector<AgentId>& first_half,
                                  const PartitioningConstraints& c);
std::optional<Partitioning> join(const Partitioning& p, std::size_t a, std::size_t b,
                                 const PartitioningConstraints& c);
std::optional<Partitioning> exchange(const Partitioning& p, std::size_t a, std::size_t b,
                                     const std::vector<AgentId>& from_a,
                                     const std::vector<AgentId>& from_b,
                                     const PartitioningConstraints& c);

// 1 / (1 + sigma) where sigma is the population standard deviation of the
// partition mean accuracies. 1.0 is optimal (perfectly homogeneous).
double fitness(const Partitioning& p, const std::map<AgentId, double>& accuracies);

struct Particle {
    int id = 0;
    Partitioning position;
    Partitioning pbest;
    double pbest_fitness = 0.0;
    std::vector<int> neighborhood;  // fully connected: everyone else
    Partitioning nbest;
    double nbest_fitness = 0.0;
    bool done = false;
};

struct SwarmState {
    std::vector<Particle> particles;
    Partitioning gbest;
    double gbest_fitness = 0.0;
    long long iteration = 0;
    long long stagnant_iterations = 0;
    double started_at = 0.0;
};

using PsoppObserver = std::function<void(const SwarmState&)>;

// One six-step iteration for one particle: evaluate, update pbest and inform
// neighbours, refresh nbest, check termination, draw the move kind, move.
void iterate_particle(Particle& particle, SwarmState& swarm, const PsoppParams& params,
                      const PartitioningConstraints& c,
                      const std::map<AgentId, double>& accuracies, Rng& rng, Clock& clock,
                      const MoveHook& hook = {});

// Anytime optimizer: returns the best found position when the runtime budget
// or the stagnation limit is reached. `initial` seeds start_at_current
// particles when it satisfies the constraints.
Partitioning run_psopp(const std::optional<Partitioning>& initial,
                       const PartitioningConstraints& c, const PsoppParams& params,
                       const std::map<AgentId, double>& accuracies,
                       const std::vector<AgentId>& universe, Rng& rng, Clock& clock,
                       const MoveHook& hook = {}, const PsoppObserver& observer = {});

// Controller adapter; the hook is how fault wrappers instrument it.
std::unique_ptr<Controller> make_psopp_controller(PsoppParams params, PartitioningConstraints c,
                                                  MoveHook hook = {});

// PSOPP stops after this many iterations without gbest improvement.
inline constexpr long long kStagnationLimit = 200;

}  // namespace sotest
