#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sotest/domain.hpp"
#include "sotest/rng.hpp"

namespace sotest {

// First-order Markov chain over the states an agent group can observe.
// State order is the declared order; sampling walks the cumulative sums in
// exactly that order so replays agree everywhere.
struct EnvironmentProfile {
    std::vector<std::string> states;
    int initial_state = 0;
    std::vector<std::vector<double>> transitions;  // row stochastic, transitions[from][to]
};

// Deterministic accuracy delta per (agent type, state label).
struct InfluenceFunction {
    std::map<std::pair<AgentType, std::string>, double> table;
};

struct AgentGroup {
    int id = 0;
    std::vector<AgentId> member_ids;
    EnvironmentProfile profile;
    InfluenceFunction influence;
};

struct EnvTrace {
    std::map<int, int> visited;                  // state index -> count
    std::map<std::pair<int, int>, int> taken;    // (from,to) -> count
};

Verdict validate_profile(const EnvironmentProfile& ep);

// Kernel of step_profile: first state whose cumulative probability exceeds u.
int next_state_for_draw(const EnvironmentProfile& ep, int current, double u);

// Consumes exactly one uniform draw.
int step_profile(const EnvironmentProfile& ep, int current, Rng& rng);

// Clamped to [0,1]; a missing table entry is a configuration error.
Agent apply_influence(const InfluenceFunction& f, const Agent& agent, const std::string& state_label);

struct Coverage {
    double state_coverage = 0.0;
    double transition_coverage = 0.0;
};

// Fractions of distinct states visited and distinct positive-probability
// transitions taken.
Coverage coverage(const EnvironmentProfile& ep, const EnvTrace& trace);

}  // namespace sotest
