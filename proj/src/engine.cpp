#include "sotest/engine.hpp"

#include <algorithm>

#include "sotest/errors.hpp"

namespace sotest {

std::string to_string(SequenceStatus s) {
    switch (s) {
        case SequenceStatus::completed: return "completed";
        case SequenceStatus::aborted_black: return "aborted-black";
        case SequenceStatus::aborted_smoke: return "aborted-smoke";
    }
    return "unknown";
}

SystemStructure Controller::adopt(const Partitioning& solution, const SystemStructure& current) const {
    return adopt_result(current, solution);
}

SystemStructure adopt_result(const SystemStructure& current, const Partitioning& result) {
    Partitioning ordered = result;
    ordered.normalize();

    // first result partition claiming an agent wins; agents the organisation
    // does not know are ignored
    std::map<AgentId, std::size_t> claimed;
    for (std::size_t i = 0; i < ordered.partitions.size(); ++i)
        for (AgentId a : ordered.partitions[i].members)
            if (current.assignment.count(a)) claimed.emplace(a, i);

    SystemStructure next;
    next.next_avpp_id = current.next_avpp_id;

    std::vector<std::vector<AgentId>> moved(ordered.partitions.size());
    for (const auto& [agent, idx] : claimed) moved[idx].push_back(agent);

    for (auto& members : moved) {
        if (members.empty()) continue;
        int id = next.next_avpp_id++;
        std::sort(members.begin(), members.end());
        Partition part;
        part.members = members;
        next.avpps[id] = std::move(part);
        for (AgentId a : members) next.assignment[a] = id;
    }

    // agents the solution forgot stay together in their old avpp
    for (const auto& [old_id, part] : current.avpps) {
        Partition leftover;
        for (AgentId a : part.members)
            if (!claimed.count(a)) leftover.members.push_back(a);
        if (leftover.members.empty()) continue;
        std::sort(leftover.members.begin(), leftover.members.end());
        next.avpps[old_id] = leftover;
        for (AgentId a : leftover.members) next.assignment[a] = old_id;
    }

    return next;
}

SequenceResult Engine::run_sequence(const SystemConfiguration& config,
                                    const TestSequence& sequence, Controller& controller,
                                    const Monitor& monitor, Clock& clock,
                                    const ActivationCounter* activations) const {
    SequenceResult out;
    SystemStructure structure = config.initial_structure;
    std::map<AgentId, double> accuracies = config.initial_accuracies();

    std::map<AgentId, const AgentGroup*> group_of_agent;
    std::map<int, const AgentGroup*> groups;
    std::map<int, int> env_state;
    std::map<AgentId, Agent> agent_state;
    for (const auto& g : config.groups) {
        groups[g.id] = &g;
        env_state[g.id] = g.profile.initial_state;
        out.traces[g.id].visited[g.profile.initial_state]++;
        for (AgentId a : g.member_ids) group_of_agent[a] = &g;
    }
    for (const auto& a : config.agents) agent_state[a.id] = a;

    const double theta = config.trigger.dissimilarity_threshold;
    const long long initial_activations = activations ? activations->value() : 0;
    long long last_activations = initial_activations;
    Rng sequence_rng(sequence.seed);

    for (const auto& tc : sequence.cases) {
        StepReport report;
        report.step_index = tc.step_index;

        // 1. advance every group environment and update its members
        for (const auto& [gid, next_state] : tc.group_state) {
            auto it = groups.find(gid);
            if (it == groups.end()) throw ConfigError("test case names unknown group");
            const AgentGroup& g = *it->second;
            int prev = env_state[gid];
            env_state[gid] = next_state;
            report.applied_states[gid] = next_state;
            out.traces[gid].visited[next_state]++;
            out.traces[gid].taken[{prev, next_state}]++;

            const std::string& label = g.profile.states.at(static_cast<std::size_t>(next_state));
            for (AgentId a : g.member_ids) {
                Agent& agent = agent_state[a];
                agent = apply_influence(g.influence, agent, label);
                accuracies[a] = agent.prediction_accuracy;
            }
        }

        // 2. trigger check
        report.triggered = dissimilarity(structure, accuracies) > theta;

        // 3. adapter protocol with oracle checks around adoption
        if (report.triggered) {
            bool smoke = false;
            std::string smoke_message;
            Partitioning solution;
            double started = clock.now();
            try {
                controller.initiate(structure, accuracies);
                solution = controller.compute(sequence_rng, clock);
            } catch (const std::exception& e) {
                smoke = true;
                smoke_message = e.what();
            } catch (...) {
                smoke = true;
                smoke_message = "unknown failure inside the system under test";
            }
            report.compute_seconds = clock.now() - started;

            if (!smoke && config.psopp &&
                report.compute_seconds >
                    options_.smoke_runtime_factor * config.psopp->max_runtime_seconds) {
                smoke = true;
                smoke_message = "runtime budget exceeded more than " +
                                std::to_string(options_.smoke_runtime_factor) + "x";
            }

            if (activations) {
                report.activations_delta = activations->value() - last_activations;
                last_activations = activations->value();
            }

            if (smoke) {
                report.smoke = true;
                report.smoke_message = smoke_message;
                out.reports.push_back(std::move(report));
                out.status = SequenceStatus::aborted_smoke;
                break;
            }

            report.gray = monitor.check_solution(solution);
            structure = controller.adopt(solution, structure);
            report.black = monitor.check_structure(structure);

            bool black_failed = !report.black->passed;
            out.reports.push_back(std::move(report));
            if (black_failed) {
                out.status = SequenceStatus::aborted_black;
                break;
            }
            continue;
        }

        out.reports.push_back(std::move(report));
    }

    out.activations_total = activations ? activations->value() - initial_activations : 0;
    out.final_structure = structure;
    return out;
}

}  // namespace sotest
