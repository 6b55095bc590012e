#include "sotest/env.hpp"

#include <algorithm>
#include <cmath>

#include "sotest/errors.hpp"

namespace sotest {

namespace {
constexpr double kRowSumTolerance = 1e-9;
}

Verdict validate_profile(const EnvironmentProfile& ep) {
    std::vector<Violation> violations;
    auto fail = [&] { violations.push_back({ViolationKind::count_bound, {}, View::gray}); };

    const std::size_t n = ep.states.size();
    if (n == 0) fail();
    if (ep.initial_state < 0 || static_cast<std::size_t>(ep.initial_state) >= n) fail();
    if (ep.transitions.size() != n) fail();
    for (const auto& row : ep.transitions) {
        if (row.size() != n) {
            fail();
            continue;
        }
        double sum = 0.0;
        for (double p : row) {
            if (p < 0.0 || p > 1.0) fail();
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) fail();
    }
    if (violations.empty()) return Verdict::pass();
    return Verdict::fail(std::move(violations));
}

int next_state_for_draw(const EnvironmentProfile& ep, int current, double u) {
    const auto& row = ep.transitions.at(static_cast<std::size_t>(current));
    double cum = 0.0;
    int last_positive = current;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] > 0.0) last_positive = static_cast<int>(i);
        cum += row[i];
        if (u < cum) return static_cast<int>(i);
    }
    // float slack at the top of the row
    return last_positive;
}

int step_profile(const EnvironmentProfile& ep, int current, Rng& rng) {
    return next_state_for_draw(ep, current, rng.uniform());
}

Agent apply_influence(const InfluenceFunction& f, const Agent& agent, const std::string& state_label) {
    auto it = f.table.find({agent.type, state_label});
    if (it == f.table.end())
        throw ConfigError("influence table has no entry for type '" + agent.type + "' state '" +
                          state_label + "'");
    Agent out = agent;
    out.prediction_accuracy = std::clamp(agent.prediction_accuracy + it->second, 0.0, 1.0);
    return out;
}

Coverage coverage(const EnvironmentProfile& ep, const EnvTrace& trace) {
    Coverage cov;
    const std::size_t n = ep.states.size();
    if (n == 0) return cov;

    std::size_t visited = 0;
    for (const auto& [state, count] : trace.visited)
        if (count > 0 && state >= 0 && static_cast<std::size_t>(state) < n) ++visited;
    cov.state_coverage = static_cast<double>(visited) / static_cast<double>(n);

    std::size_t positive = 0;
    for (const auto& row : ep.transitions)
        for (double p : row)
            if (p > 0.0) ++positive;
    if (positive == 0) return cov;

    std::size_t taken = 0;
    for (const auto& [edge, count] : trace.taken) {
        if (count <= 0) continue;
        auto [from, to] = edge;
        if (from < 0 || to < 0) continue;
        if (static_cast<std::size_t>(from) >= n || static_cast<std::size_t>(to) >= n) continue;
        if (ep.transitions[from][to] > 0.0) ++taken;
    }
    cov.transition_coverage = static_cast<double>(taken) / static_cast<double>(positive);
    return cov;
}

}  // namespace sotest
