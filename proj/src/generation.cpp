#include "sotest/generation.hpp"

#include <algorithm>
#include <string>

#include "sotest/errors.hpp"

namespace sotest {

namespace {
constexpr int kRejectionCap = 10000;
}

std::string to_string(Algorithm a) {
    return a == Algorithm::spada ? "spada" : "psopp";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "spada") return Algorithm::spada;
    if (s == "psopp") return Algorithm::psopp;
    throw ConfigError("unknown algorithm '" + s + "'");
}

std::string to_string(SuiteMode m) {
    return m == SuiteMode::offline ? "offline" : "online";
}

SuiteMode suite_mode_from_string(const std::string& s) {
    if (s == "offline") return SuiteMode::offline;
    if (s == "online") return SuiteMode::online;
    throw ConfigError("unknown mode '" + s + "'");
}

ModelOfSuT ModelOfSuT::desk_scale() {
    ModelOfSuT m;
    m.agents = {2, 200};
    m.cases_per_sequence = {200, 400};
    m.ep_states = {3, 25};
    m.sequences_per_suite = 10;
    m.psopp_runtime = {0.05, 0.5};
    return m;
}

std::vector<AgentId> SystemConfiguration::universe() const {
    std::vector<AgentId> ids;
    ids.reserve(agents.size());
    for (const auto& a : agents) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::map<AgentId, double> SystemConfiguration::initial_accuracies() const {
    std::map<AgentId, double> acc;
    for (const auto& a : agents) acc[a.id] = a.prediction_accuracy;
    return acc;
}

Partitioning random_constrained_partitioning(const std::vector<AgentId>& universe,
                                             const PartitioningConstraints& c, Rng& rng) {
    const int total = static_cast<int>(universe.size());
    std::vector<int> counts;
    for (int n = std::max(1, c.n_min); n <= c.n_max; ++n) {
        long lo = static_cast<long>(n) * c.s_min;
        long hi = static_cast<long>(n) * c.s_max;
        if (lo <= total && total <= hi) counts.push_back(n);
    }
    if (counts.empty())
        throw GenerationError("no feasible partition count for " + std::to_string(total) +
                              " agents");

    const int n = counts[rng.index(counts.size())];
    std::vector<AgentId> pool = universe;
    rng.shuffle(pool);

    Partitioning p;
    p.partitions.resize(static_cast<std::size_t>(n));
    // round robin keeps sizes balanced, which provably stays inside
    // [s_min, s_max] whenever n is feasible
    for (std::size_t i = 0; i < pool.size(); ++i)
        p.partitions[i % static_cast<std::size_t>(n)].members.push_back(pool[i]);
    p.normalize();
    return p;
}

SpadaParams sample_spada_parameters(const ModelOfSuT& m, Rng& rng) {
    SpadaParams p;
    p.acquaintances = rng.uniform_int(m.spada_acquaintances.lo, m.spada_acquaintances.hi);
    p.evaluated_per_round = rng.uniform_int(m.spada_evaluated.lo, m.spada_evaluated.hi);
    p.max_integrations = rng.uniform_int(m.spada_integrations.lo, m.spada_integrations.hi);
    return p;
}

PsoppParams sample_psopp_parameters(const ModelOfSuT& m, int current_partitions, Rng& rng) {
    (void)current_partitions;
    PsoppParams p;
    p.particles = rng.uniform_int(m.psopp_particles.lo, m.psopp_particles.hi);
    p.start_at_current = rng.uniform_int(0, p.particles);
    // uniform over the probability simplex
    double a = rng.exponential(), b = rng.exponential(), c = rng.exponential();
    double sum = a + b + c;
    p.c_random = a / sum;
    p.c_pbest = b / sum;
    p.c_gbest = c / sum;
    p.max_runtime_seconds = rng.uniform(m.psopp_runtime.lo, m.psopp_runtime.hi);
    return p;
}

namespace {

PartitioningConstraints sample_constraints(const ModelOfSuT& m, int num_agents, Rng& rng) {
    for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
        PartitioningConstraints c;
        int a = rng.uniform_int(2, std::max(2, num_agents));
        int b = rng.uniform_int(2, std::max(2, num_agents));
        c.s_min = std::min(a, b);
        c.s_max = std::max(a, b);
        int half = std::max(1, num_agents / 2);
        if (m.force_equal_partition_count) {
            c.n_min = c.n_max = rng.uniform_int(1, half);
        } else {
            int x = rng.uniform_int(1, half);
            int y = rng.uniform_int(1, half);
            c.n_min = std::min(x, y);
            c.n_max = std::max(x, y);
        }
        if (feasible(num_agents, c)) return c;
    }
    throw GenerationError("constraint sampling exceeded the rejection cap");
}

EnvironmentProfile sample_profile(const ModelOfSuT& m, Rng& rng) {
    EnvironmentProfile ep;
    const int n = rng.uniform_int(m.ep_states.lo, m.ep_states.hi);
    for (int i = 0; i < n; ++i) ep.states.push_back("s" + std::to_string(i));
    ep.initial_state = rng.uniform_int(0, n - 1);
    ep.transitions.assign(static_cast<std::size_t>(n), std::vector<double>(n, 0.0));
    for (auto& row : ep.transitions) {
        double sum = 0.0;
        for (auto& w : row) {
            w = 1.0 - rng.uniform();  // (0,1], keeps every transition positive
            sum += w;
        }
        for (auto& w : row) w /= sum;
    }
    return ep;
}

InfluenceFunction sample_influence(const ModelOfSuT& m, const EnvironmentProfile& ep, Rng& rng) {
    InfluenceFunction f;
    for (const auto& type : default_agent_types())
        for (const auto& state : ep.states)
            f.table[{type, state}] = rng.uniform(m.influence_delta.lo, m.influence_delta.hi);
    return f;
}

}  // namespace

SystemConfiguration sample_system_configuration(const ModelOfSuT& m, Algorithm algorithm,
                                                Rng& rng) {
    SystemConfiguration cfg;
    cfg.algorithm = algorithm;
    cfg.trigger.dissimilarity_threshold = m.theta;

    const int num_agents = rng.uniform_int(m.agents.lo, m.agents.hi);
    cfg.constraints = sample_constraints(m, num_agents, rng);

    cfg.agents.resize(static_cast<std::size_t>(num_agents));
    for (int i = 0; i < num_agents; ++i) {
        cfg.agents[i].id = i;
        cfg.agents[i].type = rng.pick(default_agent_types());
        cfg.agents[i].prediction_accuracy = rng.uniform();
    }

    // groups of at least two agents each
    const int group_count = rng.uniform_int(1, std::max(1, num_agents / 2));
    std::vector<AgentId> pool = cfg.universe();
    rng.shuffle(pool);
    cfg.groups.resize(static_cast<std::size_t>(group_count));
    std::size_t cursor = 0;
    for (int g = 0; g < group_count; ++g) {
        cfg.groups[g].id = g;
        cfg.groups[g].member_ids.push_back(pool[cursor++]);
        cfg.groups[g].member_ids.push_back(pool[cursor++]);
    }
    while (cursor < pool.size()) {
        int g = rng.uniform_int(0, group_count - 1);
        cfg.groups[g].member_ids.push_back(pool[cursor++]);
    }
    for (auto& group : cfg.groups) {
        std::sort(group.member_ids.begin(), group.member_ids.end());
        for (AgentId a : group.member_ids) cfg.agents[a].group_id = group.id;
    }

    for (std::size_t g = 0; g < cfg.groups.size(); ++g) {
        if (!m.fixed_profiles.empty()) {
            const auto& ep = m.fixed_profiles[g % m.fixed_profiles.size()];
            if (!validate_profile(ep).passed)
                throw ConfigError("fixed environment profile is invalid");
            cfg.groups[g].profile = ep;
        } else {
            cfg.groups[g].profile = sample_profile(m, rng);
        }
        if (m.fixed_influence)
            cfg.groups[g].influence = *m.fixed_influence;
        else
            cfg.groups[g].influence = sample_influence(m, cfg.groups[g].profile, rng);
    }

    cfg.initial_structure =
        structure_from_partitioning(random_constrained_partitioning(cfg.universe(), cfg.constraints, rng));

    if (algorithm == Algorithm::spada)
        cfg.spada = sample_spada_parameters(m, rng);
    else
        cfg.psopp = sample_psopp_parameters(
            m, static_cast<int>(cfg.initial_structure.avpps.size()), rng);

    cfg.master_seed = rng.next_u64();
    return cfg;
}

TestSequence generate_test_sequence(const SystemConfiguration& config, int length, Rng& rng) {
    TestSequence seq;
    std::map<int, int> current;
    for (const auto& g : config.groups) current[g.id] = g.profile.initial_state;
    for (int step = 0; step < length; ++step) {
        TestCase tc;
        tc.step_index = step;
        for (const auto& g : config.groups) {
            int next = step_profile(g.profile, current[g.id], rng);
            tc.group_state[g.id] = next;
            current[g.id] = next;
        }
        seq.cases.push_back(std::move(tc));
    }
    return seq;
}

TestSuite generate_test_suite(const ModelOfSuT& m, Algorithm algorithm, std::uint64_t suite_id,
                              std::uint64_t seed) {
    TestSuite suite;
    suite.id = suite_id;
    Rng rng(seed);
    suite.config = sample_system_configuration(m, algorithm, rng);
    suite.config.master_seed = seed;
    for (int i = 0; i < m.sequences_per_suite; ++i) {
        int length = rng.uniform_int(m.cases_per_sequence.lo, m.cases_per_sequence.hi);
        TestSequence seq = generate_test_sequence(suite.config, length, rng);
        seq.seed = mix_seed(seed, 0x5e90 + static_cast<std::uint64_t>(i));
        suite.sequences.push_back(std::move(seq));
    }
    return suite;
}

SuiteSource::SuiteSource(ModelOfSuT model, Algorithm algorithm, std::uint64_t seed)
    : model_(std::move(model)), algorithm_(algorithm), seed_(seed) {}

TestSuite SuiteSource::next() {
    std::uint64_t suite_seed = mix_seed(seed_, next_id_);
    TestSuite suite = generate_test_suite(model_, algorithm_, next_id_, suite_seed);
    ++next_id_;
    return suite;
}

}  // namespace sotest
