#include <doctest.h>

#include <set>

#include "brute.hpp"
#include "sotest/errors.hpp"
#include "sotest/generation.hpp"
#include "sotest/io.hpp"

using namespace sotest;

namespace {

ModelOfSuT tiny_model() {
    ModelOfSuT m = ModelOfSuT::desk_scale();
    m.agents = {2, 40};
    m.cases_per_sequence = {20, 40};
    m.ep_states = {3, 6};
    m.sequences_per_suite = 3;
    return m;
}

}  // namespace

TEST_CASE("random_constrained_partitioning respects the constraints") {
    SUBCASE("four agents in pairs yields one of the three matchings") {
        PartitioningConstraints c{2, 2, 2, 2};
        std::vector<AgentId> ids{0, 1, 2, 3};
        std::set<std::vector<std::vector<AgentId>>> seen;
        for (int seed = 0; seed < 60; ++seed) {
            Rng rng(static_cast<std::uint64_t>(seed));
            Partitioning p = random_constrained_partitioning(ids, c, rng);
            CHECK(validate_partitioning(p, ids).passed);
            CHECK(check_partition_bounds(p, c).passed);
            seen.insert(brute::blocks_of(p));
        }
        CHECK(seen.size() == 3);  // all matchings show up across seeds
    }
    SUBCASE("fuzzed feasible constraints") {
        Rng rng(8);
        for (int round = 0; round < 300; ++round) {
            int n = rng.uniform_int(1, 30);
            PartitioningConstraints c;
            for (int tries = 0;; ++tries) {
                REQUIRE(tries < 2000);
                int a = rng.uniform_int(1, n), b = rng.uniform_int(1, n);
                c.s_min = std::min(a, b);
                c.s_max = std::max(a, b);
                int x = rng.uniform_int(1, n), y = rng.uniform_int(1, n);
                c.n_min = std::min(x, y);
                c.n_max = std::max(x, y);
                if (feasible(n, c)) break;
            }
            std::vector<AgentId> ids;
            for (int i = 0; i < n; ++i) ids.push_back(i);
            Partitioning p = random_constrained_partitioning(ids, c, rng);
            CHECK(validate_partitioning(p, ids).passed);
            CHECK(check_partition_bounds(p, c).passed);
        }
    }
    SUBCASE("infeasible constraints are an error") {
        Rng rng(1);
        CHECK_THROWS_AS(
            random_constrained_partitioning({0, 1, 2}, PartitioningConstraints{2, 2, 1, 2}, rng),
            GenerationError);
    }
}

TEST_CASE("sampled system configurations are well formed") {
    ModelOfSuT m = tiny_model();
    Rng rng(31);
    for (int round = 0; round < 25; ++round) {
        Algorithm alg = round % 2 ? Algorithm::spada : Algorithm::psopp;
        SystemConfiguration cfg = sample_system_configuration(m, alg, rng);
        const int n = static_cast<int>(cfg.agents.size());
        CHECK(n >= m.agents.lo);
        CHECK(n <= m.agents.hi);

        // ids are 0..n-1 and every agent sits in exactly one group
        std::map<AgentId, int> group_count;
        for (int i = 0; i < n; ++i) CHECK(cfg.agents[static_cast<std::size_t>(i)].id == i);
        for (const auto& g : cfg.groups) {
            CHECK(g.member_ids.size() >= 2);
            CHECK(validate_profile(g.profile).passed);
            for (AgentId a : g.member_ids) {
                group_count[a]++;
                CHECK(cfg.agents[static_cast<std::size_t>(a)].group_id == g.id);
            }
            // influence covers every (type, state) pair
            for (const auto& type : default_agent_types())
                for (const auto& state : g.profile.states)
                    CHECK(g.influence.table.count({type, state}) == 1);
        }
        CHECK(static_cast<int>(group_count.size()) == n);
        for (const auto& [a, k] : group_count) CHECK(k == 1);
        CHECK(cfg.groups.size() <= static_cast<std::size_t>(std::max(1, n / 2)));

        CHECK(feasible(n, cfg.constraints));
        CHECK(cfg.constraints.s_min >= 2);
        CHECK(cfg.initial_structure.consistent());
        CHECK(validate_partitioning(cfg.initial_structure.partitioning(), cfg.universe()).passed);
        CHECK(check_partition_bounds(cfg.initial_structure.partitioning(), cfg.constraints).passed);
        CHECK(cfg.trigger.dissimilarity_threshold == doctest::Approx(m.theta));

        if (alg == Algorithm::spada) {
            REQUIRE(cfg.spada.has_value());
            CHECK(cfg.spada->acquaintances >= m.spada_acquaintances.lo);
            CHECK(cfg.spada->acquaintances <= m.spada_acquaintances.hi);
        } else {
            REQUIRE(cfg.psopp.has_value());
            CHECK(cfg.psopp->particles >= m.psopp_particles.lo);
            CHECK(cfg.psopp->particles <= m.psopp_particles.hi);
            CHECK(cfg.psopp->start_at_current >= 0);
            CHECK(cfg.psopp->start_at_current <= cfg.psopp->particles);
            CHECK(cfg.psopp->c_random + cfg.psopp->c_pbest + cfg.psopp->c_gbest ==
                  doctest::Approx(1.0));
            CHECK(cfg.psopp->max_runtime_seconds >= m.psopp_runtime.lo);
            CHECK(cfg.psopp->max_runtime_seconds <= m.psopp_runtime.hi);
        }
    }
}

TEST_CASE("forced equal partition count pins n_min to n_max") {
    ModelOfSuT m = tiny_model();
    m.force_equal_partition_count = true;
    Rng rng(99);
    for (int round = 0; round < 10; ++round) {
        SystemConfiguration cfg = sample_system_configuration(m, Algorithm::psopp, rng);
        CHECK(cfg.constraints.n_min == cfg.constraints.n_max);
    }
}

TEST_CASE("test sequences follow the group profiles") {
    ModelOfSuT m = tiny_model();
    Rng rng(7);
    SystemConfiguration cfg = sample_system_configuration(m, Algorithm::psopp, rng);
    TestSequence seq = generate_test_sequence(cfg, 30, rng);
    REQUIRE(seq.cases.size() == 30);
    for (int i = 0; i < 30; ++i) {
        const TestCase& tc = seq.cases[static_cast<std::size_t>(i)];
        CHECK(tc.step_index == i);
        CHECK(tc.group_state.size() == cfg.groups.size());
        for (const auto& g : cfg.groups) {
            REQUIRE(tc.group_state.count(g.id) == 1);
            int s = tc.group_state.at(g.id);
            CHECK(s >= 0);
            CHECK(s < static_cast<int>(g.profile.states.size()));
        }
    }
}

TEST_CASE("suite generation is deterministic in the seed") {
    ModelOfSuT m = tiny_model();
    TestSuite a = generate_test_suite(m, Algorithm::psopp, 3, 12345);
    TestSuite b = generate_test_suite(m, Algorithm::psopp, 3, 12345);
    CHECK(encode(a).dump() == encode(b).dump());
    CHECK(a.sequences.size() == static_cast<std::size_t>(m.sequences_per_suite));

    TestSuite c = generate_test_suite(m, Algorithm::psopp, 3, 12346);
    CHECK(encode(a).dump() != encode(c).dump());
}

TEST_CASE("online stream and offline list agree on any prefix") {
    ModelOfSuT m = tiny_model();
    SuiteSource first(m, Algorithm::spada, 555);
    std::vector<TestSuite> offline;
    for (int i = 0; i < 4; ++i) offline.push_back(first.next());

    SuiteSource second(m, Algorithm::spada, 555);
    for (int i = 0; i < 2; ++i) {
        TestSuite online = second.next();
        CHECK(encode(online).dump() == encode(offline[static_cast<std::size_t>(i)]).dump());
    }
    CHECK(second.produced() == 2);
}
