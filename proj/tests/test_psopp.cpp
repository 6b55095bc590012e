#include <doctest.h>

#include <set>

#include "brute.hpp"
#include "sotest/clock.hpp"
#include "sotest/psopp.hpp"

using namespace sotest;

namespace {

Partitioning parts(std::vector<std::vector<AgentId>> blocks) {
    Partitioning p;
    for (auto& b : blocks) {
        Partition part;
        part.members = std::move(b);
        p.partitions.push_back(std::move(part));
    }
    p.normalize();
    return p;
}

std::map<AgentId, double> acc(std::initializer_list<std::pair<const AgentId, double>> xs) {
    return std::map<AgentId, double>(xs);
}

}  // namespace

TEST_CASE("split carves a sub-partition out of an existing one") {
    PartitioningConstraints c{1, 3, 1, 3};
    Partitioning p = parts({{1, 2, 3}, {4, 5}});

    auto out = split(p, 0, {1}, c);
    REQUIRE(out.has_value());
    CHECK(brute::blocks_of(*out) ==
          std::vector<std::vector<AgentId>>{{1}, {2, 3}, {4, 5}});

    SUBCASE("the halves must respect s_min") {
        PartitioningConstraints tight{2, 3, 1, 3};
        CHECK_FALSE(split(p, 0, {1}, tight).has_value());
    }
    SUBCASE("the new count must respect n_max") {
        PartitioningConstraints two{1, 3, 1, 2};
        CHECK_FALSE(split(p, 0, {1}, two).has_value());
    }
    SUBCASE("first_half must be a proper non-empty subset") {
        CHECK_FALSE(split(p, 0, {}, c).has_value());
        CHECK_FALSE(split(p, 0, {1, 2, 3}, c).has_value());
        CHECK_FALSE(split(p, 0, {4}, c).has_value());
        CHECK_FALSE(split(p, 7, {1}, c).has_value());
    }
}

TEST_CASE("join merges two partitions") {
    PartitioningConstraints c{1, 4, 1, 3};
    Partitioning p = parts({{1, 2}, {3}, {4, 5}});

    auto out = join(p, 0, 1, c);
    REQUIRE(out.has_value());
    CHECK(brute::blocks_of(*out) == std::vector<std::vector<AgentId>>{{1, 2, 3}, {4, 5}});

    SUBCASE("merged size must respect s_max") {
        PartitioningConstraints tight{1, 3, 1, 3};
        CHECK_FALSE(join(p, 0, 2, tight).has_value());
    }
    SUBCASE("count after the join must respect n_min") {
        PartitioningConstraints three{1, 4, 3, 3};
        CHECK_FALSE(join(p, 0, 1, three).has_value());
    }
    SUBCASE("indices must name two distinct partitions") {
        CHECK_FALSE(join(p, 1, 1, c).has_value());
        CHECK_FALSE(join(p, 0, 9, c).has_value());
    }
}

TEST_CASE("exchange swaps members between two partitions") {
    PartitioningConstraints c{1, 4, 1, 4};
    Partitioning p = parts({{1, 2, 3}, {4, 5}});

    SUBCASE("two-way swap") {
        auto out = exchange(p, 0, 1, {1}, {4}, c);
        REQUIRE(out.has_value());
        CHECK(brute::blocks_of(*out) ==
              std::vector<std::vector<AgentId>>{{1, 5}, {2, 3, 4}});
    }
    SUBCASE("one-way move is an exchange with an empty half") {
        auto out = exchange(p, 0, 1, {2, 3}, {}, c);
        REQUIRE(out.has_value());
        CHECK(brute::blocks_of(*out) ==
              std::vector<std::vector<AgentId>>{{1}, {2, 3, 4, 5}});
    }
    SUBCASE("a partition may not be emptied") {
        CHECK_FALSE(exchange(p, 1, 0, {4, 5}, {}, c).has_value());
    }
    SUBCASE("resulting sizes must stay inside the window") {
        PartitioningConstraints tight{2, 3, 1, 4};
        CHECK_FALSE(exchange(p, 0, 1, {}, {4}, tight).has_value());
    }
    SUBCASE("members must come from the named partitions") {
        CHECK_FALSE(exchange(p, 0, 1, {4}, {}, c).has_value());
        CHECK_FALSE(exchange(p, 0, 0, {1}, {2}, c).has_value());
    }
}

TEST_CASE("fitness rewards homogeneous partition means") {
    auto a = acc({{1, 0.0}, {2, 0.0}, {3, 1.0}, {4, 1.0}});

    SUBCASE("frozen values") {
        // means 0 and 1: population stddev 0.5
        CHECK(fitness(parts({{1, 2}, {3, 4}}), a) == doctest::Approx(2.0 / 3.0));
        // means 0.5 and 0.5: perfectly homogeneous
        CHECK(fitness(parts({{1, 3}, {2, 4}}), a) == doctest::Approx(1.0));
        CHECK(fitness(parts({{1, 2, 3, 4}}), a) == doctest::Approx(1.0));
        CHECK(fitness(Partitioning{}, a) == doctest::Approx(0.0));
    }
    SUBCASE("matches the naive reference on random partitionings") {
        Rng rng(17);
        std::vector<AgentId> ids{0, 1, 2, 3, 4, 5, 6};
        std::map<AgentId, double> table;
        for (AgentId i : ids) table[i] = rng.uniform();
        PartitioningConstraints c{1, 7, 1, 7};
        for (int round = 0; round < 100; ++round) {
            Partitioning p = random_constrained_partitioning(ids, c, rng);
            CHECK(fitness(p, table) == doctest::Approx(brute::fitness(brute::blocks_of(p), table)));
        }
    }
}

TEST_CASE("the optimizer is anytime: gbest fitness never decreases") {
    Rng rng(41);
    std::vector<AgentId> ids;
    std::map<AgentId, double> table;
    for (AgentId i = 0; i < 12; ++i) {
        ids.push_back(i);
        table[i] = rng.uniform();
    }
    PartitioningConstraints c{2, 6, 2, 6};
    PsoppParams params;
    params.particles = 3;
    params.start_at_current = 0;
    params.max_runtime_seconds = 0.25;

    double last = -1.0;
    long long calls = 0;
    SimClock clock(1e-3);
    run_psopp(std::nullopt, c, params, table, ids, rng, clock, {},
              [&](const SwarmState& s) {
                  CHECK(s.gbest_fitness >= last);
                  last = s.gbest_fitness;
                  ++calls;
              });
    CHECK(calls > 0);
    CHECK(last > 0.0);
}

TEST_CASE("stagnation ends the search before the runtime budget") {
    Rng rng(5);
    std::vector<AgentId> ids{0, 1, 2, 3};
    auto table = acc({{0, 0.5}, {1, 0.5}, {2, 0.5}, {3, 0.5}});
    PartitioningConstraints c{2, 2, 2, 2};
    PsoppParams params;
    params.particles = 2;
    params.start_at_current = 0;
    params.max_runtime_seconds = 1e9;  // effectively no budget

    long long iterations = 0;
    SimClock clock(1e-3);
    run_psopp(std::nullopt, c, params, table, ids, rng, clock, {},
              [&](const SwarmState& s) { iterations = s.iteration; });
    // all means are 0.5, so fitness is 1.0 from the start and never improves
    CHECK(iterations >= kStagnationLimit);
    CHECK(iterations <= kStagnationLimit + 2 * params.particles);
}

TEST_CASE("optimizer results always satisfy the constraints") {
    Rng rng(77);
    for (int round = 0; round < 15; ++round) {
        int n = rng.uniform_int(4, 14);
        std::vector<AgentId> ids;
        std::map<AgentId, double> table;
        for (AgentId i = 0; i < n; ++i) {
            ids.push_back(i);
            table[i] = rng.uniform();
        }
        PartitioningConstraints c;
        do {
            int a = rng.uniform_int(2, n), b = rng.uniform_int(2, n);
            c.s_min = std::min(a, b);
            c.s_max = std::max(a, b);
            int x = rng.uniform_int(1, std::max(1, n / 2)),
                y = rng.uniform_int(1, std::max(1, n / 2));
            c.n_min = std::min(x, y);
            c.n_max = std::max(x, y);
        } while (!feasible(n, c));

        PsoppParams params;
        params.particles = 2;
        params.start_at_current = 0;
        params.max_runtime_seconds = 0.05;
        SimClock clock(1e-3);
        Partitioning best = run_psopp(std::nullopt, c, params, table, ids, rng, clock);
        CHECK(validate_partitioning(best, ids).passed);
        CHECK(check_partition_bounds(best, c).passed);
    }
}

TEST_CASE("the optimizer is deterministic under a simulated clock") {
    std::vector<AgentId> ids;
    std::map<AgentId, double> table;
    Rng fill(3);
    for (AgentId i = 0; i < 10; ++i) {
        ids.push_back(i);
        table[i] = fill.uniform();
    }
    PartitioningConstraints c{2, 5, 2, 5};
    PsoppParams params;
    params.particles = 3;
    params.start_at_current = 0;
    params.max_runtime_seconds = 0.1;

    auto once = [&] {
        Rng rng(2024);
        SimClock clock(1e-3);
        return run_psopp(std::nullopt, c, params, table, ids, rng, clock);
    };
    CHECK(brute::blocks_of(once()) == brute::blocks_of(once()));
}

TEST_CASE("seeded particles start from the current partitioning") {
    std::vector<AgentId> ids{0, 1, 2, 3};
    auto table = acc({{0, 0.1}, {1, 0.2}, {2, 0.3}, {3, 0.4}});
    PartitioningConstraints c{2, 2, 2, 2};
    Partitioning current = parts({{0, 3}, {1, 2}});

    PsoppParams params;
    params.particles = 2;
    params.start_at_current = 2;
    params.max_runtime_seconds = 1e9;

    bool first_observation = true;
    Rng rng(1);
    SimClock clock(1e-3);
    run_psopp(current, c, params, table, ids, rng, clock, {},
              [&](const SwarmState& s) {
                  if (!first_observation) return;
                  first_observation = false;
                  for (const auto& p : s.particles)
                      CHECK(brute::blocks_of(p.pbest) == brute::blocks_of(current));
              });
}

TEST_CASE("approaching the personal best rebuilds one of its partitions") {
    // one particle, moves only toward pbest; pbest holds {1,3} which the
    // position lacks, so within a few iterations the position must contain it
    std::vector<AgentId> ids{1, 2, 3, 4};
    auto table = acc({{1, 0.9}, {2, 0.9}, {3, 0.1}, {4, 0.1}});
    PartitioningConstraints c{1, 4, 1, 4};

    SwarmState swarm;
    swarm.particles.resize(1);
    Particle& p = swarm.particles[0];
    p.id = 0;
    p.position = parts({{1, 2}, {3, 4}});
    p.pbest = parts({{1, 3}, {2, 4}});
    p.pbest_fitness = fitness(p.pbest, table);
    p.nbest = p.pbest;
    p.nbest_fitness = p.pbest_fitness;
    swarm.gbest = p.pbest;
    swarm.gbest_fitness = p.pbest_fitness;

    PsoppParams params;
    params.particles = 1;
    params.c_random = 0.0;
    params.c_pbest = 1.0;
    params.c_gbest = 0.0;
    params.max_runtime_seconds = 1e9;

    int approach_events = 0;
    MoveHook hook = [&](const MoveEvent& e, Partitioning pos, Rng&) {
        CHECK((e.op == MoveEvent::Op::approach_split ||
               e.op == MoveEvent::Op::approach_join ||
               e.op == MoveEvent::Op::approach_exchange));
        ++approach_events;
        return pos;
    };

    Rng rng(6);
    SimClock clock(1e-3);
    for (int i = 0; i < 40 && brute::blocks_of(p.position) != brute::blocks_of(p.pbest); ++i)
        iterate_particle(p, swarm, params, c, table, rng, clock, hook);
    CHECK(brute::blocks_of(p.position) == brute::blocks_of(p.pbest));
    CHECK(approach_events > 0);
}
