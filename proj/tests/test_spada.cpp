#include <doctest.h>

#include "brute.hpp"
#include "sotest/spada.hpp"

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

// six agents 0..5, three partitions {0,2,5} led by 0, {1,3} led by 3, {4} led
// by 4; marked chains 0->2->5 and 3->1, plus a few plain acquaintances
AcquaintancesGraph example_graph() {
    AcquaintancesGraph g;
    g.nodes = {0, 1, 2, 3, 4, 5};
    for (AgentId a : g.nodes) g.edges[a];
    g.edges[0][2] = true;
    g.edges[2][5] = true;
    g.edges[3][1] = true;
    g.edges[3][5] = false;  // acquainted but not in the same partition
    g.edges[1][0] = false;
    g.edges[4][2] = false;
    g.members = {{0, {0, 2, 5}}, {1, {1, 3}}, {2, {4}}};
    g.partition_of = {{0, 0}, {2, 0}, {5, 0}, {1, 1}, {3, 1}, {4, 2}};
    g.leaders = {{0, 0}, {1, 3}, {2, 4}};
    g.next_partition_id = 3;
    return g;
}

}  // namespace

TEST_CASE("the partitioning is the undirected closure of the marked edges") {
    AcquaintancesGraph g = example_graph();
    Partitioning p = partitions_of(g);

    CHECK(brute::blocks_of(p) ==
          std::vector<std::vector<AgentId>>{{0, 2, 5}, {1, 3}, {4}});
    REQUIRE(p.partitions.size() == 3);
    CHECK(p.partitions[0].leader == 0);
    CHECK(p.partitions[1].leader == 3);
    CHECK(p.partitions[2].leader == 4);

    SUBCASE("unmarking an edge splits the component") {
        g.edges[2][5] = false;
        CHECK(brute::blocks_of(partitions_of(g)) ==
              std::vector<std::vector<AgentId>>{{0, 2}, {1, 3}, {4}, {5}});
    }
    SUBCASE("stale bookkeeping loses the leader but not the component") {
        g.edges[2][5] = false;
        Partitioning q = partitions_of(g);
        REQUIRE(q.partitions.size() == 4);
        CHECK_FALSE(q.partitions[0].leader.has_value());  // {0,2} no longer matches
        CHECK(q.partitions[1].leader == 3);               // {1,3} untouched
    }
}

TEST_CASE("the graph reproduces the current structure exactly") {
    Rng rng(13);
    for (int round = 0; round < 50; ++round) {
        int n = rng.uniform_int(2, 20);
        std::vector<AgentId> ids;
        for (AgentId i = 0; i < n; ++i) ids.push_back(i);
        PartitioningConstraints free{1, n, 1, n};
        Partitioning p = random_constrained_partitioning(ids, free, rng);
        SystemStructure s = structure_from_partitioning(p);

        SpadaParams params;
        params.acquaintances = rng.uniform_int(1, 6);
        AcquaintancesGraph g = build_graph(s, params, rng);

        CHECK(g.nodes == ids);
        Partitioning decoded = partitions_of(g);
        CHECK(brute::blocks_of(decoded) == brute::blocks_of(p));
        // leaders are the lowest member ids
        for (const auto& part : decoded.partitions) {
            REQUIRE(part.leader.has_value());
            CHECK(*part.leader == part.members.front());
        }
        // every node carries at most |members|-1 marked edges plus the
        // requested acquaintances
        for (AgentId a : g.nodes) {
            std::size_t unmarked = 0;
            for (const auto& [to, marked] : g.edges.at(a)) {
                (void)to;
                if (!marked) ++unmarked;
            }
            CHECK(unmarked <= static_cast<std::size_t>(params.acquaintances));
        }
    }
}

TEST_CASE("a leader integrates an acquainted outsider that improves homogeneity") {
    // {0} at 0.0 and {2} at 0.5 spread the means; pulling 2 into 0's
    // partition narrows them
    AcquaintancesGraph g;
    g.nodes = {0, 1, 2};
    for (AgentId a : g.nodes) g.edges[a];
    g.edges[0][2] = false;  // 0 is acquainted with 2
    g.members = {{0, {0}}, {1, {1}}, {2, {2}}};
    g.partition_of = {{0, 0}, {1, 1}, {2, 2}};
    g.leaders = {{0, 0}, {1, 1}, {2, 2}};
    g.next_partition_id = 3;
    g.terminated = {2};

    std::map<AgentId, double> acc{{0, 0.0}, {1, 1.0}, {2, 0.5}};
    SpadaParams params;

    Rng rng(1);
    CHECK(leader_round(g, 0, acc, params, rng));
    CHECK(g.members.at(0) == std::set<AgentId>{0, 2});
    CHECK(g.partition_of.at(2) == 0);
    CHECK(g.members.count(2) == 0);  // the singleton dissolved entirely
    CHECK(g.leaders.count(2) == 0);
    CHECK(g.terminated.count(2) == 0);
    CHECK(brute::blocks_of(partitions_of(g)) ==
          std::vector<std::vector<AgentId>>{{0, 2}, {1}});
}

TEST_CASE("integrating from a surviving partition clears its terminated label") {
    // partition 0 = {0,1,2} all at 0.5 and settled; partition 1 = {3} at 0.7
    // wants one of the 0.5 agents to dilute its mean
    AcquaintancesGraph g;
    g.nodes = {0, 1, 2, 3};
    for (AgentId a : g.nodes) g.edges[a];
    g.edges[0][1] = true;
    g.edges[1][2] = true;
    g.edges[3][1] = false;
    g.members = {{0, {0, 1, 2}}, {1, {3}}};
    g.partition_of = {{0, 0}, {1, 0}, {2, 0}, {3, 1}};
    g.leaders = {{0, 0}, {1, 3}};
    g.next_partition_id = 2;
    g.terminated = {0};

    std::map<AgentId, double> acc{{0, 0.5}, {1, 0.5}, {2, 0.5}, {3, 0.7}};
    SpadaParams params;

    Rng rng(1);
    CHECK(leader_round(g, 1, acc, params, rng));
    CHECK(g.members.at(1) == std::set<AgentId>{1, 3});
    CHECK(g.members.at(0) == std::set<AgentId>{0, 2});
    CHECK(g.terminated.count(0) == 0);  // changed from outside, no longer settled
    CHECK(g.leaders.at(0) == 0);
    // the donor partition is rechained, so the closure still matches
    CHECK(brute::blocks_of(partitions_of(g)) ==
          std::vector<std::vector<AgentId>>{{0, 2}, {1, 3}});
}

TEST_CASE("a leader excludes a member when the singleton improves homogeneity") {
    // member 1 sits exactly at the mean of the means: excluding it keeps the
    // spread but adds a mean at the centre, lowering sigma
    AcquaintancesGraph g;
    g.nodes = {0, 1, 2, 3, 4};
    for (AgentId a : g.nodes) g.edges[a];
    g.edges[0][1] = true;
    g.edges[1][2] = true;
    g.members = {{0, {0, 1, 2}}, {1, {3}}, {2, {4}}};
    g.partition_of = {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 2}};
    g.leaders = {{0, 0}, {1, 3}, {2, 4}};
    g.next_partition_id = 3;

    std::map<AgentId, double> acc{{0, 0.0}, {1, 0.5}, {2, 1.0}, {3, 0.0}, {4, 1.0}};
    SpadaParams params;

    Rng rng(1);
    CHECK(leader_round(g, 0, acc, params, rng));
    CHECK(g.members.at(0) == std::set<AgentId>{0, 2});
    int singleton = g.partition_of.at(1);
    CHECK(singleton == 3);  // freshly allocated id
    CHECK(g.members.at(singleton) == std::set<AgentId>{1});
    CHECK(g.leaders.at(singleton) == 1);
    CHECK(brute::blocks_of(partitions_of(g)) ==
          std::vector<std::vector<AgentId>>{{0, 2}, {1}, {3}, {4}});
}

TEST_CASE("a leader with nothing to improve marks its partition terminated") {
    AcquaintancesGraph g;
    g.nodes = {0, 1};
    for (AgentId a : g.nodes) g.edges[a];
    g.edges[0][1] = true;
    g.members = {{0, {0, 1}}};
    g.partition_of = {{0, 0}, {1, 0}};
    g.leaders = {{0, 0}};
    g.next_partition_id = 1;

    std::map<AgentId, double> acc{{0, 0.5}, {1, 0.5}};
    SpadaParams params;
    Rng rng(1);

    CHECK_FALSE(leader_round(g, 0, acc, params, rng));
    CHECK(g.terminated.count(0) == 1);
    // a terminated partition is left alone on later rounds
    CHECK_FALSE(leader_round(g, 0, acc, params, rng));
}

TEST_CASE("remove_partition erases the nodes and all bookkeeping") {
    AcquaintancesGraph g = example_graph();
    remove_partition(g, 0);

    CHECK(g.nodes == std::vector<AgentId>{1, 3, 4});
    CHECK(g.members.count(0) == 0);
    CHECK(g.leaders.count(0) == 0);
    CHECK(g.partition_of.count(0) == 0);
    CHECK(g.partition_of.count(2) == 0);
    CHECK(g.partition_of.count(5) == 0);
    for (const auto& [from, row] : g.edges) {
        CHECK(from != 0);
        CHECK(from != 2);
        CHECK(from != 5);
        for (const auto& [to, marked] : row) {
            (void)marked;
            CHECK(to != 0);
            CHECK(to != 2);
            CHECK(to != 5);
        }
    }
    CHECK(brute::blocks_of(partitions_of(g)) ==
          std::vector<std::vector<AgentId>>{{1, 3}, {4}});

    SUBCASE("removing an unknown id is a no-op") {
        AcquaintancesGraph before = example_graph();
        remove_partition(before, 99);
        CHECK(brute::blocks_of(partitions_of(before)) ==
              std::vector<std::vector<AgentId>>{{0, 2, 5}, {1, 3}, {4}});
    }
}

TEST_CASE("the full run always yields an exact cover") {
    Rng rng(23);
    for (int round = 0; round < 30; ++round) {
        int n = rng.uniform_int(2, 25);
        std::vector<AgentId> ids;
        std::map<AgentId, double> acc;
        for (AgentId i = 0; i < n; ++i) {
            ids.push_back(i);
            acc[i] = rng.uniform();
        }
        PartitioningConstraints free{1, n, 1, n};
        Partitioning start = random_constrained_partitioning(ids, free, rng);
        SystemStructure s = structure_from_partitioning(start);

        SpadaParams params;
        params.acquaintances = rng.uniform_int(1, 8);
        params.evaluated_per_round = rng.uniform_int(1, 5);
        params.max_integrations = rng.uniform_int(1, 5);

        Partitioning result = run_spada(s, params, acc, rng);
        CHECK(validate_partitioning(result, ids).passed);
    }
}

TEST_CASE("the full run is deterministic in the seed") {
    std::vector<AgentId> ids;
    std::map<AgentId, double> acc;
    Rng fill(9);
    for (AgentId i = 0; i < 15; ++i) {
        ids.push_back(i);
        acc[i] = fill.uniform();
    }
    PartitioningConstraints free{1, 15, 1, 15};
    Rng srng(4);
    SystemStructure s =
        structure_from_partitioning(random_constrained_partitioning(ids, free, srng));
    SpadaParams params;

    auto once = [&] {
        Rng rng(31337);
        return run_spada(s, params, acc, rng);
    };
    CHECK(brute::blocks_of(once()) == brute::blocks_of(once()));
}

TEST_CASE("the run improves or preserves homogeneity versus the start") {
    std::vector<AgentId> ids{0, 1, 2, 3, 4, 5};
    std::map<AgentId, double> acc{{0, 0.1}, {1, 0.9}, {2, 0.1}, {3, 0.9}, {4, 0.5}, {5, 0.5}};
    Partitioning start = parts({{0, 1}, {2, 3}, {4, 5}});
    SystemStructure s = structure_from_partitioning(start);

    SpadaParams params;
    params.acquaintances = 5;
    params.evaluated_per_round = 5;
    params.max_integrations = 5;
    Rng rng(2);
    Partitioning result = run_spada(s, params, acc, rng);

    CHECK(brute::sigma(brute::blocks_of(result), acc) <=
          brute::sigma(brute::blocks_of(start), acc) + 1e-12);
}
