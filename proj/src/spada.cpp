#include "sotest/spada.hpp"

#include <algorithm>
#include <cmath>

#include "sotest/errors.hpp"

namespace sotest {

namespace {

constexpr double kImprovementEps = 1e-12;

void mark_chain(AcquaintancesGraph& g, const std::set<AgentId>& members) {
    AgentId prev = -1;
    for (AgentId a : members) {
        if (prev >= 0) g.edges[prev][a] = true;
        prev = a;
    }
}

// strip all marked edges between members of this partition
void unmark_internal(AcquaintancesGraph& g, int pid) {
    const auto& mem = g.members.at(pid);
    for (AgentId a : mem) {
        auto it = g.edges.find(a);
        if (it == g.edges.end()) continue;
        for (auto& [to, marked] : it->second)
            if (marked && mem.count(to)) marked = false;
    }
}

// also strips marked edges incident to `leaving`, then rebuilds the chain
void rechain_without(AcquaintancesGraph& g, int pid, AgentId leaving) {
    auto& mem = g.members.at(pid);
    auto drop_marks = [&](AgentId from) {
        auto it = g.edges.find(from);
        if (it == g.edges.end()) return;
        for (auto& [to, marked] : it->second)
            if (marked && (to == leaving || from == leaving || mem.count(to))) marked = false;
    };
    drop_marks(leaving);
    for (AgentId a : mem) {
        auto it = g.edges.find(a);
        if (it == g.edges.end()) continue;
        auto jt = it->second.find(leaving);
        if (jt != it->second.end()) jt->second = false;
    }
    unmark_internal(g, pid);
    mark_chain(g, mem);
}

struct MeanStats {
    double sum = 0.0;
    double sq = 0.0;
    int k = 0;

    void add(double m) {
        sum += m;
        sq += m * m;
        ++k;
    }
    void remove(double m) {
        sum -= m;
        sq -= m * m;
        --k;
    }
    double sigma2() const {
        if (k <= 0) return 0.0;
        double mean = sum / k;
        return std::max(0.0, sq / k - mean * mean);
    }
};

double accuracy_of(const std::map<AgentId, double>& accuracies, AgentId a) {
    auto it = accuracies.find(a);
    return it == accuracies.end() ? 0.0 : it->second;
}

}  // namespace

AcquaintancesGraph build_graph(const SystemStructure& structure, const SpadaParams& params,
                               Rng& rng) {
    AcquaintancesGraph g;
    for (const auto& [agent, avpp] : structure.assignment) {
        (void)avpp;
        g.nodes.push_back(agent);
    }
    std::sort(g.nodes.begin(), g.nodes.end());
    for (AgentId a : g.nodes) g.edges[a];  // ensure every node has an adjacency row

    for (const auto& [avpp_id, part] : structure.avpps) {
        (void)avpp_id;
        int pid = g.next_partition_id++;
        std::set<AgentId> mem(part.members.begin(), part.members.end());
        g.leaders[pid] = *mem.begin();  // lowest agent id
        for (AgentId a : mem) g.partition_of[a] = pid;
        mark_chain(g, mem);
        g.members[pid] = std::move(mem);
    }

    // unmarked random acquaintances widen what leaders can see
    if (g.nodes.size() > 1) {
        const std::size_t want = std::min<std::size_t>(
            static_cast<std::size_t>(std::max(0, params.acquaintances)), g.nodes.size() - 1);
        for (AgentId from : g.nodes) {
            std::vector<AgentId> others;
            others.reserve(g.nodes.size() - 1);
            for (AgentId to : g.nodes)
                if (to != from) others.push_back(to);
            rng.shuffle(others);
            for (std::size_t i = 0; i < want; ++i) {
                AgentId to = others[i];
                g.edges[from].emplace(to, false);  // keep an existing marked edge marked
            }
        }
    }
    return g;
}

Partitioning partitions_of(const AcquaintancesGraph& g) {
    // undirected closure of the marked edges
    std::map<AgentId, std::vector<AgentId>> adj;
    for (const auto& [from, row] : g.edges)
        for (const auto& [to, marked] : row)
            if (marked) {
                adj[from].push_back(to);
                adj[to].push_back(from);
            }

    Partitioning out;
    std::set<AgentId> seen;
    for (AgentId start : g.nodes) {
        if (seen.count(start)) continue;
        std::vector<AgentId> stack{start};
        std::set<AgentId> component;
        seen.insert(start);
        while (!stack.empty()) {
            AgentId cur = stack.back();
            stack.pop_back();
            component.insert(cur);
            auto it = adj.find(cur);
            if (it == adj.end()) continue;
            for (AgentId next : it->second)
                if (!seen.count(next)) {
                    seen.insert(next);
                    stack.push_back(next);
                }
        }
        Partition part;
        part.members.assign(component.begin(), component.end());

        // attach the leader when the bookkeeping still describes this component
        auto pit = g.partition_of.find(*component.begin());
        if (pit != g.partition_of.end()) {
            auto mit = g.members.find(pit->second);
            if (mit != g.members.end() && mit->second == component) {
                auto lit = g.leaders.find(pit->second);
                if (lit != g.leaders.end()) part.leader = lit->second;
            }
        }
        out.partitions.push_back(std::move(part));
    }
    out.normalize();
    return out;
}

void remove_partition(AcquaintancesGraph& g, int pid) {
    auto it = g.members.find(pid);
    if (it == g.members.end()) return;
    const std::set<AgentId> mem = it->second;

    g.nodes.erase(std::remove_if(g.nodes.begin(), g.nodes.end(),
                                 [&](AgentId a) { return mem.count(a) > 0; }),
                  g.nodes.end());
    for (AgentId a : mem) {
        g.edges.erase(a);
        g.partition_of.erase(a);
    }
    for (auto& [from, row] : g.edges) {
        (void)from;
        for (AgentId a : mem) row.erase(a);
    }
    g.members.erase(pid);
    g.leaders.erase(pid);
    g.terminated.erase(pid);
}

namespace {

void integrate_agent(AcquaintancesGraph& g, AgentId x, int into_pid) {
    const int from_pid = g.partition_of.at(x);

    auto& from_members = g.members.at(from_pid);
    from_members.erase(x);
    if (from_members.empty()) {
        // integrating the last member dissolves the partition and its leadership
        g.members.erase(from_pid);
        g.leaders.erase(from_pid);
        g.terminated.erase(from_pid);
        // still unmark anything pointing at x
        for (auto& [from, row] : g.edges) {
            (void)from;
            auto it = row.find(x);
            if (it != row.end()) it->second = false;
        }
        auto it = g.edges.find(x);
        if (it != g.edges.end())
            for (auto& [to, marked] : it->second) {
                (void)to;
                marked = false;
            }
    } else {
        rechain_without(g, from_pid, x);
        if (g.leaders.at(from_pid) == x) g.leaders[from_pid] = *from_members.begin();
        // the change came from outside: the partition is no longer settled
        g.terminated.erase(from_pid);
    }

    g.members.at(into_pid).insert(x);
    g.partition_of[x] = into_pid;
    g.edges[g.leaders.at(into_pid)][x] = true;
}

void exclude_agent(AcquaintancesGraph& g, AgentId x, int from_pid) {
    auto& mem = g.members.at(from_pid);
    mem.erase(x);
    rechain_without(g, from_pid, x);
    if (g.leaders.at(from_pid) == x) g.leaders[from_pid] = *mem.begin();

    int pid = g.next_partition_id++;
    g.members[pid] = {x};
    g.leaders[pid] = x;
    g.partition_of[x] = pid;
}

}  // namespace

bool leader_round(AcquaintancesGraph& g, int pid, const std::map<AgentId, double>& accuracies,
                  const SpadaParams& params, Rng& rng) {
    auto mit = g.members.find(pid);
    if (mit == g.members.end() || g.terminated.count(pid)) return false;

    // per-partition accuracy sums; sigma over the partition means
    std::map<int, double> psum;
    std::map<int, int> pcount;
    MeanStats stats;
    for (const auto& [id, mem] : g.members) {
        double sum = 0.0;
        for (AgentId a : mem) sum += accuracy_of(accuracies, a);
        psum[id] = sum;
        pcount[id] = static_cast<int>(mem.size());
        stats.add(sum / static_cast<double>(mem.size()));
    }

    bool changed = false;

    // candidates: acquainted agents outside this partition
    std::set<AgentId> outside;
    for (AgentId a : mit->second) {
        auto eit = g.edges.find(a);
        if (eit == g.edges.end()) continue;
        for (const auto& [to, marked] : eit->second) {
            (void)marked;
            auto p = g.partition_of.find(to);
            if (p != g.partition_of.end() && p->second != pid) outside.insert(to);
        }
    }
    std::vector<AgentId> sampled(outside.begin(), outside.end());
    rng.shuffle(sampled);
    if (sampled.size() > static_cast<std::size_t>(std::max(0, params.evaluated_per_round)))
        sampled.resize(static_cast<std::size_t>(params.evaluated_per_round));

    int integrations = 0;
    for (AgentId x : sampled) {
        if (integrations >= params.max_integrations) break;
        auto pit = g.partition_of.find(x);
        if (pit == g.partition_of.end() || pit->second == pid) continue;
        const int q = pit->second;
        const double acc = accuracy_of(accuracies, x);

        MeanStats trial = stats;
        trial.remove(psum[pid] / pcount[pid]);
        trial.add((psum[pid] + acc) / (pcount[pid] + 1));
        trial.remove(psum[q] / pcount[q]);
        if (pcount[q] > 1) trial.add((psum[q] - acc) / (pcount[q] - 1));

        if (trial.sigma2() < stats.sigma2() - kImprovementEps) {
            integrate_agent(g, x, pid);
            stats = trial;
            psum[pid] += acc;
            pcount[pid] += 1;
            psum[q] -= acc;
            pcount[q] -= 1;
            if (pcount[q] == 0) {
                psum.erase(q);
                pcount.erase(q);
            }
            ++integrations;
            changed = true;
        }
    }

    // exclusions: any member (leader stays) whose removal improves homogeneity
    const AgentId leader = g.leaders.at(pid);
    std::vector<AgentId> snapshot(mit->second.begin(), mit->second.end());
    for (AgentId x : snapshot) {
        if (x == leader) continue;
        if (pcount[pid] <= 1) break;
        const double acc = accuracy_of(accuracies, x);

        MeanStats trial = stats;
        trial.remove(psum[pid] / pcount[pid]);
        trial.add((psum[pid] - acc) / (pcount[pid] - 1));
        trial.add(acc);  // the new singleton's mean

        if (trial.sigma2() < stats.sigma2() - kImprovementEps) {
            exclude_agent(g, x, pid);
            int singleton = g.partition_of.at(x);
            stats = trial;
            psum[pid] -= acc;
            pcount[pid] -= 1;
            psum[singleton] = acc;
            pcount[singleton] = 1;
            changed = true;
        }
    }

    if (!changed) g.terminated.insert(pid);
    return changed;
}

Partitioning run_spada(const SystemStructure& structure, const SpadaParams& params,
                       const std::map<AgentId, double>& accuracies, Rng& rng,
                       const SpadaHooks& hooks) {
    AcquaintancesGraph g = build_graph(structure, params, rng);
    if (hooks.post_build) hooks.post_build(g, rng);

    const long long cap = 50LL * static_cast<long long>(g.nodes.size());
    long long rounds = 0;
    while (rounds < cap) {
        std::vector<int> live;
        for (const auto& [pid, mem] : g.members) {
            (void)mem;
            if (!g.terminated.count(pid)) live.push_back(pid);
        }
        if (live.empty()) break;
        for (int pid : live) {
            if (rounds >= cap) break;
            if (!g.members.count(pid) || g.terminated.count(pid)) continue;
            leader_round(g, pid, accuracies, params, rng);
            ++rounds;
        }
    }

    Partitioning result = partitions_of(g);
    if (hooks.post_extract) result = hooks.post_extract(std::move(result), rng);
    return result;
}

namespace {

class SpadaController final : public Controller {
public:
    SpadaController(SpadaParams params, SpadaHooks hooks)
        : params_(params), hooks_(std::move(hooks)) {}

    void initiate(const SystemStructure& structure,
                  const std::map<AgentId, double>& accuracies) override {
        structure_ = structure;
        accuracies_ = accuracies;
    }

    Partitioning compute(Rng& rng, Clock& clock) override {
        (void)clock;  // no runtime budget in this algorithm
        return run_spada(structure_, params_, accuracies_, rng, hooks_);
    }

    Algorithm kind() const override { return Algorithm::spada; }

private:
    SpadaParams params_;
    SpadaHooks hooks_;
    SystemStructure structure_;
    std::map<AgentId, double> accuracies_;
};

}  // namespace

std::unique_ptr<Controller> make_spada_controller(SpadaParams params, SpadaHooks hooks) {
    return std::make_unique<SpadaController>(params, std::move(hooks));
}

}  // namespace sotest
