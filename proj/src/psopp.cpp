#include "sotest/psopp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "sotest/errors.hpp"

namespace sotest {

namespace {

std::vector<AgentId> diff(const std::vector<AgentId>& a, const std::vector<AgentId>& b) {
    std::vector<AgentId> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<AgentId> intersect(const std::vector<AgentId>& a, const std::vector<AgentId>& b) {
    std::vector<AgentId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<AgentId> unite(const std::vector<AgentId>& a, const std::vector<AgentId>& b) {
    std::vector<AgentId> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool subset(const std::vector<AgentId>& a, const std::vector<AgentId>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool size_ok(std::size_t size, const PartitioningConstraints& c) {
    return size >= static_cast<std::size_t>(c.s_min) && size <= static_cast<std::size_t>(c.s_max);
}

}  // namespace

std::string to_string(MoveEvent::Op op) {
    switch (op) {
        case MoveEvent::Op::random_split: return "random_split";
        case MoveEvent::Op::random_join: return "random_join";
        case MoveEvent::Op::random_exchange: return "random_exchange";
        case MoveEvent::Op::approach_split: return "approach_split";
        case MoveEvent::Op::approach_join: return "approach_join";
        case MoveEvent::Op::approach_exchange: return "approach_exchange";
    }
    return "unknown";
}

std::optional<Partitioning> split(const Partitioning& p, std::size_t target,
                                  const std::vector<AgentId>& first_half,
                                  const PartitioningConstraints& c) {
    if (target >= p.partitions.size()) return std::nullopt;
    if (p.partitions.size() + 1 > static_cast<std::size_t>(c.n_max)) return std::nullopt;

    std::vector<AgentId> half = first_half;
    std::sort(half.begin(), half.end());
    const auto& source = p.partitions[target].members;
    if (half.empty() || !subset(half, source)) return std::nullopt;

    std::vector<AgentId> rest = diff(source, half);
    if (rest.empty()) return std::nullopt;
    if (!size_ok(half.size(), c) || !size_ok(rest.size(), c)) return std::nullopt;

    Partitioning out = p;
    out.partitions[target].members = half;
    out.partitions[target].leader.reset();
    Partition other;
    other.members = rest;
    out.partitions.push_back(std::move(other));
    out.normalize();
    return out;
}

std::optional<Partitioning> join(const Partitioning& p, std::size_t a, std::size_t b,
                                 const PartitioningConstraints& c) {
    if (a == b || a >= p.partitions.size() || b >= p.partitions.size()) return std::nullopt;
    if (p.partitions.size() < 2 ||
        p.partitions.size() - 1 < static_cast<std::size_t>(c.n_min))
        return std::nullopt;

    std::vector<AgentId> merged = unite(p.partitions[a].members, p.partitions[b].members);
    if (merged.size() > static_cast<std::size_t>(c.s_max)) return std::nullopt;

    Partitioning out;
    for (std::size_t i = 0; i < p.partitions.size(); ++i)
        if (i != a && i != b) out.partitions.push_back(p.partitions[i]);
    Partition m;
    m.members = std::move(merged);
    out.partitions.push_back(std::move(m));
    out.normalize();
    return out;
}

std::optional<Partitioning> exchange(const Partitioning& p, std::size_t a, std::size_t b,
                                     const std::vector<AgentId>& from_a,
                                     const std::vector<AgentId>& from_b,
                                     const PartitioningConstraints& c) {
    if (a == b || a >= p.partitions.size() || b >= p.partitions.size()) return std::nullopt;
    if (from_a.empty() && from_b.empty()) return std::nullopt;

    std::vector<AgentId> move_a = from_a, move_b = from_b;
    std::sort(move_a.begin(), move_a.end());
    std::sort(move_b.begin(), move_b.end());
    const auto& pa = p.partitions[a].members;
    const auto& pb = p.partitions[b].members;
    if (!subset(move_a, pa) || !subset(move_b, pb)) return std::nullopt;

    std::vector<AgentId> na = unite(diff(pa, move_a), move_b);
    std::vector<AgentId> nb = unite(diff(pb, move_b), move_a);
    if (na.empty() || nb.empty()) return std::nullopt;
    if (!size_ok(na.size(), c) || !size_ok(nb.size(), c)) return std::nullopt;

    Partitioning out = p;
    out.partitions[a].members = std::move(na);
    out.partitions[a].leader.reset();
    out.partitions[b].members = std::move(nb);
    out.partitions[b].leader.reset();
    out.normalize();
    return out;
}

double fitness(const Partitioning& p, const std::map<AgentId, double>& accuracies) {
    std::vector<double> means;
    means.reserve(p.partitions.size());
    for (const auto& part : p.partitions) {
        if (part.members.empty()) continue;
        means.push_back(partition_mean(part, accuracies));
    }
    if (means.empty()) return 0.0;
    double sum = 0.0, sq = 0.0;
    for (double m : means) {
        sum += m;
        sq += m * m;
    }
    const double k = static_cast<double>(means.size());
    double variance = std::max(0.0, sq / k - (sum / k) * (sum / k));
    return 1.0 / (1.0 + std::sqrt(variance));
}

namespace {

constexpr int kMoveAttempts = 20;

Partitioning run_hook(const MoveHook& hook, MoveEvent ev, Partitioning next, Rng& rng) {
    if (!hook) return next;
    return hook(ev, std::move(next), rng);
}

MoveEvent event_for_split(MoveEvent::Op op, const std::vector<AgentId>& source,
                          const std::vector<AgentId>& half_a, const std::vector<AgentId>& half_b) {
    MoveEvent ev;
    ev.op = op;
    ev.source_a = source;
    ev.result_a = half_a;
    ev.result_b = half_b;
    return ev;
}

MoveEvent event_for_join(MoveEvent::Op op, const std::vector<AgentId>& k,
                         const std::vector<AgentId>& l, const std::vector<AgentId>& merged) {
    MoveEvent ev;
    ev.op = op;
    ev.source_a = k;
    ev.source_b = l;
    ev.result_a = merged;
    return ev;
}

MoveEvent event_for_exchange(MoveEvent::Op op, const std::vector<AgentId>& k,
                             const std::vector<AgentId>& l, const std::vector<AgentId>& m,
                             const std::vector<AgentId>& n) {
    MoveEvent ev;
    ev.op = op;
    ev.source_a = k;
    ev.source_b = l;
    ev.result_a = m;
    ev.result_b = n;
    return ev;
}

int min_half(const PartitioningConstraints& c) { return std::max(1, c.s_min); }

bool split_applicable(const Partitioning& p, const PartitioningConstraints& c) {
    if (p.partitions.size() + 1 > static_cast<std::size_t>(c.n_max)) return false;
    for (const auto& part : p.partitions)
        if (part.members.size() >= static_cast<std::size_t>(2 * min_half(c))) return true;
    return false;
}

bool join_applicable(const Partitioning& p, const PartitioningConstraints& c) {
    if (p.partitions.size() < 2) return false;
    if (p.partitions.size() - 1 < static_cast<std::size_t>(c.n_min)) return false;
    std::size_t best1 = SIZE_MAX, best2 = SIZE_MAX;
    for (const auto& part : p.partitions) {
        std::size_t s = part.members.size();
        if (s < best1) {
            best2 = best1;
            best1 = s;
        } else if (s < best2) {
            best2 = s;
        }
    }
    return best1 + best2 <= static_cast<std::size_t>(c.s_max);
}

std::vector<AgentId> sample_subset(const std::vector<AgentId>& members, std::size_t count,
                                   Rng& rng) {
    std::vector<AgentId> pool = members;
    rng.shuffle(pool);
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

// One random move: uniform over the applicable operator kinds, parameters
// re-drawn on inapplicable picks, no-op once the attempt budget is spent.
Partitioning random_move(Partitioning pos, const PartitioningConstraints& c, Rng& rng,
                         const MoveHook& hook) {
    std::vector<int> kinds;  // 0 split, 1 join, 2 exchange
    if (split_applicable(pos, c)) kinds.push_back(0);
    if (join_applicable(pos, c)) kinds.push_back(1);
    if (pos.partitions.size() >= 2) kinds.push_back(2);
    if (kinds.empty()) return pos;

    for (int attempt = 0; attempt < kMoveAttempts; ++attempt) {
        int kind = kinds[rng.index(kinds.size())];
        if (kind == 0) {
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < pos.partitions.size(); ++i)
                if (pos.partitions[i].members.size() >=
                    static_cast<std::size_t>(2 * min_half(c)))
                    eligible.push_back(i);
            if (eligible.empty()) continue;
            std::size_t target = eligible[rng.index(eligible.size())];
            const auto& members = pos.partitions[target].members;
            int lo = min_half(c);
            int hi = static_cast<int>(members.size()) - lo;
            if (hi < lo) continue;
            std::size_t k = static_cast<std::size_t>(rng.uniform_int(lo, hi));
            std::vector<AgentId> half = sample_subset(members, k, rng);
            std::vector<AgentId> source = members;
            auto next = split(pos, target, half, c);
            if (!next) continue;
            std::vector<AgentId> rest = diff(source, half);
            return run_hook(hook, event_for_split(MoveEvent::Op::random_split, source, half, rest),
                            std::move(*next), rng);
        }
        if (kind == 1) {
            std::size_t a = rng.index(pos.partitions.size());
            std::size_t b = rng.index(pos.partitions.size());
            if (a == b) continue;
            std::vector<AgentId> k = pos.partitions[a].members;
            std::vector<AgentId> l = pos.partitions[b].members;
            auto next = join(pos, a, b, c);
            if (!next) continue;
            return run_hook(hook,
                            event_for_join(MoveEvent::Op::random_join, k, l, unite(k, l)),
                            std::move(*next), rng);
        }
        std::size_t a = rng.index(pos.partitions.size());
        std::size_t b = rng.index(pos.partitions.size());
        if (a == b) continue;
        const auto& pa = pos.partitions[a].members;
        const auto& pb = pos.partitions[b].members;
        std::size_t ka = rng.index(pa.size() + 1);
        std::size_t kb = rng.index(pb.size() + 1);
        if (ka == 0 && kb == 0) continue;
        std::vector<AgentId> from_a = sample_subset(pa, ka, rng);
        std::vector<AgentId> from_b = sample_subset(pb, kb, rng);
        auto next = exchange(pos, a, b, from_a, from_b, c);
        if (!next) continue;
        std::vector<AgentId> m = unite(diff(pa, from_a), from_b);
        std::vector<AgentId> n = unite(diff(pb, from_b), from_a);
        return run_hook(hook,
                        event_for_exchange(MoveEvent::Op::random_exchange, pa, pb, m, n),
                        std::move(*next), rng);
    }
    return pos;
}

// Rebuilds one randomly chosen target partition inside the position through a
// short greedy sequence of constraint-checked exchange/join/split steps.
Partitioning approach_move(Partitioning pos, const Partitioning& target,
                           const PartitioningConstraints& c, Rng& rng, const MoveHook& hook) {
    std::vector<const Partition*> candidates;
    for (const auto& part : target.partitions)
        if (!part.members.empty() && !pos.contains(part.members)) candidates.push_back(&part);
    if (candidates.empty()) return pos;  // position already holds the target partition(s)

    const std::vector<AgentId> want = candidates[rng.index(candidates.size())]->members;

    for (int step = 0; step < 5; ++step) {
        if (pos.contains(want)) break;
        if (pos.partitions.empty()) break;

        // seed partition: largest overlap with the wanted member set
        std::size_t c_idx = 0;
        std::size_t best_overlap = 0;
        for (std::size_t i = 0; i < pos.partitions.size(); ++i) {
            std::size_t ov = intersect(pos.partitions[i].members, want).size();
            if (ov > best_overlap) {
                best_overlap = ov;
                c_idx = i;
            }
        }
        if (best_overlap == 0) break;

        const std::vector<AgentId> cur = pos.partitions[c_idx].members;
        std::vector<AgentId> foreign = diff(cur, want);
        std::vector<AgentId> missing = diff(want, cur);

        if (foreign.empty() && missing.empty()) break;

        // which other partition holds most of the missing members
        std::size_t d_idx = pos.partitions.size();
        std::size_t d_overlap = 0;
        for (std::size_t i = 0; i < pos.partitions.size(); ++i) {
            if (i == c_idx) continue;
            std::size_t ov = intersect(pos.partitions[i].members, missing).size();
            if (ov > d_overlap) {
                d_overlap = ov;
                d_idx = i;
            }
        }

        bool moved = false;

        if (!foreign.empty() && !missing.empty() && d_overlap > 0) {
            // swap equal counts: sizes stay put, constraints stay satisfied
            const auto& dm = pos.partitions[d_idx].members;
            std::vector<AgentId> bring = intersect(dm, missing);
            std::size_t k = std::min(foreign.size(), bring.size());
            std::vector<AgentId> out_c(foreign.begin(), foreign.begin() + k);
            std::vector<AgentId> in_c(bring.begin(), bring.begin() + k);
            auto next = exchange(pos, c_idx, d_idx, out_c, in_c, c);
            if (next) {
                std::vector<AgentId> m = unite(diff(cur, out_c), in_c);
                std::vector<AgentId> n = unite(diff(dm, in_c), out_c);
                pos = run_hook(hook,
                               event_for_exchange(MoveEvent::Op::approach_exchange, cur, dm, m, n),
                               std::move(*next), rng);
                moved = true;
            }
        }

        if (!moved && !foreign.empty() && missing.empty()) {
            // carve the wanted set out of its superset
            std::vector<AgentId> keep = intersect(cur, want);
            auto next = split(pos, c_idx, keep, c);
            if (next) {
                pos = run_hook(
                    hook, event_for_split(MoveEvent::Op::approach_split, cur, keep, foreign),
                    std::move(*next), rng);
                moved = true;
            } else {
                // push foreigners into whichever partition has room
                for (std::size_t i = 0; i < pos.partitions.size() && !moved; ++i) {
                    if (i == c_idx) continue;
                    const auto& em = pos.partitions[i].members;
                    std::size_t room = static_cast<std::size_t>(c.s_max) > em.size()
                                           ? static_cast<std::size_t>(c.s_max) - em.size()
                                           : 0;
                    std::size_t spare = cur.size() > static_cast<std::size_t>(c.s_min)
                                            ? cur.size() - static_cast<std::size_t>(c.s_min)
                                            : 0;
                    std::size_t k = std::min({foreign.size(), room, spare});
                    if (k == 0) continue;
                    std::vector<AgentId> out_c(foreign.begin(), foreign.begin() + k);
                    auto ex = exchange(pos, c_idx, i, out_c, {}, c);
                    if (!ex) continue;
                    std::vector<AgentId> m = diff(cur, out_c);
                    std::vector<AgentId> n = unite(em, out_c);
                    pos = run_hook(
                        hook, event_for_exchange(MoveEvent::Op::approach_exchange, cur, em, m, n),
                        std::move(*ex), rng);
                    moved = true;
                }
            }
        }

        if (!moved && foreign.empty() && !missing.empty() && d_idx < pos.partitions.size()) {
            const std::vector<AgentId> dm = pos.partitions[d_idx].members;
            if (subset(dm, want)) {
                auto next = join(pos, c_idx, d_idx, c);
                if (next) {
                    pos = run_hook(
                        hook, event_for_join(MoveEvent::Op::approach_join, cur, dm, unite(cur, dm)),
                        std::move(*next), rng);
                    moved = true;
                }
            }
            if (!moved) {
                // pull missing members over one-sidedly
                std::vector<AgentId> bring = intersect(dm, missing);
                std::size_t room = static_cast<std::size_t>(c.s_max) > cur.size()
                                       ? static_cast<std::size_t>(c.s_max) - cur.size()
                                       : 0;
                std::size_t spare = dm.size() > static_cast<std::size_t>(c.s_min)
                                        ? dm.size() - static_cast<std::size_t>(c.s_min)
                                        : 0;
                std::size_t k = std::min({bring.size(), room, spare});
                if (k > 0) {
                    std::vector<AgentId> in_c(bring.begin(), bring.begin() + k);
                    auto ex = exchange(pos, c_idx, d_idx, {}, in_c, c);
                    if (ex) {
                        std::vector<AgentId> m = unite(cur, in_c);
                        std::vector<AgentId> n = diff(dm, in_c);
                        pos = run_hook(
                            hook,
                            event_for_exchange(MoveEvent::Op::approach_exchange, cur, dm, m, n),
                            std::move(*ex), rng);
                        moved = true;
                    }
                }
            }
        }

        if (!moved) break;  // no applicable step can make progress
    }
    return pos;
}

}  // namespace

void iterate_particle(Particle& particle, SwarmState& swarm, const PsoppParams& params,
                      const PartitioningConstraints& c,
                      const std::map<AgentId, double>& accuracies, Rng& rng, Clock& clock,
                      const MoveHook& hook) {
    // (1) evaluate
    double f = fitness(particle.position, accuracies);

    ++swarm.iteration;
    ++swarm.stagnant_iterations;

    // (2) pbest update; neighbours are informed right away
    if (f > particle.pbest_fitness) {
        particle.pbest = particle.position;
        particle.pbest_fitness = f;
        for (int j : particle.neighborhood) {
            Particle& other = swarm.particles[static_cast<std::size_t>(j)];
            if (f > other.nbest_fitness) {
                other.nbest = particle.position;
                other.nbest_fitness = f;
            }
        }
        if (f > swarm.gbest_fitness) {
            swarm.gbest = particle.position;
            swarm.gbest_fitness = f;
            swarm.stagnant_iterations = 0;
        }
    }

    // (3) refresh own nbest from the neighbourhood
    for (int j : particle.neighborhood) {
        const Particle& other = swarm.particles[static_cast<std::size_t>(j)];
        if (other.pbest_fitness > particle.nbest_fitness) {
            particle.nbest = other.pbest;
            particle.nbest_fitness = other.pbest_fitness;
        }
    }

    // (4) termination: runtime budget or global stagnation
    double elapsed = clock.now() - swarm.started_at;
    if (elapsed >= params.max_runtime_seconds || swarm.stagnant_iterations >= kStagnationLimit) {
        particle.done = true;
        return;
    }

    // (5) draw the move kind, (6) move
    double u = rng.uniform();
    if (u < params.c_random) {
        particle.position = random_move(std::move(particle.position), c, rng, hook);
    } else if (u < params.c_random + params.c_pbest) {
        particle.position = approach_move(std::move(particle.position), particle.pbest, c, rng, hook);
    } else {
        particle.position = approach_move(std::move(particle.position), swarm.gbest, c, rng, hook);
    }
}

Partitioning run_psopp(const std::optional<Partitioning>& initial,
                       const PartitioningConstraints& c, const PsoppParams& params,
                       const std::map<AgentId, double>& accuracies,
                       const std::vector<AgentId>& universe, Rng& rng, Clock& clock,
                       const MoveHook& hook, const PsoppObserver& observer) {
    if (!feasible(static_cast<int>(universe.size()), c))
        throw ConfigError("constraints admit no partitioning of " +
                          std::to_string(universe.size()) + " agents");

    bool initial_usable = false;
    if (initial) {
        initial_usable = validate_partitioning(*initial, universe).passed &&
                         check_partition_bounds(*initial, c).passed;
    }

    SwarmState swarm;
    const int n = std::max(1, params.particles);
    swarm.particles.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Particle& p = swarm.particles[static_cast<std::size_t>(i)];
        p.id = i;
        if (initial_usable && i < params.start_at_current)
            p.position = *initial;
        else
            p.position = random_constrained_partitioning(universe, c, rng);
        p.pbest = p.position;
        p.pbest_fitness = fitness(p.position, accuracies);
        for (int j = 0; j < n; ++j)
            if (j != i) p.neighborhood.push_back(j);
    }

    for (const auto& p : swarm.particles) {
        if (p.pbest_fitness > swarm.gbest_fitness) {
            swarm.gbest = p.pbest;
            swarm.gbest_fitness = p.pbest_fitness;
        }
    }
    for (auto& p : swarm.particles) {
        p.nbest = p.pbest;
        p.nbest_fitness = p.pbest_fitness;
        for (int j : p.neighborhood) {
            const Particle& other = swarm.particles[static_cast<std::size_t>(j)];
            if (other.pbest_fitness > p.nbest_fitness) {
                p.nbest = other.pbest;
                p.nbest_fitness = other.pbest_fitness;
            }
        }
    }

    swarm.started_at = clock.now();
    bool running = true;
    while (running) {
        running = false;
        for (auto& p : swarm.particles) {
            if (p.done) continue;
            iterate_particle(p, swarm, params, c, accuracies, rng, clock, hook);
            clock.charge_iteration();
            if (observer) observer(swarm);
            if (!p.done) running = true;
        }
    }
    return swarm.gbest;
}

namespace {

class PsoppController final : public Controller {
public:
    PsoppController(PsoppParams params, PartitioningConstraints c, MoveHook hook)
        : params_(params), constraints_(c), hook_(std::move(hook)) {}

    void initiate(const SystemStructure& structure,
                  const std::map<AgentId, double>& accuracies) override {
        initial_ = structure.partitioning();
        accuracies_ = accuracies;
        universe_.clear();
        for (const auto& [agent, avpp] : structure.assignment) {
            (void)avpp;
            universe_.push_back(agent);
        }
    }

    Partitioning compute(Rng& rng, Clock& clock) override {
        return run_psopp(initial_, constraints_, params_, accuracies_, universe_, rng, clock,
                         hook_);
    }

    Algorithm kind() const override { return Algorithm::psopp; }

    void set_hook(MoveHook hook) { hook_ = std::move(hook); }

private:
    PsoppParams params_;
    PartitioningConstraints constraints_;
    MoveHook hook_;
    std::optional<Partitioning> initial_;
    std::map<AgentId, double> accuracies_;
    std::vector<AgentId> universe_;
};

}  // namespace

std::unique_ptr<Controller> make_psopp_controller(PsoppParams params, PartitioningConstraints c,
                                                  MoveHook hook) {
    return std::make_unique<PsoppController>(params, c, std::move(hook));
}

}  // namespace sotest
