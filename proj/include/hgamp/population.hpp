#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "construct.hpp"
#include "error.hpp"
#include "localsearch.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace hgamp {

struct PopulationParams {
    int mu = 30;     // survivors per subpopulation
    int lambda = 30; // generation size
    int gamma = 10;  // keyed subpopulations
    int n_close = 5; // neighbors considered in the diversity contribution
    int init_attempts_factor = 4; // solutions generated per subpopulation: factor * mu
    int n_elite() const { return mu / 2; }
};

/// Solutions sharing one depot configuration (or none, for the free pool).
struct Subpopulation {
    std::optional<DepotConfiguration> key; // nullopt: the free subpopulation
    std::vector<Solution> members;

    double avg_objective() const {
        if (members.empty()) return std::numeric_limits<double>::infinity();
        Cost sum = 0;
        for (const auto& m : members) sum += m.objective;
        return sum / static_cast<double>(members.size());
    }
};

/// gamma keyed subpopulations plus one free subpopulation, the incumbent, and
/// the restart bookkeeping.
struct Population {
    std::vector<Subpopulation> subpops;
    Solution best;
    bool has_best = false;
    long stagnation = 0; // local-search invocations since the last improvement
    bool halved_this_epoch = false;

    Subpopulation* find_keyed(const DepotConfiguration& cfg) {
        for (auto& sp : subpops)
            if (sp.key && *sp.key == cfg) return &sp;
        return nullptr;
    }
    Subpopulation* free_subpop() {
        for (auto& sp : subpops)
            if (!sp.key) return &sp;
        return nullptr;
    }
};

/// Everything population maintenance needs from the engine. `improve` wraps
/// the local search and does the engine's invocation accounting.
struct PopulationContext {
    const Instance& inst;
    const NeighborLists& lists;
    PopulationParams params;
    std::function<Solution(Solution)> improve;
};

/// Survivor selection: drop lambda members by biased fitness
///   BF = rank_f + (1 - n_elite/|members|) * rank_div
/// with 1-based ranks, rank_f ascending in objective and rank_div descending
/// in the diversity contribution (mean distance to the n_close closest
/// members). Distance-0 clones go first; the best member always survives;
/// ranks are recomputed after every removal.
inline void adq_select(Subpopulation& sp, const PopulationParams& params, const Instance& inst) {
    const int target = params.mu;
    if (static_cast<int>(sp.members.size()) != params.mu + params.lambda)
        fail(ErrorKind::Invariant, "survivor selection expects a full subpopulation");

    // Pairwise distances are structural, so compute them once.
    std::vector<int> alive(sp.members.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = static_cast<int>(i);
    std::vector<std::vector<int>> dist(sp.members.size(), std::vector<int>(sp.members.size(), 0));
    for (std::size_t i = 0; i < sp.members.size(); ++i)
        for (std::size_t j = i + 1; j < sp.members.size(); ++j)
            dist[i][j] = dist[j][i] = broken_pairs_distance(sp.members[i], sp.members[j], inst);

    while (static_cast<int>(alive.size()) > target) {
        const int count = static_cast<int>(alive.size());

        // Incumbent: best objective, ties to the lower original index.
        int incumbent = alive[0];
        for (int id : alive)
            if (sp.members[id].objective < sp.members[incumbent].objective) incumbent = id;

        // Clones by distance go first.
        int removal = -1;
        for (int i = 0; i < count && removal < 0; ++i)
            for (int j = i + 1; j < count; ++j)
                if (dist[alive[i]][alive[j]] == 0) {
                    const int a = alive[i], b = alive[j];
                    int drop = sp.members[a].objective > sp.members[b].objective ? a : b;
                    if (sp.members[a].objective == sp.members[b].objective) drop = std::max(a, b);
                    if (drop == incumbent) drop = drop == a ? b : a;
                    removal = drop;
                    break;
                }

        if (removal < 0) {
            // Diversity contribution of each member.
            std::vector<double> contribution(count);
            std::vector<int> close;
            for (int i = 0; i < count; ++i) {
                close.clear();
                for (int j = 0; j < count; ++j)
                    if (j != i) close.push_back(dist[alive[i]][alive[j]]);
                std::sort(close.begin(), close.end());
                const int take = std::min<int>(params.n_close, static_cast<int>(close.size()));
                double sum = 0;
                for (int t = 0; t < take; ++t) sum += close[t];
                contribution[i] = take == 0 ? 0.0 : sum / take;
            }
            std::vector<int> by_f(count), by_div(count);
            for (int i = 0; i < count; ++i) by_f[i] = by_div[i] = i;
            std::stable_sort(by_f.begin(), by_f.end(), [&](int x, int y) {
                const Cost fx = sp.members[alive[x]].objective, fy = sp.members[alive[y]].objective;
                if (fx != fy) return fx < fy;
                return alive[x] < alive[y];
            });
            std::stable_sort(by_div.begin(), by_div.end(), [&](int x, int y) {
                if (contribution[x] != contribution[y]) return contribution[x] > contribution[y];
                return alive[x] < alive[y];
            });
            std::vector<double> bf(count);
            const double weight = 1.0 - static_cast<double>(params.n_elite()) / count;
            for (int r = 0; r < count; ++r) {
                bf[by_f[r]] += r + 1;
                bf[by_div[r]] += weight * (r + 1);
            }
            double worst_bf = -1;
            for (int i = 0; i < count; ++i) {
                if (alive[i] == incumbent) continue;
                bool take = removal < 0 || bf[i] > worst_bf;
                if (!take && bf[i] == worst_bf) {
                    const Cost fi = sp.members[alive[i]].objective;
                    const Cost fr = sp.members[removal].objective;
                    take = fi > fr || (fi == fr && alive[i] > removal);
                }
                if (take) {
                    removal = alive[i];
                    worst_bf = bf[i];
                }
            }
        }
        std::erase(alive, removal);
    }

    std::sort(alive.begin(), alive.end());
    std::vector<Solution> kept;
    kept.reserve(alive.size());
    for (int id : alive) kept.push_back(std::move(sp.members[id]));
    sp.members = std::move(kept);
}

enum class InsertResult { Inserted, RejectedClone, Discarded };

/// Route a feasible offspring to the subpopulation keyed by its configuration
/// (or the free one), rejecting exact duplicates and triggering survivor
/// selection at capacity. Returns Discarded when no subpopulation can take it
/// (possible after halving removed the free pool).
inline InsertResult insert_offspring(Population& pop, Solution sol, const PopulationContext& ctx) {
    const DepotConfiguration cfg = config_of(sol, ctx.inst);
    Subpopulation* target = pop.find_keyed(cfg);
    if (!target) target = pop.free_subpop();
    if (!target) return InsertResult::Discarded;
    for (const auto& member : target->members)
        if (broken_pairs_distance(member, sol, ctx.inst) == 0) return InsertResult::RejectedClone;
    target->members.push_back(std::move(sol));
    if (static_cast<int>(target->members.size()) == ctx.params.mu + ctx.params.lambda)
        adq_select(*target, ctx.params, ctx.inst);
    return InsertResult::Inserted;
}

namespace detail {

/// Fill one keyed subpopulation with improved greedy solutions; attempts whose
/// local optimum drifted to another configuration are routed generically.
inline void fill_keyed_subpop(Population& pop, Subpopulation& sp, const PopulationContext& ctx,
                              Rng& rng) {
    const int attempts = ctx.params.init_attempts_factor * ctx.params.mu;
    for (int t = 0; t < attempts; ++t) {
        Solution built;
        try {
            built = rgh_build(ctx.inst, *sp.key, rng);
        } catch (const Error& e) {
            if (e.kind != ErrorKind::Infeasible) throw;
            return; // the key admits no feasible packing; leave the pool empty
        }
        Solution sol = ctx.improve(std::move(built));
        if (config_of(sol, ctx.inst) == *sp.key) {
            bool clone = false;
            for (const auto& member : sp.members)
                if (broken_pairs_distance(member, sol, ctx.inst) == 0) {
                    clone = true;
                    break;
                }
            if (clone) continue;
            sp.members.push_back(std::move(sol));
            if (static_cast<int>(sp.members.size()) == ctx.params.mu + ctx.params.lambda)
                adq_select(sp, ctx.params, ctx.inst);
        } else {
            insert_offspring(pop, std::move(sol), ctx);
        }
    }
}

} // namespace detail

/// Build the initial population: one keyed subpopulation per configuration
/// plus the free subpopulation seeded from rough-cost-driven random
/// configurations.
inline Population init_population(const std::vector<DepotConfiguration>& configs,
                                  const std::vector<DepotEstimate>& estimates, double p_d,
                                  const PopulationContext& ctx, Rng& rng) {
    Population pop;
    for (const auto& cfg : configs) {
        Subpopulation sp;
        sp.key = cfg;
        pop.subpops.push_back(std::move(sp));
    }
    pop.subpops.push_back(Subpopulation{}); // free
    for (auto& sp : pop.subpops)
        if (sp.key) detail::fill_keyed_subpop(pop, sp, ctx, rng);

    Subpopulation* free_sp = pop.free_subpop();
    const int attempts = ctx.params.init_attempts_factor * ctx.params.mu;
    for (int t = 0; t < attempts; ++t) {
        Solution built;
        bool ok = false;
        for (int redraw = 0; redraw < 10 && !ok; ++redraw) {
            const DepotConfiguration cfg = random_config_build(ctx.inst, estimates, p_d, rng);
            try {
                built = rgh_build(ctx.inst, cfg, rng);
                ok = true;
            } catch (const Error& e) {
                if (e.kind != ErrorKind::Infeasible) throw; // unpackable draw; redraw
            }
        }
        if (!ok) continue;
        Solution sol = ctx.improve(std::move(built));
        bool clone = false;
        for (const auto& member : free_sp->members)
            if (broken_pairs_distance(member, sol, ctx.inst) == 0) {
                clone = true;
                break;
            }
        if (clone) continue;
        free_sp->members.push_back(std::move(sol));
        if (static_cast<int>(free_sp->members.size()) == ctx.params.mu + ctx.params.lambda)
            adq_select(*free_sp, ctx.params, ctx.inst);
    }

    // Record the incumbent.
    for (const auto& sp : pop.subpops)
        for (const auto& member : sp.members)
            if (!pop.has_best || member.objective < pop.best.objective) {
                pop.best = member;
                pop.has_best = true;
            }
    pop.stagnation = 0;
    return pop;
}

/// Two-stage binary tournament: first across subpopulations on their average
/// objective (the two winning subpopulations are distinct whenever at least
/// two are nonempty), then within each on the objective. If both parents end
/// up with the same configuration, the second is redrawn up to ten times.
inline std::pair<Solution, Solution> select_parents(const Population& pop, const Instance& inst,
                                                    Rng& rng) {
    std::vector<int> nonempty;
    for (int i = 0; i < static_cast<int>(pop.subpops.size()); ++i)
        if (!pop.subpops[i].members.empty()) nonempty.push_back(i);
    if (nonempty.empty()) fail(ErrorKind::Invariant, "parent selection over an empty population");

    auto subpop_tournament = [&](const std::vector<int>& pool) {
        const int x = pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))];
        const int y = pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))];
        const double px = pop.subpops[x].avg_objective(), py = pop.subpops[y].avg_objective();
        if (px != py) return px < py ? x : y;
        return std::min(x, y);
    };
    auto member_tournament = [&](const Subpopulation& sp) {
        const int size = static_cast<int>(sp.members.size());
        const int x = rng.uniform_int(size), y = rng.uniform_int(size);
        const Cost fx = sp.members[x].objective, fy = sp.members[y].objective;
        if (fx != fy) return fx < fy ? x : y;
        return std::min(x, y);
    };

    const int s1 = subpop_tournament(nonempty);
    int s2 = s1;
    if (nonempty.size() >= 2) {
        std::vector<int> rest;
        for (int i : nonempty)
            if (i != s1) rest.push_back(i);
        s2 = subpop_tournament(rest);
    }

    const Solution& a = pop.subpops[s1].members[member_tournament(pop.subpops[s1])];
    const Solution* b = &pop.subpops[s2].members[member_tournament(pop.subpops[s2])];
    const DepotConfiguration cfg_a = config_of(a, inst);
    for (int attempt = 0; attempt < 10 && config_of(*b, inst) == cfg_a; ++attempt)
        b = &pop.subpops[s2].members[member_tournament(pop.subpops[s2])];
    return {a, *b};
}

/// Swap the worst keyed subpopulation (largest average objective) for the
/// configuration of a newly improving solution: clear, rekey, seed with that
/// solution, refill like at initialization.
inline void replace_worst_config(Population& pop, const Solution& improving,
                                 const PopulationContext& ctx, Rng& rng) {
    const DepotConfiguration cfg = config_of(improving, ctx.inst);
    if (pop.find_keyed(cfg)) return; // guard: configuration already tracked
    Subpopulation* worst = nullptr;
    for (auto& sp : pop.subpops) {
        if (!sp.key) continue;
        if (!worst || sp.avg_objective() > worst->avg_objective()) worst = &sp;
    }
    if (!worst) return; // no keyed subpopulations at all (post-halving corner)
    worst->members.clear();
    worst->key = cfg;
    worst->members.push_back(improving);
    detail::fill_keyed_subpop(pop, *worst, ctx, rng);
}

/// Keep the ceil(count/2) subpopulations with the smallest average objective;
/// the free subpopulation competes on equal terms. Once per epoch.
inline void halve_subpops(Population& pop) {
    if (pop.halved_this_epoch) return;
    pop.halved_this_epoch = true;
    const int count = static_cast<int>(pop.subpops.size());
    const int keep = (count + 1) / 2;
    std::vector<int> order(count);
    for (int i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        const double px = pop.subpops[x].avg_objective(), py = pop.subpops[y].avg_objective();
        if (px != py) return px < py;
        return x < y;
    });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    std::vector<Subpopulation> kept;
    kept.reserve(keep);
    for (int i : order) kept.push_back(std::move(pop.subpops[i]));
    pop.subpops = std::move(kept);
}

/// When the stagnation counter passes eta, rebuild the whole population via
/// `rebuild` (fresh filters, fresh randomness), keeping the incumbent as the
/// reported best. Returns true when a restart happened.
inline bool restart_if_stagnant(Population& pop, long eta,
                                const std::function<Population()>& rebuild) {
    if (pop.stagnation < eta) return false;
    Solution old_best = pop.best;
    const bool had_best = pop.has_best;
    pop = rebuild();
    if (had_best && (!pop.has_best || old_best.objective < pop.best.objective)) {
        pop.best = std::move(old_best);
        pop.has_best = true;
    }
    pop.stagnation = 0;
    pop.halved_this_epoch = false;
    return true;
}

} // namespace hgamp
