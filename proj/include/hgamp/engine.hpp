#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "construct.hpp"
#include "crossover.hpp"
#include "error.hpp"
#include "localsearch.hpp"
#include "model.hpp"
#include "population.hpp"
#include "repair.hpp"
#include "rng.hpp"

namespace hgamp {

/// Tuned defaults of the solver; see README for the meaning of each knob.
struct RunParams {
    int mu = 30;
    int lambda = 30;
    int alpha = 20;
    double zeta = 0.15; // mutation probability
    double xi = 0.25;   // mutation length (fraction of customers)
    long eta = 70000;   // rebuild threshold (local-search invocations)
    int beta = 10;      // offspring per crossover
    int gamma = 10;     // keyed subpopulations
    long max_iterations = 300000;
    std::optional<double> time_limit_s;
    CrhParams crh;
    RepairParams repair_params;
    std::vector<DepotConfiguration> seed_configs; // injected depot configurations
    bool seed_configs_replace = false; // true: bypass the preliminary filter entirely
};

struct RunStats {
    Cost best_objective = 0;
    long best_iteration = 0;
    double wall_time_s = 0;
    double time_to_best_s = 0;
    long iterations = 0;
    long restarts = 0;
    long crossovers = 0;
    long repairs = 0;
    long ls_invocations = 0;
    long mutation_offspring = 0; // degenerate crossovers replaced by forced mutation
};

namespace detail {

inline void merge_seed_configs(std::vector<DepotConfiguration>& candidates,
                               const RunParams& params) {
    if (params.seed_configs.empty()) return;
    if (params.seed_configs_replace) candidates.clear();
    for (const auto& cfg : params.seed_configs) {
        if (std::find(candidates.begin(), candidates.end(), cfg) == candidates.end())
            candidates.push_back(cfg);
    }
}

} // namespace detail

/// One full solver run. Identical (instance, params, seed) triples give
/// identical solutions and counters: a single random stream drives every
/// stochastic step in a fixed order. One iteration = one offspring
/// constructed and improved by the local search.
inline std::pair<Solution, RunStats> run(const Instance& inst, const RunParams& params,
                                         std::uint64_t seed) {
    {
        Load cap = 0;
        for (const auto& d : inst.depots) cap += d.capacity;
        if (cap < inst.total_demand())
            fail(ErrorKind::Infeasible, "instance cannot be served: total capacity " +
                                            std::to_string(cap) + " < total demand " +
                                            std::to_string(inst.total_demand()));
    }
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Rng rng(seed);
    RunStats stats;
    const NeighborLists lists = build_neighbor_lists(inst, params.alpha);
    const std::vector<DepotEstimate> estimates = all_estimates(inst);

    long stagnation = 0;
    PopulationContext ctx{
        inst, lists,
        PopulationParams{params.mu, params.lambda, params.gamma, 5, 4},
        [&](Solution s) {
            ++stats.ls_invocations;
            ++stagnation;
            return vnd_improve(std::move(s), lists, inst);
        }};

    CrhParams crh = params.crh;
    crh.gamma = params.gamma;

    auto build_population = [&]() {
        std::vector<DepotConfiguration> candidates;
        if (!params.seed_configs_replace)
            candidates = preliminary_filter(inst, estimates, crh, rng);
        detail::merge_seed_configs(candidates, params);
        if (candidates.empty()) {
            // Every attempt dead-ended on the overlap threshold (possible when
            // all coverage areas coincide); the full set always serves.
            std::vector<int> all(inst.num_depots());
            for (int i = 0; i < inst.num_depots(); ++i) all[i] = i;
            candidates.push_back(DepotConfiguration::of(std::move(all), inst));
        }
        const std::vector<DepotConfiguration> final_configs =
            secondary_filter(inst, candidates, crh, lists, rng);
        return init_population(final_configs, estimates, crh.p_d, ctx, rng);
    };

    Population pop = build_population();
    if (!pop.has_best)
        fail(ErrorKind::Infeasible, "initialization produced no feasible solution");
    stagnation = 0;
    stats.best_objective = pop.best.objective;
    stats.best_iteration = 0;
    stats.time_to_best_s = elapsed();

    const MutateParams mutate_params{params.zeta, params.xi};
    const MutateParams forced_mutation{1.0, params.xi};

    auto out_of_budget = [&] {
        if (stats.iterations >= params.max_iterations) return true;
        return params.time_limit_s && elapsed() >= *params.time_limit_s;
    };
    auto past_half_budget = [&] {
        if (stats.iterations >= (params.max_iterations + 1) / 2) return true;
        return params.time_limit_s && elapsed() >= *params.time_limit_s / 2;
    };

    auto record_improvement = [&](const Solution& sol) {
        pop.best = sol;
        pop.has_best = true;
        stagnation = 0;
        stats.best_objective = sol.objective;
        stats.best_iteration = stats.iterations;
        stats.time_to_best_s = elapsed();
    };

    while (!out_of_budget()) {
        if (!pop.halved_this_epoch && past_half_budget()) halve_subpops(pop);

        auto [parent_a, parent_b] = select_parents(pop, inst, rng);
        std::vector<Solution> offspring = mdeax(parent_a, parent_b, params.beta, rng, inst, lists);
        ++stats.crossovers;
        bool forced = false;
        if (offspring.empty()) {
            // Identical parents: fall back to a guaranteed mutation of one.
            offspring.push_back(mutate(parent_a, inst, lists, rng, forced_mutation));
            ++stats.mutation_offspring;
            forced = true;
        }

        for (Solution& raw : offspring) {
            if (out_of_budget()) break;
            Solution sol = std::move(raw);
            if (!forced) {
                if (!check_feasibility(sol, inst).feasible()) {
                    try {
                        sol = repair(std::move(sol), inst, lists, rng, params.repair_params);
                    } catch (const Error& e) {
                        if (e.kind != ErrorKind::Infeasible) throw;
                        continue; // unrepairable offspring is discarded
                    }
                    ++stats.repairs;
                }
                sol = mutate(sol, inst, lists, rng, mutate_params);
            }
            sol = ctx.improve(std::move(sol));
            ++stats.iterations;

            if (sol.objective < pop.best.objective) {
                if (!pop.find_keyed(config_of(sol, inst)))
                    replace_worst_config(pop, sol, ctx, rng);
                else
                    insert_offspring(pop, sol, ctx);
                record_improvement(sol);
            } else {
                insert_offspring(pop, std::move(sol), ctx);
            }

            pop.stagnation = stagnation;
            if (restart_if_stagnant(pop, params.eta, build_population)) {
                stagnation = 0;
                ++stats.restarts;
                break; // the epoch ended; start the next generation fresh
            }
        }
    }

    stats.wall_time_s = elapsed();
    stats.best_objective = pop.best.objective;
    return {pop.best, stats};
}

// ---------------------------------------------------------------------------
// Exact oracle for tiny instances
// ---------------------------------------------------------------------------

/// Exhaustive optimum over all depot subsets, customer assignments, route
/// partitions and route orders. Enforced caps: n <= 8, m <= 3.
inline std::pair<Cost, Solution> brute_force_oracle(const Instance& inst) {
    const int n = inst.num_customers();
    const int m = inst.num_depots();
    if (n > 8 || m > 3)
        fail(ErrorKind::Unsupported, "oracle caps exceeded (needs n <= 8, m <= 3)");
    const int full = (1 << n) - 1;
    const Cost inf = std::numeric_limits<Cost>::infinity();

    std::vector<Load> subset_load(full + 1, 0);
    for (int s = 1; s <= full; ++s) {
        const int j = std::countr_zero(static_cast<unsigned>(s));
        subset_load[s] = subset_load[s & (s - 1)] + inst.demand(j);
    }

    // Optimal single-route tour cost per depot and customer subset, plus the
    // Held-Karp parent tables for reconstruction.
    std::vector<std::vector<Cost>> tour(m, std::vector<Cost>(full + 1, inf));
    std::vector<std::vector<int>> tour_last(m, std::vector<int>(full + 1, -1));
    std::vector<std::vector<std::vector<Cost>>> hk(m);
    for (int d = 0; d < m; ++d) {
        auto& dp = hk[d];
        dp.assign(full + 1, std::vector<Cost>(n, inf));
        for (int j = 0; j < n; ++j) dp[1 << j][j] = inst.depot_customer(d, j);
        for (int s = 1; s <= full; ++s)
            for (int j = 0; j < n; ++j) {
                if (!(s & (1 << j)) || dp[s][j] == inf) continue;
                for (int k = 0; k < n; ++k) {
                    if (s & (1 << k)) continue;
                    const Cost cand = dp[s][j] + inst.customer_customer(j, k);
                    if (cand < dp[s | (1 << k)][k]) dp[s | (1 << k)][k] = cand;
                }
            }
        for (int s = 1; s <= full; ++s) {
            if (subset_load[s] > inst.vehicle_capacity) continue;
            for (int j = 0; j < n; ++j) {
                if (!(s & (1 << j)) || dp[s][j] == inf) continue;
                const Cost cand = dp[s][j] + inst.depot_customer(d, j);
                if (cand < tour[d][s]) {
                    tour[d][s] = cand;
                    tour_last[d][s] = j;
                }
            }
        }
    }

    // Cheapest set of routes serving a subset from one depot.
    std::vector<std::vector<Cost>> serve(m, std::vector<Cost>(full + 1, inf));
    std::vector<std::vector<int>> serve_first(m, std::vector<int>(full + 1, 0));
    for (int d = 0; d < m; ++d) {
        serve[d][0] = 0;
        for (int s = 1; s <= full; ++s) {
            const int anchor = s & -s; // lowest customer always rides the first block
            for (int block = s; block; block = (block - 1) & s) {
                if (!(block & anchor)) continue;
                if (tour[d][block] == inf || serve[d][s ^ block] == inf) continue;
                const Cost cand = inst.vehicle_fixed_cost + tour[d][block] + serve[d][s ^ block];
                if (cand < serve[d][s]) {
                    serve[d][s] = cand;
                    serve_first[d][s] = block;
                }
            }
        }
    }

    Cost best_cost = inf;
    int best_subset = -1;
    std::vector<int> best_split;
    std::vector<int> depots_of; // depot ids of the chosen subset, by position

    for (int dmask = 1; dmask < (1 << m); ++dmask) {
        std::vector<int> depots;
        Cost opening = 0;
        for (int d = 0; d < m; ++d)
            if (dmask & (1 << d)) {
                depots.push_back(d);
                opening += inst.opening_cost(d);
            }
        const int k = static_cast<int>(depots.size());
        // assign[i][s]: cheapest way the first i depots serve customer set s,
        // respecting each depot's capacity.
        std::vector<std::vector<Cost>> assign(k + 1, std::vector<Cost>(full + 1, inf));
        std::vector<std::vector<int>> assign_part(k + 1, std::vector<int>(full + 1, 0));
        assign[0][0] = 0;
        for (int i = 0; i < k; ++i) {
            const int d = depots[i];
            for (int s = 0; s <= full; ++s) {
                if (assign[i][s] == inf) continue;
                const int rest = full ^ s;
                for (int part = rest;; part = (part - 1) & rest) {
                    if (subset_load[part] <= inst.depot_capacity(d) && serve[d][part] != inf) {
                        const Cost cand = assign[i][s] + serve[d][part];
                        if (cand < assign[i + 1][s | part]) {
                            assign[i + 1][s | part] = cand;
                            assign_part[i + 1][s | part] = part;
                        }
                    }
                    if (part == 0) break;
                }
            }
        }
        if (assign[k][full] == inf) continue;
        const Cost total = opening + assign[k][full];
        if (total < best_cost) {
            best_cost = total;
            best_subset = dmask;
            best_split.assign(k, 0);
            int s = full;
            for (int i = k; i >= 1; --i) {
                best_split[i - 1] = assign_part[i][s];
                s ^= assign_part[i][s];
            }
            depots_of = depots;
        }
    }
    if (best_subset < 0) fail(ErrorKind::Infeasible, "no feasible depot subset serves all customers");

    // Reconstruct one optimal solution.
    Solution sol;
    for (std::size_t i = 0; i < depots_of.size(); ++i) {
        const int d = depots_of[i];
        sol.open_depots.push_back(d);
        int s = best_split[i];
        while (s) {
            const int block = serve_first[d][s];
            Route r;
            r.depot = d;
            // Unwind the Held-Karp path of this route.
            std::vector<int> order;
            int cur = tour_last[d][block], left = block;
            while (cur >= 0 && left) {
                order.push_back(cur);
                const int without = left ^ (1 << cur);
                int prev = -1;
                if (without) {
                    Cost want = hk[d][left][cur];
                    for (int j = 0; j < n; ++j) {
                        if (!(without & (1 << j))) continue;
                        if (hk[d][without][j] + inst.customer_customer(j, cur) == want) {
                            prev = j;
                            break;
                        }
                    }
                }
                left = without;
                cur = prev;
            }
            if (left) fail(ErrorKind::Invariant, "oracle route reconstruction diverged");
            std::reverse(order.begin(), order.end());
            r.customers = std::move(order);
            sol.routes.push_back(std::move(r));
            s ^= block;
        }
    }
    std::sort(sol.open_depots.begin(), sol.open_depots.end());
    recompute_caches(sol, inst);
    return {best_cost, sol};
}

// ---------------------------------------------------------------------------
// Reproducible toy instance generator
// ---------------------------------------------------------------------------

/// Deterministic small instance on an integer grid, scaled-integer distances,
/// with comfortably feasible but non-trivial capacities.
inline Instance gen_tiny(std::uint64_t seed, int n, int m) {
    if (n < 1 || m < 1) fail(ErrorKind::Validation, "generator needs n >= 1 and m >= 1");
    Rng rng(seed * 2654435761u + 1);
    std::vector<CustomerSpec> customers(n);
    Load total = 0;
    for (auto& c : customers) {
        c.pos = Point{static_cast<double>(rng.uniform_int(101)),
                      static_cast<double>(rng.uniform_int(101))};
        c.demand = 1 + rng.uniform_int(10);
        total += c.demand;
    }
    std::vector<DepotSpec> depots(m);
    Load cap_sum = 0;
    for (auto& d : depots) {
        d.pos = Point{static_cast<double>(rng.uniform_int(101)),
                      static_cast<double>(rng.uniform_int(101))};
        d.capacity = std::ceil(total * (0.45 + 0.45 * rng.uniform01()));
        d.opening_cost = 2000 + 100 * rng.uniform_int(61);
        cap_sum += d.capacity;
    }
    if (cap_sum < 1.2 * total) {
        // Stretch capacities so random subsets stay interesting but feasible.
        for (auto& d : depots) d.capacity = std::ceil(d.capacity * 1.3 * total / cap_sum);
    }
    const Load q = std::max<Load>(12, std::ceil(total / std::max(2, n / 3)));
    std::ostringstream name;
    name << "tiny-" << seed << '-' << n << '-' << m;
    return Instance::from_coords(name.str(), std::move(depots), std::move(customers), q, 1000.0,
                                 Rounding::ScaledInteger, 100.0);
}

/// Depot-index sets, one per line, '#' comments. Used by --seed-configs.
inline std::vector<DepotConfiguration> load_seed_configs(const std::string& path,
                                                         const Instance& inst) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Parse, "cannot open file: " + path);
    std::vector<DepotConfiguration> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<int> ids;
        int id;
        while (ls >> id) ids.push_back(id);
        if (ids.empty()) continue;
        DepotConfiguration cfg = DepotConfiguration::of(std::move(ids), inst);
        if (cfg.total_capacity < inst.total_demand())
            fail(ErrorKind::Validation, path + ":" + std::to_string(lineno) +
                                            ": configuration capacity below total demand");
        out.push_back(std::move(cfg));
    }
    return out;
}

} // namespace hgamp
