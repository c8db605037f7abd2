#pragma once

#include <vector>

#include <hgamp/hgamp.hpp>

namespace testutil {

using namespace hgamp;

/// 1 depot, 1 customer, explicit distance d; Q and costs configurable.
inline Instance single_pair(double d, double q, double opening, double fixed) {
    std::vector<DepotSpec> depots = {{.capacity = q, .opening_cost = opening, .pos = {}}};
    std::vector<CustomerSpec> customers = {{.demand = 1, .pos = {}}};
    std::vector<Cost> matrix = {0, d, d, 0};
    return Instance::from_matrix("pair", depots, customers, q, fixed, matrix);
}

/// Two depots at the ends of a line of customers; real distances.
inline Instance line_instance(int n, double q, double opening = 100, double fixed = 10) {
    std::vector<DepotSpec> depots = {
        {.capacity = 1000, .opening_cost = opening, .pos = Point{-10, 0}},
        {.capacity = 1000, .opening_cost = opening, .pos = Point{10.0 * n + 10, 0}},
    };
    std::vector<CustomerSpec> customers;
    for (int j = 0; j < n; ++j)
        customers.push_back({.demand = 1, .pos = Point{10.0 * j, 0}});
    return Instance::from_coords("line", depots, customers, q, fixed, Rounding::ExactReal);
}

/// A feasible random solution: random capacity-feasible configuration, then
/// the greedy builder. Unpackable draws (capacity covers the demand but no
/// exact assignment exists) are redrawn.
inline Solution random_solution(const Instance& inst, Rng& rng) {
    const auto estimates = all_estimates(inst);
    for (int redraw = 0; redraw < 50; ++redraw) {
        const DepotConfiguration cfg = random_config_build(inst, estimates, 6, rng);
        try {
            return rgh_build(inst, cfg, rng);
        } catch (const Error& e) {
            if (e.kind != ErrorKind::Infeasible) throw;
        }
    }
    throw Error(ErrorKind::Infeasible, "no packable configuration found in 50 draws");
}

/// Hand-built solution from route specs; caches refreshed.
inline Solution make_solution(const Instance& inst,
                              const std::vector<std::pair<int, std::vector<int>>>& routes) {
    Solution sol;
    for (const auto& [depot, customers] : routes) {
        Route r;
        r.depot = depot;
        r.customers = customers;
        sol.routes.push_back(std::move(r));
    }
    recompute_caches(sol, inst);
    return sol;
}

/// The constructive heuristic is only lightly randomized, so tiny instances
/// admit few distinct greedy solutions. Forced removal-reinsert rounds make
/// structurally diverse feasible solutions for fuzzing.
inline Solution diversified_solution(const Instance& inst, const NeighborLists& lists, Rng& rng,
                                     int rounds = 3) {
    Solution sol = random_solution(inst, rng);
    for (int t = 0; t < rounds; ++t) sol = mutate(sol, inst, lists, rng, {1.0, 0.3});
    return sol;
}

/// Grow a pool of pairwise-distinct feasible solutions via mutation chains.
inline std::vector<Solution> distinct_pool(const Instance& inst, const NeighborLists& lists,
                                           Rng& rng, int want, int max_draws = 5000) {
    std::vector<Solution> pool;
    Solution cur = random_solution(inst, rng);
    for (int t = 0; t < max_draws && static_cast<int>(pool.size()) < want; ++t) {
        cur = mutate(cur, inst, lists, rng, {1.0, 0.35});
        bool clone = false;
        for (const auto& m : pool)
            if (broken_pairs_distance(m, cur, inst) == 0) {
                clone = true;
                break;
            }
        if (!clone) pool.push_back(cur);
    }
    return pool;
}

} // namespace testutil
