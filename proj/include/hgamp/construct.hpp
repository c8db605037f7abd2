#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "error.hpp"
#include "localsearch.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace hgamp {

/// Defaults for the two-stage configuration filter.
struct CrhParams {
    double r_min = 0.1;  // minimum overlap coverage ratio
    double r_max = 0.6;  // maximum overlap coverage ratio
    int h_max = 1000;    // configurations produced by the preliminary filter
    int i_max = 1000;    // consecutive failed attempts before giving up
    double p_d = 6;      // head bias of the probabilistic pick
    int n_trials = 10;   // solutions built per configuration in the second stage
    int gamma = 10;      // configurations kept by the second stage
};

/// MST-based rough cost of serving customers from one depot: opening cost,
/// minimal vehicle count for the covered demand, and the tree weight.
struct DepotEstimate {
    int depot = -1;
    std::vector<int> covered; // customer ids, sorted
    Cost rough_cost = 0;      // u_i
};

/// Grow Prim's tree from depot i over customers only, stopping when the next
/// tree customer would push the covered demand past the depot capacity.
/// Ties on edge weight break toward the smaller customer index.
inline DepotEstimate mst_estimate(const Instance& inst, int depot) {
    const int n = inst.num_customers();
    DepotEstimate est;
    est.depot = depot;
    std::vector<char> in_tree(n, 0);
    std::vector<Cost> best_edge(n);
    for (int j = 0; j < n; ++j) best_edge[j] = inst.depot_customer(depot, j);
    Load covered_demand = 0;
    Cost tree_weight = 0;
    for (;;) {
        int pick = -1;
        for (int j = 0; j < n; ++j) {
            if (in_tree[j]) continue;
            if (pick < 0 || best_edge[j] < best_edge[pick]) pick = j;
        }
        if (pick < 0) break; // all customers covered
        if (covered_demand + inst.demand(pick) > inst.depot_capacity(depot)) break;
        in_tree[pick] = 1;
        est.covered.push_back(pick);
        covered_demand += inst.demand(pick);
        tree_weight += best_edge[pick];
        for (int j = 0; j < n; ++j)
            if (!in_tree[j] && inst.customer_customer(pick, j) < best_edge[j])
                best_edge[j] = inst.customer_customer(pick, j);
    }
    std::sort(est.covered.begin(), est.covered.end());
    const Cost vehicles = std::ceil(covered_demand / inst.vehicle_capacity);
    est.rough_cost = inst.opening_cost(depot) + inst.vehicle_fixed_cost * vehicles + tree_weight;
    return est;
}

/// Keyed entries kept in ascending key order, stable on ties.
template <typename Payload> struct SortedCandidateList {
    struct Entry {
        Cost key;
        Payload payload;
    };
    std::vector<Entry> entries;

    void add(Cost key, Payload payload) { entries.push_back({key, std::move(payload)}); }
    void sort() {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const Entry& a, const Entry& b) { return a.key < b.key; });
    }
    bool empty() const { return entries.empty(); }
    std::size_t size() const { return entries.size(); }
};

/// Pick an element with index floor(y^p_d * |L|), y uniform in (0,1), clamped
/// to the valid range; strongly biased toward the head of the list.
template <typename Payload>
const Payload& probabilistic_pick(const SortedCandidateList<Payload>& list, double p_d, Rng& rng) {
    if (list.empty()) fail(ErrorKind::Validation, "probabilistic pick from an empty list");
    const double y = rng.uniform_open01();
    auto idx = static_cast<long>(std::pow(y, p_d) * static_cast<double>(list.size()));
    idx = std::clamp<long>(idx, 0, static_cast<long>(list.size()) - 1);
    return list.entries[static_cast<std::size_t>(idx)].payload;
}

namespace detail {

inline std::size_t intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t count = 0, ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) {
            ++count;
            ++ia;
            ++ib;
        } else if (a[ia] < b[ib]) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return count;
}

inline void require_servable(const Instance& inst) {
    Load cap = 0;
    for (const auto& d : inst.depots) cap += d.capacity;
    if (cap < inst.total_demand())
        fail(ErrorKind::Infeasible, "total depot capacity " + std::to_string(cap) +
                                        " cannot cover total demand " +
                                        std::to_string(inst.total_demand()));
}

} // namespace detail

/// Preliminary filter: grow many depot configurations, each time starting from
/// a random depot and extending with depots whose coverage overlap ratio is
/// below a threshold that relaxes as capacity accumulates. Failed or duplicate
/// attempts count toward the i_max give-up budget.
inline std::vector<DepotConfiguration> preliminary_filter(const Instance& inst,
                                                          const std::vector<DepotEstimate>& estimates,
                                                          const CrhParams& params, Rng& rng) {
    detail::require_servable(inst);
    const int m = inst.num_depots();
    const Load total = inst.total_demand();

    std::set<std::vector<int>> seen;
    std::vector<DepotConfiguration> out;
    int failures = 0;
    while (static_cast<int>(out.size()) < params.h_max && failures < params.i_max) {
        const int start = rng.uniform_int(m);
        std::vector<int> chosen = {start};
        std::vector<char> in_config(m, 0);
        in_config[start] = 1;
        std::vector<int> covered = estimates[start].covered; // S_H
        Load capacity = inst.depot_capacity(start);

        bool dead_end = false;
        while (capacity < total) {
            SortedCandidateList<int> candidates;
            for (int i = 0; i < m; ++i) {
                if (in_config[i]) continue;
                const auto& s_i = estimates[i].covered;
                const std::size_t inter = detail::intersection_size(covered, s_i);
                const std::size_t uni = covered.size() + s_i.size() - inter;
                const double ratio = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
                const double bound =
                    (params.r_max - params.r_min) * ((inst.depot_capacity(i) + capacity) / total) +
                    params.r_min;
                if (ratio < bound) candidates.add(estimates[i].rough_cost, i);
            }
            if (candidates.empty()) {
                dead_end = true;
                break;
            }
            candidates.sort();
            const int pick = probabilistic_pick(candidates, params.p_d, rng);
            in_config[pick] = 1;
            chosen.push_back(pick);
            std::vector<int> merged;
            std::set_union(covered.begin(), covered.end(), estimates[pick].covered.begin(),
                           estimates[pick].covered.end(), std::back_inserter(merged));
            covered = std::move(merged);
            capacity += inst.depot_capacity(pick);
        }

        if (dead_end) {
            ++failures;
            continue;
        }
        std::sort(chosen.begin(), chosen.end());
        if (!seen.insert(chosen).second) {
            ++failures; // duplicate configuration
            continue;
        }
        out.push_back(DepotConfiguration::of(chosen, inst));
        failures = 0;
    }
    return out;
}

/// Random greedy construction under a fixed configuration: start each route at
/// the customer nearest to the active depot, extend by the nearest unvisited
/// customer, roll to a fresh route when the vehicle would overflow, and hop to
/// a random other depot of the configuration when the active depot cannot take
/// the next customer.
inline Solution rgh_build(const Instance& inst, const DepotConfiguration& config, Rng& rng) {
    if (config.open.empty()) fail(ErrorKind::Validation, "empty depot configuration");
    if (config.total_capacity < inst.total_demand())
        fail(ErrorKind::Infeasible, "configuration capacity below total demand");

    const int n = inst.num_customers();
    constexpr int kAttempts = 100;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
        std::vector<char> visited(n, 0);
        int left = n;
        std::vector<Load> remaining(inst.num_depots(), 0);
        for (int d : config.open) remaining[d] = inst.depot_capacity(d);

        Solution sol;
        int active = config.open[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(config.open.size())))];
        std::vector<int> current;
        Load current_load = 0;
        bool stuck = false;

        auto flush_route = [&]() {
            if (current.empty()) return;
            Route r;
            r.depot = active;
            r.customers = current;
            sol.routes.push_back(std::move(r));
            current.clear();
            current_load = 0;
        };
        auto place = [&](int j) {
            current.push_back(j);
            current_load += inst.demand(j);
            visited[j] = 1;
            remaining[active] -= inst.demand(j);
            --left;
        };
        // Nearest unvisited customer to a vertex, optionally only those the
        // active depot can still take. Ties break to the smaller index.
        auto nearest = [&](int anchor, bool must_fit_active) {
            int best = -1;
            for (int j = 0; j < n; ++j) {
                if (visited[j]) continue;
                if (must_fit_active && inst.demand(j) > remaining[active]) continue;
                if (best < 0 || inst.dist(anchor, inst.customer_vertex(j)) <
                                    inst.dist(anchor, inst.customer_vertex(best)))
                    best = j;
            }
            return best;
        };

        while (left > 0) {
            if (current.empty()) {
                // Start a route with the nearest customer the depot can host.
                const int start = nearest(inst.depot_vertex(active), true);
                if (start >= 0) {
                    place(start);
                    continue;
                }
                // Nothing fits here: move to a random depot that can host the
                // overall nearest remaining customer, or give up the attempt.
                const int want = nearest(inst.depot_vertex(active), false);
                std::vector<int> fits;
                for (int cand : config.open)
                    if (remaining[cand] >= inst.demand(want)) fits.push_back(cand);
                if (fits.empty()) {
                    // Not even another depot can take it; try any (customer,
                    // depot) pair that still fits.
                    int alt = -1, alt_depot = -1;
                    for (int j = 0; j < n && alt < 0; ++j) {
                        if (visited[j]) continue;
                        for (int cand : config.open)
                            if (remaining[cand] >= inst.demand(j)) {
                                alt = j;
                                alt_depot = cand;
                                break;
                            }
                    }
                    if (alt < 0) {
                        stuck = true; // capacity fragmentation; retry
                        break;
                    }
                    active = alt_depot;
                    place(alt);
                    continue;
                }
                active = fits[static_cast<std::size_t>(
                    rng.uniform_int(static_cast<int>(fits.size())))];
                continue;
            }
            const int next = nearest(inst.customer_vertex(current.back()), false);
            if (current_load + inst.demand(next) > inst.vehicle_capacity) {
                flush_route(); // vehicle full: new route at the same depot
                continue;
            }
            if (inst.demand(next) > remaining[active]) {
                flush_route();
                std::vector<int> fits;
                for (int cand : config.open)
                    if (cand != active && remaining[cand] >= inst.demand(next))
                        fits.push_back(cand);
                if (!fits.empty())
                    active = fits[static_cast<std::size_t>(
                        rng.uniform_int(static_cast<int>(fits.size())))];
                continue; // restart route construction at the (possibly new) depot
            }
            place(next);
        }
        if (stuck) continue;
        flush_route();
        recompute_caches(sol, inst);
        return sol;
    }

    // Randomized nearest-neighbor packing kept fragmenting (tight capacity).
    // Deterministic fallback: best-fit-decreasing assignment, then
    // nearest-neighbor routes per depot.
    const int n_all = inst.num_customers();
    std::vector<int> by_demand(n_all);
    for (int j = 0; j < n_all; ++j) by_demand[j] = j;
    std::stable_sort(by_demand.begin(), by_demand.end(),
                     [&](int a, int b) { return inst.demand(a) > inst.demand(b); });
    std::vector<Load> remaining(inst.num_depots(), 0);
    for (int d : config.open) remaining[d] = inst.depot_capacity(d);
    std::vector<std::vector<int>> assigned(inst.num_depots());
    for (int j : by_demand) {
        int best = -1;
        for (int d : config.open)
            if (remaining[d] >= inst.demand(j) && (best < 0 || remaining[d] < remaining[best]))
                best = d;
        if (best < 0)
            fail(ErrorKind::Infeasible,
                 "configuration capacity cannot be packed without splitting a customer");
        assigned[best].push_back(j);
        remaining[best] -= inst.demand(j);
    }
    Solution sol;
    for (int d : config.open) {
        std::vector<char> used(n_all, 1);
        for (int j : assigned[d]) used[j] = 0;
        int left = static_cast<int>(assigned[d].size());
        while (left > 0) {
            Route r;
            r.depot = d;
            Load load = 0;
            int anchor = inst.depot_vertex(d);
            for (;;) {
                int best = -1;
                for (int j : assigned[d]) {
                    if (used[j] || load + inst.demand(j) > inst.vehicle_capacity) continue;
                    if (best < 0 || inst.dist(anchor, inst.customer_vertex(j)) <
                                        inst.dist(anchor, inst.customer_vertex(best)))
                        best = j;
                }
                if (best < 0) break;
                r.customers.push_back(best);
                used[best] = 1;
                load += inst.demand(best);
                anchor = inst.customer_vertex(best);
                --left;
            }
            sol.routes.push_back(std::move(r));
        }
    }
    recompute_caches(sol, inst);
    return sol;
}

/// Secondary filter: rate each configuration by the mean objective of a few
/// locally improved greedy solutions and keep the gamma best.
inline std::vector<DepotConfiguration> secondary_filter(const Instance& inst,
                                                        const std::vector<DepotConfiguration>& configs,
                                                        const CrhParams& params,
                                                        const NeighborLists& lists, Rng& rng) {
    if (configs.empty()) fail(ErrorKind::Validation, "secondary filter needs at least one configuration");
    SortedCandidateList<DepotConfiguration> ranked;
    for (const auto& cfg : configs) {
        Cost sum = 0;
        bool packable = true;
        for (int t = 0; t < params.n_trials && packable; ++t) {
            try {
                Solution sol = rgh_build(inst, cfg, rng);
                sol = vnd_improve(std::move(sol), lists, inst);
                sum += sol.objective;
            } catch (const Error& e) {
                // A capacity-covering configuration can still be unpackable
                // (no exact bin assignment exists); drop it from the ranking.
                if (e.kind != ErrorKind::Infeasible) throw;
                packable = false;
            }
        }
        if (packable) ranked.add(sum / params.n_trials, cfg);
    }
    if (ranked.empty())
        fail(ErrorKind::Infeasible, "no candidate configuration admits a feasible packing");
    ranked.sort();
    std::vector<DepotConfiguration> out;
    const std::size_t keep = std::min<std::size_t>(ranked.size(), params.gamma);
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(ranked.entries[i].payload);
    return out;
}

/// Depot selection for the free subpopulation: repeatedly pick from the
/// rough-cost-sorted list of unselected depots until the capacity covers the
/// demand. Ignores geographic dispersion.
inline DepotConfiguration random_config_build(const Instance& inst,
                                              const std::vector<DepotEstimate>& estimates,
                                              double p_d, Rng& rng) {
    detail::require_servable(inst);
    std::vector<char> taken(inst.num_depots(), 0);
    std::vector<int> chosen;
    Load capacity = 0;
    while (capacity < inst.total_demand()) {
        SortedCandidateList<int> list;
        for (int i = 0; i < inst.num_depots(); ++i)
            if (!taken[i]) list.add(estimates[i].rough_cost, i);
        list.sort();
        const int pick = probabilistic_pick(list, p_d, rng);
        taken[pick] = 1;
        chosen.push_back(pick);
        capacity += inst.depot_capacity(pick);
    }
    return DepotConfiguration::of(std::move(chosen), inst);
}

/// MST estimates for every depot, in depot order.
inline std::vector<DepotEstimate> all_estimates(const Instance& inst) {
    std::vector<DepotEstimate> out;
    out.reserve(inst.num_depots());
    for (int i = 0; i < inst.num_depots(); ++i) out.push_back(mst_estimate(inst, i));
    return out;
}

} // namespace hgamp
