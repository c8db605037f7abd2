#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "error.hpp"
#include "localsearch.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace hgamp {

/// Penalty factors of the generalized cost; both start at 1 and only ever
/// grow by a factor of 10 when the search runs out of improving moves.
struct PenaltyState {
    double depot_factor = 1.0; // p_l
    double route_factor = 1.0; // p_r
    void escalate() {
        depot_factor *= 10;
        route_factor *= 10;
    }
};

/// f_g = f + p_l * f_l + p_r * f_r.
inline Cost generalized_cost(const Solution& sol, const Instance& inst, double p_l, double p_r) {
    const Feasibility f = check_feasibility(sol, inst);
    if (!f.structural_ok) fail(ErrorKind::Structural, f.structural_detail);
    return sol.objective + p_l * f.depot_overload + p_r * f.route_overload;
}

/// Reversal-blocking move memory: a performed move's undo signature is barred
/// for `tenure` accepted moves.
class TabuList {
public:
    explicit TabuList(int tenure) : tenure_(tenure) {}

    /// Signature identifying the adjacency a move (re)creates.
    using Signature = std::uint64_t;

    bool blocked(Signature sig) const {
        auto it = expiry_.find(sig);
        return it != expiry_.end() && it->second > clock_;
    }

    void block(Signature sig) { expiry_[sig] = clock_ + tenure_; }

    void tick() {
        ++clock_;
        if (clock_ % 256 == 0) {
            std::erase_if(expiry_, [&](const auto& kv) { return kv.second <= clock_; });
        }
    }

private:
    int tenure_;
    long clock_ = 0;
    std::map<Signature, long> expiry_;
};

namespace detail {

inline TabuList::Signature pack_signature(int tag, int a, int x, int y) {
    if (x > y) std::swap(x, y);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 44) |
           (static_cast<std::uint64_t>(tag) << 40) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 20) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
}

/// Neighbors of customer `a` in the current solution, as vertex ids.
inline std::pair<int, int> current_slot(int a, const MoveEngine& engine, const Instance& inst) {
    const Solution& sol = engine.solution();
    const int r = engine.route_of(a);
    const auto& cs = sol.routes[r].customers;
    const auto pos = std::find(cs.begin(), cs.end(), a) - cs.begin();
    const int before =
        pos == 0 ? inst.depot_vertex(sol.routes[r].depot) : inst.customer_vertex(cs[pos - 1]);
    const int after = pos + 1 == static_cast<long>(cs.size())
                          ? inst.depot_vertex(sol.routes[r].depot)
                          : inst.customer_vertex(cs[pos + 1]);
    return {before, after};
}

/// Signature of the adjacency a move creates. Swap and 2-opt* are their own
/// inverses, so one signature covers do and undo; a relocate is undone by the
/// relocate that recreates the vacated slot.
inline TabuList::Signature forward_signature(const Move& mv, const MoveEngine& engine,
                                             const Instance& inst) {
    if (mv.kind == MoveKind::Relocate1) {
        // Slot the move inserts `a` into (b and its current flank).
        const auto [pb, nb] = current_slot(mv.b, engine, inst);
        const int vb = inst.customer_vertex(mv.b);
        const int u = mv.variant == 0 ? vb : pb;
        const int v = mv.variant == 0 ? nb : vb;
        return pack_signature(1, mv.a, u, v);
    }
    if (mv.kind == MoveKind::Swap11) return pack_signature(2, std::min(mv.a, mv.b), mv.a, mv.b);
    return pack_signature(3 + mv.variant, std::min(mv.a, mv.b), mv.a, mv.b);
}

/// Signature of the move that would undo `mv` (blocked after applying it).
inline TabuList::Signature undo_signature(const Move& mv, const MoveEngine& engine,
                                          const Instance& inst) {
    if (mv.kind == MoveKind::Relocate1) {
        const auto [before, after] = current_slot(mv.a, engine, inst);
        return pack_signature(1, mv.a, before, after);
    }
    return forward_signature(mv, engine, inst);
}

} // namespace detail

/// Grow the configuration until its capacity covers the demand: repeatedly
/// move one customer out of an overloaded depot's route into a fresh
/// single-customer route at the closed depot with the cheapest stub tour,
/// ignoring fixed costs.
inline Solution expand_depots(Solution sol, const Instance& inst) {
    DepotConfiguration cfg = config_of(sol, inst);
    while (cfg.total_capacity < inst.total_demand()) {
        if (static_cast<int>(cfg.open.size()) == inst.num_depots())
            fail(ErrorKind::Infeasible, "all depots open yet capacity below demand");

        // Loads per depot to find overloaded ones.
        std::vector<Load> depot_load(inst.num_depots(), 0);
        for (const auto& r : sol.routes) depot_load[r.depot] += r.load;

        // Candidate customers: those served by an overloaded depot. Pick the
        // (customer, closed depot) pair with the cheapest stub tour.
        int best_customer = -1, best_depot = -1, best_route = -1;
        Cost best_travel = 0;
        for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) {
            const auto& r = sol.routes[ri];
            if (depot_load[r.depot] <= inst.depot_capacity(r.depot)) continue;
            for (int c : r.customers) {
                for (int i = 0; i < inst.num_depots(); ++i) {
                    if (cfg.contains(i)) continue;
                    const Cost travel = 2 * inst.depot_customer(i, c);
                    if (best_customer < 0 || travel < best_travel) {
                        best_customer = c;
                        best_depot = i;
                        best_route = ri;
                        best_travel = travel;
                    }
                }
            }
        }
        // Total load exceeds total open capacity, so some depot is overloaded.
        if (best_customer < 0) fail(ErrorKind::Invariant, "expansion found no overloaded depot");

        auto& donor = sol.routes[best_route].customers;
        donor.erase(std::find(donor.begin(), donor.end(), best_customer));
        if (donor.empty()) {
            // Keep the donor depot open: shrinking the configuration here
            // would fight the capacity expansion this loop exists for.
            sol.routes.erase(sol.routes.begin() + best_route);
        }
        Route fresh;
        fresh.depot = best_depot;
        fresh.customers = {best_customer};
        sol.routes.push_back(std::move(fresh));
        recompute_caches(sol, inst);
        cfg = config_of(sol, inst);
    }
    return sol;
}

/// Parameters of the penalized feasibility restoration.
struct RepairParams {
    int tabu_tenure = 20;
    double escalation_cap = 1e9;
};

/// Restore capacity feasibility with a best-improvement search over
/// {Relocate1, Swap11, 2-opt*} inter-route moves under the generalized cost,
/// escalating the penalty factors tenfold whenever no improving non-tabu move
/// exists. Returns a feasible solution or throws after the escalation cap.
inline Solution repair(Solution sol, const Instance& inst, const NeighborLists& lists, Rng& rng,
                       const RepairParams& params = {}) {
    (void)rng; // the procedure is deterministic; kept for interface symmetry
    {
        const Feasibility f = check_feasibility(sol, inst);
        if (!f.structural_ok) fail(ErrorKind::Structural, f.structural_detail);
        if (f.feasible()) return sol;
    }
    if (config_of(sol, inst).total_capacity < inst.total_demand())
        sol = expand_depots(std::move(sol), inst);

    MoveEngine engine(sol, inst);
    PenaltyState penalty;
    TabuList tabu(params.tabu_tenure);
    const int n = inst.num_customers();

    while (engine.route_overload() > 0 || engine.depot_overload() > 0) {
        Move best_move;
        Cost best_delta = 0;
        bool found = false;
        for (int a = 0; a < n; ++a) {
            for (int b : lists.of_vertex[inst.customer_vertex(a)]) {
                if (engine.route_of(a) == engine.route_of(b)) continue;
                const Move candidates[5] = {
                    {MoveKind::Relocate1, a, b, 0},
                    {MoveKind::Relocate1, a, b, 1},
                    {MoveKind::Swap11, a, b, 0},
                    {MoveKind::TwoOptStar, a, b, 0},
                    {MoveKind::TwoOptStar, a, b, 1},
                };
                for (const Move& mv : candidates) {
                    const MoveOutcome out = engine.evaluate(mv);
                    if (!out.valid) continue;
                    const Cost delta = out.delta_cost +
                                       penalty.depot_factor * out.delta_depot_overload +
                                       penalty.route_factor * out.delta_route_overload;
                    if (delta >= -1e-9) continue;
                    if (tabu.blocked(detail::forward_signature(mv, engine, inst))) continue;
                    if (!found || delta < best_delta) {
                        best_move = mv;
                        best_delta = delta;
                        found = true;
                    }
                }
            }
        }
        if (!found) {
            // No inter-route move helps. An overloaded route can still be cut
            // in two at its cheapest split point (a 2-opt* against the
            // depot's empty tail); without it, single-route offspring could
            // never be repaired.
            int split_route = -1, split_after = -1;
            Cost split_delta = 0;
            for (int r = 0; r < static_cast<int>(sol.routes.size()); ++r) {
                const auto& rt = sol.routes[r];
                if (rt.load <= inst.vehicle_capacity || rt.customers.size() < 2) continue;
                Load head_load = 0;
                for (int pos = 0; pos + 1 < static_cast<int>(rt.customers.size()); ++pos) {
                    head_load += inst.demand(rt.customers[pos]);
                    const Load tail_load = rt.load - head_load;
                    const int va = inst.customer_vertex(rt.customers[pos]);
                    const int vb = inst.customer_vertex(rt.customers[pos + 1]);
                    const int vd = inst.depot_vertex(rt.depot);
                    const Cost dcost = inst.dist(va, vd) + inst.dist(vd, vb) -
                                       inst.dist(va, vb) + inst.vehicle_fixed_cost;
                    const Load dover = std::max<Load>(0, head_load - inst.vehicle_capacity) +
                                       std::max<Load>(0, tail_load - inst.vehicle_capacity) -
                                       std::max<Load>(0, rt.load - inst.vehicle_capacity);
                    const Cost delta = dcost + penalty.route_factor * dover;
                    if (delta < -1e-9 && (split_route < 0 || delta < split_delta)) {
                        split_route = r;
                        split_after = pos;
                        split_delta = delta;
                    }
                }
            }
            if (split_route >= 0) {
                auto& rt = sol.routes[split_route];
                Route tail;
                tail.depot = rt.depot;
                tail.customers.assign(rt.customers.begin() + split_after + 1, rt.customers.end());
                rt.customers.resize(split_after + 1);
                sol.routes.push_back(std::move(tail));
                recompute_caches(sol, inst);
                engine.rebuild();
                continue;
            }
            if (penalty.depot_factor >= params.escalation_cap)
                fail(ErrorKind::Infeasible, "repair hit the penalty escalation cap");
            penalty.escalate();
            continue;
        }
        tabu.block(detail::undo_signature(best_move, engine, inst));
        engine.apply(best_move);
        tabu.tick();
    }
    return sol;
}

/// Parameters of the removal-and-reinsert mutation.
struct MutateParams {
    double probability = 0.15; // zeta
    double fraction = 0.25;    // xi, fraction of customers removed
};

/// With probability zeta, remove round(xi * n) customers related to a random
/// seed customer (roulette on 1 / (1 + distance-to-seed)) and greedily
/// reinsert each at its cheapest feasible position among the configuration's
/// depots, opening new routes when that is cheapest or nothing else fits.
inline Solution mutate(const Solution& input, const Instance& inst, const NeighborLists& lists,
                       Rng& rng, const MutateParams& params = {}) {
    (void)lists;
    if (!rng.chance(params.probability)) return input;

    const int n = inst.num_customers();
    const int k = std::max(1, static_cast<int>(std::lround(params.fraction * n)));

    // Pick the seed and its most related companions.
    std::vector<char> removed_flag(n, 0);
    std::vector<int> removed;
    const int seed = rng.uniform_int(n);
    removed_flag[seed] = 1;
    removed.push_back(seed);
    while (static_cast<int>(removed.size()) < k) {
        double total = 0;
        for (int j = 0; j < n; ++j)
            if (!removed_flag[j]) total += 1.0 / (1.0 + inst.customer_customer(seed, j));
        double roll = rng.uniform01() * total;
        int pick = -1;
        for (int j = 0; j < n; ++j) {
            if (removed_flag[j]) continue;
            roll -= 1.0 / (1.0 + inst.customer_customer(seed, j));
            pick = j;
            if (roll <= 0) break;
        }
        removed_flag[pick] = 1;
        removed.push_back(pick);
    }

    Solution sol = input;
    const DepotConfiguration cfg = config_of(sol, inst); // reinsertion stays inside this
    for (auto& r : sol.routes)
        std::erase_if(r.customers, [&](int c) { return removed_flag[c]; });
    std::erase_if(sol.routes, [](const Route& r) { return r.customers.empty(); });
    recompute_caches(sol, inst);
    // Keep all configuration depots available for reinsertion even if their
    // routes vanished.
    sol.open_depots = cfg.open;

    std::vector<Load> depot_load(inst.num_depots(), 0);
    for (const auto& r : sol.routes) depot_load[r.depot] += r.load;

    for (int c : removed) {
        const Load d = inst.demand(c);
        // Cheapest feasible insertion across all routes.
        int best_route = -1, best_pos = -1;
        Cost best_delta = 0;
        for (int ri = 0; ri < static_cast<int>(sol.routes.size()); ++ri) {
            const auto& r = sol.routes[ri];
            if (r.load + d > inst.vehicle_capacity) continue;
            if (depot_load[r.depot] + d > inst.depot_capacity(r.depot)) continue;
            const int len = static_cast<int>(r.customers.size());
            for (int pos = 0; pos <= len; ++pos) {
                const int u = pos == 0 ? inst.depot_vertex(r.depot)
                                       : inst.customer_vertex(r.customers[pos - 1]);
                const int v = pos == len ? inst.depot_vertex(r.depot)
                                         : inst.customer_vertex(r.customers[pos]);
                const Cost delta = inst.dist(u, inst.customer_vertex(c)) +
                                   inst.dist(inst.customer_vertex(c), v) - inst.dist(u, v);
                if (best_route < 0 || delta < best_delta) {
                    best_route = ri;
                    best_pos = pos;
                    best_delta = delta;
                }
            }
        }
        // New single-customer route at a configuration depot with room.
        int best_new_depot = -1;
        Cost best_new_delta = 0;
        for (int i : cfg.open) {
            if (depot_load[i] + d > inst.depot_capacity(i)) continue;
            const Cost delta = 2 * inst.depot_customer(i, c) + inst.vehicle_fixed_cost;
            if (best_new_depot < 0 || delta < best_new_delta) {
                best_new_depot = i;
                best_new_delta = delta;
            }
        }
        if (best_route >= 0 && (best_new_depot < 0 || best_delta <= best_new_delta)) {
            auto& r = sol.routes[best_route];
            r.customers.insert(r.customers.begin() + best_pos, c);
            r.load += d;
            r.length = route_length(inst, r.depot, r.customers);
            depot_load[r.depot] += d;
        } else if (best_new_depot >= 0) {
            Route fresh;
            fresh.depot = best_new_depot;
            fresh.customers = {c};
            sol.routes.push_back(std::move(fresh));
            depot_load[best_new_depot] += d;
            recompute_caches(sol, inst);
        } else {
            // Capacity fragmentation left no feasible spot; mutation is
            // optional diversification, so fall back to the input.
            return input;
        }
    }
    drop_empty_routes_and_depots(sol, inst);
    return sol;
}

} // namespace hgamp
