#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

#include "error.hpp"
#include "model.hpp"

namespace hgamp {

/// For every vertex (depots included), the alpha nearest customers in
/// ascending distance order, ties broken by smaller customer index. A vertex
/// is never its own neighbor.
struct NeighborLists {
    int alpha = 0;
    std::vector<std::vector<int>> of_vertex; // indexed by vertex id; entries are customer ids

    const std::vector<int>& of_customer(int j, const Instance& inst) const {
        return of_vertex[inst.customer_vertex(j)];
    }
};

inline NeighborLists build_neighbor_lists(const Instance& inst, int alpha) {
    if (alpha < 1) fail(ErrorKind::Validation, "granularity alpha must be >= 1");
    NeighborLists lists;
    lists.alpha = alpha;
    const int V = inst.num_vertices();
    lists.of_vertex.resize(V);
    std::vector<int> order(inst.num_customers());
    for (int v = 0; v < V; ++v) {
        order.clear();
        for (int j = 0; j < inst.num_customers(); ++j)
            if (inst.customer_vertex(j) != v) order.push_back(j);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const Cost da = inst.dist(v, inst.customer_vertex(a));
            const Cost db = inst.dist(v, inst.customer_vertex(b));
            if (da != db) return da < db;
            return a < b;
        });
        if (static_cast<int>(order.size()) > alpha) order.resize(alpha);
        lists.of_vertex[v] = order;
    }
    return lists;
}

enum class MoveKind { Relocate1, Relocate2, Swap11, Swap12, Swap22, TwoOpt, TwoOptStar };

/// A move names customers, not positions, so it stays meaningful as the
/// solution changes. `variant` picks the concrete reconnection:
///  - Relocate1/Relocate2: 0 = insert after b, 1 = insert before b
///  - TwoOptStar: 0 = cut after a and after b, 1 = cut after a and before b
/// Relocate2/Swap12/Swap22 segments are (x, successor-of-x), taken forward.
struct Move {
    MoveKind kind = MoveKind::Relocate1;
    int a = -1;
    int b = -1;
    int variant = 0;
};

/// Cost and load consequences of a move, used both by the feasible local
/// search (which skips violating moves) and by the penalized repair search.
struct MoveOutcome {
    bool valid = false;
    Cost delta_cost = 0;  // includes vehicle fixed costs and depot opening costs
    Load delta_depot_overload = 0;
    Load delta_route_overload = 0;
    bool intra = false;
};

/// Shared move machinery: position/load bookkeeping over one solution, O(1)ish
/// delta evaluation and exact application for the seven operators.
class MoveEngine {
public:
    MoveEngine(Solution& sol, const Instance& inst) : sol_(sol), inst_(inst) { rebuild(); }

    const Solution& solution() const { return sol_; }
    const Instance& instance() const { return inst_; }

    int route_of(int customer) const { return route_of_[customer]; }
    Load depot_load(int depot) const { return depot_load_[depot]; }

    /// Full reindex, refreshing route caches as well; call after external
    /// modifications of the solution.
    void rebuild() {
        const int n = inst_.num_customers();
        route_of_.assign(n, -1);
        pos_of_.assign(n, -1);
        depot_load_.assign(inst_.num_depots(), 0);
        routes_of_depot_.assign(inst_.num_depots(), 0);
        for (int r = 0; r < static_cast<int>(sol_.routes.size()); ++r) {
            auto& rt = sol_.routes[r];
            rt.load = route_load(inst_, rt.customers);
            rt.length = route_length(inst_, rt.depot, rt.customers);
            index_route(r);
            depot_load_[rt.depot] += rt.load;
            ++routes_of_depot_[rt.depot];
        }
        refresh_objective();
    }

    MoveOutcome evaluate(const Move& mv) const {
        switch (mv.kind) {
        case MoveKind::Relocate1: return eval_relocate(mv, 1);
        case MoveKind::Relocate2: return eval_relocate(mv, 2);
        case MoveKind::Swap11: return eval_swap(mv, 1, 1);
        case MoveKind::Swap12: return eval_swap(mv, 1, 2);
        case MoveKind::Swap22: return eval_swap(mv, 2, 2);
        case MoveKind::TwoOpt: return eval_two_opt(mv);
        case MoveKind::TwoOptStar: return eval_two_opt_star(mv);
        }
        return {};
    }

    /// Apply a move previously reported valid. Caches stay exact: affected
    /// route lengths are recomputed from their sequences.
    void apply(const Move& mv) {
        switch (mv.kind) {
        case MoveKind::Relocate1: apply_relocate(mv, 1); break;
        case MoveKind::Relocate2: apply_relocate(mv, 2); break;
        case MoveKind::Swap11: apply_swap(mv, 1, 1); break;
        case MoveKind::Swap12: apply_swap(mv, 1, 2); break;
        case MoveKind::Swap22: apply_swap(mv, 2, 2); break;
        case MoveKind::TwoOpt: apply_two_opt(mv); break;
        case MoveKind::TwoOptStar: apply_two_opt_star(mv); break;
        }
    }

    Load route_overload() const {
        Load t = 0;
        for (const auto& r : sol_.routes) t += std::max<Load>(0, r.load - inst_.vehicle_capacity);
        return t;
    }

    Load depot_overload() const {
        Load t = 0;
        for (int i = 0; i < inst_.num_depots(); ++i)
            t += std::max<Load>(0, depot_load_[i] - inst_.depot_capacity(i));
        return t;
    }

private:
    Solution& sol_;
    const Instance& inst_;
    std::vector<int> route_of_, pos_of_;
    std::vector<Load> depot_load_;
    std::vector<int> routes_of_depot_;
    mutable std::vector<int> scratch_a_, scratch_b_;

    void index_route(int r) {
        const auto& cs = sol_.routes[r].customers;
        for (int k = 0; k < static_cast<int>(cs.size()); ++k) {
            route_of_[cs[k]] = r;
            pos_of_[cs[k]] = k;
        }
    }

    void refresh_objective() {
        Cost total = 0;
        for (int i : sol_.open_depots) total += inst_.opening_cost(i);
        total += inst_.vehicle_fixed_cost * static_cast<Cost>(sol_.routes.size());
        for (const auto& r : sol_.routes) total += r.length;
        sol_.objective = total;
    }

    int vertex_of(int customer) const { return inst_.customer_vertex(customer); }

    int prev_vertex(int r, int pos) const {
        const auto& rt = sol_.routes[r];
        return pos == 0 ? inst_.depot_vertex(rt.depot) : vertex_of(rt.customers[pos - 1]);
    }
    int next_vertex(int r, int pos) const {
        const auto& rt = sol_.routes[r];
        return pos + 1 == static_cast<int>(rt.customers.size()) ? inst_.depot_vertex(rt.depot)
                                                                : vertex_of(rt.customers[pos + 1]);
    }

    bool valid_customer(int c) const { return c >= 0 && c < inst_.num_customers() && route_of_[c] >= 0; }

    static Load overload(Load load, Load cap) { return std::max<Load>(0, load - cap); }

    /// Closing-cost bookkeeping when route `r` would end up empty.
    Cost removal_saving(int r) const {
        Cost s = inst_.vehicle_fixed_cost;
        const int depot = sol_.routes[r].depot;
        if (routes_of_depot_[depot] == 1) s += inst_.opening_cost(depot);
        return s;
    }

    // --- sequence-rebuild evaluation helpers -------------------------------

    Cost seq_length(int depot, const std::vector<int>& cs) const {
        return route_length(inst_, depot, cs);
    }

    MoveOutcome finish_outcome(int ra, int rb, const std::vector<int>& na,
                               const std::vector<int>& nb) const {
        // Generic two-route outcome from rebuilt sequences na (for route ra)
        // and nb (for rb); ra == rb means single-route move with nb ignored.
        const auto& A = sol_.routes[ra];
        MoveOutcome out;
        out.valid = true;
        out.intra = ra == rb;
        Load new_la = route_load(inst_, na);
        out.delta_cost = seq_length(A.depot, na) - A.length;
        if (ra != rb) {
            const auto& B = sol_.routes[rb];
            const Load new_lb = route_load(inst_, nb);
            out.delta_cost += seq_length(B.depot, nb) - B.length;
            out.delta_route_overload = overload(new_la, inst_.vehicle_capacity) +
                                       overload(new_lb, inst_.vehicle_capacity) -
                                       overload(A.load, inst_.vehicle_capacity) -
                                       overload(B.load, inst_.vehicle_capacity);
            if (A.depot != B.depot) {
                const Load da_new = depot_load_[A.depot] - A.load + new_la;
                const Load db_new = depot_load_[B.depot] - B.load + new_lb;
                out.delta_depot_overload =
                    overload(da_new, inst_.depot_capacity(A.depot)) +
                    overload(db_new, inst_.depot_capacity(B.depot)) -
                    overload(depot_load_[A.depot], inst_.depot_capacity(A.depot)) -
                    overload(depot_load_[B.depot], inst_.depot_capacity(B.depot));
            }
            if (na.empty()) out.delta_cost -= removal_saving(ra);
            if (nb.empty()) out.delta_cost -= removal_saving(rb);
        } else {
            out.delta_route_overload = overload(new_la, inst_.vehicle_capacity) -
                                       overload(A.load, inst_.vehicle_capacity);
            if (na.empty()) out.delta_cost -= removal_saving(ra);
        }
        return out;
    }

    // --- Relocate ----------------------------------------------------------

    MoveOutcome eval_relocate(const Move& mv, int seg) const {
        const int a = mv.a, b = mv.b;
        if (!valid_customer(a) || !valid_customer(b) || a == b) return {};
        const int ra = route_of_[a], rb = route_of_[b];
        const int pa = pos_of_[a];
        const auto& A = sol_.routes[ra].customers;
        if (seg == 2 && pa + 1 >= static_cast<int>(A.size())) return {};
        const int a2 = seg == 2 ? A[pa + 1] : a;
        if (b == a2) return {};

        // Removal gain.
        const int before = prev_vertex(ra, pa);
        const int after = next_vertex(ra, pos_of_[a2]);
        const Cost gain = inst_.dist(before, vertex_of(a)) + inst_.dist(vertex_of(a2), after) -
                          inst_.dist(before, after);

        // Insertion slot around b in the post-removal sequence.
        int u, v;
        if (mv.variant == 0) {
            u = vertex_of(b);
            v = next_vertex(rb, pos_of_[b]);
            if (v == vertex_of(a)) v = after; // b was the predecessor of the segment
        } else {
            u = prev_vertex(rb, pos_of_[b]);
            v = vertex_of(b);
            if (u == vertex_of(a2)) u = before; // b was the successor of the segment
        }
        if (u == before && v == after && ra == rb) return {}; // reinserting in place
        const Cost ins =
            inst_.dist(u, vertex_of(a)) + inst_.dist(vertex_of(a2), v) - inst_.dist(u, v);

        MoveOutcome out;
        out.valid = true;
        out.intra = ra == rb;
        out.delta_cost = ins - gain;
        if (ra != rb) {
            const Load moved = inst_.demand(a) + (seg == 2 ? inst_.demand(a2) : 0);
            const auto& RA = sol_.routes[ra];
            const auto& RB = sol_.routes[rb];
            out.delta_route_overload = overload(RA.load - moved, inst_.vehicle_capacity) +
                                       overload(RB.load + moved, inst_.vehicle_capacity) -
                                       overload(RA.load, inst_.vehicle_capacity) -
                                       overload(RB.load, inst_.vehicle_capacity);
            if (RA.depot != RB.depot) {
                out.delta_depot_overload =
                    overload(depot_load_[RA.depot] - moved, inst_.depot_capacity(RA.depot)) +
                    overload(depot_load_[RB.depot] + moved, inst_.depot_capacity(RB.depot)) -
                    overload(depot_load_[RA.depot], inst_.depot_capacity(RA.depot)) -
                    overload(depot_load_[RB.depot], inst_.depot_capacity(RB.depot));
            }
            if (static_cast<int>(RA.customers.size()) == seg) out.delta_cost -= removal_saving(ra);
        }
        return out;
    }

    void apply_relocate(const Move& mv, int seg) {
        const int a = mv.a, b = mv.b;
        const int ra = route_of_[a];
        const int pa = pos_of_[a];
        scratch_a_.clear();
        scratch_a_.push_back(a);
        if (seg == 2) scratch_a_.push_back(sol_.routes[ra].customers[pa + 1]);
        auto& A = sol_.routes[ra].customers;
        A.erase(A.begin() + pa, A.begin() + pa + seg);
        index_route(ra);
        const int rb = route_of_[b]; // reindexed if same route
        auto& B = sol_.routes[rb].customers;
        const int at = pos_of_[b] + (mv.variant == 0 ? 1 : 0);
        B.insert(B.begin() + at, scratch_a_.begin(), scratch_a_.end());
        after_route_change(ra, rb);
    }

    // --- Swap --------------------------------------------------------------

    bool segments_clash(int a, int a2, int b, int b2) const {
        return a == b || a == b2 || a2 == b || a2 == b2;
    }

    MoveOutcome eval_swap(const Move& mv, int la, int lb) const {
        const int a = mv.a, b = mv.b;
        if (!valid_customer(a) || !valid_customer(b)) return {};
        const int ra = route_of_[a], rb = route_of_[b];
        const auto& A = sol_.routes[ra].customers;
        const auto& B = sol_.routes[rb].customers;
        const int pa = pos_of_[a], pb = pos_of_[b];
        if (la == 2 && pa + 1 >= static_cast<int>(A.size())) return {};
        if (lb == 2 && pb + 1 >= static_cast<int>(B.size())) return {};
        const int a2 = la == 2 ? A[pa + 1] : a;
        const int b2 = lb == 2 ? B[pb + 1] : b;
        if (segments_clash(a, a2, b, b2)) return {};

        if (ra == rb) {
            // Same-route swaps (including adjacent segments): rebuild.
            const int lo = std::min(pa, pb), hi = std::max(pa, pb);
            const int lo_len = lo == pa ? la : lb, hi_len = lo == pa ? lb : la;
            if (lo + lo_len > hi) return {}; // overlapping segments
            scratch_a_.assign(A.begin(), A.end());
            std::vector<int>& s = scratch_a_;
            scratch_b_.clear();
            // rebuild: prefix, [hi segment], middle, [lo segment], suffix
            auto& t = scratch_b_;
            t.insert(t.end(), s.begin(), s.begin() + lo);
            t.insert(t.end(), s.begin() + hi, s.begin() + hi + hi_len);
            t.insert(t.end(), s.begin() + lo + lo_len, s.begin() + hi);
            t.insert(t.end(), s.begin() + lo, s.begin() + lo + lo_len);
            t.insert(t.end(), s.begin() + hi + hi_len, s.end());
            return finish_outcome(ra, ra, t, t);
        }

        // Disjoint routes: closed form.
        const Cost da = inst_.dist(prev_vertex(ra, pa), vertex_of(b)) +
                        inst_.dist(vertex_of(b2), next_vertex(ra, pos_of_[a2])) -
                        inst_.dist(prev_vertex(ra, pa), vertex_of(a)) -
                        inst_.dist(vertex_of(a2), next_vertex(ra, pos_of_[a2]));
        const Cost db = inst_.dist(prev_vertex(rb, pb), vertex_of(a)) +
                        inst_.dist(vertex_of(a2), next_vertex(rb, pos_of_[b2])) -
                        inst_.dist(prev_vertex(rb, pb), vertex_of(b)) -
                        inst_.dist(vertex_of(b2), next_vertex(rb, pos_of_[b2]));
        // Internal segment edges are unchanged by a forward swap.
        MoveOutcome out;
        out.valid = true;
        out.intra = false;
        out.delta_cost = da + db;
        const Load load_a = inst_.demand(a) + (la == 2 ? inst_.demand(a2) : 0);
        const Load load_b = inst_.demand(b) + (lb == 2 ? inst_.demand(b2) : 0);
        const Load diff = load_b - load_a;
        const auto& RA = sol_.routes[ra];
        const auto& RB = sol_.routes[rb];
        out.delta_route_overload = overload(RA.load + diff, inst_.vehicle_capacity) +
                                   overload(RB.load - diff, inst_.vehicle_capacity) -
                                   overload(RA.load, inst_.vehicle_capacity) -
                                   overload(RB.load, inst_.vehicle_capacity);
        if (RA.depot != RB.depot) {
            out.delta_depot_overload =
                overload(depot_load_[RA.depot] + diff, inst_.depot_capacity(RA.depot)) +
                overload(depot_load_[RB.depot] - diff, inst_.depot_capacity(RB.depot)) -
                overload(depot_load_[RA.depot], inst_.depot_capacity(RA.depot)) -
                overload(depot_load_[RB.depot], inst_.depot_capacity(RB.depot));
        }
        return out;
    }

    void apply_swap(const Move& mv, int la, int lb) {
        const int a = mv.a, b = mv.b;
        const int ra = route_of_[a], rb = route_of_[b];
        auto& A = sol_.routes[ra].customers;
        auto& B = sol_.routes[rb].customers;
        const int pa = pos_of_[a], pb = pos_of_[b];
        if (ra == rb) {
            const int lo = std::min(pa, pb), hi = std::max(pa, pb);
            const int lo_len = lo == pa ? la : lb, hi_len = lo == pa ? lb : la;
            scratch_a_.assign(A.begin(), A.end());
            const std::vector<int>& s = scratch_a_;
            A.clear();
            A.insert(A.end(), s.begin(), s.begin() + lo);
            A.insert(A.end(), s.begin() + hi, s.begin() + hi + hi_len);
            A.insert(A.end(), s.begin() + lo + lo_len, s.begin() + hi);
            A.insert(A.end(), s.begin() + lo, s.begin() + lo + lo_len);
            A.insert(A.end(), s.begin() + hi + hi_len, s.end());
            after_route_change(ra, ra);
            return;
        }
        scratch_a_.assign(A.begin() + pa, A.begin() + pa + la);
        scratch_b_.assign(B.begin() + pb, B.begin() + pb + lb);
        A.erase(A.begin() + pa, A.begin() + pa + la);
        A.insert(A.begin() + pa, scratch_b_.begin(), scratch_b_.end());
        B.erase(B.begin() + pb, B.begin() + pb + lb);
        B.insert(B.begin() + pb, scratch_a_.begin(), scratch_a_.end());
        after_route_change(ra, rb);
    }

    // --- 2-opt (intra, segment reversal) ------------------------------------

    MoveOutcome eval_two_opt(const Move& mv) const {
        const int a = mv.a, b = mv.b;
        if (!valid_customer(a) || !valid_customer(b) || a == b) return {};
        const int r = route_of_[a];
        if (route_of_[b] != r) return {};
        int pa = pos_of_[a], pb = pos_of_[b];
        if (pa > pb) std::swap(pa, pb);
        if (pb - pa < 1) return {};
        const auto& cs = sol_.routes[r].customers;
        const int va = vertex_of(cs[pa]), vb = vertex_of(cs[pb]);
        const int na = next_vertex(r, pa), nb = next_vertex(r, pb);
        if (na == vb) return {}; // adjacent: reversal is a no-op
        MoveOutcome out;
        out.valid = true;
        out.intra = true;
        // Symmetric distances: interior edge sum is reversal-invariant.
        out.delta_cost = inst_.dist(va, vb) + inst_.dist(na, nb) - inst_.dist(va, na) -
                         inst_.dist(vb, nb);
        return out;
    }

    void apply_two_opt(const Move& mv) {
        const int r = route_of_[mv.a];
        int pa = pos_of_[mv.a], pb = pos_of_[mv.b];
        if (pa > pb) std::swap(pa, pb);
        auto& cs = sol_.routes[r].customers;
        std::reverse(cs.begin() + pa + 1, cs.begin() + pb + 1);
        after_route_change(r, r);
    }

    // --- 2-opt* (inter, tail exchange) --------------------------------------

    MoveOutcome eval_two_opt_star(const Move& mv) const {
        const int a = mv.a, b = mv.b;
        if (!valid_customer(a) || !valid_customer(b) || a == b) return {};
        const int ra = route_of_[a], rb = route_of_[b];
        if (ra == rb) return {};
        const auto& A = sol_.routes[ra].customers;
        const auto& B = sol_.routes[rb].customers;
        const int cut_a = pos_of_[a];                          // keep A[0..cut_a]
        const int cut_b = pos_of_[b] - (mv.variant == 1 ? 1 : 0); // keep B[0..cut_b]
        scratch_a_.assign(A.begin(), A.begin() + cut_a + 1);
        scratch_a_.insert(scratch_a_.end(), B.begin() + cut_b + 1, B.end());
        scratch_b_.assign(B.begin(), B.begin() + cut_b + 1);
        scratch_b_.insert(scratch_b_.end(), A.begin() + cut_a + 1, A.end());
        return finish_outcome(ra, rb, scratch_a_, scratch_b_);
    }

    void apply_two_opt_star(const Move& mv) {
        const int ra = route_of_[mv.a], rb = route_of_[mv.b];
        auto& A = sol_.routes[ra].customers;
        auto& B = sol_.routes[rb].customers;
        const int cut_a = pos_of_[mv.a];
        const int cut_b = pos_of_[mv.b] - (mv.variant == 1 ? 1 : 0);
        scratch_a_.assign(A.begin(), A.begin() + cut_a + 1);
        scratch_a_.insert(scratch_a_.end(), B.begin() + cut_b + 1, B.end());
        scratch_b_.assign(B.begin(), B.begin() + cut_b + 1);
        scratch_b_.insert(scratch_b_.end(), A.begin() + cut_a + 1, A.end());
        A = scratch_a_;
        B = scratch_b_;
        after_route_change(ra, rb);
    }

    // --- post-application bookkeeping ---------------------------------------

    void after_route_change(int ra, int rb) {
        update_route(ra);
        if (rb != ra) update_route(rb);
        // Drop emptied routes (largest index first so the other stays valid),
        // then reindex everything.
        const int cand[2] = {std::max(ra, rb), std::min(ra, rb)};
        const int ncand = ra == rb ? 1 : 2;
        bool deleted = false;
        for (int k = 0; k < ncand; ++k) {
            const int r = cand[k];
            if (!sol_.routes[r].customers.empty()) continue;
            const int depot = sol_.routes[r].depot;
            sol_.routes.erase(sol_.routes.begin() + r);
            if (--routes_of_depot_[depot] == 0) std::erase(sol_.open_depots, depot);
            deleted = true;
        }
        if (deleted) rebuild();
        else refresh_objective();
    }

    void update_route(int r) {
        auto& rt = sol_.routes[r];
        const Load old_load = rt.load;
        rt.load = route_load(inst_, rt.customers);
        rt.length = route_length(inst_, rt.depot, rt.customers);
        depot_load_[rt.depot] += rt.load - old_load;
        index_route(r);
    }
};

/// Delta of applying `mv` to `sol`: equals total_cost(after) - total_cost(before)
/// including vehicle fixed costs and depot closures. Invalid endpoints throw.
inline Cost evaluate_move(const Solution& sol, const Move& mv, const Instance& inst) {
    Solution copy = sol;
    MoveEngine engine(copy, inst);
    const MoveOutcome out = engine.evaluate(mv);
    if (!out.valid) fail(ErrorKind::Validation, "move endpoints are not valid for this solution");
    return out.delta_cost;
}

/// Apply `mv` in place, keeping all caches exact. Invalid endpoints throw.
inline void apply_move(Solution& sol, const Move& mv, const Instance& inst) {
    MoveEngine engine(sol, inst);
    if (!engine.evaluate(mv).valid)
        fail(ErrorKind::Validation, "move endpoints are not valid for this solution");
    engine.apply(mv);
}

namespace detail {

constexpr Cost kImproveEps = 1e-9;

/// The pinned neighborhood order of the descent.
struct VndNeighborhood {
    MoveKind kind;
    bool inter;
    int variants;
};

inline const std::vector<VndNeighborhood>& vnd_order() {
    static const std::vector<VndNeighborhood> order = {
        {MoveKind::Relocate1, false, 2}, {MoveKind::Relocate1, true, 2},
        {MoveKind::Relocate2, false, 2}, {MoveKind::Relocate2, true, 2},
        {MoveKind::Swap11, false, 1},    {MoveKind::Swap11, true, 1},
        {MoveKind::Swap22, false, 1},    {MoveKind::Swap22, true, 1},
        {MoveKind::TwoOpt, false, 1},    {MoveKind::TwoOptStar, true, 1},
    };
    return order;
}

} // namespace detail

/// Granular variable neighborhood descent. First improvement, fixed scan
/// order (customers by index, then alpha-neighbors in list order), restart
/// from the first neighborhood after each accepted move. Only capacity-safe
/// moves are accepted; empty routes are dropped and route-less depots closed
/// as part of move application. Input must be feasible.
inline Solution vnd_improve(Solution sol, const NeighborLists& lists, const Instance& inst) {
    if (!inst.symmetric)
        fail(ErrorKind::Unsupported, "local search requires a symmetric distance matrix");
    drop_empty_routes_and_depots(sol, inst);
    {
        const Feasibility f = check_feasibility(sol, inst);
        if (!f.structural_ok) fail(ErrorKind::Structural, f.structural_detail);
        if (!f.feasible())
            fail(ErrorKind::Validation, "local search requires a feasible solution; repair first");
    }
    MoveEngine engine(sol, inst);
    const int n = inst.num_customers();

    bool improved = true;
    while (improved) {
        improved = false;
        for (const auto& nb : detail::vnd_order()) {
            for (int a = 0; a < n && !improved; ++a) {
                const auto& neigh = lists.of_vertex[inst.customer_vertex(a)];
                for (std::size_t bi = 0; bi < neigh.size() && !improved; ++bi) {
                    const int b = neigh[bi];
                    const bool same_route = engine.route_of(a) == engine.route_of(b);
                    if (nb.inter == same_route) continue;
                    for (int variant = 0; variant < nb.variants; ++variant) {
                        Move mv{nb.kind, a, b, variant};
                        const MoveOutcome out = engine.evaluate(mv);
                        if (!out.valid || out.delta_cost >= -detail::kImproveEps) continue;
                        if (out.delta_route_overload > 0 || out.delta_depot_overload > 0) continue;
                        engine.apply(mv);
                        improved = true;
                        break;
                    }
                }
            }
            if (improved) break; // restart from the first neighborhood
        }
    }
    return sol;
}

} // namespace hgamp
