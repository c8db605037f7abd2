#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "localsearch.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace hgamp {

/// Undirected edge with parent label; u == v encodes a dummy depot loop.
struct LabeledEdge {
    int u = -1;
    int v = -1;
    bool from_b = false;
    bool is_loop() const { return u == v; }
};

/// Symmetric difference of the parents' extended edge multisets.
struct JointGraph {
    int vertices = 0;
    std::vector<LabeledEdge> edges;
    bool empty() const { return edges.empty(); }
};

/// Closed alternating walk; stores edge ids into the joint graph.
struct ABCycle {
    std::vector<int> edge_ids;
};

/// Union of vertex-sharing AB-cycles; one offspring per E-set.
struct ESet {
    std::vector<int> edge_ids;
};

/// Plain undirected edge multiset of an intermediate solution.
using EdgeList = std::vector<std::pair<int, int>>;

namespace detail {

inline std::uint64_t pack_edge(int u, int v, int vertices) {
    if (u > v) std::swap(u, v);
    return static_cast<std::uint64_t>(u) * static_cast<std::uint64_t>(vertices) +
           static_cast<std::uint64_t>(v);
}

inline std::pair<int, int> unpack_edge(std::uint64_t key, int vertices) {
    return {static_cast<int>(key / vertices), static_cast<int>(key % vertices)};
}

inline void require_structural(const Solution& sol, const Instance& inst, const char* which) {
    std::vector<int> count;
    std::string detail;
    if (!visitation_vector(sol, inst, count, &detail))
        fail(ErrorKind::Structural, std::string(which) + ": " + detail);
}

} // namespace detail

/// Extend both parents' edge multisets with zero-cost depot loops so every
/// depot has the same degree on both sides. Returns sorted packed-key
/// multisets (loops included).
inline std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>
extend_with_dummy_loops(const Solution& parent_a, const Solution& parent_b, const Instance& inst) {
    detail::require_structural(parent_a, inst, "parent A");
    detail::require_structural(parent_b, inst, "parent B");
    auto ea = detail::edge_multiset(parent_a, inst);
    auto eb = detail::edge_multiset(parent_b, inst);
    const int V = inst.num_vertices();
    std::vector<int> deg_a(inst.num_depots(), 0), deg_b(inst.num_depots(), 0);
    for (const auto& r : parent_a.routes)
        if (!r.customers.empty()) deg_a[r.depot] += 2;
    for (const auto& r : parent_b.routes)
        if (!r.customers.empty()) deg_b[r.depot] += 2;
    for (int i = 0; i < inst.num_depots(); ++i) {
        const int diff = deg_a[i] - deg_b[i];
        if (diff % 2 != 0) fail(ErrorKind::Invariant, "odd depot degree difference");
        const std::uint64_t loop = detail::pack_edge(i, i, V);
        for (int k = 0; k < std::abs(diff) / 2; ++k)
            (diff > 0 ? eb : ea).push_back(loop); // loops go to the lesser side
    }
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    return {std::move(ea), std::move(eb)};
}

/// Joint graph: (E'_A u E'_B) minus the shared copies, with parent labels.
/// Checks the parity invariant: equal A and B incidence counts per vertex.
inline JointGraph build_joint_graph(const std::vector<std::uint64_t>& ext_a,
                                    const std::vector<std::uint64_t>& ext_b, const Instance& inst) {
    JointGraph joint;
    joint.vertices = inst.num_vertices();
    std::size_t ia = 0, ib = 0;
    auto emit = [&](std::uint64_t key, bool from_b) {
        const auto [u, v] = detail::unpack_edge(key, joint.vertices);
        joint.edges.push_back({u, v, from_b});
    };
    while (ia < ext_a.size() && ib < ext_b.size()) {
        if (ext_a[ia] == ext_b[ib]) {
            ++ia;
            ++ib;
        } else if (ext_a[ia] < ext_b[ib]) {
            emit(ext_a[ia++], false);
        } else {
            emit(ext_b[ib++], true);
        }
    }
    while (ia < ext_a.size()) emit(ext_a[ia++], false);
    while (ib < ext_b.size()) emit(ext_b[ib++], true);

    std::vector<int> balance(joint.vertices, 0);
    for (const auto& e : joint.edges) {
        const int w = e.from_b ? -1 : 1;
        balance[e.u] += w;
        balance[e.v] += w; // loops count twice on purpose
    }
    for (int v = 0; v < joint.vertices; ++v)
        if (balance[v] != 0)
            fail(ErrorKind::Invariant, "joint graph is label-unbalanced at vertex " + std::to_string(v));
    return joint;
}

/// Partition the joint graph into AB-cycles by random alternating walks:
/// start at a random vertex with remaining edges, alternately consume an
/// unused A-edge and B-edge, and close at the first return to the start with
/// a consistent alternation state.
inline std::vector<ABCycle> partition_ab_cycles(const JointGraph& joint, Rng& rng) {
    const int V = joint.vertices;
    // Incidence lists per vertex and label; loops appear twice.
    std::vector<std::vector<int>> inc_a(V), inc_b(V);
    for (int e = 0; e < static_cast<int>(joint.edges.size()); ++e) {
        const auto& edge = joint.edges[e];
        auto& lists = edge.from_b ? inc_b : inc_a;
        lists[edge.u].push_back(e);
        lists[edge.v].push_back(e);
    }
    std::vector<char> used(joint.edges.size(), 0);
    std::vector<int> unused_at(V, 0);
    for (int v = 0; v < V; ++v)
        unused_at[v] = static_cast<int>(inc_a[v].size() + inc_b[v].size());

    std::vector<ABCycle> cycles;
    std::vector<int> live, candidates;
    for (;;) {
        live.clear();
        for (int v = 0; v < V; ++v)
            if (unused_at[v] > 0) live.push_back(v);
        if (live.empty()) break;
        const int start = live[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(live.size())))];

        ABCycle cycle;
        int cur = start;
        bool need_b = false; // A first
        for (;;) {
            if (cur == start && need_b == false && !cycle.edge_ids.empty()) break; // closed
            const auto& inc = need_b ? inc_b[cur] : inc_a[cur];
            candidates.clear();
            for (int e : inc)
                if (!used[e]) candidates.push_back(e);
            if (candidates.empty())
                fail(ErrorKind::Invariant, "alternating walk is stuck; joint graph corrupted");
            // A loop is listed twice; both entries refer to the same edge, so
            // the draw below is uniform over unused incidences.
            const int e = candidates[static_cast<std::size_t>(
                rng.uniform_int(static_cast<int>(candidates.size())))];
            used[e] = 1;
            const auto& edge = joint.edges[e];
            if (edge.is_loop()) {
                unused_at[cur] -= 2;
            } else {
                unused_at[edge.u] -= 1;
                unused_at[edge.v] -= 1;
                cur = edge.u == cur ? edge.v : edge.u;
            }
            need_b = !need_b;
            cycle.edge_ids.push_back(e);
        }
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

/// Merge vertex-sharing cycles into E-sets; if more than `beta` remain, merge
/// random pairs until exactly `beta`.
inline std::vector<ESet> group_esets(const std::vector<ABCycle>& cycles, const JointGraph& joint,
                                     int beta, Rng& rng) {
    const int k = static_cast<int>(cycles.size());
    std::vector<int> parent(k);
    for (int i = 0; i < k; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<int> owner(joint.vertices, -1);
    for (int c = 0; c < k; ++c) {
        for (int e : cycles[c].edge_ids) {
            for (int v : {joint.edges[e].u, joint.edges[e].v}) {
                if (owner[v] < 0) {
                    owner[v] = c;
                } else {
                    const int a = find(owner[v]), b = find(c);
                    if (a != b) parent[b] = a;
                }
            }
        }
    }
    std::map<int, int> group_index;
    std::vector<ESet> esets;
    for (int c = 0; c < k; ++c) {
        const int g = find(c);
        auto [it, inserted] = group_index.emplace(g, static_cast<int>(esets.size()));
        if (inserted) esets.emplace_back();
        auto& dst = esets[it->second].edge_ids;
        dst.insert(dst.end(), cycles[c].edge_ids.begin(), cycles[c].edge_ids.end());
    }
    while (static_cast<int>(esets.size()) > beta && esets.size() > 1) {
        const int i = rng.uniform_int(static_cast<int>(esets.size()));
        int j = rng.uniform_int(static_cast<int>(esets.size()) - 1);
        if (j >= i) ++j;
        auto& dst = esets[i].edge_ids;
        dst.insert(dst.end(), esets[j].edge_ids.begin(), esets[j].edge_ids.end());
        esets.erase(esets.begin() + j);
    }
    return esets;
}

/// Exchange the E-set against the base parent's edges:
///   base A: (E_A \ (E_s n E_A)) u (E_s n E_B); roles swapped for base B.
/// Dummy loops never enter the result. Customer degrees stay 2.
inline EdgeList apply_eset(const Solution& base, bool base_is_b, const ESet& eset,
                           const JointGraph& joint, const Instance& inst) {
    const int V = inst.num_vertices();
    std::map<std::uint64_t, int> count;
    for (std::uint64_t key : detail::edge_multiset(base, inst)) ++count[key];
    for (int e : eset.edge_ids) {
        const auto& edge = joint.edges[e];
        if (edge.is_loop()) continue;
        const std::uint64_t key = detail::pack_edge(edge.u, edge.v, V);
        if (edge.from_b == base_is_b) {
            auto it = count.find(key);
            if (it == count.end() || it->second == 0)
                fail(ErrorKind::Invariant, "E-set removes an edge the base parent does not have");
            --it->second;
        } else {
            ++count[key];
        }
    }
    EdgeList out;
    for (const auto& [key, c] : count)
        for (int i = 0; i < c; ++i) out.push_back(detail::unpack_edge(key, V));
    return out;
}

namespace detail {

/// A closed tour of the intermediate: cyclic vertex sequence. Tours that
/// contain a depot are rotated to start at one.
struct Tour {
    std::vector<int> seq;    // vertices; for depot tours, seq[0] is a depot
    std::vector<int> depots; // positions in seq holding depots
};

/// Decompose an edge multiset (customers of degree 2, depots of even degree)
/// into closed tours whose depot visits are pairwise distinct. Deterministic:
/// walks start at the smallest live vertex and continue over the smallest
/// unused incident edge.
inline std::vector<Tour> trace_tours(const EdgeList& edges, const Instance& inst) {
    const int V = inst.num_vertices();
    std::vector<std::vector<int>> inc(V);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        inc[edges[e].first].push_back(e);
        if (edges[e].second != edges[e].first) inc[edges[e].second].push_back(e);
    }
    std::vector<char> used(edges.size(), 0);

    std::vector<Tour> tours;
    for (int v0 = 0; v0 < V; ++v0) {
        for (;;) {
            int first_edge = -1;
            for (int e : inc[v0])
                if (!used[e]) {
                    first_edge = e;
                    break;
                }
            if (first_edge < 0) break;

            // Closed walk from v0 over smallest unused edges.
            std::vector<int> walk = {v0};
            int cur = v0;
            for (;;) {
                int pick = -1;
                for (int e : inc[cur])
                    if (!used[e]) {
                        pick = e;
                        break;
                    }
                if (pick < 0)
                    fail(ErrorKind::Invariant, "tour tracing stuck: odd degree in intermediate");
                used[pick] = 1;
                cur = edges[pick].first == cur ? edges[pick].second : edges[pick].first;
                if (cur == v0) break;
                walk.push_back(cur);
            }

            // Split the closed walk at repeated depot visits so every emitted
            // tour visits each of its depots once.
            if (!inst.is_depot_vertex(v0)) {
                Tour t;
                t.seq = std::move(walk); // customer-only subtour
                tours.push_back(std::move(t));
                continue;
            }
            std::vector<std::pair<int, int>> open; // (depot, its index in buf)
            std::vector<int> buf = {v0};
            open.push_back({v0, 0});
            for (std::size_t k = 1; k <= walk.size(); ++k) {
                const int v = k == walk.size() ? v0 : walk[k];
                if (!inst.is_depot_vertex(v)) {
                    buf.push_back(v);
                    continue;
                }
                auto at = std::find_if(open.begin(), open.end(),
                                       [&](const auto& p) { return p.first == v; });
                if (at == open.end()) {
                    open.push_back({v, static_cast<int>(buf.size())});
                    buf.push_back(v);
                    continue;
                }
                // Revisited depot: buf[at->second .. end] closes into a tour;
                // the depot itself stays on the outer walk.
                Tour t;
                t.seq.assign(buf.begin() + at->second, buf.end());
                for (int p = 0; p < static_cast<int>(t.seq.size()); ++p)
                    if (inst.is_depot_vertex(t.seq[p])) t.depots.push_back(p);
                tours.push_back(std::move(t));
                buf.resize(at->second + 1);
                open.erase(at + 1, open.end());
            }
            if (buf.size() != 1 || buf[0] != v0)
                fail(ErrorKind::Invariant, "depot walk did not close cleanly");
        }
    }
    return tours;
}

inline EdgeList tours_to_edges(const std::vector<Tour>& tours) {
    EdgeList out;
    for (const auto& t : tours) {
        const auto k = t.seq.size();
        if (k == 1) {
            out.push_back({t.seq[0], t.seq[0]}); // degenerate single-customer loop
            continue;
        }
        for (std::size_t i = 0; i < k; ++i) {
            int u = t.seq[i], v = t.seq[(i + 1) % k];
            if (u > v) std::swap(u, v);
            out.push_back({u, v});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Reduce every tour visiting two or more depots to a single depot. Each step
/// drops the depot with the smallest residual capacity (capacity minus the
/// load attributed to it, where mega-tour customers count toward their
/// nearest on-tour depot), splicing its two tour edges into one. When no
/// depot capacity can bind, the depot whose removal saves the most travel
/// goes instead. Ties break toward the lower depot index.
inline EdgeList split_mega_tours(const EdgeList& intermediate, const Instance& inst) {
    auto tours = detail::trace_tours(intermediate, inst);
    const bool uncapacitated = inst.depots_uncapacitated();

    // Working assignment over the whole intermediate: single-depot tours count
    // toward their depot; customers of every still-mega tour count toward
    // their nearest depot among that tour's depots (ties to the lower index).
    auto assigned_loads = [&]() {
        std::vector<Load> load(inst.num_depots(), 0);
        for (const auto& t : tours) {
            if (t.depots.empty()) continue;
            for (int v : t.seq) {
                if (inst.is_depot_vertex(v)) continue;
                int best = t.seq[t.depots[0]];
                for (std::size_t d = 1; d < t.depots.size(); ++d) {
                    const int dv = t.seq[t.depots[d]];
                    const Cost dd = inst.dist(dv, v), bd = inst.dist(best, v);
                    if (dd < bd || (dd == bd && dv < best)) best = dv;
                }
                load[best] += inst.demand(inst.customer_of_vertex(v));
            }
        }
        return load;
    };

    for (auto& tour : tours) {
        while (tour.depots.size() >= 2) {
            int remove = 0;
            if (!uncapacitated) {
                const std::vector<Load> load = assigned_loads();
                auto residual = [&](int d) {
                    const int depot = tour.seq[tour.depots[d]];
                    return inst.depot_capacity(depot) - load[depot];
                };
                for (int d = 1; d < static_cast<int>(tour.depots.size()); ++d) {
                    const Load rd = residual(d), rb = residual(remove);
                    if (rd < rb || (rd == rb && tour.seq[tour.depots[d]] < tour.seq[tour.depots[remove]]))
                        remove = d;
                }
            } else {
                auto saving = [&](int d) {
                    const int pos = tour.depots[d];
                    const int k = static_cast<int>(tour.seq.size());
                    const int a = tour.seq[(pos + k - 1) % k], i = tour.seq[pos],
                              b = tour.seq[(pos + 1) % k];
                    return inst.dist(a, i) + inst.dist(i, b) - inst.dist(a, b);
                };
                for (int d = 1; d < static_cast<int>(tour.depots.size()); ++d) {
                    const Cost sd = saving(d), sb = saving(remove);
                    if (sd > sb || (sd == sb && tour.seq[tour.depots[d]] < tour.seq[tour.depots[remove]]))
                        remove = d;
                }
            }

            // Splice out the chosen depot visit: drop its two edges, join the
            // freed endpoints.
            tour.seq.erase(tour.seq.begin() + tour.depots[remove]);
            tour.depots.clear();
            for (int p = 0; p < static_cast<int>(tour.seq.size()); ++p)
                if (inst.is_depot_vertex(tour.seq[p])) tour.depots.push_back(p);
        }
    }
    return detail::tours_to_edges(tours);
}

/// Attach every depot-less subtour to a depot-owning tour with the cheapest
/// 2-opt*-style reconnection, preferring granular candidates (subtour customer
/// a with an alpha-neighbor j on a route) and falling back to all pairs. If no
/// depot tour exists at all, the cheapest depot to reach the first subtour is
/// opened and that subtour rooted there.
inline Solution eliminate_subtours(const EdgeList& intermediate, const NeighborLists& lists,
                                   const Instance& inst) {
    auto tours = detail::trace_tours(intermediate, inst);

    std::vector<Route> routes;
    std::vector<std::vector<int>> subtours; // customer ids, cyclic order
    for (auto& t : tours) {
        if (t.depots.size() > 1) fail(ErrorKind::Invariant, "mega tour reached subtour elimination");
        if (t.depots.size() == 1) {
            Route r;
            r.depot = t.seq[t.depots[0]];
            const int k = static_cast<int>(t.seq.size());
            for (int off = 1; off < k; ++off)
                r.customers.push_back(inst.customer_of_vertex(t.seq[(t.depots[0] + off) % k]));
            routes.push_back(std::move(r));
        } else {
            std::vector<int> cyc;
            for (int v : t.seq) cyc.push_back(inst.customer_of_vertex(v));
            subtours.push_back(std::move(cyc));
        }
    }

    // Deterministic processing order: subtour containing the smallest customer
    // first; rotate each to start at its smallest member.
    for (auto& s : subtours) {
        auto mn = std::min_element(s.begin(), s.end());
        std::rotate(s.begin(), mn, s.end());
    }
    std::sort(subtours.begin(), subtours.end());

    if (routes.empty() && !subtours.empty()) {
        // Degenerate rescue: root the first subtour at the depot minimizing
        // opening cost plus a stub tour to its nearest customer.
        const auto& s = subtours.front();
        int best_depot = 0;
        Cost best_cost = 0;
        for (int i = 0; i < inst.num_depots(); ++i) {
            Cost nearest = inst.depot_customer(i, s[0]);
            for (int c : s) nearest = std::min(nearest, inst.depot_customer(i, c));
            const Cost cost = inst.opening_cost(i) + 2 * nearest;
            if (i == 0 || cost < best_cost) {
                best_depot = i;
                best_cost = cost;
            }
        }
        // Insert the depot into the cycle at the cheapest position.
        const int k = static_cast<int>(s.size());
        int best_at = 0;
        Cost best_delta = 0;
        for (int p = 0; p < k; ++p) {
            const int u = s[p], v = s[(p + 1) % k];
            const Cost delta = inst.depot_customer(best_depot, u) + inst.depot_customer(best_depot, v) -
                               (k == 1 ? 0 : inst.customer_customer(u, v));
            if (p == 0 || delta < best_delta) {
                best_at = p;
                best_delta = delta;
            }
        }
        Route r;
        r.depot = best_depot;
        for (int off = 1; off <= k; ++off) r.customers.push_back(s[(best_at + off) % k]);
        routes.push_back(std::move(r));
        subtours.erase(subtours.begin());
    }

    // Position index over route customers.
    const int n = inst.num_customers();
    std::vector<int> route_of(n, -1), pos_of(n, -1);
    auto reindex = [&](int r) {
        for (int p = 0; p < static_cast<int>(routes[r].customers.size()); ++p) {
            route_of[routes[r].customers[p]] = r;
            pos_of[routes[r].customers[p]] = p;
        }
    };
    for (int r = 0; r < static_cast<int>(routes.size()); ++r) reindex(r);

    for (const auto& sub : subtours) {
        const int k = static_cast<int>(sub.size());
        struct Best {
            Cost delta = 0;
            int a_pos = -1, j = -1, combo = -1;
            bool found = false;
        } best;

        auto consider = [&](int a_pos, int j) {
            const int a = sub[a_pos];
            const int r = route_of[j];
            const auto& R = routes[r].customers;
            const int pj = pos_of[j];
            const int va = inst.customer_vertex(a);
            const int vj = inst.customer_vertex(j);
            const int v_na = inst.customer_vertex(sub[(a_pos + 1) % k]); // a's cycle successor
            const int v_pa = inst.customer_vertex(sub[(a_pos + k - 1) % k]);
            const int v_nj = pj + 1 < static_cast<int>(R.size()) ? inst.customer_vertex(R[pj + 1])
                                                                 : inst.depot_vertex(routes[r].depot);
            const int v_pj = pj > 0 ? inst.customer_vertex(R[pj - 1]) : inst.depot_vertex(routes[r].depot);
            // Cycle edge cost at a; k == 1 means a degenerate self-loop of cost 0.
            const Cost cyc_next = k == 1 ? 0 : inst.dist(va, v_na);
            const Cost cyc_prev = k == 1 ? 0 : inst.dist(v_pa, va);
            const Cost deltas[4] = {
                inst.dist(vj, va) + inst.dist(v_na, v_nj) - inst.dist(vj, v_nj) - cyc_next,
                inst.dist(vj, va) + inst.dist(v_pa, v_nj) - inst.dist(vj, v_nj) - cyc_prev,
                inst.dist(v_pj, v_na) + inst.dist(va, vj) - inst.dist(v_pj, vj) - cyc_next,
                inst.dist(v_pj, v_pa) + inst.dist(va, vj) - inst.dist(v_pj, vj) - cyc_prev,
            };
            for (int combo = 0; combo < 4; ++combo) {
                if (k == 1 && combo % 2 == 1) continue; // same as combo - 1 for a lone customer
                if (!best.found || deltas[combo] < best.delta) {
                    best = {deltas[combo], a_pos, j, combo, true};
                }
            }
        };

        for (int a_pos = 0; a_pos < k; ++a_pos)
            for (int j : lists.of_customer(sub[a_pos], inst))
                if (route_of[j] >= 0) consider(a_pos, j);
        if (!best.found) {
            for (int a_pos = 0; a_pos < k; ++a_pos)
                for (int j = 0; j < n; ++j)
                    if (route_of[j] >= 0) consider(a_pos, j);
        }
        if (!best.found) fail(ErrorKind::Invariant, "no reconnection candidate for subtour");

        // Materialize: cycle broken at a's next (combos 0, 2) or prev (1, 3)
        // edge, inserted after j (0, 1) or before j (2, 3), with a adjacent j.
        const int a_pos = best.a_pos;
        std::vector<int> path; // starts at a
        path.reserve(k);
        if (best.combo % 2 == 0)
            for (int off = 0; off < k; ++off) path.push_back(sub[(a_pos + k - off) % k]); // a, prev, ...
        else
            for (int off = 0; off < k; ++off) path.push_back(sub[(a_pos + off) % k]); // a, next, ...
        const int r = route_of[best.j];
        auto& R = routes[r].customers;
        if (best.combo < 2) {
            R.insert(R.begin() + pos_of[best.j] + 1, path.begin(), path.end());
        } else {
            std::reverse(path.begin(), path.end()); // ends at a, then j follows
            R.insert(R.begin() + pos_of[best.j], path.begin(), path.end());
        }
        reindex(r);
    }

    Solution sol;
    sol.routes = std::move(routes);
    recompute_caches(sol, inst);
    return sol;
}

/// The full multi-depot edge assembly crossover: up to `beta` offspring per
/// parent pair, one per E-set. Offspring are structurally valid with exact
/// caches; depot and vehicle capacities may be violated (repair runs later).
/// Identical parents yield an empty joint graph and an empty result.
inline std::vector<Solution> mdeax(const Solution& parent_a, const Solution& parent_b, int beta,
                                   Rng& rng, const Instance& inst, const NeighborLists& lists) {
    auto [ext_a, ext_b] = extend_with_dummy_loops(parent_a, parent_b, inst);
    const JointGraph joint = build_joint_graph(ext_a, ext_b, inst);
    if (joint.empty()) return {};
    const auto cycles = partition_ab_cycles(joint, rng);
    const auto esets = group_esets(cycles, joint, beta, rng);
    const bool base_is_b = rng.uniform_int(2) == 1;
    const Solution& base = base_is_b ? parent_b : parent_a;

    std::vector<Solution> offspring;
    offspring.reserve(esets.size());
    for (const auto& eset : esets) {
        EdgeList edges = apply_eset(base, base_is_b, eset, joint, inst);
        edges = split_mega_tours(edges, inst);
        offspring.push_back(eliminate_subtours(edges, lists, inst));
    }
    return offspring;
}

} // namespace hgamp
