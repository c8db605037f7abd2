#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace hgamp {

using Cost = double;
using Load = double;

/// How pairwise distances are derived from coordinates.
/// ExactReal keeps the Euclidean value; ScaledInteger multiplies by `factor`
/// and rounds up, so all distances (and hence all route lengths) are integers
/// and cost arithmetic is exact.
enum class Rounding { ExactReal, ScaledInteger };

struct Point {
    double x = 0;
    double y = 0;
    bool operator==(const Point&) const = default;
};

struct DepotSpec {
    Load capacity = 0;
    Cost opening_cost = 0;
    std::optional<Point> pos;
    bool operator==(const DepotSpec&) const = default;
};

struct CustomerSpec {
    Load demand = 0;
    std::optional<Point> pos;
    bool operator==(const CustomerSpec&) const = default;
};

/// Immutable-after-build problem data. Vertices are indexed depots-first:
/// depot i is vertex i, customer j is vertex m + j.
class Instance {
public:
    std::string name;
    std::vector<DepotSpec> depots;
    std::vector<CustomerSpec> customers;
    Load vehicle_capacity = 0;   // Q
    Cost vehicle_fixed_cost = 0; // F
    Rounding rounding = Rounding::ExactReal;
    double scale_factor = 1.0; // used by ScaledInteger
    bool symmetric = true;

    int num_depots() const { return static_cast<int>(depots.size()); }
    int num_customers() const { return static_cast<int>(customers.size()); }
    int num_vertices() const { return num_depots() + num_customers(); }

    int depot_vertex(int i) const { return i; }
    int customer_vertex(int j) const { return num_depots() + j; }
    bool is_depot_vertex(int v) const { return v < num_depots(); }
    int customer_of_vertex(int v) const { return v - num_depots(); }

    Cost dist(int u, int v) const { return dist_[static_cast<std::size_t>(u) * num_vertices() + v]; }
    Cost depot_customer(int i, int j) const { return dist(depot_vertex(i), customer_vertex(j)); }
    Cost customer_customer(int a, int b) const { return dist(customer_vertex(a), customer_vertex(b)); }

    Load demand(int j) const { return customers[j].demand; }
    Load depot_capacity(int i) const { return depots[i].capacity; }
    Cost opening_cost(int i) const { return depots[i].opening_cost; }
    Load total_demand() const { return total_demand_; }

    /// Absolute tolerance for comparing cached against recomputed costs.
    Cost cost_tolerance() const { return rounding == Rounding::ScaledInteger ? 0.0 : 1e-6; }

    /// True when no depot capacity can ever bind (every depot alone could
    /// serve all customers). Used to pick the depot-removal rule in crossover.
    bool depots_uncapacitated() const {
        for (const auto& d : depots)
            if (d.capacity < total_demand_) return false;
        return true;
    }

    /// Build from coordinates; the matrix is filled per the rounding rule.
    static Instance from_coords(std::string name, std::vector<DepotSpec> depots,
                                std::vector<CustomerSpec> customers, Load vehicle_capacity,
                                Cost vehicle_fixed_cost, Rounding rounding, double scale_factor = 1.0) {
        Instance inst;
        inst.name = std::move(name);
        inst.depots = std::move(depots);
        inst.customers = std::move(customers);
        inst.vehicle_capacity = vehicle_capacity;
        inst.vehicle_fixed_cost = vehicle_fixed_cost;
        inst.rounding = rounding;
        inst.scale_factor = scale_factor;
        const int V = inst.num_vertices();
        inst.dist_.assign(static_cast<std::size_t>(V) * V, 0.0);
        for (int u = 0; u < V; ++u) {
            const Point pu = inst.vertex_pos(u);
            for (int v = 0; v < V; ++v) {
                if (u == v) continue;
                const Point pv = inst.vertex_pos(v);
                const double dx = pu.x - pv.x, dy = pu.y - pv.y;
                // sqrt (not hypot): IEEE sqrt is correctly rounded, so
                // perfect-square distances scale to exact integers.
                double d = std::sqrt(dx * dx + dy * dy);
                if (rounding == Rounding::ScaledInteger) d = std::ceil(d * scale_factor);
                inst.dist_[static_cast<std::size_t>(u) * V + v] = d;
            }
        }
        inst.symmetric = true;
        inst.finish_build();
        return inst;
    }

    /// Build from an explicit (m+n) x (m+n) row-major matrix.
    static Instance from_matrix(std::string name, std::vector<DepotSpec> depots,
                                std::vector<CustomerSpec> customers, Load vehicle_capacity,
                                Cost vehicle_fixed_cost, std::vector<Cost> matrix,
                                Rounding rounding = Rounding::ExactReal, double scale_factor = 1.0) {
        Instance inst;
        inst.name = std::move(name);
        inst.depots = std::move(depots);
        inst.customers = std::move(customers);
        inst.vehicle_capacity = vehicle_capacity;
        inst.vehicle_fixed_cost = vehicle_fixed_cost;
        inst.rounding = rounding;
        inst.scale_factor = scale_factor;
        const int V = inst.num_vertices();
        if (matrix.size() != static_cast<std::size_t>(V) * V)
            fail(ErrorKind::Validation, "distance matrix must be (m+n)^2 entries");
        inst.dist_ = std::move(matrix);
        inst.explicit_matrix_ = true;
        inst.symmetric = true;
        for (int u = 0; u < V && inst.symmetric; ++u)
            for (int v = u + 1; v < V; ++v)
                if (inst.dist(u, v) != inst.dist(v, u)) {
                    inst.symmetric = false;
                    break;
                }
        inst.finish_build();
        return inst;
    }

    bool has_explicit_matrix() const { return explicit_matrix_; }
    const std::vector<Cost>& raw_matrix() const { return dist_; }

private:
    std::vector<Cost> dist_;
    Load total_demand_ = 0;
    bool explicit_matrix_ = false;

    Point vertex_pos(int v) const {
        const std::optional<Point>& p =
            is_depot_vertex(v) ? depots[v].pos : customers[customer_of_vertex(v)].pos;
        if (!p) fail(ErrorKind::Validation, "vertex " + std::to_string(v) + " has no coordinates");
        return *p;
    }

    void finish_build() {
        if (depots.empty()) fail(ErrorKind::Validation, "instance needs at least one depot");
        if (customers.empty()) fail(ErrorKind::Validation, "instance needs at least one customer");
        if (vehicle_capacity <= 0) fail(ErrorKind::Validation, "vehicle capacity must be positive");
        if (vehicle_fixed_cost < 0) fail(ErrorKind::Validation, "vehicle fixed cost must be nonnegative");
        total_demand_ = 0;
        for (std::size_t j = 0; j < customers.size(); ++j) {
            if (customers[j].demand <= 0)
                fail(ErrorKind::Validation, "customer " + std::to_string(j) + ": demand must be positive");
            if (customers[j].demand > vehicle_capacity)
                fail(ErrorKind::Validation, "customer " + std::to_string(j) +
                                                ": demand exceeds vehicle capacity, unservable");
            total_demand_ += customers[j].demand;
        }
        for (std::size_t i = 0; i < depots.size(); ++i) {
            if (depots[i].capacity <= 0)
                fail(ErrorKind::Validation, "depot " + std::to_string(i) + ": capacity must be positive");
            if (depots[i].opening_cost < 0)
                fail(ErrorKind::Validation, "depot " + std::to_string(i) + ": opening cost must be nonnegative");
        }
        const int V = num_vertices();
        for (int u = 0; u < V; ++u) {
            if (dist(u, u) != 0) fail(ErrorKind::Validation, "distance matrix diagonal must be zero");
            for (int v = 0; v < V; ++v)
                if (dist(u, v) < 0) fail(ErrorKind::Validation, "distances must be nonnegative");
        }
    }
};

/// A canonical (sorted, deduplicated) set of opened depots.
struct DepotConfiguration {
    std::vector<int> open;
    Load total_capacity = 0;

    static DepotConfiguration of(std::vector<int> depot_ids, const Instance& inst) {
        std::sort(depot_ids.begin(), depot_ids.end());
        depot_ids.erase(std::unique(depot_ids.begin(), depot_ids.end()), depot_ids.end());
        DepotConfiguration c;
        c.open = std::move(depot_ids);
        for (int i : c.open) {
            if (i < 0 || i >= inst.num_depots())
                fail(ErrorKind::Validation, "depot index out of range: " + std::to_string(i));
            c.total_capacity += inst.depot_capacity(i);
        }
        return c;
    }

    bool contains(int depot) const { return std::binary_search(open.begin(), open.end(), depot); }
    bool operator==(const DepotConfiguration& o) const { return open == o.open; }
    bool operator<(const DepotConfiguration& o) const { return open < o.open; }
};

struct Route {
    int depot = -1;
    std::vector<int> customers; // customer ids in visit order
    Load load = 0;              // cached
    Cost length = 0;            // cached closed-tour cost
    bool operator==(const Route&) const = default;
};

/// A (possibly capacity-infeasible) solution. `open_depots` holds every depot
/// that pays its opening cost; it is a superset of the depots owning routes,
/// since expansion steps may keep a momentarily route-less depot open.
struct Solution {
    std::vector<Route> routes;
    std::vector<int> open_depots; // sorted, unique
    Cost objective = 0;           // cached f
    bool operator==(const Solution&) const = default;
};

inline Cost route_length(const Instance& inst, int depot, const std::vector<int>& customers) {
    if (customers.empty()) return 0;
    Cost len = inst.depot_customer(depot, customers.front());
    for (std::size_t k = 0; k + 1 < customers.size(); ++k)
        len += inst.customer_customer(customers[k], customers[k + 1]);
    len += inst.depot_customer(depot, customers.back());
    return len;
}

inline Load route_load(const Instance& inst, const std::vector<int>& customers) {
    Load l = 0;
    for (int c : customers) l += inst.demand(c);
    return l;
}

/// Recompute every cached field of `sol` from its route sequences. Keeps
/// explicitly opened empty depots; adds any depot owning a route.
inline void recompute_caches(Solution& sol, const Instance& inst) {
    Cost total = 0;
    for (auto& r : sol.routes) {
        r.load = route_load(inst, r.customers);
        r.length = route_length(inst, r.depot, r.customers);
        sol.open_depots.push_back(r.depot);
    }
    std::sort(sol.open_depots.begin(), sol.open_depots.end());
    sol.open_depots.erase(std::unique(sol.open_depots.begin(), sol.open_depots.end()),
                          sol.open_depots.end());
    for (int i : sol.open_depots) total += inst.opening_cost(i);
    total += inst.vehicle_fixed_cost * static_cast<Cost>(sol.routes.size());
    for (const auto& r : sol.routes) total += r.length;
    sol.objective = total;
}

/// Drop empty routes and close depots that own no route.
inline void drop_empty_routes_and_depots(Solution& sol, const Instance& inst) {
    std::erase_if(sol.routes, [](const Route& r) { return r.customers.empty(); });
    std::vector<int> owners;
    owners.reserve(sol.routes.size());
    for (const auto& r : sol.routes) owners.push_back(r.depot);
    std::sort(owners.begin(), owners.end());
    owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
    sol.open_depots = std::move(owners);
    recompute_caches(sol, inst);
}

namespace detail {
/// Visit counts per customer; flags structural violations.
inline bool visitation_vector(const Solution& sol, const Instance& inst, std::vector<int>& count,
                              std::string* detail) {
    count.assign(inst.num_customers(), 0);
    for (const auto& r : sol.routes) {
        if (r.depot < 0 || r.depot >= inst.num_depots()) {
            if (detail) *detail = "route references invalid depot " + std::to_string(r.depot);
            return false;
        }
        for (int c : r.customers) {
            if (c < 0 || c >= inst.num_customers()) {
                if (detail) *detail = "route references invalid customer " + std::to_string(c);
                return false;
            }
            ++count[c];
        }
    }
    for (int j = 0; j < inst.num_customers(); ++j) {
        if (count[j] == 0) {
            if (detail) *detail = "customer " + std::to_string(j) + " is not visited";
            return false;
        }
        if (count[j] > 1) {
            if (detail) *detail = "customer " + std::to_string(j) + " is visited " +
                                  std::to_string(count[j]) + " times";
            return false;
        }
    }
    return true;
}
} // namespace detail

/// Exact objective recomputed from scratch: opening costs of open depots,
/// one vehicle fixed cost per route, and all tour lengths.
inline Cost total_cost(const Solution& sol, const Instance& inst) {
    std::vector<int> count;
    std::string detail;
    if (!detail::visitation_vector(sol, inst, count, &detail)) fail(ErrorKind::Structural, detail);
    Cost total = 0;
    std::vector<int> opened = sol.open_depots;
    for (const auto& r : sol.routes) opened.push_back(r.depot);
    std::sort(opened.begin(), opened.end());
    opened.erase(std::unique(opened.begin(), opened.end()), opened.end());
    for (int i : opened) total += inst.opening_cost(i);
    total += inst.vehicle_fixed_cost * static_cast<Cost>(sol.routes.size());
    for (const auto& r : sol.routes) total += route_length(inst, r.depot, r.customers);
    return total;
}

struct Feasibility {
    bool structural_ok = true;
    std::string structural_detail;
    Load depot_overload = 0; // f_l: sum over depots of max(0, assigned load - capacity)
    Load route_overload = 0; // f_r: sum over routes of max(0, load - Q)
    bool feasible() const { return structural_ok && depot_overload == 0 && route_overload == 0; }
};

/// Diagnostic: never throws.
inline Feasibility check_feasibility(const Solution& sol, const Instance& inst) {
    Feasibility out;
    std::vector<int> count;
    out.structural_ok = detail::visitation_vector(sol, inst, count, &out.structural_detail);
    std::vector<Load> depot_load(inst.num_depots(), 0);
    for (const auto& r : sol.routes) {
        if (r.depot < 0 || r.depot >= inst.num_depots()) continue;
        Load l = route_load(inst, r.customers);
        depot_load[r.depot] += l;
        out.route_overload += std::max<Load>(0, l - inst.vehicle_capacity);
    }
    for (int i = 0; i < inst.num_depots(); ++i)
        out.depot_overload += std::max<Load>(0, depot_load[i] - inst.depot_capacity(i));
    return out;
}

inline DepotConfiguration config_of(const Solution& sol, const Instance& inst) {
    std::vector<int> open = sol.open_depots;
    for (const auto& r : sol.routes) open.push_back(r.depot);
    return DepotConfiguration::of(std::move(open), inst);
}

namespace detail {
/// Undirected edge multiset of a solution, as packed keys (min * V + max).
inline std::vector<std::uint64_t> edge_multiset(const Solution& sol, const Instance& inst) {
    std::vector<std::uint64_t> keys;
    const auto V = static_cast<std::uint64_t>(inst.num_vertices());
    auto push = [&](int u, int v) {
        if (u > v) std::swap(u, v);
        keys.push_back(static_cast<std::uint64_t>(u) * V + static_cast<std::uint64_t>(v));
    };
    for (const auto& r : sol.routes) {
        if (r.customers.empty()) continue;
        push(inst.depot_vertex(r.depot), inst.customer_vertex(r.customers.front()));
        for (std::size_t k = 0; k + 1 < r.customers.size(); ++k)
            push(inst.customer_vertex(r.customers[k]), inst.customer_vertex(r.customers[k + 1]));
        push(inst.depot_vertex(r.depot), inst.customer_vertex(r.customers.back()));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}
} // namespace detail

/// Dissimilarity of two solutions over the same instance: half the size of the
/// symmetric difference of their undirected edge multisets (rounded up), plus
/// the number of customers served from different depots.
inline int broken_pairs_distance(const Solution& a, const Solution& b, const Instance& inst) {
    std::vector<int> count;
    std::string detail;
    if (!detail::visitation_vector(a, inst, count, &detail))
        fail(ErrorKind::Structural, "left solution: " + detail);
    if (!detail::visitation_vector(b, inst, count, &detail))
        fail(ErrorKind::Structural, "right solution: " + detail);

    const auto ea = detail::edge_multiset(a, inst);
    const auto eb = detail::edge_multiset(b, inst);
    std::size_t ia = 0, ib = 0, sym_diff = 0;
    while (ia < ea.size() && ib < eb.size()) {
        if (ea[ia] == eb[ib]) {
            ++ia;
            ++ib;
        } else if (ea[ia] < eb[ib]) {
            ++sym_diff;
            ++ia;
        } else {
            ++sym_diff;
            ++ib;
        }
    }
    sym_diff += (ea.size() - ia) + (eb.size() - ib);

    std::vector<int> depot_a(inst.num_customers(), -1), depot_b(inst.num_customers(), -1);
    for (const auto& r : a.routes)
        for (int c : r.customers) depot_a[c] = r.depot;
    for (const auto& r : b.routes)
        for (int c : r.customers) depot_b[c] = r.depot;
    int reassigned = 0;
    for (int j = 0; j < inst.num_customers(); ++j)
        if (depot_a[j] != depot_b[j]) ++reassigned;

    return static_cast<int>((sym_diff + 1) / 2) + reassigned;
}

/// Total demand as a percentage of the opened depot capacity.
inline double compact_degree(const Solution& sol, const Instance& inst) {
    const DepotConfiguration cfg = config_of(sol, inst);
    if (cfg.open.empty()) fail(ErrorKind::Validation, "compact degree of a solution with no opened depot");
    return 100.0 * inst.total_demand() / cfg.total_capacity;
}

} // namespace hgamp
