#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "helpers.hpp"

using namespace hgamp;
using testutil::make_solution;

namespace {

std::map<std::uint64_t, int> key_counts(const std::vector<std::uint64_t>& keys) {
    std::map<std::uint64_t, int> out;
    for (auto k : keys) ++out[k];
    return out;
}

/// Customer degrees of an edge multiset; loops count twice.
std::vector<int> degrees(const EdgeList& edges, const Instance& inst) {
    std::vector<int> deg(inst.num_vertices(), 0);
    for (const auto& [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

} // namespace

TEST_CASE("dummy loops equalize depot degrees") {
    const Instance inst = testutil::line_instance(6, 3, 10, 1);

    SECTION("identical route counts need no loops") {
        const Solution a = make_solution(inst, {{0, {0, 1, 2}}, {0, {3, 4, 5}}});
        const Solution b = make_solution(inst, {{0, {0, 2, 1}}, {0, {5, 4, 3}}});
        const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
        const std::uint64_t loop0 = 0; // packed key of edge (0,0)
        CHECK(key_counts(ea).count(loop0) == 0);
        CHECK(key_counts(eb).count(loop0) == 0);
    }

    SECTION("depot open only in B gets loops on the A side") {
        // Depot 1: closed in A (degree 0), two routes in B (degree 4) -> two
        // loops on the A side; depot 0 loses one route's degree in B -> one
        // loop on the B side.
        const Solution a = make_solution(inst, {{0, {0, 1, 2}}, {0, {3, 4, 5}}});
        const Solution b = make_solution(inst, {{0, {0, 1, 2}}, {1, {3, 4}}, {1, {5}}});
        const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
        const auto ca = key_counts(ea), cb = key_counts(eb);
        const std::uint64_t loop1 = static_cast<std::uint64_t>(1) * inst.num_vertices() + 1;
        CHECK(ca.at(loop1) == 2);
        CHECK(cb.count(loop1) == 0);
        const std::uint64_t loop0 = 0;
        CHECK(cb.at(loop0) == 1);
        CHECK(ca.count(loop0) == 0);
    }
}

TEST_CASE("extended edge sets have equal degrees at every vertex") {
    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        const Instance inst = gen_tiny(2000 + t, 5 + t % 6, 2 + t % 3);
        const Solution a = testutil::random_solution(inst, rng);
        const Solution b = testutil::random_solution(inst, rng);
        const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
        std::vector<int> da(inst.num_vertices(), 0), db(inst.num_vertices(), 0);
        const int V = inst.num_vertices();
        for (auto k : ea) {
            da[static_cast<int>(k / V)] += 1;
            da[static_cast<int>(k % V)] += 1;
        }
        for (auto k : eb) {
            db[static_cast<int>(k / V)] += 1;
            db[static_cast<int>(k % V)] += 1;
        }
        CHECK(da == db);
    }
}

TEST_CASE("joint graph of identical parents is empty; cycles are none") {
    const Instance inst = testutil::line_instance(4, 10);
    const Solution a = make_solution(inst, {{0, {0, 1, 2, 3}}});
    const auto [ea, eb] = extend_with_dummy_loops(a, a, inst);
    const JointGraph joint = build_joint_graph(ea, eb, inst);
    CHECK(joint.empty());
    Rng rng(1);
    CHECK(partition_ab_cycles(joint, rng).empty());
    const NeighborLists lists = build_neighbor_lists(inst, 10);
    CHECK(mdeax(a, a, 10, rng, inst, lists).empty());
}

TEST_CASE("ab-cycles partition the symmetric difference of two orders") {
    const Instance inst = testutil::line_instance(3, 10);
    const Solution a = make_solution(inst, {{0, {0, 1, 2}}});
    const Solution b = make_solution(inst, {{0, {1, 0, 2}}});
    const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
    const JointGraph joint = build_joint_graph(ea, eb, inst);

    // Census: shared edges must be absent, the rest labeled by side.
    // A edges: d-0, 0-1, 1-2, d-2; B edges: d-1, 1-0, 0-2, d-2.
    // Shared: 0-1, d-2. Difference: {d-0, 1-2} from A, {d-1, 0-2} from B.
    REQUIRE(joint.edges.size() == 4);
    int from_a = 0, from_b = 0;
    for (const auto& e : joint.edges) (e.from_b ? from_b : from_a) += 1;
    CHECK(from_a == 2);
    CHECK(from_b == 2);

    Rng rng(3);
    const auto cycles = partition_ab_cycles(joint, rng);
    std::size_t covered = 0;
    for (const auto& c : cycles) {
        CHECK(c.edge_ids.size() % 2 == 0);
        CHECK(c.edge_ids.size() >= 2);
        covered += c.edge_ids.size();
    }
    CHECK(covered == joint.edges.size());
}

TEST_CASE("ab-cycles alternate labels and partition all edges") {
    Rng rng(23);
    for (int t = 0; t < 300; ++t) {
        const Instance inst = gen_tiny(3000 + t, 4 + t % 9, 2 + t % 3);
        const Solution a = testutil::random_solution(inst, rng);
        const Solution b = testutil::random_solution(inst, rng);
        const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
        const JointGraph joint = build_joint_graph(ea, eb, inst);
        const auto cycles = partition_ab_cycles(joint, rng);
        std::vector<int> seen(joint.edges.size(), 0);
        for (const auto& c : cycles) {
            REQUIRE(c.edge_ids.size() % 2 == 0);
            for (std::size_t i = 0; i < c.edge_ids.size(); ++i) {
                ++seen[c.edge_ids[i]];
                // Strict alternation around the cycle.
                const bool this_b = joint.edges[c.edge_ids[i]].from_b;
                const bool next_b =
                    joint.edges[c.edge_ids[(i + 1) % c.edge_ids.size()]].from_b;
                CHECK(this_b != next_b);
            }
        }
        for (int s : seen) CHECK(s == 1);
    }
}

TEST_CASE("e-sets: disjoint cycles stay separate, shared vertices merge") {
    const Instance inst = testutil::line_instance(6, 10);
    // Two disjoint differences: reorder within customers {0,1,2} and {3,4,5}.
    const Solution a = make_solution(inst, {{0, {0, 1, 2}}, {1, {3, 4, 5}}});
    const Solution b = make_solution(inst, {{0, {1, 0, 2}}, {1, {3, 5, 4}}});
    const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
    const JointGraph joint = build_joint_graph(ea, eb, inst);
    Rng rng(5);
    const auto cycles = partition_ab_cycles(joint, rng);
    REQUIRE(cycles.size() == 2);

    const auto esets = group_esets(cycles, joint, 10, rng);
    CHECK(esets.size() == 2);

    // Forcing beta = 1 merges them.
    const auto merged = group_esets(cycles, joint, 1, rng);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].edge_ids.size() == joint.edges.size());
}

TEST_CASE("apply_eset: full exchange against base A yields E_B") {
    const Instance inst = testutil::line_instance(4, 10);
    const Solution a = make_solution(inst, {{0, {0, 1, 2, 3}}});
    const Solution b = make_solution(inst, {{1, {2, 3, 0, 1}}});
    const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
    const JointGraph joint = build_joint_graph(ea, eb, inst);
    ESet all;
    for (int e = 0; e < static_cast<int>(joint.edges.size()); ++e) all.edge_ids.push_back(e);
    const EdgeList swapped = apply_eset(a, false, all, joint, inst);
    // Compare against parent B's raw edge multiset.
    EdgeList expect;
    for (auto k : detail::edge_multiset(b, inst))
        expect.push_back(detail::unpack_edge(k, inst.num_vertices()));
    std::sort(expect.begin(), expect.end());
    EdgeList got = swapped;
    std::sort(got.begin(), got.end());
    CHECK(got == expect);

    // Empty E-set: base edges unchanged.
    const EdgeList same = apply_eset(a, false, ESet{}, joint, inst);
    EdgeList expect_a;
    for (auto k : detail::edge_multiset(a, inst))
        expect_a.push_back(detail::unpack_edge(k, inst.num_vertices()));
    std::sort(expect_a.begin(), expect_a.end());
    EdgeList got_a = same;
    std::sort(got_a.begin(), got_a.end());
    CHECK(got_a == expect_a);
}

TEST_CASE("apply_eset keeps customer degree 2 and stays inside parent edges") {
    Rng rng(31);
    for (int t = 0; t < 300; ++t) {
        const Instance inst = gen_tiny(4000 + t, 4 + t % 8, 2 + t % 3);
        const Solution a = testutil::random_solution(inst, rng);
        const Solution b = testutil::random_solution(inst, rng);
        const auto [ea, eb] = extend_with_dummy_loops(a, b, inst);
        const JointGraph joint = build_joint_graph(ea, eb, inst);
        if (joint.empty()) continue;
        const auto cycles = partition_ab_cycles(joint, rng);
        const auto esets = group_esets(cycles, joint, 10, rng);
        const bool base_b = rng.uniform_int(2) == 1;
        const Solution& base = base_b ? b : a;

        // Union multiset of both parents' raw edges.
        auto union_counts = key_counts(detail::edge_multiset(a, inst));
        for (const auto& [k, c] : key_counts(detail::edge_multiset(b, inst))) union_counts[k] += c;

        for (const auto& eset : esets) {
            const EdgeList edges = apply_eset(base, base_b, eset, joint, inst);
            const auto deg = degrees(edges, inst);
            for (int j = 0; j < inst.num_customers(); ++j)
                REQUIRE(deg[inst.customer_vertex(j)] == 2);
            for (int d = 0; d < inst.num_depots(); ++d) REQUIRE(deg[d] % 2 == 0);
            // Edge provenance: nothing outside the parents' union.
            std::map<std::uint64_t, int> used;
            for (const auto& [u, v] : edges)
                ++used[detail::pack_edge(u, v, inst.num_vertices())];
            for (const auto& [k, c] : used) {
                REQUIRE(union_counts.count(k) == 1);
                REQUIRE(c <= union_counts[k]);
            }
        }
    }
}

TEST_CASE("split_mega_tours: two-depot splice arithmetic") {
    // Force a mega tour by hand: depot0 - c0 - depot1 - c1 - depot0.
    std::vector<DepotSpec> depots = {{.capacity = 10, .opening_cost = 1, .pos = Point{0, 0}},
                                     {.capacity = 3, .opening_cost = 1, .pos = Point{10, 0}}};
    std::vector<CustomerSpec> customers = {{.demand = 2, .pos = Point{3, 0}},
                                           {.demand = 2, .pos = Point{7, 0}}};
    const Instance inst =
        Instance::from_coords("mega", depots, customers, 10, 1, Rounding::ExactReal);
    const EdgeList mega = {{0, 2}, {1, 2}, {1, 3}, {0, 3}}; // vertices: depots 0,1; customers 2,3
    const EdgeList split = split_mega_tours(mega, inst);
    // Depot 1 has the smaller residual (3 - 2 vs 10 - 2): it goes; the two
    // edges at depot 1 are replaced by customer-customer edge (2,3).
    EdgeList expect = {{0, 2}, {0, 3}, {2, 3}};
    std::sort(expect.begin(), expect.end());
    CHECK(split == expect);
}

TEST_CASE("split_mega_tours: three depots need two removals") {
    std::vector<DepotSpec> depots = {{.capacity = 10, .opening_cost = 1, .pos = Point{0, 0}},
                                     {.capacity = 6, .opening_cost = 1, .pos = Point{10, 0}},
                                     {.capacity = 5, .opening_cost = 1, .pos = Point{5, 8}}};
    std::vector<CustomerSpec> customers = {{.demand = 2, .pos = Point{5, 0}},
                                           {.demand = 2, .pos = Point{8, 4}},
                                           {.demand = 2, .pos = Point{2, 4}}};
    const Instance inst =
        Instance::from_coords("mega3", depots, customers, 10, 1, Rounding::ExactReal);
    // Tour: d0 - c0 - d1 - c1 - d2 - c2 - back to d0 (vertices 3,4,5 are customers).
    const EdgeList mega = {{0, 3}, {1, 3}, {1, 4}, {2, 4}, {2, 5}, {0, 5}};
    const EdgeList split = split_mega_tours(mega, inst);
    const auto deg = degrees(split, inst);
    CHECK(deg[0] == 2); // largest-capacity depot survives
    CHECK(deg[1] == 0);
    CHECK(deg[2] == 0);
    CHECK(split.size() == 4); // 6 - 2*2 removed + 2 added
}

TEST_CASE("split_mega_tours: residual ties break to the lower depot index") {
    // Capacities below the total demand so the residual rule (not the
    // uncapacitated travel rule) is in force.
    std::vector<DepotSpec> depots = {{.capacity = 3, .opening_cost = 1, .pos = Point{0, 0}},
                                     {.capacity = 3, .opening_cost = 1, .pos = Point{10, 0}}};
    std::vector<CustomerSpec> customers = {{.demand = 2, .pos = Point{3, 0}},
                                           {.demand = 2, .pos = Point{7, 0}}};
    const Instance inst =
        Instance::from_coords("tie", depots, customers, 10, 1, Rounding::ExactReal);
    const EdgeList mega = {{0, 2}, {1, 2}, {1, 3}, {0, 3}};
    const EdgeList split = split_mega_tours(mega, inst);
    const auto deg = degrees(split, inst);
    CHECK(deg[0] == 0); // equal residuals: depot 0 is removed
    CHECK(deg[1] == 2);
}

TEST_CASE("split_mega_tours: uncapacitated depots drop the worst travel") {
    // Both depots can serve everything; depot 1 sits far off the line, so
    // removing it saves the most travel.
    std::vector<DepotSpec> depots = {{.capacity = 100, .opening_cost = 1, .pos = Point{5, 0}},
                                     {.capacity = 100, .opening_cost = 1, .pos = Point{5, 50}}};
    std::vector<CustomerSpec> customers = {{.demand = 2, .pos = Point{3, 0}},
                                           {.demand = 2, .pos = Point{7, 0}}};
    const Instance inst =
        Instance::from_coords("uncap", depots, customers, 10, 1, Rounding::ExactReal);
    const EdgeList mega = {{0, 2}, {1, 2}, {1, 3}, {0, 3}};
    const EdgeList split = split_mega_tours(mega, inst);
    const auto deg = degrees(split, inst);
    CHECK(deg[0] == 2);
    CHECK(deg[1] == 0);
}

TEST_CASE("eliminate_subtours: identity without subtours") {
    const Instance inst = testutil::line_instance(4, 10);
    const NeighborLists lists = build_neighbor_lists(inst, 10);
    const Solution a = make_solution(inst, {{0, {0, 1}}, {1, {2, 3}}});
    EdgeList edges;
    for (auto k : detail::edge_multiset(a, inst))
        edges.push_back(detail::unpack_edge(k, inst.num_vertices()));
    const Solution back = eliminate_subtours(edges, lists, inst);
    CHECK(back.objective == a.objective);
    CHECK(check_feasibility(back, inst).structural_ok);
}

TEST_CASE("eliminate_subtours merges a triangle at the cheapest reconnection") {
    std::vector<DepotSpec> depots = {{.capacity = 100, .opening_cost = 1, .pos = Point{0, 0}}};
    std::vector<CustomerSpec> customers = {
        {.demand = 1, .pos = Point{2, 0}},  {.demand = 1, .pos = Point{4, 0}},
        {.demand = 1, .pos = Point{10, 1}}, {.demand = 1, .pos = Point{11, 0}},
        {.demand = 1, .pos = Point{10, -1}},
    };
    const Instance inst =
        Instance::from_coords("tri", depots, customers, 10, 1, Rounding::ExactReal);
    const NeighborLists lists = build_neighbor_lists(inst, 5);
    // Route: depot - c0 - c1 - depot (vertices 1, 2); triangle subtour c2-c3-c4
    // (vertices 3, 4, 5).
    const EdgeList edges = {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}};
    const Solution merged = eliminate_subtours(edges, lists, inst);
    REQUIRE(merged.routes.size() == 1);
    const Feasibility f = check_feasibility(merged, inst);
    CHECK(f.structural_ok);

    // Exhaustive reconnection oracle: every rotation and direction of the
    // subtour inserted contiguously at every route position.
    const std::vector<int> route = {0, 1};
    Cost best = std::numeric_limits<Cost>::infinity();
    const std::vector<std::vector<int>> cyc_orders = {
        {2, 3, 4}, {3, 4, 2}, {4, 2, 3}, {4, 3, 2}, {3, 2, 4}, {2, 4, 3}};
    // Insert every rotation/direction of the cycle at every position.
    for (const auto& order : cyc_orders) {
        for (std::size_t at = 0; at <= route.size(); ++at) {
            std::vector<int> cand = route;
            cand.insert(cand.begin() + at, order.begin(), order.end());
            best = std::min(best, route_length(inst, 0, cand));
        }
    }
    CHECK(merged.routes[0].length == Catch::Approx(best));
}

TEST_CASE("eliminate_subtours rescues a depot-less intermediate") {
    std::vector<DepotSpec> depots = {{.capacity = 100, .opening_cost = 50, .pos = Point{0, 0}},
                                     {.capacity = 100, .opening_cost = 5, .pos = Point{4, 0}}};
    std::vector<CustomerSpec> customers = {{.demand = 1, .pos = Point{3, 0}},
                                           {.demand = 1, .pos = Point{3, 1}}};
    const Instance inst =
        Instance::from_coords("rescue", depots, customers, 10, 1, Rounding::ExactReal);
    const NeighborLists lists = build_neighbor_lists(inst, 5);
    const EdgeList edges = {{2, 3}, {2, 3}}; // one customer-only 2-cycle
    const Solution sol = eliminate_subtours(edges, lists, inst);
    REQUIRE(sol.routes.size() == 1);
    CHECK(sol.routes[0].depot == 1); // cheapest opening + stub
    CHECK(check_feasibility(sol, inst).structural_ok);
}

TEST_CASE("mdeax produces at most beta structurally valid offspring") {
    Rng rng(41);
    long nonempty = 0;
    for (int t = 0; t < 200; ++t) {
        const Instance inst = gen_tiny(5000 + t, 5 + t % 8, 2 + t % 3);
        const NeighborLists lists = build_neighbor_lists(inst, 20);
        const Solution a = testutil::diversified_solution(inst, lists, rng);
        const Solution b = testutil::diversified_solution(inst, lists, rng);
        const int beta = 1 + t % 5;
        const auto offspring = mdeax(a, b, beta, rng, inst, lists);
        CHECK(static_cast<int>(offspring.size()) <= beta);
        nonempty += offspring.empty() ? 0 : 1;
        for (const auto& o : offspring) {
            const Feasibility f = check_feasibility(o, inst);
            CHECK(f.structural_ok); // capacity violations allowed, structure not
            CHECK(std::abs(o.objective - total_cost(o, inst)) <= inst.cost_tolerance());
        }
    }
    CHECK(nonempty > 150); // random parents almost always differ
}

TEST_CASE("mdeax is deterministic for a fixed seed") {
    const Instance inst = gen_tiny(606, 8, 3);
    const NeighborLists lists = build_neighbor_lists(inst, 20);
    Rng pr(9);
    const Solution a = testutil::random_solution(inst, pr);
    const Solution b = testutil::random_solution(inst, pr);
    Rng r1(123), r2(123);
    const auto o1 = mdeax(a, b, 10, r1, inst, lists);
    const auto o2 = mdeax(a, b, 10, r2, inst, lists);
    REQUIRE(o1.size() == o2.size());
    for (std::size_t i = 0; i < o1.size(); ++i) CHECK(o1[i] == o2[i]);
}
