// Minimal library usage: build an instance in memory, run the solver, print
// the routes.

#include <cstdio>

#include <hgamp/hgamp.hpp>

int main() {
    using namespace hgamp;

    std::vector<DepotSpec> depots = {
        {.capacity = 70, .opening_cost = 1500, .pos = Point{10, 10}},
        {.capacity = 70, .opening_cost = 1200, .pos = Point{90, 80}},
    };
    std::vector<CustomerSpec> customers = {
        {.demand = 12, .pos = Point{15, 20}}, {.demand = 9, .pos = Point{25, 15}},
        {.demand = 14, .pos = Point{80, 70}}, {.demand = 11, .pos = Point{85, 90}},
        {.demand = 8, .pos = Point{50, 50}},  {.demand = 10, .pos = Point{20, 70}},
    };
    const Instance inst = Instance::from_coords("toy", depots, customers, 30, 500,
                                                Rounding::ScaledInteger, 100);

    RunParams params;
    params.max_iterations = 5000;
    auto [best, stats] = run(inst, params, 7);

    std::printf("best objective: %.0f (found at iteration %ld)\n", best.objective,
                stats.best_iteration);
    for (const auto& route : best.routes) {
        std::printf("depot %d:", route.depot);
        for (int c : route.customers) std::printf(" %d", c);
        std::printf("  (load %.0f, length %.0f)\n", route.load, route.length);
    }
    return 0;
}
