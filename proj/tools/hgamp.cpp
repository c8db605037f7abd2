#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <hgamp/hgamp.hpp>

namespace {

using namespace hgamp;

struct CommonOpts {
    std::string format = "auto";
    std::uint64_t seed = 1;
    RunParams params;
    std::string seed_configs_path;
    bool seed_configs_replace = false;
};

void add_run_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "instance format: canonical|prins|auto")
        ->check(CLI::IsMember({"canonical", "prins", "auto"}));
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--max-iterations", opts.params.max_iterations,
                    "offspring budget (0: initial population only)");
    cmd->add_option_function<double>(
        "--time-limit", [&opts](const double& v) { opts.params.time_limit_s = v; },
        "wall-clock limit in seconds");
    cmd->add_option("--beta", opts.params.beta, "offspring per crossover");
    cmd->add_option("--gamma", opts.params.gamma, "keyed subpopulations");
    cmd->add_option("--mu", opts.params.mu, "subpopulation survivors");
    cmd->add_option("--lambda", opts.params.lambda, "generation size");
    cmd->add_option("--alpha", opts.params.alpha, "granularity threshold");
    cmd->add_option("--zeta", opts.params.zeta, "mutation probability");
    cmd->add_option("--xi", opts.params.xi, "mutation length fraction");
    cmd->add_option("--eta", opts.params.eta, "rebuild threshold");
    cmd->add_option("--seed-configs", opts.seed_configs_path,
                    "file with depot-index sets injected as initial configurations");
    cmd->add_flag("--seed-configs-replace", opts.seed_configs_replace,
                  "use only the injected configurations (skip the preliminary filter)");
}

Instance load_instance(const std::string& path, const CommonOpts& opts) {
    return parse_instance(path, opts.format);
}

void finish_params(CommonOpts& opts, const Instance& inst) {
    if (!opts.seed_configs_path.empty()) {
        opts.params.seed_configs = load_seed_configs(opts.seed_configs_path, inst);
        opts.params.seed_configs_replace = opts.seed_configs_replace;
    }
}

int exit_code_for(const Error& e) { return e.kind == ErrorKind::Infeasible ? 2 : 1; }

void print_stats(const RunStats& stats) {
    std::printf("iterations      %ld\n", stats.iterations);
    std::printf("best at iter    %ld\n", stats.best_iteration);
    std::printf("time            %.3f s\n", stats.wall_time_s);
    std::printf("time to best    %.3f s\n", stats.time_to_best_s);
    std::printf("crossovers      %ld\n", stats.crossovers);
    std::printf("repairs         %ld\n", stats.repairs);
    std::printf("local searches  %ld\n", stats.ls_invocations);
    std::printf("restarts        %ld\n", stats.restarts);
}

int cmd_solve(const std::string& instance_path, CommonOpts& opts, const std::string& out_path) {
    const Instance inst = load_instance(instance_path, opts);
    finish_params(opts, inst);
    auto [best, stats] = run(inst, opts.params, opts.seed);
    std::printf("instance        %s  (n=%d, m=%d)\n", inst.name.c_str(), inst.num_customers(),
                inst.num_depots());
    std::printf("best objective  %.6g\n", best.objective);
    std::printf("routes          %zu, open depots %zu\n", best.routes.size(),
                best.open_depots.size());
    print_stats(stats);
    if (!out_path.empty()) {
        write_solution(best, inst, out_path);
        std::printf("solution written to %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_bench(const std::vector<std::string>& instance_paths, CommonOpts& opts,
              const std::string& seeds_arg, const std::string& bks_path,
              const std::string& report_path) {
    std::vector<std::uint64_t> seeds;
    {
        std::istringstream ss(seeds_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) seeds.push_back(std::stoull(tok));
    }
    if (seeds.empty()) seeds.push_back(1);

    struct Job {
        std::string path;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& p : instance_paths)
        for (auto s : seeds) jobs.push_back({p, s});

    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("HGAMP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) threads = static_cast<unsigned>(v);
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
    if (threads == 0) threads = 1;

    std::vector<RunRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex io_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                const Instance inst = load_instance(jobs[i].path, opts);
                CommonOpts local = opts;
                finish_params(local, inst);
                auto [best, stats] = run(inst, local.params, jobs[i].seed);
                records[i] = {inst.name, jobs[i].seed,   stats.best_objective,
                              stats.best_objective, // single run: avg == best
                              stats.wall_time_s, stats.time_to_best_s};
                std::lock_guard<std::mutex> lock(io_mutex);
                std::printf("%-28s seed %-6llu best %.6g  %.2fs\n", inst.name.c_str(),
                            static_cast<unsigned long long>(jobs[i].seed), stats.best_objective,
                            stats.wall_time_s);
            }
        });
    }
    for (auto& th : pool) th.join();

    BksRegistry registry;
    if (!bks_path.empty()) registry = BksRegistry::load(bks_path);
    const RunReport report = gap_report(records, registry);
    std::fputs(report.to_table().c_str(), stdout);
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) fail(ErrorKind::Parse, "cannot write file: " + report_path);
        out << report.to_csv();
        std::printf("report written to %s\n", report_path.c_str());
    }
    return 0;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path,
                 CommonOpts& opts) {
    const Instance inst = load_instance(instance_path, opts);
    const Solution sol = read_solution(solution_path, inst);
    const Feasibility f = check_feasibility(sol, inst);
    if (!f.structural_ok) {
        std::printf("structural error: %s\n", f.structural_detail.c_str());
        return 1;
    }
    if (f.feasible()) {
        std::printf("feasible, cost %.6g\n", sol.objective);
        return 0;
    }
    std::printf("infeasible: depot overload %.6g, route overload %.6g, cost %.6g\n",
                f.depot_overload, f.route_overload, sol.objective);
    return 1;
}

int cmd_oracle(const std::string& instance_path, CommonOpts& opts, const std::string& out_path) {
    const Instance inst = load_instance(instance_path, opts);
    auto [cost, sol] = brute_force_oracle(inst);
    std::printf("optimum %.6g with %zu routes over %zu depots\n", cost, sol.routes.size(),
                sol.open_depots.size());
    if (!out_path.empty()) {
        write_solution(sol, inst, out_path);
        std::printf("solution written to %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_gen_tiny(std::uint64_t seed, int n, int m, const std::string& out_path) {
    const Instance inst = gen_tiny(seed, n, m);
    const std::string text = serialize_instance(inst);
    if (out_path.empty() || out_path == "-") {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream out(out_path);
        if (!out) fail(ErrorKind::Parse, "cannot write file: " + out_path);
        out << text;
        std::printf("instance %s written to %s\n", inst.name.c_str(), out_path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hgamp: capacitated location-routing solver"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string instance_path, solution_path, out_path, report_path, bks_path;
    std::string seeds_arg = "1";
    std::vector<std::string> instance_paths;
    std::uint64_t gen_seed = 1;
    int gen_n = 6, gen_m = 2;

    auto* solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("--instance", instance_path, "instance file")->required();
    solve->add_option("--out", out_path, "write the best solution (JSON)");
    add_run_options(solve, opts);

    auto* bench = app.add_subcommand("bench", "run instance list x seeds, report gaps");
    bench->add_option("instances", instance_paths, "instance files")->required();
    bench->add_option("--seeds", seeds_arg, "comma-separated seeds (default: 1)");
    bench->add_option("--bks", bks_path, "best-known-solutions CSV");
    bench->add_option("--report", report_path, "write the run report CSV");
    add_run_options(bench, opts);

    auto* validate = app.add_subcommand("validate", "check a solution file against its instance");
    validate->add_option("--instance", instance_path, "instance file")->required();
    validate->add_option("--solution", solution_path, "solution file (JSON)")->required();
    validate->add_option("--format", opts.format, "instance format")
        ->check(CLI::IsMember({"canonical", "prins", "auto"}));

    auto* oracle = app.add_subcommand("oracle", "exact optimum of a tiny instance");
    oracle->add_option("--instance", instance_path, "instance file")->required();
    oracle->add_option("--out", out_path, "write the optimal solution (JSON)");
    oracle->add_option("--format", opts.format, "instance format")
        ->check(CLI::IsMember({"canonical", "prins", "auto"}));

    auto* gen = app.add_subcommand("gen-tiny", "generate a reproducible toy instance");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--customers", gen_n, "customer count");
    gen->add_option("--depots", gen_m, "depot count");
    gen->add_option("--out", out_path, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(instance_path, opts, out_path);
        if (bench->parsed())
            return cmd_bench(instance_paths, opts, seeds_arg, bks_path, report_path);
        if (validate->parsed()) return cmd_validate(instance_path, solution_path, opts);
        if (oracle->parsed()) return cmd_oracle(instance_path, opts, out_path);
        if (gen->parsed()) return cmd_gen_tiny(gen_seed, gen_n, gen_m, out_path);
    } catch (const hgamp::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
