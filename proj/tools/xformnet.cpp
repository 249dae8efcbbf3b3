// xformnet: enumerate and analyze transformation networks, run single
// simulations, execute configuration sweeps and aggregate their results.
//
// Exit codes: 0 ok, 2 usage, 3 runtime. Failures print exactly one line
// `xformnet: error: <usage|runtime>: <message>` on stderr.

#include "xformnet/csv.hpp"
#include "xformnet/economy.hpp"
#include "xformnet/network.hpp"
#include "xformnet/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace xformnet;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_runtime = 3;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Values shared by several subcommands; flags and XFORMNET_* env vars land here.
struct Options {
    std::size_t n = 4;
    bool directed = true;
    std::vector<std::size_t> populations{25, 50};
    std::size_t population = 50;
    std::size_t replications = 20;
    std::size_t steps = 1000;
    std::size_t burn_in = 10;
    Money price = 1;
    Money initial_wealth = 10;
    std::string endowment = "own-output";
    std::size_t attempts = 1;
    std::uint64_t seed = 1;
    std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
    std::string config_range;
    std::string out;
    std::optional<std::uint64_t> config;
    std::string file;
};

Directedness directedness(const Options& o) {
    return o.directed ? Directedness::directed : Directedness::undirected;
}

std::string directed_flag(Directedness d) {
    return d == Directedness::directed ? "--directed" : "--undirected";
}

CLI::Option* add_env(CLI::Option* opt, const std::string& env) {
    return opt->envname("XFORMNET_" + env);
}

void add_topology(CLI::App* app, Options& o) {
    add_env(app->add_option("--n", o.n, "Number of resource nodes"), "N");
    add_env(app->add_flag("--directed,!--undirected", o.directed,
                          "Directed (default) or undirected-symmetric configurations"),
            "DIRECTED");
}

void add_economy(CLI::App* app, Options& o) {
    add_env(app->add_option("--steps", o.steps, "Time steps per run"), "STEPS");
    add_env(app->add_option("--burn-in", o.burn_in, "Leading steps excluded from summaries"),
            "BURN_IN");
    add_env(app->add_option("--price", o.price, "Fixed price of every resource"), "PRICE");
    add_env(app->add_option("--initial-wealth", o.initial_wealth, "Starting wealth per agent"),
            "INITIAL_WEALTH");
    add_env(app->add_option("--endowment", o.endowment, "Initial inventory policy")
                ->check(CLI::IsMember({"own-output", "own-input", "none"})),
            "ENDOWMENT");
    add_env(app->add_option("--attempts", o.attempts, "Seller draws per buyer activation"),
            "ATTEMPTS");
    add_env(app->add_option("--seed", o.seed, "Seed (master seed for sweeps)"), "SEED");
}

EconomyParams economy_params(const Options& o) {
    EconomyParams p;
    p.population = o.population;
    p.steps = o.steps;
    p.burn_in = o.burn_in;
    p.price = o.price;
    p.initial_wealth = o.initial_wealth;
    p.endowment = *parse_endowment(o.endowment);
    p.attempts_per_turn = o.attempts;
    try {
        p.validate();
    } catch (const invalid_params& e) {
        throw usage_error(e.what());
    }
    return p;
}

std::string economy_echo(const EconomyParams& p) {
    std::ostringstream s;
    s << " --steps " << p.steps << " --burn-in " << p.burn_in << " --price " << p.price
      << " --initial-wealth " << p.initial_wealth << " --endowment " << to_string(p.endowment)
      << " --attempts " << p.attempts_per_turn;
    return s.str();
}

void echo(const std::string& line) {
    std::cerr << "# invocation: xformnet " << line << '\n';
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

fs::path output_dir(const std::string& dir) {
    const fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) {
        throw std::runtime_error("cannot create output directory " + p.string());
    }
    return p;
}

// Network from --file or --config (with --n/--directed).
TransformationNetwork load_network(const Options& o, std::string& source) {
    if (!o.file.empty()) {
        std::ifstream in(o.file);
        if (!in) {
            throw std::runtime_error("cannot open network file " + o.file);
        }
        try {
            source = "--file " + o.file;
            return read_edge_list(in);
        } catch (const parse_error& e) {
            throw std::runtime_error(o.file + ": " + e.what());
        }
    }
    if (!o.config) {
        throw usage_error("give a network with --file PATH or --config ID");
    }
    try {
        auto net = config_to_network(ConfigId{*o.config}, o.n, directedness(o));
        source = "--config " + std::to_string(*o.config) + " --n " + std::to_string(o.n) + " " +
                 directed_flag(directedness(o));
        return net;
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
}

std::optional<std::uint64_t> config_of(const TransformationNetwork& net) {
    if (net.node_count() > max_config_nodes) {
        return std::nullopt;
    }
    return network_to_config(net).mask;
}

int cmd_enumerate(const Options& o, bool list, bool force) {
    const Directedness d = directedness(o);
    const std::size_t bits = o.n >= 2 ? config_bits(o.n, d) : 0;
    echo("enumerate " + std::to_string(o.n) + " " + directed_flag(d) +
         (list ? " --list" : " --count-only") + (force ? " --force" : ""));
    std::uint64_t count = 0;
    try {
        count = config_count(o.n, d);
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
    if (!list) {
        std::cout << count << '\n';
        return 0;
    }
    if (bits > 20 && !force) {
        throw usage_error("listing " + std::to_string(count) +
                          " configurations refused (more than 2^20); pass --force");
    }
    std::cout << "# count=" << count << '\n' << "config_id,edge_count,density\n";
    for (const auto id : enumerate_configs(o.n, d)) {
        const auto net = config_to_network(id, o.n, d);
        std::cout << id.mask << ',' << net.edge_count() << ',' << format_real(density(net))
                  << '\n';
    }
    return 0;
}

int cmd_analyze(const Options& o) {
    std::string source;
    const auto net = load_network(o, source);
    echo("analyze " + source + " --population " + std::to_string(o.population));

    const std::size_t n = net.node_count();
    std::cout << "n: " << n << '\n';
    std::cout << "directed: " << (net.directedness() == Directedness::directed ? "true" : "false")
              << '\n';
    if (const auto id = config_of(net)) {
        std::cout << "config_id: " << *id << '\n';
    }
    std::cout << "edges: " << net.edge_count() << '\n';
    std::cout << "density: " << format_real(density(net)) << '\n';
    if (n <= max_cycle_search_nodes) {
        std::cout << "simple_cycles: " << count_simple_cycles(net) << '\n';
    } else {
        std::cout << "simple_cycles: n/a\n";
    }
    std::cout << "dag: " << (is_dag(net) ? "true" : "false") << '\n';
    std::cout << "population: " << o.population << '\n';
    if (net.edge_count() > 0) {
        const double share =
            static_cast<double>(o.population) / static_cast<double>(net.edge_count());
        std::cout << "expected_agents_per_edge: " << format_real(share) << '\n';
        for (const auto& e : net.edges()) {
            std::cout << "edge " << e.input.index << "->" << e.output.index;
            const auto from = resource_label(e.input, n);
            const auto to = resource_label(e.output, n);
            if (from && to) {
                std::cout << " (" << *from << "->" << *to << ")";
            }
            std::cout << ": " << format_real(share) << '\n';
        }
    }
    return 0;
}

int cmd_simulate(const Options& o, const std::string& trace) {
    std::string source;
    const auto net = load_network(o, source);
    const EconomyParams params = economy_params(o);
    echo("simulate " + source + " --population " + std::to_string(params.population) +
         economy_echo(params) + " --seed " + std::to_string(o.seed) +
         (trace.empty() ? "" : " --trace " + trace) + (o.out.empty() ? "" : " --out " + o.out));

    const RunResult result = run(net, params, o.seed);

    SweepPlan plan;
    plan.n = net.node_count();
    plan.directedness = net.directedness();
    plan.populations = {params.population};
    plan.replications = 1;
    plan.economy = params;
    plan.master_seed = o.seed;
    const auto id = config_of(net);
    if (id) {
        plan.config_range = MaskRange{*id, *id};
    }
    const CsvProvenance prov{plan.hash(), o.seed};

    RunRecord rec;
    rec.config_id = id.value_or(0);
    rec.n = net.node_count();
    rec.edge_count = net.edge_count();
    rec.density = density(net);
    rec.population = params.population;
    rec.replication = 0;
    rec.seed = o.seed;
    rec.mean_step_gdp = result.mean_step_gdp;
    rec.total_gdp = result.total_gdp;

    if (o.out.empty()) {
        write_results_csv(std::cout, {rec}, prov);
    } else {
        auto out = open_output(output_dir(o.out) / "run.csv");
        write_results_csv(out, {rec}, prov);
    }
    if (!trace.empty()) {
        auto out = open_output(trace);
        write_trace_csv(out, result.per_step_gdp, prov);
    }
    return 0;
}

void write_groups(const fs::path& dir, const std::vector<RunRecord>& records,
                  const CsvProvenance& prov) {
    const auto groups = aggregate(records, [](const std::string& w) {
        std::cerr << "xformnet: warning: " << w << '\n';
    });
    {
        auto out = open_output(dir / "groups.csv");
        write_groups_csv(out, groups, prov);
    }
    auto out = open_output(dir / "groups_pooled.csv");
    write_groups_csv(out, aggregate_pooled(records), prov);
}

int cmd_sweep(const Options& o, const CLI::App& app, const std::string& plan_file,
              std::optional<std::uint64_t> sample, bool exhaustive, bool progress) {
    SweepPlan plan;
    if (!plan_file.empty()) {
        try {
            plan = read_plan_file(plan_file);
        } catch (const invalid_plan& e) {
            throw usage_error(plan_file + ": " + e.what());
        }
    }
    const auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
    if (given("--n")) plan.n = o.n;
    if (given("--directed")) plan.directedness = directedness(o);
    if (given("--populations")) plan.populations = o.populations;
    if (given("--replications")) plan.replications = o.replications;
    if (given("--steps")) plan.economy.steps = o.steps;
    if (given("--burn-in")) plan.economy.burn_in = o.burn_in;
    if (given("--price")) plan.economy.price = o.price;
    if (given("--initial-wealth")) plan.economy.initial_wealth = o.initial_wealth;
    if (given("--endowment")) plan.economy.endowment = *parse_endowment(o.endowment);
    if (given("--attempts")) plan.economy.attempts_per_turn = o.attempts;
    if (given("--seed")) plan.master_seed = o.seed;
    if (given("--config-range")) {
        const auto r = parse_mask_range(o.config_range);
        if (!r) {
            throw usage_error("--config-range must be A..B with 1 <= A <= B");
        }
        plan.config_range = *r;
    }
    if (sample) plan.sample = *sample;
    if (exhaustive) plan.exhaustive = true;
    try {
        plan.validate();
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }

    std::ostringstream line;
    line << "sweep --n " << plan.n << ' ' << directed_flag(plan.directedness) << " --populations ";
    for (std::size_t i = 0; i < plan.populations.size(); ++i) {
        line << (i ? "," : "") << plan.populations[i];
    }
    line << " --replications " << plan.replications << economy_echo(plan.economy) << " --seed "
         << plan.master_seed;
    if (plan.config_range) line << " --config-range " << to_string(*plan.config_range);
    if (plan.sample) line << " --sample " << *plan.sample;
    if (plan.exhaustive) line << " --exhaustive";
    line << " --workers " << o.workers << " --out " << (o.out.empty() ? "." : o.out);
    echo(line.str());

    const fs::path dir = output_dir(o.out);
    SweepOptions opts;
    opts.workers = o.workers;
    if (progress) {
        opts.progress = [](std::uint64_t done, std::uint64_t total) {
            std::cerr << "\rruns " << done << "/" << total << std::flush;
            if (done == total) std::cerr << '\n';
        };
    }
    const auto records = execute_sweep(plan, opts);
    const CsvProvenance prov{plan.hash(), plan.master_seed};
    {
        auto out = open_output(dir / "results.csv");
        write_results_csv(out, records, prov);
    }
    // Aggregate what was written so `aggregate` on results.csv reproduces
    // groups.csv byte for byte.
    std::stringstream written;
    write_results_csv(written, records, prov);
    write_groups(dir, read_results_csv(written), prov);

    std::cout << "runs: " << records.size() << '\n'
              << "results: " << (dir / "results.csv").string() << '\n'
              << "groups: " << (dir / "groups.csv").string() << '\n'
              << "groups_pooled: " << (dir / "groups_pooled.csv").string() << '\n';
    return 0;
}

int cmd_aggregate(const std::string& input, const Options& o) {
    echo("aggregate --in " + input + " --out " + (o.out.empty() ? "." : o.out));
    std::ifstream in(input);
    if (!in) {
        throw std::runtime_error("cannot open " + input);
    }
    CsvProvenance prov;
    const auto records = read_results_csv(in, &prov);
    if (records.empty()) {
        throw std::runtime_error(input + " contains no runs");
    }
    const fs::path dir = output_dir(o.out);
    write_groups(dir, records, prov);
    std::cout << "groups: " << (dir / "groups.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transformation-network economy simulator and configuration sweeps"};
    app.require_subcommand(1);
    Options o;

    auto* enumerate = app.add_subcommand("enumerate", "Count or list configurations");
    bool list = false;
    bool force = false;
    enumerate->add_option("n", o.n, "Number of nodes")->required()->envname("XFORMNET_N");
    enumerate->add_flag("--directed,!--undirected", o.directed, "Configuration family")
        ->envname("XFORMNET_DIRECTED");
    auto* count_only = enumerate->add_flag("--count-only", "Print only the count (default)");
    enumerate->add_flag("--list", list, "List every configuration")->excludes(count_only);
    enumerate->add_flag("--force", force, "Allow listing more than 2^20 configurations");

    auto* analyze = app.add_subcommand("analyze", "Structural report for one network");
    add_topology(analyze, o);
    analyze->add_option("--file", o.file, "Edge-list network file");
    analyze->add_option("--config", o.config, "Configuration id (decimal)");
    add_env(analyze->add_option("--population", o.population, "Population for edge weights"),
            "POPULATION");

    auto* simulate = app.add_subcommand("simulate", "Run one simulation");
    std::string trace;
    add_topology(simulate, o);
    simulate->add_option("--file", o.file, "Edge-list network file");
    simulate->add_option("--config", o.config, "Configuration id (decimal)");
    add_env(simulate->add_option("--population", o.population, "Number of agents"), "POPULATION");
    add_economy(simulate, o);
    simulate->add_option("--trace", trace, "Write the per-step GDP trace CSV here");
    add_env(simulate->add_option("--out", o.out, "Write run.csv into this directory"), "OUT");

    auto* sweep = app.add_subcommand("sweep", "Run a configuration sweep");
    std::string plan_file;
    std::optional<std::uint64_t> sample;
    bool exhaustive = false;
    bool progress = false;
    sweep->add_option("plan", plan_file, "Plan file (key = value)");
    add_topology(sweep, o);
    add_env(sweep->add_option("--populations", o.populations, "Comma-separated populations")
                ->delimiter(','),
            "POPULATIONS");
    add_env(sweep->add_option("--replications", o.replications, "Replications per config"),
            "REPLICATIONS");
    add_economy(sweep, o);
    add_env(sweep->add_option("--workers", o.workers, "Worker threads"), "WORKERS");
    add_env(sweep->add_option("--config-range", o.config_range, "Inclusive mask range A..B"),
            "CONFIG_RANGE");
    sweep->add_option("--sample", sample, "Run this many uniformly drawn configurations");
    sweep->add_flag("--exhaustive", exhaustive, "Allow sweeps above 2^16 configurations");
    sweep->add_flag("--progress", progress, "Report progress on stderr");
    add_env(sweep->add_option("--out", o.out, "Output directory"), "OUT");

    auto* aggregate_cmd = app.add_subcommand("aggregate", "Group statistics from a results CSV");
    std::string input;
    aggregate_cmd->add_option("--in", input, "results.csv")->required();
    add_env(aggregate_cmd->add_option("--out", o.out, "Output directory"), "OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "xformnet: error: usage: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (*enumerate) return cmd_enumerate(o, list, force);
        if (*analyze) return cmd_analyze(o);
        if (*simulate) return cmd_simulate(o, trace);
        if (*sweep) return cmd_sweep(o, *sweep, plan_file, sample, exhaustive, progress);
        if (*aggregate_cmd) return cmd_aggregate(input, o);
    } catch (const usage_error& e) {
        std::cerr << "xformnet: error: usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "xformnet: error: runtime: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
