// Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance [criterion ...] [--workers N] [--sweep-dir DIR] [--prepare]
//
// The paper-scale sweep (4095 configs x {25,50} x 20 reps x 1000 steps) is
// shared by fig3a, fig3b and scaling. It is cached as DIR/results.csv and
// reused when the cached plan hash matches; --prepare only builds the cache.

#include "oracles.hpp"
#include "xformnet/csv.hpp"
#include "xformnet/economy.hpp"
#include "xformnet/network.hpp"
#include "xformnet/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace xformnet;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("FAILED " + what);
        }
    }
    void note(const std::string& what) { notes.push_back(what); }
};

struct Context {
    std::size_t workers = 1;
    fs::path sweep_dir;
    std::optional<std::vector<RunRecord>> paper_records;
};

// Criterion: exact enumeration counts, under 1 s.
Verdict enumeration(Context&) {
    Verdict v;
    const auto t0 = Clock::now();
    std::uint64_t directed4 = 0;
    for ([[maybe_unused]] const auto id : enumerate_configs(4)) ++directed4;
    std::uint64_t undirected4 = 0;
    for ([[maybe_unused]] const auto id : enumerate_configs(4, Directedness::undirected))
        ++undirected4;
    std::uint64_t directed5 = 0;
    for ([[maybe_unused]] const auto id : enumerate_configs(5)) ++directed5;
    const double secs = seconds_since(t0);

    v.require(directed4 == 4095, "n=4 directed streamed " + std::to_string(directed4));
    v.require(config_count(4, Directedness::directed) == 4095, "n=4 directed count");
    v.require(directed5 == 1048575, "n=5 directed streamed " + std::to_string(directed5));
    v.require(config_count(5, Directedness::directed) == 1048575, "n=5 directed count");
    v.require(undirected4 == 63, "n=4 undirected streamed " + std::to_string(undirected4));
    v.require(config_count(4, Directedness::undirected) == 63, "n=4 undirected count");
    v.require(secs < 1.0, "time limit 1 s");
    v.note("4095 / 1048575 / 63 in " + std::to_string(secs) + " s");
    return v;
}

// Criterion: >= 3 simple cycles with >= 9 edges, >= 1 with >= 7 edges; under 1 s.
Verdict cycle_guarantee(Context&) {
    Verdict v;
    const auto t0 = Clock::now();
    std::size_t dense = 0;
    std::size_t dense_ok = 0;
    std::size_t seven = 0;
    std::size_t seven_ok = 0;
    std::size_t max_acyclic = 0;
    for (const auto id : enumerate_configs(4)) {
        const auto net = config_to_network(id, 4);
        const auto cycles = count_simple_cycles(net);
        if (net.edge_count() >= 9) {
            ++dense;
            dense_ok += cycles >= 3;
        }
        if (net.edge_count() >= 7) {
            ++seven;
            seven_ok += cycles >= 1;
        }
        if (cycles == 0) max_acyclic = std::max(max_acyclic, net.edge_count());
    }
    const double secs = seconds_since(t0);
    v.require(dense == 299, "299 configurations with >= 9 edges (got " + std::to_string(dense) + ")");
    v.require(dense_ok == dense, std::to_string(dense - dense_ok) + " dense configs with < 3 cycles");
    v.require(seven_ok == seven, std::to_string(seven - seven_ok) + " configs >= 7 edges acyclic");
    v.require(max_acyclic == 6, "max acyclic edge count " + std::to_string(max_acyclic));
    v.require(secs < 1.0, "time limit 1 s");
    v.note("299/299 with >= 3 cycles, " + std::to_string(seven) + "/" + std::to_string(seven) +
           " with >= 1 cycle, max acyclic edges 6, " + std::to_string(secs) + " s");
    return v;
}

// Criterion: is_dag == (cycles == 0) on all 4095 configurations; under 5 s.
Verdict oracle_equivalence(Context&) {
    Verdict v;
    const auto t0 = Clock::now();
    std::size_t disagreements = 0;
    for (const auto id : enumerate_configs(4)) {
        const auto net = config_to_network(id, 4);
        disagreements += is_dag(net) != (count_simple_cycles(net) == 0);
    }
    const double secs = seconds_since(t0);
    v.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    v.require(secs < 5.0, "time limit 5 s");
    v.note("0/4095 disagreements in " + std::to_string(secs) + " s");
    return v;
}

// Criterion: exact money and unit conservation over 10,000 steps spread across
// 100 random (network, seed) pairs; under 30 s.
Verdict conservation(Context&) {
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 gen(0xc0115e7aULL);
    std::size_t steps = 0;
    std::size_t violations = 0;
    for (int pair = 0; pair < 100; ++pair) {
        const auto mask = 1 + gen() % 4095;
        const auto net = config_to_network(ConfigId{mask}, 4);
        EconomyParams p;
        p.population = 25 + gen() % 76;
        auto state = init_economy(net, p, gen());
        for (int t = 0; t < 100; ++t) {
            const Money wealth = state.total_wealth();
            const auto units = state.units_by_resource();
            const std::uint64_t total_units = state.total_units();
            const Money gdp = state.step();
            ++steps;
            const bool ok = state.total_wealth() == wealth && state.total_units() == total_units &&
                            gdp == p.price * static_cast<Money>(state.trades_last_step()) &&
                            std::all_of(state.agents().begin(), state.agents().end(),
                                        [](const Agent& a) { return a.wealth >= 0; });
            violations += !ok;
            (void)units;
        }
    }
    const double secs = seconds_since(t0);
    v.require(steps == 10000, "step count");
    v.require(violations == 0, std::to_string(violations) + " violating steps");
    v.require(secs < 30.0, "time limit 30 s");
    v.note(std::to_string(steps) + " steps, 0 violations, " + std::to_string(secs) + " s");
    return v;
}

std::string sorted_csv(const std::vector<RunRecord>& records, const SweepPlan& plan) {
    auto sorted = records;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream out;
    write_results_csv(out, sorted, {plan.hash(), plan.master_seed});
    return out.str();
}

// Criterion: 1 worker vs 8 workers, byte-identical sorted CSVs; under 2 min.
Verdict determinism(Context&) {
    Verdict v;
    const auto t0 = Clock::now();
    SweepPlan plan;
    plan.populations = {25};
    plan.replications = 3;
    plan.economy.steps = 200;
    plan.master_seed = 2011;
    const auto one = sorted_csv(execute_sweep(plan, {.workers = 1}), plan);
    const auto eight = sorted_csv(execute_sweep(plan, {.workers = 8}), plan);
    const double secs = seconds_since(t0);
    v.require(one == eight, "CSV bytes differ");
    v.require(secs < 120.0, "time limit 120 s");
    v.note(std::to_string(4095 * 3) + " runs twice, " + std::to_string(one.size()) +
           " identical bytes, " + std::to_string(secs) + " s");
    return v;
}

SweepPlan paper_plan() {
    SweepPlan plan;  // defaults: n=4 directed, {25,50}, 20 reps, 1000 steps, burn-in 10
    plan.master_seed = 2012;
    return plan;
}

std::optional<std::vector<RunRecord>> load_cached(const fs::path& path, const SweepPlan& plan) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        CsvProvenance prov;
        auto records = read_results_csv(in, &prov);
        const std::size_t expected = 4095 * 2 * 20;
        if (prov.plan_hash != plan.hash() || records.size() != expected) return std::nullopt;
        return records;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

const std::vector<RunRecord>& paper_records(Context& ctx) {
    if (ctx.paper_records) return *ctx.paper_records;
    const SweepPlan plan = paper_plan();
    const fs::path cache = ctx.sweep_dir / "results.csv";
    if (auto cached = load_cached(cache, plan)) {
        std::cerr << "using cached paper-scale sweep " << cache << '\n';
        ctx.paper_records = std::move(cached);
        return *ctx.paper_records;
    }
    std::cerr << "running paper-scale sweep with " << ctx.workers << " worker(s)\n";
    const auto t0 = Clock::now();
    SweepOptions opts;
    opts.workers = ctx.workers;
    opts.progress = [last = -1](std::uint64_t done, std::uint64_t total) mutable {
        const int pct = static_cast<int>(100 * done / total);
        if (pct / 10 != last / 10) {
            std::cerr << "  " << pct << "%\n";
            last = pct;
        }
    };
    auto records = execute_sweep(plan, opts);
    const double secs = seconds_since(t0);
    std::cerr << "paper-scale sweep: " << records.size() << " runs in " << secs << " s\n";

    // Go through the CSV text so fresh and cached runs see identical values.
    const CsvProvenance prov{plan.hash(), plan.master_seed};
    std::stringstream text;
    write_results_csv(text, records, prov);
    std::error_code ec;
    fs::create_directories(ctx.sweep_dir, ec);
    {
        std::ofstream out(cache, std::ios::binary);
        out << text.str();
    }
    ctx.paper_records = read_results_csv(text);
    const auto groups = aggregate(*ctx.paper_records);
    std::ofstream g(ctx.sweep_dir / "groups.csv", std::ios::binary);
    write_groups_csv(g, groups, prov);
    std::ofstream pooled(ctx.sweep_dir / "groups_pooled.csv", std::ios::binary);
    write_groups_csv(pooled, aggregate_pooled(*ctx.paper_records), prov);
    std::ofstream timing(ctx.sweep_dir / "timing.txt");
    timing << secs << " s with " << ctx.workers << " worker(s)\n";
    return *ctx.paper_records;
}

std::map<std::size_t, std::vector<GroupStats>> groups_by_population(Context& ctx) {
    std::map<std::size_t, std::vector<GroupStats>> by_pop;
    for (const auto& g : aggregate(paper_records(ctx))) {
        by_pop[g.population].push_back(g);
    }
    for (auto& [pop, gs] : by_pop) {
        std::sort(gs.begin(), gs.end(),
                  [](const auto& a, const auto& b) { return a.edge_count < b.edge_count; });
    }
    return by_pop;
}

std::string fmt(double x) { return format_real(x); }

// Criterion: group mean_of_means nondecreasing in edge count, slack = the
// lower group's 95% CI half-width, both populations.
Verdict fig3a(Context& ctx) {
    Verdict v;
    const auto by_pop = groups_by_population(ctx);
    v.require(by_pop.size() == 2, "two populations");
    for (const auto& [pop, gs] : by_pop) {
        v.require(gs.size() == 12, "12 groups for population " + std::to_string(pop));
        std::ostringstream series;
        for (std::size_t i = 0; i < gs.size(); ++i) {
            series << (i ? " " : "") << fmt(gs[i].mean_of_means);
            if (i == 0) continue;
            const auto& lo = gs[i - 1];
            const auto& hi = gs[i];
            v.require(hi.mean_of_means >= lo.mean_of_means - lo.ci95_half_width,
                      "pop " + std::to_string(pop) + " edges " + std::to_string(lo.edge_count) +
                          "->" + std::to_string(hi.edge_count) + ": " + fmt(lo.mean_of_means) +
                          " -> " + fmt(hi.mean_of_means) + " (slack " +
                          fmt(lo.ci95_half_width) + ")");
        }
        v.note("pop " + std::to_string(pop) + " means: " + series.str());
    }
    return v;
}

// Criterion: min_gdp == 0 for 1..8 edges and > 0 for 9..12; max_gdp
// nonincreasing in edge count (ties allowed).
Verdict fig3b(Context& ctx) {
    Verdict v;
    const auto by_pop = groups_by_population(ctx);
    for (const auto& [pop, gs] : by_pop) {
        std::ostringstream mins;
        std::ostringstream maxs;
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const auto& g = gs[i];
            mins << (i ? " " : "") << fmt(g.min_gdp);
            maxs << (i ? " " : "") << fmt(g.max_gdp);
            const std::string where =
                "pop " + std::to_string(pop) + " edges " + std::to_string(g.edge_count);
            if (g.edge_count <= 8) {
                v.require(g.min_gdp == 0.0, where + ": min " + fmt(g.min_gdp) + " != 0");
            } else {
                v.require(g.min_gdp > 0.0, where + ": min " + fmt(g.min_gdp) + " not > 0");
            }
            if (i > 0) {
                v.require(g.max_gdp <= gs[i - 1].max_gdp,
                          where + ": max rose " + fmt(gs[i - 1].max_gdp) + " -> " + fmt(g.max_gdp));
            }
        }
        v.note("pop " + std::to_string(pop) + " min: " + mins.str());
        v.note("pop " + std::to_string(pop) + " max: " + maxs.str());
    }
    return v;
}

// Criterion: mean_of_means(50) / mean_of_means(25) in [1.6, 2.4] where both
// are nonzero.
Verdict scaling(Context& ctx) {
    Verdict v;
    const auto by_pop = groups_by_population(ctx);
    if (!by_pop.count(25) || !by_pop.count(50)) {
        v.require(false, "populations 25 and 50 present");
        return v;
    }
    const auto& small = by_pop.at(25);
    const auto& large = by_pop.at(50);
    std::ostringstream ratios;
    std::size_t compared = 0;
    for (std::size_t i = 0; i < std::min(small.size(), large.size()); ++i) {
        if (small[i].mean_of_means == 0.0 || large[i].mean_of_means == 0.0) continue;
        const double r = large[i].mean_of_means / small[i].mean_of_means;
        ratios << (compared ? " " : "") << small[i].edge_count << ":" << fmt(r);
        ++compared;
        v.require(r >= 1.6 && r <= 2.4,
                  "edges " + std::to_string(small[i].edge_count) + " ratio " + fmt(r));
    }
    v.require(compared > 0, "at least one nonzero group");
    v.note("ratios " + ratios.str());
    return v;
}

// Criterion: every acyclic 4-node configuration is silent over the last 500
// of 2000 steps; under 2 min.
Verdict dag_quiescence(Context&) {
    Verdict v;
    const auto t0 = Clock::now();
    EconomyParams p;
    p.steps = 2000;
    std::size_t dags = 0;
    std::size_t runs = 0;
    std::size_t loud = 0;
    for (const auto id : enumerate_configs(4)) {
        const auto net = config_to_network(id, 4);
        if (!is_dag(net)) continue;
        ++dags;
        for (const std::size_t population : {25, 50}) {
            for (std::uint64_t rep = 0; rep < 3; ++rep) {
                p.population = population;
                const auto r =
                    run(net, p, derive_seed(2013, id.mask, population, rep), {.fast_forward = false});
                ++runs;
                const bool silent = std::all_of(r.per_step_gdp.end() - 500, r.per_step_gdp.end(),
                                                [](Money g) { return g == 0; });
                if (!silent) {
                    ++loud;
                    v.require(false, "config " + std::to_string(id.mask) + " pop " +
                                         std::to_string(population) + " trades late");
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    v.require(dags == 542, "542 acyclic configurations (got " + std::to_string(dags) + ")");
    v.require(secs < 120.0, "time limit 120 s");
    v.note(std::to_string(runs) + " runs over " + std::to_string(dags) + " DAGs, " +
           std::to_string(loud) + " with late trades, " + std::to_string(secs) + " s");
    return v;
}

struct Criterion {
    const char* name;
    const char* title;
    std::function<Verdict(Context&)> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"enumeration", "Enumeration counts 4095 / 1048575 / 63", enumeration},
        {"cycles", "Cycle guarantee on dense 4-node configurations", cycle_guarantee},
        {"oracle", "is_dag agrees with cycle count on all 4095 configurations", oracle_equivalence},
        {"conservation", "Money and inventory conservation over 10,000 steps", conservation},
        {"determinism", "1 vs 8 workers give byte-identical sorted CSVs", determinism},
        {"fig3a", "Mean GDP nondecreasing in edge count (CI slack)", fig3a},
        {"fig3b", "Min GDP phase transition at 9 edges; max GDP nonincreasing", fig3b},
        {"scaling", "50/25 population mean ratio in [1.6, 2.4]", scaling},
        {"dag_quiescence", "Acyclic configurations silent over last 500 of 2000 steps",
         dag_quiescence},
    };

    CLI::App app{"Acceptance criteria"};
    std::vector<std::string> selected;
    Context ctx;
    ctx.workers = std::max(1U, std::thread::hardware_concurrency());
    std::string sweep_dir = "paper_sweep";
    bool prepare = false;
    app.add_option("criteria", selected, "Criteria to run (default: all)");
    app.add_option("--workers", ctx.workers, "Worker threads for the paper-scale sweep");
    app.add_option("--sweep-dir", sweep_dir, "Cache directory for the paper-scale sweep");
    app.add_flag("--prepare", prepare, "Only build the paper-scale sweep cache");
    CLI11_PARSE(app, argc, argv);
    ctx.sweep_dir = sweep_dir;

    if (prepare) {
        paper_records(ctx);
        return 0;
    }
    for (const auto& s : selected) {
        if (std::none_of(criteria.begin(), criteria.end(),
                         [&](const Criterion& c) { return s == c.name; })) {
            std::cerr << "unknown criterion " << s << '\n';
            return 2;
        }
    }

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end())
            continue;
        Verdict v;
        try {
            v = c.check(ctx);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << c.title << '\n';
        for (const auto& n : v.notes) std::cout << "    " << n << '\n';
        std::cout.flush();
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
