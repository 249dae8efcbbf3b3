#include "xformnet/sweep.hpp"

#include "xformnet/random.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace xformnet {

namespace {

template <class T>
std::optional<T> parse_number(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<MaskRange> parse_mask_range(std::string_view text) {
    const auto dots = text.find("..");
    if (dots == std::string_view::npos) {
        return std::nullopt;
    }
    const auto first = parse_number<std::uint64_t>(trim(text.substr(0, dots)));
    const auto last = parse_number<std::uint64_t>(trim(text.substr(dots + 2)));
    if (!first || !last || *first == 0 || *first > *last) {
        return std::nullopt;
    }
    return MaskRange{*first, *last};
}

std::string to_string(const MaskRange& r) {
    return std::to_string(r.first) + ".." + std::to_string(r.last);
}

void SweepPlan::validate() const {
    if (n < 2 || n > max_config_nodes) {
        throw invalid_plan("n must be in [2, " + std::to_string(max_config_nodes) + "]");
    }
    if (populations.empty()) {
        throw invalid_plan("populations must be nonempty");
    }
    for (const auto p : populations) {
        if (p == 0) {
            throw invalid_plan("populations must be positive");
        }
    }
    if (replications == 0) {
        throw invalid_plan("replications must be at least 1");
    }
    EconomyParams probe = economy;
    probe.population = populations.front();
    try {
        probe.validate();
    } catch (const invalid_params& e) {
        throw invalid_plan(e.what());
    }
    const std::uint64_t total = config_count(n, directedness);
    std::uint64_t covered = total;
    if (config_range) {
        if (config_range->first == 0 || config_range->first > config_range->last ||
            config_range->last > total) {
            throw invalid_plan("config_range " + to_string(*config_range) + " outside [1, " +
                               std::to_string(total) + "]");
        }
        covered = config_range->last - config_range->first + 1;
    }
    if (sample && *sample == 0) {
        throw invalid_plan("sample must be positive");
    }
    if (!sample && !exhaustive && covered > exhaustive_limit) {
        throw invalid_plan(std::to_string(covered) +
                           " configurations requested; set sample=<count> or exhaustive=true");
    }
}

std::vector<std::uint64_t> SweepPlan::configs() const {
    validate();
    const MaskRange range = config_range.value_or(MaskRange{1, config_count(n, directedness)});
    const std::uint64_t size = range.last - range.first + 1;
    std::vector<std::uint64_t> masks;
    if (!sample || *sample >= size) {
        masks.reserve(size);
        for (const auto id : ConfigRange(range.first, range.last)) {
            masks.push_back(id.mask);
        }
        return masks;
    }
    Rng rng(mix64(master_seed ^ 0x73616d706c65ULL));
    std::unordered_set<std::uint64_t> seen;
    while (seen.size() < *sample) {
        seen.insert(range.first + rng.below(size));
    }
    masks.assign(seen.begin(), seen.end());
    std::sort(masks.begin(), masks.end());
    return masks;
}

std::string SweepPlan::canonical() const {
    std::ostringstream out;
    out << "n=" << n << '\n';
    out << "directed=" << (directedness == Directedness::directed ? "true" : "false") << '\n';
    out << "populations=";
    for (std::size_t i = 0; i < populations.size(); ++i) {
        out << (i ? "," : "") << populations[i];
    }
    out << '\n';
    out << "replications=" << replications << '\n';
    out << "steps=" << economy.steps << '\n';
    out << "burn_in=" << economy.burn_in << '\n';
    out << "price=" << economy.price << '\n';
    out << "initial_wealth=" << economy.initial_wealth << '\n';
    out << "endowment=" << to_string(economy.endowment) << '\n';
    out << "attempts_per_turn=" << economy.attempts_per_turn << '\n';
    out << "master_seed=" << master_seed << '\n';
    if (config_range) {
        out << "config_range=" << to_string(*config_range) << '\n';
    }
    if (sample) {
        out << "sample=" << *sample << '\n';
    }
    if (exhaustive) {
        out << "exhaustive=true\n";
    }
    return out.str();
}

std::uint64_t SweepPlan::hash() const {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

SweepPlan parse_plan(std::string_view text) {
    SweepPlan plan;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& what) -> void {
        throw invalid_plan("plan line " + std::to_string(line_no) + ": " + what);
    };
    const auto as_size = [&](std::string_view v) {
        const auto x = parse_number<std::size_t>(v);
        if (!x) fail("expected a non-negative integer, got `" + std::string(v) + "`");
        return *x;
    };
    const auto as_money = [&](std::string_view v) {
        const auto x = parse_number<Money>(v);
        if (!x) fail("expected an integer, got `" + std::string(v) + "`");
        return *x;
    };
    const auto as_bool = [&](std::string_view v) {
        if (v == "true") return true;
        if (v == "false") return false;
        fail("expected true or false, got `" + std::string(v) + "`");
        return false;
    };

    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail("expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "n") {
            plan.n = as_size(value);
        } else if (key == "directed") {
            plan.directedness = as_bool(value) ? Directedness::directed : Directedness::undirected;
        } else if (key == "populations") {
            plan.populations.clear();
            std::string_view rest = value;
            while (true) {
                const auto comma = rest.find(',');
                plan.populations.push_back(as_size(trim(rest.substr(0, comma))));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        } else if (key == "replications") {
            plan.replications = as_size(value);
        } else if (key == "steps") {
            plan.economy.steps = as_size(value);
        } else if (key == "burn_in") {
            plan.economy.burn_in = as_size(value);
        } else if (key == "price") {
            plan.economy.price = as_money(value);
        } else if (key == "initial_wealth") {
            plan.economy.initial_wealth = as_money(value);
        } else if (key == "endowment") {
            const auto e = parse_endowment(value);
            if (!e) fail("endowment must be own-output, own-input or none");
            plan.economy.endowment = *e;
        } else if (key == "attempts_per_turn") {
            plan.economy.attempts_per_turn = as_size(value);
        } else if (key == "master_seed") {
            const auto s = parse_number<std::uint64_t>(value);
            if (!s) fail("master_seed must be an unsigned integer");
            plan.master_seed = *s;
        } else if (key == "config_range") {
            const auto r = parse_mask_range(value);
            if (!r) fail("config_range must be A..B with 1 <= A <= B");
            plan.config_range = *r;
        } else if (key == "sample") {
            plan.sample = as_size(value);
        } else if (key == "exhaustive") {
            plan.exhaustive = as_bool(value);
        } else {
            fail("unknown key `" + std::string(key) + "`");
        }
    }
    plan.validate();
    return plan;
}

SweepPlan read_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open plan file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str());
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t config_id,
                          std::uint64_t population, std::uint64_t replication_index) {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ config_id);
    h = mix64(h ^ population);
    return mix64(h ^ replication_index);
}

std::vector<RunRecord> execute_sweep(const SweepPlan& plan, const SweepOptions& options) {
    const auto masks = plan.configs();
    std::vector<std::size_t> populations = plan.populations;
    std::sort(populations.begin(), populations.end());
    populations.erase(std::unique(populations.begin(), populations.end()), populations.end());

    const std::uint64_t per_config = populations.size() * plan.replications;
    const std::uint64_t total = masks.size() * per_config;
    std::vector<RunRecord> records(total);

    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> done{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    const auto work = [&] {
        // Jobs of one configuration are contiguous; reuse its network.
        std::optional<TransformationNetwork> net;
        std::uint64_t net_mask = 0;
        while (!failed.load(std::memory_order_relaxed)) {
            const std::uint64_t job = next.fetch_add(1, std::memory_order_relaxed);
            if (job >= total) {
                break;
            }
            try {
                const std::uint64_t mask = masks[job / per_config];
                const std::size_t population = populations[(job % per_config) / plan.replications];
                const std::size_t replication = job % plan.replications;
                if (!net || net_mask != mask) {
                    net = config_to_network(ConfigId{mask}, plan.n, plan.directedness);
                    net_mask = mask;
                }
                EconomyParams params = plan.economy;
                params.population = population;
                const std::uint64_t seed =
                    derive_seed(plan.master_seed, mask, population, replication);
                const RunResult result = run(*net, params, seed);

                RunRecord& rec = records[job];
                rec.config_id = mask;
                rec.n = plan.n;
                rec.edge_count = net->edge_count();
                rec.density = density(*net);
                rec.population = population;
                rec.replication = replication;
                rec.seed = seed;
                rec.mean_step_gdp = result.mean_step_gdp;
                rec.total_gdp = result.total_gdp;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
            done.fetch_add(1, std::memory_order_relaxed);
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, options.workers);
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    if (options.progress) {
        while (done.load() < total && !failed.load()) {
            options.progress(done.load(), total);
            std::this_thread::sleep_for(std::chrono::milliseconds(500));
        }
    }
    pool.clear();
    if (error) {
        std::rethrow_exception(error);
    }
    if (options.progress) {
        options.progress(total, total);
    }
    return records;
}

namespace {

struct GroupKey {
    std::size_t population;
    std::size_t edge_count;
    auto operator<=>(const GroupKey&) const = default;
};

GroupStats summarize(const std::vector<const ConfigMean*>& members, std::size_t edge_count,
                     double group_density, std::size_t population) {
    GroupStats g;
    g.edge_count = edge_count;
    g.density = group_density;
    g.population = population;
    g.config_count = members.size();
    g.min_gdp = members.front()->mean_gdp;
    g.max_gdp = members.front()->mean_gdp;
    double sum = 0.0;
    for (const auto* m : members) {
        sum += m->mean_gdp;
        g.min_gdp = std::min(g.min_gdp, m->mean_gdp);
        g.max_gdp = std::max(g.max_gdp, m->mean_gdp);
    }
    const double k = static_cast<double>(members.size());
    g.mean_of_means = sum / k;
    if (members.size() > 1) {
        double ss = 0.0;
        for (const auto* m : members) {
            const double d = m->mean_gdp - g.mean_of_means;
            ss += d * d;
        }
        g.ci95_half_width = 1.96 * std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
    }
    // Rounding can leave the mean an ulp outside [min, max] for constant groups.
    g.mean_of_means = std::clamp(g.mean_of_means, g.min_gdp, g.max_gdp);
    return g;
}

std::vector<GroupStats> group(const std::vector<ConfigMean>& means) {
    // `means` is sorted by (population, config), so members are in config order.
    std::map<GroupKey, std::vector<const ConfigMean*>> groups;
    std::map<GroupKey, double> densities;
    for (const auto& m : means) {
        const GroupKey key{m.population, m.edge_count};
        groups[key].push_back(&m);
        densities[key] = m.density;
    }
    std::vector<GroupStats> out;
    out.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        out.push_back(summarize(members, key.edge_count, densities[key], key.population));
    }
    return out;
}

}  // namespace

std::vector<ConfigMean> config_means(const std::vector<RunRecord>& records) {
    std::vector<const RunRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) {
        sorted.push_back(&r);
    }
    std::sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
        return std::tie(a->population, a->config_id, a->replication, a->seed) <
               std::tie(b->population, b->config_id, b->replication, b->seed);
    });
    std::vector<ConfigMean> means;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < sorted.size() && sorted[j]->population == sorted[i]->population &&
               sorted[j]->config_id == sorted[i]->config_id) {
            sum += sorted[j]->mean_step_gdp;
            ++j;
        }
        means.push_back({sorted[i]->config_id, sorted[i]->population, sorted[i]->edge_count,
                         sorted[i]->density, sum / static_cast<double>(j - i)});
        i = j;
    }
    return means;
}

std::vector<GroupStats> aggregate(const std::vector<RunRecord>& records, const WarningSink& warn) {
    auto groups = group(config_means(records));

    std::map<std::size_t, std::vector<std::size_t>> edges_by_population;
    std::vector<std::size_t> all_edges;
    for (const auto& g : groups) {
        edges_by_population[g.population].push_back(g.edge_count);
        all_edges.push_back(g.edge_count);
    }
    std::sort(all_edges.begin(), all_edges.end());
    all_edges.erase(std::unique(all_edges.begin(), all_edges.end()), all_edges.end());
    if (warn) {
        for (const auto& [population, present] : edges_by_population) {
            for (const auto e : all_edges) {
                if (!std::binary_search(present.begin(), present.end(), e)) {
                    warn("group edge_count=" + std::to_string(e) +
                         " population=" + std::to_string(population) +
                         " has no runs; excluded");
                }
            }
        }
    }

    std::sort(groups.begin(), groups.end(), [](const GroupStats& a, const GroupStats& b) {
        return std::tie(a.edge_count, a.population) < std::tie(b.edge_count, b.population);
    });
    return groups;
}

std::vector<GroupStats> aggregate_pooled(const std::vector<RunRecord>& records) {
    const auto per_population = config_means(records);
    // Average each configuration over the populations it was run at.
    std::map<std::uint64_t, std::vector<const ConfigMean*>> by_config;
    for (const auto& m : per_population) {
        by_config[m.config_id].push_back(&m);
    }
    std::vector<ConfigMean> pooled;
    pooled.reserve(by_config.size());
    for (const auto& [config, members] : by_config) {
        double sum = 0.0;
        for (const auto* m : members) {
            sum += m->mean_gdp;
        }
        pooled.push_back({config, 0, members.front()->edge_count, members.front()->density,
                          sum / static_cast<double>(members.size())});
    }
    auto groups = group(pooled);
    std::sort(groups.begin(), groups.end(), [](const GroupStats& a, const GroupStats& b) {
        return a.edge_count < b.edge_count;
    });
    return groups;
}

}  // namespace xformnet
