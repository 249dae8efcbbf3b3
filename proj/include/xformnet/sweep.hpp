#ifndef XFORMNET_SWEEP_HPP
#define XFORMNET_SWEEP_HPP

#include "xformnet/economy.hpp"
#include "xformnet/network.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xformnet {

class invalid_plan : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inclusive mask range `first..last`.
struct MaskRange {
    std::uint64_t first = 1;
    std::uint64_t last = 1;
    auto operator<=>(const MaskRange&) const = default;
};

std::optional<MaskRange> parse_mask_range(std::string_view text);
std::string to_string(const MaskRange& r);

struct SweepPlan {
    std::size_t n = 4;
    Directedness directedness = Directedness::directed;
    std::vector<std::size_t> populations{25, 50};
    std::size_t replications = 20;
    /// population field is ignored; it is taken from `populations`.
    EconomyParams economy;
    std::uint64_t master_seed = 1;
    std::optional<MaskRange> config_range;
    /// When set, run this many distinct uniformly drawn masks instead of the
    /// whole range.
    std::optional<std::uint64_t> sample;
    /// Allows exhaustive sweeps above exhaustive_limit configurations.
    bool exhaustive = false;

    void validate() const;
    /// Configuration masks this plan covers, ascending.
    std::vector<std::uint64_t> configs() const;
    /// Canonical key=value rendering; the plan hash is taken over this text.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Sweeps larger than this many configurations must either sample or opt in
/// with `exhaustive`.
inline constexpr std::uint64_t exhaustive_limit = std::uint64_t{1} << 16;

/// Flat `key = value` plan file. Unknown keys are errors.
SweepPlan parse_plan(std::string_view text);
SweepPlan read_plan_file(const std::string& path);

/// Per-run seed. Chained SplitMix64 over (master_seed, config, population,
/// replication): h = mix64(master); h = mix64(h ^ config); h = mix64(h ^ population);
/// h = mix64(h ^ replication).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t config_id,
                          std::uint64_t population, std::uint64_t replication_index);

/// One replication of one configuration at one population.
struct RunRecord {
    std::uint64_t config_id = 0;
    std::size_t n = 0;
    std::size_t edge_count = 0;
    double density = 0.0;
    std::size_t population = 0;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    double mean_step_gdp = 0.0;
    Money total_gdp = 0;

    auto operator<=>(const RunRecord&) const = default;
};

struct SweepOptions {
    std::size_t workers = 1;
    /// Called from the coordinating thread with (done, total) as runs finish.
    std::function<void(std::uint64_t, std::uint64_t)> progress;
};

/// Runs every (config, population, replication) tuple of the plan. The
/// returned records are sorted by (config_id, population, replication) and do
/// not depend on the worker count.
std::vector<RunRecord> execute_sweep(const SweepPlan& plan, const SweepOptions& options = {});

struct GroupStats {
    std::size_t edge_count = 0;
    double density = 0.0;
    /// 0 for the pooled variant.
    std::size_t population = 0;
    double mean_of_means = 0.0;
    double min_gdp = 0.0;
    double max_gdp = 0.0;
    double ci95_half_width = 0.0;
    std::size_t config_count = 0;
};

using WarningSink = std::function<void(const std::string&)>;

/// Groups by (edge_count, population). Each configuration contributes the
/// mean of its replications' mean_step_gdp; a group reports the mean, min and
/// max of those and a normal-approximation 95% CI half-width
/// 1.96 * s / sqrt(k). The result depends only on the multiset of records.
/// An edge count present for one population but missing for another is
/// reported through `warn` and left out for that population.
std::vector<GroupStats> aggregate(const std::vector<RunRecord>& records,
                                  const WarningSink& warn = {});

/// Same statistics after first averaging each configuration's per-population
/// means; population is reported as 0.
std::vector<GroupStats> aggregate_pooled(const std::vector<RunRecord>& records);

/// Per-configuration mean over replications, keyed by (population, config).
struct ConfigMean {
    std::uint64_t config_id = 0;
    std::size_t population = 0;
    std::size_t edge_count = 0;
    double density = 0.0;
    double mean_gdp = 0.0;
};
std::vector<ConfigMean> config_means(const std::vector<RunRecord>& records);

}  // namespace xformnet

#endif  // XFORMNET_SWEEP_HPP
