#ifndef XFORMNET_ECONOMY_HPP
#define XFORMNET_ECONOMY_HPP

#include "xformnet/network.hpp"
#include "xformnet/random.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xformnet {

/// Integer money units. Price, wealth and GDP are all whole units so the
/// conservation checks are exact.
using Money = std::int64_t;

class no_technology : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class invalid_params : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// What each agent holds at step 0.
enum class Endowment {
    own_output,  ///< one unit of its rule's output
    own_input,   ///< one unit of its rule's input
    none,
};

std::string_view to_string(Endowment e);
std::optional<Endowment> parse_endowment(std::string_view s);

struct EconomyParams {
    std::size_t population = 50;
    Money price = 1;
    Money initial_wealth = 10;
    Endowment endowment = Endowment::own_output;
    std::size_t steps = 1000;
    std::size_t burn_in = 10;
    /// Seller draws a buyer may make per activation before giving up.
    std::size_t attempts_per_turn = 1;

    /// Throws invalid_params.
    void validate() const;
};

struct Agent {
    std::uint32_t id = 0;
    TransformationRule rule;
    Money wealth = 0;
    /// Unit count per resource index.
    std::vector<std::uint32_t> inventory;

    bool holds(ResourceId r) const { return inventory[r.index] > 0; }
};

/// Agent population plus its owned random stream. Confined to one thread.
class EconomyState {
public:
    EconomyState(const TransformationNetwork& net, const EconomyParams& params, std::uint64_t seed);

    const std::vector<Agent>& agents() const noexcept { return agents_; }
    std::size_t step_index() const noexcept { return step_index_; }
    std::size_t resource_count() const noexcept { return resource_count_; }
    std::size_t trades_last_step() const noexcept { return trades_last_step_; }

    Money total_wealth() const;
    std::uint64_t total_units() const;
    /// Units of each resource across all agents.
    std::vector<std::uint64_t> units_by_resource() const;

    /// Runs one step of the baseline trade protocol and returns the sum of
    /// transaction prices executed during it.
    Money step();

    /// True when no trade can happen in any future step: every agent either
    /// holds its input, cannot afford the price, or wants a resource nobody
    /// else holds. Nothing changes state without a trade, so this is final.
    bool frozen() const;

    /// Test hook: replace agents wholesale. Rules must reference valid nodes
    /// and inventories must have one slot per resource.
    void set_agents(std::vector<Agent> agents);

private:
    EconomyParams params_;
    std::size_t resource_count_;
    std::vector<Agent> agents_;
    std::vector<std::uint32_t> order_;
    Rng rng_;
    std::size_t step_index_ = 0;
    std::size_t trades_last_step_ = 0;
};

EconomyState init_economy(const TransformationNetwork& net, const EconomyParams& params,
                          std::uint64_t seed);

struct RunResult {
    std::vector<Money> per_step_gdp;
    /// Window (burn_in, steps]: steps - burn_in steps.
    std::size_t window_steps = 0;
    Money total_gdp = 0;
    double mean_step_gdp = 0.0;
};

struct RunOptions {
    /// Stop simulating once frozen() holds and fill the remaining steps with
    /// zero. The resulting series is identical to stepping to the end.
    bool fast_forward = true;
};

RunResult run(const TransformationNetwork& net, const EconomyParams& params, std::uint64_t seed,
              RunOptions options = {});

/// Mean over a window of a GDP series given its total.
double window_mean(Money total, std::size_t window_steps);

}  // namespace xformnet

#endif  // XFORMNET_ECONOMY_HPP
