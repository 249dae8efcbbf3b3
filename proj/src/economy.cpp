#include "xformnet/economy.hpp"

#include <numeric>

namespace xformnet {

std::string_view to_string(Endowment e) {
    switch (e) {
    case Endowment::own_output: return "own-output";
    case Endowment::own_input: return "own-input";
    case Endowment::none: return "none";
    }
    return "?";
}

std::optional<Endowment> parse_endowment(std::string_view s) {
    if (s == "own-output") return Endowment::own_output;
    if (s == "own-input") return Endowment::own_input;
    if (s == "none") return Endowment::none;
    return std::nullopt;
}

void EconomyParams::validate() const {
    if (population == 0) {
        throw invalid_params("population must be positive");
    }
    if (price <= 0) {
        throw invalid_params("price must be positive");
    }
    if (initial_wealth < 0) {
        throw invalid_params("initial wealth must be non-negative");
    }
    if (burn_in >= steps) {
        throw invalid_params("burn_in (" + std::to_string(burn_in) + ") must be below steps (" +
                             std::to_string(steps) + ")");
    }
    if (attempts_per_turn == 0) {
        throw invalid_params("attempts_per_turn must be positive");
    }
}

EconomyState::EconomyState(const TransformationNetwork& net, const EconomyParams& params,
                           std::uint64_t seed)
    : params_(params), resource_count_(net.node_count()), rng_(seed) {
    params_.validate();
    const auto& rules = net.edges();
    if (rules.empty()) {
        throw no_technology("network has no transformation rules to assign");
    }
    agents_.reserve(params_.population);
    for (std::uint32_t i = 0; i < params_.population; ++i) {
        Agent a;
        a.id = i;
        a.rule = rules[rng_.below(rules.size())];
        a.wealth = params_.initial_wealth;
        a.inventory.assign(resource_count_, 0);
        switch (params_.endowment) {
        case Endowment::own_output: a.inventory[a.rule.output.index] = 1; break;
        case Endowment::own_input: a.inventory[a.rule.input.index] = 1; break;
        case Endowment::none: break;
        }
        agents_.push_back(std::move(a));
    }
    order_.resize(agents_.size());
    std::iota(order_.begin(), order_.end(), 0U);
}

void EconomyState::set_agents(std::vector<Agent> agents) {
    for (const auto& a : agents) {
        if (a.inventory.size() != resource_count_ || a.rule.input.index >= resource_count_ ||
            a.rule.output.index >= resource_count_ || a.rule.input == a.rule.output) {
            throw std::invalid_argument("agent " + std::to_string(a.id) + " is malformed");
        }
    }
    agents_ = std::move(agents);
    order_.resize(agents_.size());
    std::iota(order_.begin(), order_.end(), 0U);
}

Money EconomyState::total_wealth() const {
    Money total = 0;
    for (const auto& a : agents_) {
        total += a.wealth;
    }
    return total;
}

std::vector<std::uint64_t> EconomyState::units_by_resource() const {
    std::vector<std::uint64_t> units(resource_count_, 0);
    for (const auto& a : agents_) {
        for (std::size_t r = 0; r < resource_count_; ++r) {
            units[r] += a.inventory[r];
        }
    }
    return units;
}

std::uint64_t EconomyState::total_units() const {
    const auto units = units_by_resource();
    return std::accumulate(units.begin(), units.end(), std::uint64_t{0});
}

Money EconomyState::step() {
    const std::size_t n = agents_.size();
    const Money price = params_.price;
    Money gdp = 0;
    std::size_t trades = 0;
    rng_.shuffle(std::span<std::uint32_t>(order_));
    for (const std::uint32_t buyer_index : order_) {
        Agent& buyer = agents_[buyer_index];
        const auto wanted = buyer.rule.input.index;
        if (n < 2 || buyer.inventory[wanted] > 0 || buyer.wealth <= price) {
            continue;
        }
        for (std::size_t attempt = 0; attempt < params_.attempts_per_turn; ++attempt) {
            auto seller_index = static_cast<std::uint32_t>(rng_.below(n - 1));
            if (seller_index >= buyer_index) {
                ++seller_index;
            }
            Agent& seller = agents_[seller_index];
            if (seller.inventory[wanted] == 0) {
                continue;
            }
            --seller.inventory[wanted];
            seller.wealth += price;
            buyer.wealth -= price;
            // Bought input is transformed on the spot.
            ++buyer.inventory[buyer.rule.output.index];
            gdp += price;
            ++trades;
            break;
        }
    }
    ++step_index_;
    trades_last_step_ = trades;
    return gdp;
}

bool EconomyState::frozen() const {
    if (agents_.size() < 2) {
        return true;
    }
    const auto units = units_by_resource();
    for (const auto& a : agents_) {
        const auto wanted = a.rule.input.index;
        if (a.inventory[wanted] == 0 && a.wealth > params_.price && units[wanted] > 0) {
            return false;
        }
    }
    return true;
}

EconomyState init_economy(const TransformationNetwork& net, const EconomyParams& params,
                          std::uint64_t seed) {
    return EconomyState(net, params, seed);
}

double window_mean(Money total, std::size_t window_steps) {
    return window_steps == 0 ? 0.0
                             : static_cast<double>(total) / static_cast<double>(window_steps);
}

RunResult run(const TransformationNetwork& net, const EconomyParams& params, std::uint64_t seed,
              RunOptions options) {
    EconomyState state(net, params, seed);
    RunResult result;
    result.per_step_gdp.assign(params.steps, 0);
    for (std::size_t t = 0; t < params.steps; ++t) {
        const Money gdp = state.step();
        result.per_step_gdp[t] = gdp;
        if (options.fast_forward && gdp == 0 && state.frozen()) {
            break;
        }
    }
    result.window_steps = params.steps - params.burn_in;
    for (std::size_t t = params.burn_in; t < params.steps; ++t) {
        result.total_gdp += result.per_step_gdp[t];
    }
    result.mean_step_gdp = window_mean(result.total_gdp, result.window_steps);
    return result;
}

}  // namespace xformnet
