#ifndef XFORMNET_NETWORK_HPP
#define XFORMNET_NETWORK_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xformnet {

/// Thrown for structurally invalid networks (n < 2, self-loops, asymmetric
/// undirected edge sets, masks out of range).
class invalid_network : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an exhaustive analysis is requested on a graph that is too
/// large to search.
class too_large : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Edge-list parse failure; carries the 1-based line number.
class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct ResourceId {
    std::uint32_t index = 0;
    auto operator<=>(const ResourceId&) const = default;
};

/// b-bit binary label of a resource when the node count is 2^b (b >= 1),
/// most significant bit first. Empty otherwise.
std::optional<std::string> resource_label(ResourceId id, std::size_t node_count);

/// One directed edge input -> output; the technology an agent owns.
struct TransformationRule {
    ResourceId input;
    ResourceId output;
    auto operator<=>(const TransformationRule&) const = default;
};

enum class Directedness { directed, undirected };

std::string_view to_string(Directedness d);

/// Canonical configuration number.
///
/// Directed networks: bit k covers the k-th ordered pair (src, dst), src != dst,
/// in row-major order (0,1),(0,2),...,(0,n-1),(1,0),(1,2),...
/// Undirected-symmetric networks: bit k covers the k-th unordered pair i < j in
/// row-major order (0,1),(0,2),...,(1,2),...; each set bit stands for both
/// directions.
struct ConfigId {
    std::uint64_t mask = 0;
    auto operator<=>(const ConfigId&) const = default;
};

/// Largest node count for which configuration masks fit in 64 bits.
inline constexpr std::size_t max_config_nodes = 8;

/// Number of bit positions in a configuration mask.
std::size_t config_bits(std::size_t node_count, Directedness d);

/// Number of nonempty configurations, 2^bits - 1.
std::uint64_t config_count(std::size_t node_count, Directedness d);

/// Immutable directed simple graph over resource nodes 0..n-1.
///
/// Edges are kept sorted in row-major order with no duplicates. Undirected
/// networks store both directions of every edge.
class TransformationNetwork {
public:
    TransformationNetwork(std::size_t node_count, std::vector<TransformationRule> edges,
                          Directedness directedness = Directedness::directed);

    static TransformationNetwork complete(std::size_t node_count,
                                          Directedness directedness = Directedness::directed);

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    Directedness directedness() const noexcept { return directedness_; }
    const std::vector<TransformationRule>& edges() const noexcept { return edges_; }

    bool has_edge(std::size_t src, std::size_t dst) const noexcept;
    /// Bitset of successors of `node` (bit j set iff node -> j).
    std::uint64_t successors(std::size_t node) const noexcept { return out_[node]; }

    friend bool operator==(const TransformationNetwork&, const TransformationNetwork&) = default;

private:
    std::size_t node_count_;
    Directedness directedness_;
    std::vector<TransformationRule> edges_;
    std::vector<std::uint64_t> out_;
};

inline constexpr std::size_t max_network_nodes = 64;

/// |E| / (n(n-1)).
double density(const TransformationNetwork& net);
double density(std::size_t edge_count, std::size_t node_count);

TransformationNetwork config_to_network(ConfigId id, std::size_t node_count,
                                        Directedness d = Directedness::directed);
ConfigId network_to_config(const TransformationNetwork& net);

/// Ascending stream of nonempty configuration ids within [first, last].
/// Any sub-range can be constructed independently, so shards need no
/// coordination.
class ConfigRange {
public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = ConfigId;
        using difference_type = std::ptrdiff_t;
        using pointer = const ConfigId*;
        using reference = ConfigId;

        iterator() = default;
        explicit iterator(std::uint64_t mask) : mask_(mask) {}
        ConfigId operator*() const { return ConfigId{mask_}; }
        iterator& operator++() { ++mask_; return *this; }
        iterator operator++(int) { auto tmp = *this; ++mask_; return tmp; }
        bool operator==(const iterator&) const = default;

    private:
        std::uint64_t mask_ = 0;
    };

    ConfigRange(std::uint64_t first, std::uint64_t last);

    iterator begin() const { return iterator{first_}; }
    iterator end() const { return iterator{last_ + 1}; }
    std::uint64_t size() const noexcept { return last_ - first_ + 1; }
    std::uint64_t first() const noexcept { return first_; }
    std::uint64_t last() const noexcept { return last_; }

private:
    std::uint64_t first_;
    std::uint64_t last_;
};

/// Every nonempty configuration on `node_count` nodes.
ConfigRange enumerate_configs(std::size_t node_count, Directedness d = Directedness::directed);

inline constexpr std::size_t max_cycle_search_nodes = 8;

/// Number of distinct directed simple cycles (length >= 2, counted once per
/// rotation class). Throws too_large above max_cycle_search_nodes.
std::uint64_t count_simple_cycles(const TransformationNetwork& net);

/// Kahn's algorithm; independent of the cycle counter.
bool is_dag(const TransformationNetwork& net);

/// Edge-list text: header `n=<count> directed=<true|false>`, then one
/// `src dst` line per directed edge in row-major order.
std::string to_edge_list(const TransformationNetwork& net);
TransformationNetwork parse_edge_list(std::string_view text);
TransformationNetwork read_edge_list(std::istream& in);

}  // namespace xformnet

#endif  // XFORMNET_NETWORK_HPP
