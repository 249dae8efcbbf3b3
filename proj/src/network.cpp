#include "xformnet/network.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <istream>
#include <iterator>
#include <sstream>

namespace xformnet {

parse_error::parse_error(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::optional<std::string> resource_label(ResourceId id, std::size_t node_count) {
    if (node_count < 2 || !std::has_single_bit(node_count)) {
        return std::nullopt;
    }
    const auto bits = static_cast<std::size_t>(std::countr_zero(node_count));
    std::string label(bits, '0');
    for (std::size_t b = 0; b < bits; ++b) {
        if (id.index >> b & 1U) {
            label[bits - 1 - b] = '1';
        }
    }
    return label;
}

std::string_view to_string(Directedness d) {
    return d == Directedness::directed ? "directed" : "undirected";
}

std::size_t config_bits(std::size_t node_count, Directedness d) {
    const std::size_t ordered = node_count * (node_count - 1);
    return d == Directedness::directed ? ordered : ordered / 2;
}

namespace {

void require_config_nodes(std::size_t node_count) {
    if (node_count < 2) {
        throw invalid_network("node count must be at least 2, got " + std::to_string(node_count));
    }
    if (node_count > max_config_nodes) {
        throw too_large("configuration masks support at most " + std::to_string(max_config_nodes) +
                        " nodes, got " + std::to_string(node_count));
    }
}

std::uint64_t full_mask(std::size_t bits) {
    return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// Bit position of the ordered pair (src, dst) in a directed mask.
std::size_t directed_bit(std::size_t src, std::size_t dst, std::size_t n) {
    return src * (n - 1) + (dst < src ? dst : dst - 1);
}

// Bit position of the unordered pair i < j in an undirected mask.
std::size_t undirected_bit(std::size_t i, std::size_t j, std::size_t n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

std::uint64_t config_count(std::size_t node_count, Directedness d) {
    require_config_nodes(node_count);
    return full_mask(config_bits(node_count, d));
}

TransformationNetwork::TransformationNetwork(std::size_t node_count,
                                             std::vector<TransformationRule> edges,
                                             Directedness directedness)
    : node_count_(node_count), directedness_(directedness), edges_(std::move(edges)),
      out_(node_count, 0) {
    if (node_count_ < 2) {
        throw invalid_network("node count must be at least 2, got " + std::to_string(node_count_));
    }
    if (node_count_ > max_network_nodes) {
        throw invalid_network("node count above " + std::to_string(max_network_nodes));
    }
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        if (e.input.index >= node_count_ || e.output.index >= node_count_) {
            throw invalid_network("edge " + std::to_string(e.input.index) + "->" +
                                  std::to_string(e.output.index) + " references a missing node");
        }
        if (e.input == e.output) {
            throw invalid_network("self-loop on node " + std::to_string(e.input.index));
        }
        if (i > 0 && edges_[i - 1] == e) {
            throw invalid_network("duplicate edge " + std::to_string(e.input.index) + "->" +
                                  std::to_string(e.output.index));
        }
        out_[e.input.index] |= std::uint64_t{1} << e.output.index;
    }
    if (directedness_ == Directedness::undirected) {
        for (const auto& e : edges_) {
            if (!has_edge(e.output.index, e.input.index)) {
                throw invalid_network("undirected network lacks reverse of edge " +
                                      std::to_string(e.input.index) + "->" +
                                      std::to_string(e.output.index));
            }
        }
    }
}

TransformationNetwork TransformationNetwork::complete(std::size_t node_count,
                                                      Directedness directedness) {
    std::vector<TransformationRule> edges;
    for (std::uint32_t s = 0; s < node_count; ++s) {
        for (std::uint32_t t = 0; t < node_count; ++t) {
            if (s != t) {
                edges.push_back({{s}, {t}});
            }
        }
    }
    return TransformationNetwork(node_count, std::move(edges), directedness);
}

bool TransformationNetwork::has_edge(std::size_t src, std::size_t dst) const noexcept {
    return src < node_count_ && dst < node_count_ && (out_[src] >> dst & 1U);
}

double density(std::size_t edge_count, std::size_t node_count) {
    if (node_count < 2) {
        throw invalid_network("density needs at least 2 nodes");
    }
    return static_cast<double>(edge_count) / static_cast<double>(node_count * (node_count - 1));
}

double density(const TransformationNetwork& net) {
    return density(net.edge_count(), net.node_count());
}

TransformationNetwork config_to_network(ConfigId id, std::size_t n, Directedness d) {
    require_config_nodes(n);
    const std::size_t bits = config_bits(n, d);
    if (id.mask == 0 || id.mask > full_mask(bits)) {
        throw invalid_network("config id " + std::to_string(id.mask) + " outside [1, " +
                              std::to_string(full_mask(bits)) + "] for n=" + std::to_string(n) +
                              " " + std::string(to_string(d)));
    }
    std::vector<TransformationRule> edges;
    edges.reserve(static_cast<std::size_t>(std::popcount(id.mask)) * 2);
    for (std::uint32_t s = 0; s < n; ++s) {
        for (std::uint32_t t = 0; t < n; ++t) {
            if (s == t) {
                continue;
            }
            const std::size_t bit = d == Directedness::directed
                                        ? directed_bit(s, t, n)
                                        : undirected_bit(std::min(s, t), std::max(s, t), n);
            if (id.mask >> bit & 1U) {
                edges.push_back({{s}, {t}});
            }
        }
    }
    return TransformationNetwork(n, std::move(edges), d);
}

ConfigId network_to_config(const TransformationNetwork& net) {
    const std::size_t n = net.node_count();
    require_config_nodes(n);
    std::uint64_t mask = 0;
    for (const auto& e : net.edges()) {
        const std::size_t s = e.input.index;
        const std::size_t t = e.output.index;
        if (net.directedness() == Directedness::directed) {
            mask |= std::uint64_t{1} << directed_bit(s, t, n);
        } else if (s < t) {
            mask |= std::uint64_t{1} << undirected_bit(s, t, n);
        }
    }
    return ConfigId{mask};
}

ConfigRange::ConfigRange(std::uint64_t first, std::uint64_t last) : first_(first), last_(last) {
    if (first_ == 0 || first_ > last_) {
        throw std::invalid_argument("config range must satisfy 1 <= first <= last");
    }
    if (last_ == ~std::uint64_t{0}) {
        throw std::invalid_argument("config range end overflows");
    }
}

ConfigRange enumerate_configs(std::size_t node_count, Directedness d) {
    return ConfigRange(1, config_count(node_count, d));
}

namespace {

// Counts simple paths start -> ... -> current that close back on start, using
// only vertices above start. Each cycle is found exactly once from its
// smallest vertex.
std::uint64_t close_cycles(const TransformationNetwork& net, std::size_t start,
                           std::size_t current, std::uint64_t visited) {
    std::uint64_t found = 0;
    std::uint64_t next = net.successors(current);
    while (next) {
        const auto v = static_cast<std::size_t>(std::countr_zero(next));
        next &= next - 1;
        if (v == start) {
            ++found;
        } else if (v > start && !(visited >> v & 1U)) {
            found += close_cycles(net, start, v, visited | std::uint64_t{1} << v);
        }
    }
    return found;
}

}  // namespace

std::uint64_t count_simple_cycles(const TransformationNetwork& net) {
    if (net.node_count() > max_cycle_search_nodes) {
        throw too_large("simple-cycle search limited to " +
                        std::to_string(max_cycle_search_nodes) + " nodes, got " +
                        std::to_string(net.node_count()));
    }
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < net.node_count(); ++s) {
        total += close_cycles(net, s, s, std::uint64_t{1} << s);
    }
    return total;
}

bool is_dag(const TransformationNetwork& net) {
    const std::size_t n = net.node_count();
    std::vector<std::size_t> in_degree(n, 0);
    for (const auto& e : net.edges()) {
        ++in_degree[e.output.index];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (in_degree[v] == 0) {
            ready.push_back(v);
        }
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.back();
        ready.pop_back();
        ++removed;
        for (const auto& e : net.edges()) {
            if (e.input.index == v && --in_degree[e.output.index] == 0) {
                ready.push_back(e.output.index);
            }
        }
    }
    return removed == n;
}

std::string to_edge_list(const TransformationNetwork& net) {
    std::string out = "n=" + std::to_string(net.node_count()) + " directed=" +
                      (net.directedness() == Directedness::directed ? "true" : "false") + "\n";
    for (const auto& e : net.edges()) {
        out += std::to_string(e.input.index);
        out += ' ';
        out += std::to_string(e.output.index);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

TransformationNetwork parse_edge_list(std::string_view text) {
    std::optional<std::size_t> n;
    Directedness d = Directedness::directed;
    std::vector<TransformationRule> edges;
    std::vector<std::size_t> edge_lines;
    std::size_t line_no = 0;

    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens.front().front() == '#') {
            continue;
        }
        if (!n) {
            if (tokens.size() != 2 || !tokens[0].starts_with("n=") ||
                !tokens[1].starts_with("directed=")) {
                throw parse_error(line_no, "expected header `n=<count> directed=<bool>`");
            }
            const auto count = parse_uint(tokens[0].substr(2));
            if (!count || *count < 2 || *count > max_network_nodes) {
                throw parse_error(line_no, "node count must be an integer in [2, " +
                                               std::to_string(max_network_nodes) + "]");
            }
            const auto flag = tokens[1].substr(9);
            if (flag == "true") {
                d = Directedness::directed;
            } else if (flag == "false") {
                d = Directedness::undirected;
            } else {
                throw parse_error(line_no, "directed must be true or false");
            }
            n = static_cast<std::size_t>(*count);
            continue;
        }
        if (tokens.size() != 2) {
            throw parse_error(line_no, "expected `src dst`");
        }
        const auto src = parse_uint(tokens[0]);
        const auto dst = parse_uint(tokens[1]);
        if (!src || !dst) {
            throw parse_error(line_no, "node ids must be non-negative integers");
        }
        if (*src >= *n || *dst >= *n) {
            throw parse_error(line_no, "node id out of range for n=" + std::to_string(*n));
        }
        if (*src == *dst) {
            throw parse_error(line_no, "self-loop not allowed");
        }
        const TransformationRule rule{{static_cast<std::uint32_t>(*src)},
                                      {static_cast<std::uint32_t>(*dst)}};
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (edges[i] == rule) {
                throw parse_error(line_no, "duplicate of edge on line " +
                                               std::to_string(edge_lines[i]));
            }
        }
        edges.push_back(rule);
        edge_lines.push_back(line_no);
    }
    if (!n) {
        throw parse_error(line_no == 0 ? 1 : line_no, "missing header");
    }
    try {
        return TransformationNetwork(*n, std::move(edges), d);
    } catch (const invalid_network& e) {
        throw parse_error(line_no, e.what());
    }
}

TransformationNetwork read_edge_list(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_edge_list(text);
}

}  // namespace xformnet
