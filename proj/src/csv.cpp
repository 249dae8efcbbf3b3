#include "xformnet/csv.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace xformnet {

std::string format_real(double v) {
    if (v == 0.0) {
        v = 0.0;  // no "-0"
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string provenance_line(const CsvProvenance& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# xformnet %s plan=%016" PRIx64 " master_seed=%" PRIu64,
                  tool_version, p.plan_hash, p.master_seed);
    return buf;
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records,
                       const CsvProvenance& p) {
    out << provenance_line(p) << '\n' << results_header << '\n';
    for (const auto& r : records) {
        out << r.config_id << ',' << r.n << ',' << r.edge_count << ',' << format_real(r.density)
            << ',' << r.population << ',' << r.replication << ',' << r.seed << ','
            << format_real(r.mean_step_gdp) << ',' << r.total_gdp << '\n';
    }
}

void write_groups_csv(std::ostream& out, const std::vector<GroupStats>& groups,
                      const CsvProvenance& p) {
    out << provenance_line(p) << '\n' << groups_header << '\n';
    for (const auto& g : groups) {
        out << g.edge_count << ',' << format_real(g.density) << ',' << g.population << ','
            << format_real(g.mean_of_means) << ',' << format_real(g.min_gdp) << ','
            << format_real(g.max_gdp) << ',' << format_real(g.ci95_half_width) << ','
            << g.config_count << '\n';
    }
}

void write_trace_csv(std::ostream& out, const std::vector<Money>& per_step_gdp,
                     const CsvProvenance& p) {
    out << provenance_line(p) << '\n' << "step,gdp\n";
    for (std::size_t t = 0; t < per_step_gdp.size(); ++t) {
        out << t + 1 << ',' << per_step_gdp[t] << '\n';
    }
}

namespace {

template <class T>
T field(std::string_view s, std::size_t line, const char* name) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error("results line " + std::to_string(line) + ": bad " + name +
                                 " `" + std::string(s) + "`");
    }
    return v;
}

}  // namespace

std::vector<RunRecord> read_results_csv(std::istream& in, CsvProvenance* provenance) {
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (provenance) {
                std::istringstream tokens(line);
                std::string tok;
                while (tokens >> tok) {
                    if (tok.starts_with("plan=")) {
                        provenance->plan_hash = std::stoull(tok.substr(5), nullptr, 16);
                    } else if (tok.starts_with("master_seed=")) {
                        provenance->master_seed = std::stoull(tok.substr(12));
                    }
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != results_header) {
                throw std::runtime_error("results line " + std::to_string(line_no) +
                                         ": expected header `" + results_header + "`");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> cols;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            cols.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        if (cols.size() != 9) {
            throw std::runtime_error("results line " + std::to_string(line_no) + ": expected 9 "
                                     "columns, got " + std::to_string(cols.size()));
        }
        RunRecord r;
        r.config_id = field<std::uint64_t>(cols[0], line_no, "config_id");
        r.n = field<std::size_t>(cols[1], line_no, "n");
        r.edge_count = field<std::size_t>(cols[2], line_no, "edges");
        r.density = field<double>(cols[3], line_no, "density");
        r.population = field<std::size_t>(cols[4], line_no, "population");
        r.replication = field<std::size_t>(cols[5], line_no, "replication");
        r.seed = field<std::uint64_t>(cols[6], line_no, "seed");
        r.mean_step_gdp = field<double>(cols[7], line_no, "mean_step_gdp");
        r.total_gdp = field<Money>(cols[8], line_no, "total_gdp");
        records.push_back(r);
    }
    if (!header_seen) {
        throw std::runtime_error("results CSV has no header row");
    }
    return records;
}

}  // namespace xformnet
