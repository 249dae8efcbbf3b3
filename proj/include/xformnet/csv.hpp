#ifndef XFORMNET_CSV_HPP
#define XFORMNET_CSV_HPP

#include "xformnet/sweep.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace xformnet {

inline constexpr const char* tool_version = "0.1.0";

inline constexpr const char* results_header =
    "config_id,n,edges,density,population,replication,seed,mean_step_gdp,total_gdp";
inline constexpr const char* groups_header =
    "edge_count,density,population,mean_of_means,min_gdp,max_gdp,ci95_half_width,config_count";

/// Six significant digits, `%.6g`.
std::string format_real(double v);

/// Provenance written as the first line of every CSV.
struct CsvProvenance {
    std::uint64_t plan_hash = 0;
    std::uint64_t master_seed = 0;
};

std::string provenance_line(const CsvProvenance& p);

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records,
                       const CsvProvenance& p);
void write_groups_csv(std::ostream& out, const std::vector<GroupStats>& groups,
                      const CsvProvenance& p);
void write_trace_csv(std::ostream& out, const std::vector<Money>& per_step_gdp,
                     const CsvProvenance& p);

/// Reads a results CSV written by write_results_csv; `#` lines are skipped.
/// Throws std::runtime_error naming the offending line.
std::vector<RunRecord> read_results_csv(std::istream& in, CsvProvenance* provenance = nullptr);

}  // namespace xformnet

#endif  // XFORMNET_CSV_HPP
