#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "towermpc/analysis.hpp"
#include "towermpc/closed_loop.hpp"
#include "towermpc/qlpv.hpp"

namespace towermpc {

/// Raised for unreadable or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const;  // throws IoError when absent
  std::vector<double> values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Column names carry their unit as a suffix, e.g. omega_r[rad/s].
void write_sim_csv(const std::filesystem::path& path, const SimResult& r);
CsvTable sim_csv_table(const SimResult& r);

/// Config-file syntax: a `[section]` header, then `key = value` lines; `comments` are
/// written as `# key: value`. Non-numeric values are quoted.
void write_metadata(const std::filesystem::path& path, const std::string& section,
                    const std::vector<std::pair<std::string, std::string>>& entries,
                    const std::map<std::string, std::string>& comments);

void write_grid_csv(const std::filesystem::path& path, const ModelGrid& grid);
ModelGrid read_grid_csv(const std::filesystem::path& path);

void write_bode_csv(const std::filesystem::path& path, const FrequencyResponse& nominal,
                    const std::vector<std::pair<double, FrequencyResponse>>& demod);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& s, std::size_t stride);
void write_cycles_csv(const std::filesystem::path& path, const CycleSet& cycles);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& h);

/// Numbers with enough digits to round-trip a double.
std::string format_double(double v);

}  // namespace towermpc
