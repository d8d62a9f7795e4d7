#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace mtlab {

inline constexpr int kCsvFormatVersion = 1;

struct LabConfig {
  double tau_meas = 1e-12;
  double tau_num = 1e-9;
  double tau_root = 1e-13;
  double p = 2.0;
  std::uint64_t seed = 20240611;
  std::string outdir = "lab_out";
  int format_version = kCsvFormatVersion;

  // Experiment sizes.
  int corpus_size = 1000;
  int sharp_instances = 500;
  int sweep_restarts = 16;
  double chain_ratio = 0.75;
  int ring_subdivision = 2;
};

nlohmann::json config_to_json(const LabConfig& config);
/// Keys not present keep their defaults; unknown keys are a UsageError.
LabConfig config_from_json(const nlohmann::json& doc);
LabConfig load_config(const std::string& path);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed quantity
  double threshold = 0.0;  // what it is compared against
  std::string detail;
};

struct RunReport {
  std::string command;
  LabConfig config;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool all_passed() const;
  int exit_code() const { return all_passed() ? 0 : 1; }
  nlohmann::json to_json() const;
};

/// Fixed-column CSV body. Numbers use the shortest round-trip form.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  /// Mixed cells; strings are written unquoted and must not contain commas.
  void add_cells(const std::vector<std::string>& cells);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  bool all_finite() const { return finite_; }
  std::string body() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
  bool finite_ = true;
};

std::string format_number(double x);

/// "# ..." lines: tool, format version, command, config, timestamp.
std::string csv_header(const std::string& command, const LabConfig& config);

/// Header followed by body. Creates parent directories.
void write_csv(const std::string& path, const std::string& command, const LabConfig& config,
               const std::string& body);

/// Body of a file written by write_csv (header lines stripped).
std::string read_csv_body(const std::string& path);

}  // namespace mtlab
