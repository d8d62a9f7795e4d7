#include "mtlab/lab.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtlab/error.hpp"
#include "mtlab/io.hpp"

namespace mtlab {

nlohmann::json config_to_json(const LabConfig& c) {
  return {{"tau_meas", c.tau_meas},
          {"tau_num", c.tau_num},
          {"tau_root", c.tau_root},
          {"p", c.p},
          {"seed", c.seed},
          {"outdir", c.outdir},
          {"format_version", c.format_version},
          {"corpus_size", c.corpus_size},
          {"sharp_instances", c.sharp_instances},
          {"sweep_restarts", c.sweep_restarts},
          {"chain_ratio", c.chain_ratio},
          {"ring_subdivision", c.ring_subdivision}};
}

LabConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw UsageError("config: expected a JSON object");
  LabConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "tau_meas") {
        c.tau_meas = value.get<double>();
      } else if (key == "tau_num") {
        c.tau_num = value.get<double>();
      } else if (key == "tau_root") {
        c.tau_root = value.get<double>();
      } else if (key == "p") {
        c.p = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "outdir") {
        c.outdir = value.get<std::string>();
      } else if (key == "format_version") {
        c.format_version = value.get<int>();
      } else if (key == "corpus_size") {
        c.corpus_size = value.get<int>();
      } else if (key == "sharp_instances") {
        c.sharp_instances = value.get<int>();
      } else if (key == "sweep_restarts") {
        c.sweep_restarts = value.get<int>();
      } else if (key == "chain_ratio") {
        c.chain_ratio = value.get<double>();
      } else if (key == "ring_subdivision") {
        c.ring_subdivision = value.get<int>();
      } else {
        throw UsageError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (c.format_version != kCsvFormatVersion) {
    throw UsageError("config: unsupported format_version " + std::to_string(c.format_version));
  }
  if (c.tau_num < 0.0 || c.tau_meas < 0.0 || c.tau_root < 0.0) throw UsageError("config: negative tolerance");
  if (c.corpus_size < 1 || c.sharp_instances < 1 || c.sweep_restarts < 1) {
    throw UsageError("config: sizes must be positive");
  }
  return c;
}

LabConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

bool RunReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  }
  return {{"command", command},
          {"config", config_to_json(config)},
          {"checks", checks_json},
          {"passed", all_passed()},
          {"seconds", seconds}};
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) finite_ = false;
    cells.push_back(format_number(v));
  }
  add_cells(cells);
}

void CsvTable::add_cells(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) {
    throw UsageError("csv: row has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(columns_.size()));
  }
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  rows_.push_back(std::move(line));
}

std::string CsvTable::body() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

std::string csv_header(const std::string& command, const LabConfig& config) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::ostringstream os;
  os << "# mtlab csv format " << config.format_version << "\n";
  os << "# command: " << command << "\n";
  os << "# config: " << config_to_json(config).dump() << "\n";
  os << "# generated: " << stamp << "\n";
  return os.str();
}

void write_csv(const std::string& path, const std::string& command, const LabConfig& config,
               const std::string& body) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << csv_header(command, config) << body;
}

std::string read_csv_body(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::string line;
  std::string body;
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '#') continue;
    body += line;
    body += '\n';
  }
  return body;
}

}  // namespace mtlab
