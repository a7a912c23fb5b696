#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hallci/iteration.hpp"

namespace hallci::cli {

// Exit codes, see docs/INTERFACES.md.
enum Exit : int {
  kOk = 0,
  kUsage = 1,        // bad flags, unknown config key, invalid value
  kInput = 2,        // unreadable config or profile file
  kInvariant = 3,    // hard invariant failure
  kNumerical = 4,    // band overflow, NSE abort
  kOutput = 5,       // cannot write the output directory
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value configuration. Keys are listed in docs/INTERFACES.md.
struct RunConfig {
  std::string preset = "hall-small";
  HallConfig hall;
  NseConfig nse;
  std::string output_dir = "out";
  std::uint64_t seed = 12345;
  int threads = 1;
  bool snapshots = false;

  RunConfig();
  // Resets the schedule and grid to a named preset.
  void apply_preset(const std::string& name);
  // Throws ConfigError on an unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  // "preset" is applied before every other key.
  void load(const std::string& path);
  void set_all(const std::vector<std::string>& assignments);
  // Every effective key, sorted.
  std::map<std::string, std::string> entries() const;
  std::string echo() const;
  HmhdConfig hmhd() const { return {hall, nse}; }
};

// %.17g, with "inf"/"nan" spelled out.
std::string fmt(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(int v);
  CsvWriter& operator<<(std::size_t v);
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  void end_row();
  std::string str() const { return out_; }

 private:
  void cell(const std::string& s);
  std::size_t width_, col_ = 0;
  std::string out_;
};

std::string hall_levels_csv(const std::vector<LevelReport>& levels);
std::string stress_parts_csv(const std::vector<LevelReport>& levels);
std::string energy_csv(const std::vector<EnergyRow>& rows);
std::string invariants_csv(const std::vector<LevelReport>& levels);
std::string hall_summary_csv(const HallRun& run);
std::string hmhd_csv(const HmhdRun& run);

// Writes text into dir/name, creating dir. Throws std::runtime_error.
void write_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace hallci::cli
