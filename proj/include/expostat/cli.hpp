#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expostat/exact_arith.hpp"

namespace expostat::cli {

enum class Command { verify, simulate, converge, race, all };
enum class OutputFormat { json, csv, pretty };

/// Environment variable that overrides the default seed (decimal integer).
inline constexpr const char* kSeedEnvVar = "EXPOSTAT_SEED";
inline constexpr std::uint64_t kDefaultSeed = 20170601;

struct RunConfig {
  Command command = Command::all;

  // verify
  unsigned max_n = 12;
  unsigned max_r = 4;
  std::vector<Rational> s_grid;
  unsigned max_n_maximum = 30;
  unsigned max_integer_s = 15;
  bool timing = false;

  // simulate / race
  std::uint64_t seed = kDefaultSeed;
  std::size_t replicates = 100000;
  std::size_t moment_replicates = 1000000;
  unsigned sim_max_n = 6;
  std::optional<std::string> dump_dir;

  // converge
  std::vector<std::string> targets;
  std::vector<unsigned> n_list;

  // race
  unsigned race_n = 3;
  unsigned race_k = 2;
  unsigned race_r = 1;
  Rational race_s = Rational(1);

  OutputFormat format = OutputFormat::json;
  std::optional<std::string> output_path;
  unsigned threads = 0;

  /// Set when --help was requested; run() prints it and exits 0.
  std::optional<std::string> help;
  /// Test hook: corrupts one identity report so the exit-code path can be checked.
  bool inject_fault = false;
};

/// Parses arguments (without the program name). Throws UsageError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Exit code: 0 when every verdict passes, 1 on any mismatch or failed test.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run, mapping usage errors to exit code 2.
int main_entry(int argc, const char* const* argv);

}  // namespace expostat::cli
