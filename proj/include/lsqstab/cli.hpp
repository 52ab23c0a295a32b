/**
 * @file cli.hpp
 * @brief Run configuration, command dispatch and record emission for the lsqstab tool.
 *
 * Exit status: 0 success, 1 validation error, 2 numerical or I/O failure.
 */
#pragma once

#include "lsqstab/experiments.hpp"
#include "lsqstab/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsqstab::cli {

enum class Command {
  KofM,
  Budget,
  TailBound,
  McTail,
  Fit,
  ErrorVsM,
  OptimalM,
  NoiselessBound,
  NoisyBound,
  DetStability,
};

enum class OutputFormat { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitFailure = 2;

std::string command_name(Command c);
Command parse_command(std::string_view name);

struct RunConfig {
  Command command = Command::Budget;
  std::string family = "legendre";
  /// Measure for piecewise-constant families ("uniform" or "chebyshev"); must match the family otherwise.
  std::optional<std::string> measure;
  std::string f = "f1";
  std::vector<int> n;
  std::vector<int> m;
  double delta = 0.5;
  double r = 1.0;
  double sigma = 0.0;
  /// Unset: command default (500 mc-tail, 50 optimal-m, 200 bound experiments, 1 fit).
  std::optional<int> trials;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  OutputFormat format = OutputFormat::Csv;
  /// Worker threads; 0 uses all hardware threads.
  int jobs = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json config_to_json(const RunConfig& config);
/// Throws InvalidArgument naming the offending field.
RunConfig config_from_json(const nlohmann::json& j);

/// "25,50,100", "1:199" and "1:199:2" (inclusive ranges) may be mixed.
std::vector<int> parse_int_list(std::string_view text);

/// Parses argv. Options given on the command line override values from --config.
/// Throws InvalidArgument on malformed input.
RunConfig parse_args(int argc, const char* const* argv);

/// Checks the fields each command needs; throws InvalidArgument with an actionable message.
void validate(const RunConfig& config);

/// Executes a validated config: writes the output file (when one is named) and prints a
/// one-line summary on `out`. Library exceptions propagate.
void execute(const RunConfig& config, std::ostream& out);

/// parse_args + validate + execute with exceptions mapped to exit codes; messages go to `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Fixed CSV header.
inline constexpr std::string_view kCsvHeader = "experiment,family,measure,f,n,m,seed,trial,error,gap,bounds";

/// Header plus one row per record; floats with 17 significant digits, bounds as name=value;...
std::string records_to_csv(const std::vector<ExperimentRecord>& records);
/// JSON array of objects with the CSV field names; bounds is a nested object.
std::string records_to_json(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_csv(std::string_view text);
std::vector<ExperimentRecord> records_from_json(std::string_view text);

/// Writes records in the given format. Throws InvalidArgument for an empty record set
/// and IoError if the file cannot be written.
void emit_records(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path);

}  // namespace lsqstab::cli
