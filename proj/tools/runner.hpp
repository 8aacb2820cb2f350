#pragma once

// Mode dispatch, CSV tables and the JSON run manifest.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "run_config.hpp"

namespace z2thermo::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitError = 2;
inline constexpr int kManifestSchemaVersion = 1;

/// Column order of every quench table.
const std::vector<std::string>& csv_columns();
std::string csv_header();
/// One table line; numbers with 17 significant digits, support_check as true/false.
std::string csv_row(const QuenchReport& r);
void write_table(const std::filesystem::path& path, const std::vector<QuenchReport>& rows);

struct OracleDifference {
  double mu_f = 0.0;
  double beta = 0.0;
  std::string quantity;
  double production = 0.0;
  double oracle = 0.0;
  double abs_difference = 0.0;
};

/// Production run and brute-force oracle at one point, compared quantity by quantity.
std::vector<OracleDifference> compare_with_oracle(const ModelParams& params, const QuenchOptions& options);

struct RunOutcome {
  int exit_code = kExitError;
  nlohmann::ordered_json manifest;
};

/// Executes config.mode (which must be set), writing tables and manifest.json into config.output.
RunOutcome run(const RunConfig& config);

/// Writes a manifest describing a run that failed before it started.
void write_error_manifest(const std::filesystem::path& dir, const std::string& message,
                          const std::string& mode = {});

}  // namespace z2thermo::cli
