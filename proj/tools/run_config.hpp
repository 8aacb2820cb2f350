#pragma once

// Run configuration: a JSON document with strict keys, defaults for every field.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "z2thermo/quench.hpp"

namespace z2thermo::cli {

enum class Mode { quench, sweep, beta_sweep, weak_compare, oracle_check };

std::string to_string(Mode mode);
/// Throws InvalidInput for names other than quench, sweep, beta-sweep, weak-compare, oracle-check.
Mode parse_mode(const std::string& name);

struct RunConfig {
  ModelParams model;  // model.shift empty means automatic
  MuGrid sweep;
  std::vector<double> betas{1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  std::optional<Mode> mode;
  std::string output = "out";
  int workers = 1;
  Tolerances tolerances;
  double oracle_tolerance = 1e-6;
  std::optional<unsigned> precision;  // empty means automatic escalation

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

/// Parses and validates a configuration document; empty text yields the defaults.
/// Unknown keys, wrong types and violated constraints throw InvalidInput.
RunConfig parse_config(const std::string& text);

/// Configuration document that parse_config maps back to `config`.
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace z2thermo::cli
