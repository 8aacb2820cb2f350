#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "runner.hpp"

using namespace z2thermo;
using namespace z2thermo::cli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quench thermodynamics of a Z2 lattice gauge theory with hardcore bosons"};
  std::string mode_name;
  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> workers;
  std::optional<double> mu_f;
  app.add_option("mode", mode_name, "quench | sweep | beta-sweep | weak-compare | oracle-check");
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--output", output, "output directory");
  app.add_option("--workers", workers, "concurrent sweep rows");
  app.add_option("--mu-f", mu_f, "final chemical potential of a single quench");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  std::string output_dir = output.value_or("out");
  std::string mode_label = mode_name;
  RunConfig config;
  try {
    config = parse_config(config_path.empty() ? std::string() : read_file(config_path));
    if (!output) output_dir = config.output;
    if (!mode_name.empty()) {
      const Mode m = parse_mode(mode_name);
      if (config.mode && *config.mode != m) {
        throw InvalidInput("subcommand " + mode_name + " conflicts with config mode " + to_string(*config.mode));
      }
      config.mode = m;
    }
    if (!config.mode) throw InvalidInput("no mode: give a subcommand or set mode in the config");
    mode_label = to_string(*config.mode);
    if (output) config.output = *output;
    if (workers) config.workers = *workers;
    if (mu_f) {
      if (*config.mode != Mode::quench) throw InvalidInput("--mu-f applies to the quench mode only");
      config.model.mu_final = *mu_f;
    }
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "z2thermo: " << e.what() << '\n';
    try {
      write_error_manifest(output_dir, e.what(), mode_label);
    } catch (const std::exception&) {
    }
    return kExitError;
  }

  try {
    const auto outcome = run(config);
    const auto& m = outcome.manifest;
    std::cout << "z2thermo " << m["mode"].get<std::string>() << ": " << m["status"].get<std::string>();
    if (!m["error"].is_null()) std::cout << " (" << m["error"].get<std::string>() << ")";
    std::cout << ", output in " << config.output << '\n';
    return outcome.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "z2thermo: " << e.what() << '\n';
    return kExitError;
  }
}
