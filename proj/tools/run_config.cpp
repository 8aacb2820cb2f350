#include "run_config.hpp"

#include <cmath>
#include <set>

namespace z2thermo::cli {

using nlohmann::json;

namespace {

const std::pair<Mode, const char*> kModeNames[] = {{Mode::quench, "quench"},
                                                   {Mode::sweep, "sweep"},
                                                   {Mode::beta_sweep, "beta-sweep"},
                                                   {Mode::weak_compare, "weak-compare"},
                                                   {Mode::oracle_check, "oracle-check"}};

void reject_unknown(const json& object, const std::string& where, const std::set<std::string>& allowed) {
  if (!object.is_object()) throw InvalidInput(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) throw InvalidInput("unknown key " + where + "." + key);
  }
}

std::string field_name(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

double number(const json& object, const std::string& where, const std::string& key, double fallback) {
  if (!object.contains(key)) return fallback;
  const auto& v = object.at(key);
  if (!v.is_number()) throw InvalidInput(field_name(where, key) + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidInput(field_name(where, key) + " must be finite");
  return x;
}

int integer(const json& object, const std::string& where, const std::string& key, int fallback) {
  if (!object.contains(key)) return fallback;
  const auto& v = object.at(key);
  if (!v.is_number_integer()) throw InvalidInput(field_name(where, key) + " must be an integer");
  return v.get<int>();
}

void parse_model(const json& m, ModelParams& p) {
  reject_unknown(m, "model", {"N", "N_S", "J", "epsilon", "m", "mu_i", "mu_f", "c", "beta"});
  p.n_sites = integer(m, "model", "N", p.n_sites);
  p.n_system = integer(m, "model", "N_S", p.n_system);
  p.hopping = number(m, "model", "J", p.hopping);
  p.electric = number(m, "model", "epsilon", p.electric);
  p.mass = number(m, "model", "m", p.mass);
  p.mu_initial = number(m, "model", "mu_i", p.mu_initial);
  p.mu_final = number(m, "model", "mu_f", p.mu_final);
  p.beta = number(m, "model", "beta", p.beta);
  if (m.contains("c")) {
    const auto& c = m.at("c");
    if (c.is_string()) {
      if (c.get<std::string>() != "auto") throw InvalidInput("model.c must be \"auto\" or a number");
      p.shift.reset();
    } else {
      p.shift = number(m, "model", "c", 0.0);
    }
  }
}

void parse_tolerances(const json& t, RunConfig& config) {
  reject_unknown(t, "tolerances",
                 {"first_law", "second_law", "route", "route_abort", "support", "equilibrium", "precision_guard",
                  "oracle"});
  auto& tol = config.tolerances;
  tol.first_law = number(t, "tolerances", "first_law", tol.first_law);
  tol.second_law = number(t, "tolerances", "second_law", tol.second_law);
  tol.route = number(t, "tolerances", "route", tol.route);
  tol.route_abort = number(t, "tolerances", "route_abort", tol.route_abort);
  tol.support = number(t, "tolerances", "support", tol.support);
  tol.equilibrium = number(t, "tolerances", "equilibrium", tol.equilibrium);
  tol.precision_guard = integer(t, "tolerances", "precision_guard", tol.precision_guard);
  config.oracle_tolerance = number(t, "tolerances", "oracle", config.oracle_tolerance);
}

}  // namespace

std::string to_string(Mode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (const auto& [m, n] : kModeNames) {
    if (name == n) return m;
  }
  throw InvalidInput("mode must be one of quench, sweep, beta-sweep, weak-compare, oracle-check; got \"" + name +
                     "\"");
}

void RunConfig::validate() const {
  model.validate();
  sweep.validate();
  if (betas.empty()) throw InvalidInput("betas must not be empty");
  for (std::size_t k = 0; k < betas.size(); ++k) {
    if (!(betas[k] > 0.0) || !std::isfinite(betas[k])) throw InvalidInput("betas must be positive and finite");
    if (k > 0 && !(betas[k] > betas[k - 1])) throw InvalidInput("betas must be strictly ascending");
  }
  if (output.empty()) throw InvalidInput("output must be a non-empty directory path");
  if (workers < 1) throw InvalidInput("workers must be at least 1");
  tolerances.validate();
  if (!(oracle_tolerance > 0.0)) throw InvalidInput("tolerances.oracle must be positive");
  if (precision) {
    bool known = false;
    for (const unsigned tier : kPrecisionTiers) known = known || tier == *precision;
    if (!known) throw InvalidInput("precision must be \"auto\" or one of 40, 80, 160, 320");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    config.validate();
    return config;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "config", {"model", "sweep", "betas", "mode", "output", "workers", "tolerances", "precision"});
  if (doc.contains("model")) parse_model(doc.at("model"), config.model);
  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    reject_unknown(s, "sweep", {"mu_f_start", "mu_f_stop", "mu_f_step"});
    config.sweep.start = number(s, "sweep", "mu_f_start", config.sweep.start);
    config.sweep.stop = number(s, "sweep", "mu_f_stop", config.sweep.stop);
    config.sweep.step = number(s, "sweep", "mu_f_step", config.sweep.step);
  }
  if (doc.contains("betas")) {
    const auto& b = doc.at("betas");
    if (!b.is_array()) throw InvalidInput("betas must be an array of numbers");
    config.betas.clear();
    for (const auto& v : b) {
      if (!v.is_number()) throw InvalidInput("betas must be an array of numbers");
      config.betas.push_back(v.get<double>());
    }
  }
  if (doc.contains("mode")) {
    if (!doc.at("mode").is_string()) throw InvalidInput("mode must be a string");
    config.mode = parse_mode(doc.at("mode").get<std::string>());
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw InvalidInput("output must be a string");
    config.output = doc.at("output").get<std::string>();
  }
  config.workers = integer(doc, "", "workers", config.workers);
  if (doc.contains("tolerances")) parse_tolerances(doc.at("tolerances"), config);
  if (doc.contains("precision")) {
    const auto& p = doc.at("precision");
    if (p.is_string() && p.get<std::string>() == "auto") {
      config.precision.reset();
    } else if (p.is_number_unsigned()) {
      config.precision = p.get<unsigned>();
    } else {
      throw InvalidInput("precision must be \"auto\" or one of 40, 80, 160, 320");
    }
  }
  config.validate();
  return config;
}

nlohmann::ordered_json to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  const auto& m = config.model;
  j["model"] = {{"N", m.n_sites},      {"N_S", m.n_system},     {"J", m.hopping},
                {"epsilon", m.electric}, {"m", m.mass},           {"mu_i", m.mu_initial},
                {"mu_f", m.mu_final},    {"c", nullptr},          {"beta", m.beta}};
  if (m.shift) {
    j["model"]["c"] = *m.shift;
  } else {
    j["model"]["c"] = "auto";
  }
  j["sweep"] = {{"mu_f_start", config.sweep.start},
                {"mu_f_stop", config.sweep.stop},
                {"mu_f_step", config.sweep.step}};
  j["betas"] = config.betas;
  if (config.mode) j["mode"] = to_string(*config.mode);
  j["output"] = config.output;
  j["workers"] = config.workers;
  const auto& t = config.tolerances;
  j["tolerances"] = {{"first_law", t.first_law},     {"second_law", t.second_law},
                     {"route", t.route},             {"route_abort", t.route_abort},
                     {"support", t.support},         {"equilibrium", t.equilibrium},
                     {"precision_guard", t.precision_guard}, {"oracle", config.oracle_tolerance}};
  if (config.precision) {
    j["precision"] = *config.precision;
  } else {
    j["precision"] = "auto";
  }
  return j;
}

}  // namespace z2thermo::cli
