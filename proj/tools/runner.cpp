#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>

#include "oracle.hpp"

namespace z2thermo::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string beta_label(double beta) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", beta);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

struct CheckSummary {
  std::size_t rows = 0;
  double max_first_law_residual = 0.0;
  double min_slack_work = std::numeric_limits<double>::infinity();
  double min_slack_heat = std::numeric_limits<double>::infinity();
  double max_w_diss_route_deviation = 0.0;
  double max_h_star_route_deviation = 0.0;
  double max_equilibrium_residual = 0.0;
  double max_support_distance = 0.0;
  bool all_support_checks = true;
  bool laws_hold = true;
  std::map<unsigned, std::size_t> digits;

  void add(const QuenchReport& r, const Tolerances& tol) {
    ++rows;
    max_first_law_residual = std::max(max_first_law_residual, r.first_law_residual);
    min_slack_work = std::min(min_slack_work, r.slack_work);
    min_slack_heat = std::min(min_slack_heat, r.slack_heat);
    max_w_diss_route_deviation = std::max(max_w_diss_route_deviation, r.W_diss_route_deviation);
    max_h_star_route_deviation = std::max(max_h_star_route_deviation, r.h_star_route_deviation);
    max_equilibrium_residual = std::max(max_equilibrium_residual, r.equilibrium_residual);
    max_support_distance = std::max(max_support_distance, r.support_distance);
    all_support_checks = all_support_checks && r.support_check;
    laws_hold = laws_hold && r.laws_hold(tol);
    ++digits[r.precision_digits];
  }

  void add(const std::vector<QuenchReport>& rows_in, const Tolerances& tol) {
    for (const auto& r : rows_in) add(r, tol);
  }

  bool pass() const { return rows > 0 && all_support_checks && laws_hold; }

  ojson checks_json() const {
    return {{"rows", rows},
            {"max_first_law_residual", max_first_law_residual},
            {"min_slack_work", rows ? min_slack_work : 0.0},
            {"min_slack_heat", rows ? min_slack_heat : 0.0},
            {"max_W_diss_route_deviation", max_w_diss_route_deviation},
            {"max_h_star_route_deviation", max_h_star_route_deviation},
            {"max_equilibrium_residual", max_equilibrium_residual},
            {"max_support_distance", max_support_distance},
            {"all_support_checks", all_support_checks},
            {"laws_hold", laws_hold}};
  }

  ojson digits_json() const {
    ojson j = ojson::object();
    for (const auto& [d, n] : digits) j[std::to_string(d)] = n;
    return j;
  }
};

ojson shift_json(const ShiftChoice& s) {
  ojson components = ojson::array();
  for (const auto& c : s.components) {
    components.push_back({{"name", c.name}, {"lambda_min", c.lambda_min}, {"n_sites", c.n_sites}});
  }
  return {{"value", s.value}, {"automatic", s.automatic}, {"components", components}, {"warnings", s.warnings}};
}

ojson grid_json(const MuGrid& g) {
  return {{"mu_f_start", g.start}, {"mu_f_stop", g.stop}, {"mu_f_step", g.step}, {"points", g.points().size()}};
}

ojson transition_json(const SweepTable& t) {
  return {{"mu_f_c", t.mu_f_c}, {"sigma_prime_at_c", t.sigma_prime_at_c}, {"mu_f_c_signed", t.mu_f_c_signed}};
}

ojson diagnostics_json(const BetaDiagnostics& d) {
  ojson second = ojson::object();
  for (const auto& [name, v] : d.max_second_difference) second[name] = v;
  return {{"beta", d.beta},
          {"finite", d.finite},
          {"non_finite", d.non_finite},
          {"max_second_difference", second},
          {"max_abs_sigma_prime", d.max_abs_sigma_prime}};
}

std::string weak_header() {
  return "mu_f,beta,W,Q,W_diss,dF_S,dS,dU_S,first_law_residual,W_diss_strong,W_diss_difference\n";
}

std::string weak_row(const QuenchReport& r) {
  const auto& w = *r.weak;
  const double values[] = {r.mu_f, r.beta, w.W,  w.Q, w.W_diss, w.dF_S, w.dS, w.dU_S, w.first_law_residual,
                           r.W_diss, r.W_diss - w.W_diss};
  std::string line;
  for (std::size_t k = 0; k < std::size(values); ++k) {
    if (k) line += ',';
    line += format_number(values[k]);
  }
  return line + '\n';
}

ModelParams with_shift(const RunConfig& config, double shift) {
  ModelParams p = config.model;
  p.shift = shift;
  return p;
}

QuenchOptions options_of(const RunConfig& config) {
  QuenchOptions o;
  o.tolerances = config.tolerances;
  o.precision = config.precision;
  return o;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "mu_f",      "beta",       "W",          "Q",      "W_diss",  "dF_S",    "dS",     "dU_S",
      "Sigma_i",   "Sigma_f",    "first_law_residual", "slack_work", "slack_heat", "ratio_i", "ratio_f",
      "support_check"};
  return columns;
}

std::string csv_header() {
  std::string line;
  for (const auto& c : csv_columns()) line += (line.empty() ? "" : ",") + c;
  return line + '\n';
}

std::string csv_row(const QuenchReport& r) {
  const double values[] = {r.mu_f,    r.beta,    r.W,       r.Q,        r.W_diss,
                           r.dF_S,    r.dS,      r.dU_S,    r.Sigma_i,  r.Sigma_f,
                           r.first_law_residual, r.slack_work, r.slack_heat, r.ratio_i, r.ratio_f};
  std::string line;
  for (const double v : values) line += format_number(v) + ',';
  return line + (r.support_check ? "true" : "false") + '\n';
}

void write_table(const fs::path& path, const std::vector<QuenchReport>& rows) {
  std::string text = csv_header();
  for (const auto& r : rows) text += csv_row(r);
  write_text(path, text);
}

std::vector<OracleDifference> compare_with_oracle(const ModelParams& params, const QuenchOptions& options) {
  const auto r = run_quench(params, options);
  z2oracle::params op;
  op.n_sites = params.n_sites;
  op.n_system = params.n_system;
  op.hopping = params.hopping;
  op.electric = params.electric;
  op.mass = params.mass;
  op.mu_initial = params.mu_initial;
  op.mu_final = params.mu_final;
  op.shift = r.shift;
  op.beta = params.beta;
  const auto o = z2oracle::run(op);
  const std::pair<const char*, std::pair<double, long double>> pairs[] = {
      {"W", {r.W, o.W}},
      {"Q", {r.Q, o.Q}},
      {"W_diss", {r.W_diss, o.W_diss}},
      {"W_diss_entanglement", {r.W_diss_entanglement, o.W_diss_entanglement}},
      {"dF_S", {r.dF_S, o.dF_S}},
      {"dS", {r.dS, o.dS}},
      {"dU_S", {r.dU_S, o.dU_S}},
      {"Sigma_i", {r.Sigma_i, o.Sigma_i}},
      {"Sigma_f", {r.Sigma_f, o.Sigma_f}},
      {"first_law_residual", {r.first_law_residual, o.first_law_residual}},
      {"slack_work", {r.slack_work, o.slack_work}},
      {"slack_heat", {r.slack_heat, o.slack_heat}},
      {"ratio_i", {r.ratio_i, o.ratio_i}},
      {"ratio_f", {r.ratio_f, o.ratio_f}},
      {"F_S_i", {r.F_S_i, o.F_S_i}},
      {"F_S_f", {r.F_S_f, o.F_S_f}},
      {"U_S_i", {r.U_S_i, o.U_S_i}},
      {"U_S_f", {r.U_S_f, o.U_S_f}},
      {"S_i", {r.S_i, o.S_i}},
      {"S_f", {r.S_f, o.S_f}}};
  std::vector<OracleDifference> out;
  for (const auto& [name, values] : pairs) {
    const double oracle_value = static_cast<double>(values.second);
    out.push_back({params.mu_final, params.beta, name, values.first, oracle_value,
                   std::abs(values.first - oracle_value)});
  }
  return out;
}

RunOutcome run(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  if (!config.mode) throw InvalidInput("mode is not set: give a subcommand or a config mode");
  const Mode mode = *config.mode;
  const fs::path dir(config.output);
  fs::create_directories(dir);

  ojson m;
  m["schema_version"] = kManifestSchemaVersion;
  m["program"] = "z2thermo";
  m["mode"] = to_string(mode);
  m["status"] = "error";
  m["exit_code"] = kExitError;
  m["error"] = nullptr;
  m["config"] = to_json(config);
  m["shift"] = nullptr;
  const DofLayout layout(config.model.n_sites, config.model.n_system);
  m["sector_dim"] = physical_sector(layout).dim();
  m["structural_support_dim"] = structural_support_dim(layout);
  m["grid"] = nullptr;
  m["transition"] = nullptr;
  m["checks"] = nullptr;
  m["precision"] = {{"requested", config.precision ? ojson(*config.precision) : ojson("auto")},
                    {"rows_per_digits", ojson::object()}};
  m["diagnostics"] = nullptr;
  m["outputs"] = ojson::array();

  RunOutcome outcome;
  const auto options = options_of(config);
  CheckSummary summary;
  bool pass = false;
  auto add_output = [&](const std::string& name) { m["outputs"].push_back(name); };

  try {
    if (mode == Mode::quench) {
      const auto shift = choose_shift(config.model);
      m["shift"] = shift_json(shift);
      const auto r = run_quench(with_shift(config, shift.value), options);
      write_table(dir / "quench.csv", {r});
      add_output("quench.csv");
      summary.add(r, config.tolerances);
      pass = summary.pass();
    } else {
      const auto points = config.sweep.points();
      const auto shift = choose_shift(config.model, points);
      m["shift"] = shift_json(shift);
      m["grid"] = grid_json(config.sweep);
      const ModelParams params = with_shift(config, shift.value);

      if (mode == Mode::sweep) {
        const auto table = sweep_mu(params, config.sweep, options, config.workers);
        write_table(dir / "sweep.csv", table.rows);
        add_output("sweep.csv");
        m["transition"] = transition_json(table);
        m["diagnostics"] = diagnostics_json(diagnose(table));
        summary.add(table.rows, config.tolerances);
        pass = summary.pass();
      } else if (mode == Mode::beta_sweep) {
        const auto bs = beta_sweep(params, config.sweep, config.betas, options, config.workers);
        ojson transitions = ojson::array();
        ojson per_beta = ojson::array();
        bool finite = true;
        for (std::size_t k = 0; k < bs.tables.size(); ++k) {
          const std::string name = "beta_sweep_beta" + beta_label(config.betas[k]) + ".csv";
          write_table(dir / name, bs.tables[k].rows);
          add_output(name);
          ojson t = transition_json(bs.tables[k]);
          t["beta"] = config.betas[k];
          transitions.push_back(t);
          per_beta.push_back(diagnostics_json(bs.diagnostics[k]));
          finite = finite && bs.diagnostics[k].finite;
          summary.add(bs.tables[k].rows, config.tolerances);
        }
        m["transition"] = transitions;
        m["diagnostics"] = {{"all_finite", finite}, {"sharpening", bs.sharpening}, {"per_beta", per_beta}};
        pass = summary.pass() && finite;
      } else if (mode == Mode::weak_compare) {
        const auto cmp = weak_coupling_report(params, config.sweep, options, config.workers);
        write_table(dir / "sweep.csv", cmp.table.rows);
        std::string text = weak_header();
        for (const auto& r : cmp.table.rows) text += weak_row(r);
        write_text(dir / "weak.csv", text);
        add_output("sweep.csv");
        add_output("weak.csv");
        m["transition"] = transition_json(cmp.table);
        m["diagnostics"] = {{"max_W_diss_difference", cmp.max_w_diss_difference},
                            {"max_weak_first_law_residual", cmp.max_weak_first_law_residual},
                            {"min_ratio_i", cmp.min_ratio_i},
                            {"min_ratio_f", cmp.min_ratio_f}};
        summary.add(cmp.table.rows, config.tolerances);
        pass = summary.pass() && cmp.max_weak_first_law_residual < config.tolerances.first_law;
      } else {
        if (config.model.n_sites > 4 || config.model.n_system > 2) {
          throw InvalidInput("oracle-check needs model.N <= 4 and model.N_S <= 2");
        }
        std::string text = "mu_f,beta,quantity,production,oracle,abs_difference\n";
        double worst = 0.0;
        ojson worst_entry = nullptr;
        std::size_t n_points = 0;
        for (const double beta : config.betas) {
          for (const double mu : points) {
            ModelParams p = params;
            p.beta = beta;
            p.mu_final = mu;
            ++n_points;
            for (const auto& d : compare_with_oracle(p, options)) {
              text += format_number(d.mu_f) + ',' + format_number(d.beta) + ',' + d.quantity + ',' +
                      format_number(d.production) + ',' + format_number(d.oracle) + ',' +
                      format_number(d.abs_difference) + '\n';
              if (!(d.abs_difference <= worst)) {
                worst = d.abs_difference;
                worst_entry = {{"mu_f", d.mu_f}, {"beta", d.beta}, {"quantity", d.quantity}};
              }
            }
          }
        }
        write_text(dir / "oracle.csv", text);
        add_output("oracle.csv");
        pass = worst <= config.oracle_tolerance;
        m["diagnostics"] = {{"points", n_points},
                            {"tolerance", config.oracle_tolerance},
                            {"max_abs_difference", worst},
                            {"worst", worst_entry},
                            {"within_tolerance", pass}};
      }
    }
    outcome.exit_code = pass ? kExitPass : kExitChecksFailed;
    m["status"] = pass ? "pass" : "checks_failed";
  } catch (const SweepAborted& e) {
    m["error"] = e.what();
    m["failed_mu_f"] = e.failed_mu_f;
    m["completed_rows"] = e.partial_rows.size();
    summary.add(e.partial_rows, config.tolerances);
    outcome.exit_code = kExitError;
  } catch (const std::exception& e) {
    m["error"] = e.what();
    outcome.exit_code = kExitError;
  }
  if (summary.rows) m["checks"] = summary.checks_json();
  m["precision"]["rows_per_digits"] = summary.digits_json();
  m["exit_code"] = outcome.exit_code;
  m["wall_time_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_text(dir / "manifest.json", m.dump(2) + '\n');
  outcome.manifest = std::move(m);
  return outcome;
}

void write_error_manifest(const fs::path& dir, const std::string& message, const std::string& mode) {
  ojson m;
  m["schema_version"] = kManifestSchemaVersion;
  m["program"] = "z2thermo";
  m["mode"] = mode.empty() ? ojson(nullptr) : ojson(mode);
  m["status"] = "error";
  m["exit_code"] = kExitError;
  m["error"] = message;
  fs::create_directories(dir);
  write_text(dir / "manifest.json", m.dump(2) + '\n');
}

}  // namespace z2thermo::cli
