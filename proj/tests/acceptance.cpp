#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "runner.hpp"

using namespace z2thermo;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  std::function<Verdict()> check;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ModelParams defaults() { return ModelParams{}; }

const MuGrid kDefaultGrid{0.0, 10.0, 0.1};

struct TimedSweep {
  SweepTable table;
  double seconds = 0.0;
};

const TimedSweep& default_sweep() {
  static const TimedSweep sweep = [] {
    const auto t0 = std::chrono::steady_clock::now();
    TimedSweep s;
    s.table = sweep_mu(defaults(), kDefaultGrid);
    s.seconds = seconds_since(t0);
    return s;
  }();
  return sweep;
}

Verdict sector_dimension() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = true;
  for (const int n : {6, 4}) {
    const DofLayout layout(n, n / 2);
    const auto dim = physical_sector(layout).dim();
    Eigen::Index enumerated = 0;
    for (Label label = 0; label < (Label{1} << (2 * n)); ++label) enumerated += is_physical(label, layout) ? 1 : 0;
    const Eigen::Index expected = Eigen::Index{1} << n;
    pass = pass && dim == expected && enumerated == expected;
    detail += fmt("N=%d dim %ld enumerated %ld; ", n, static_cast<long>(dim), static_cast<long>(enumerated));
  }
  z2oracle::params op;
  const int penalty_count = z2oracle::run(op).physical_states;
  pass = pass && penalty_count == 16;
  const double t = seconds_since(t0);
  pass = pass && t < 1.0;
  return {pass, detail + fmt("N=4 penalty states %d; %.3f s", penalty_count, t)};
}

Verdict gauge_invariance() {
  ModelParams p = defaults();
  p.shift = choose_shift(p).value;
  const DofLayout layout(p.n_sites, p.n_system);
  double worst = 0.0;
  for (const double mu_f : {0.0, 5.0, 10.0}) {
    p.mu_final = mu_f;
    for (const auto t : {QuenchTime::initial, QuenchTime::final}) {
      const auto products = products_of(build_terms(p, t));
      for (int n = 0; n < p.n_sites; ++n) worst = std::max(worst, gauss_commutator_norm(products, n, layout));
    }
  }
  return {worst < 1e-12, fmt("max ||[H, G_n]||_max = %.3g over n, both quench times, mu_f in {0,5,10}", worst)};
}

Verdict first_law() {
  double worst = 0.0;
  const auto& rows = default_sweep().table.rows;
  for (const auto& r : rows) worst = std::max(worst, r.first_law_residual);
  return {rows.size() == 101 && worst < 1e-9, fmt("max |dU_S - (W + Q)| = %.3g over %zu points", worst, rows.size())};
}

Verdict second_law() {
  double work = INFINITY, heat = INFINITY;
  const auto& rows = default_sweep().table.rows;
  for (const auto& r : rows) {
    work = std::min(work, r.slack_work);
    heat = std::min(heat, r.slack_heat);
  }
  return {rows.size() == 101 && work >= -1e-9 && heat >= -1e-9,
          fmt("min (W - dF_S) = %.3g, min (dS - beta Q) = %.3g", work, heat)};
}

Verdict route_equivalence() {
  double w = 0.0, h = 0.0;
  for (const auto& r : default_sweep().table.rows) {
    w = std::max(w, r.W_diss_route_deviation);
    h = std::max(h, r.h_star_route_deviation);
  }
  return {w < 1e-9 && h < 1e-9, fmt("max W_diss route gap %.3g, max H* route gap %.3g", w, h)};
}

Verdict null_quench() {
  const auto r = run_quench(defaults());
  double worst = 0.0;
  for (const double v : {r.W, r.Q, r.W_diss, r.dF_S, r.dS}) worst = std::max(worst, std::abs(v));
  return {worst < 1e-10, fmt("max |W, Q, W_diss, dF_S, dS| = %.3g", worst)};
}

Verdict shift_invariance() {
  const auto& base = default_sweep().table;
  ModelParams p = defaults();
  p.shift = base.shift + 1.0;
  const auto moved = sweep_mu(p, kDefaultGrid);
  double worst = 0.0;
  std::string where = "none";
  for (std::size_t k = 0; k < base.rows.size(); ++k) {
    const auto a = difference_quantities(base.rows[k]);
    const auto b = difference_quantities(moved.rows[k]);
    for (std::size_t q = 0; q < a.size(); ++q) {
      const double d = std::abs(a[q].second - b[q].second);
      if (d > worst) {
        worst = d;
        where = a[q].first + fmt(" at mu_f=%g", base.rows[k].mu_f);
      }
    }
  }
  return {worst < 1e-9, fmt("c = %g vs %g: max change %.3g (", base.shift, base.shift + 1.0, worst) + where + ")"};
}

Verdict oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelParams p;
  p.n_sites = 4;
  p.n_system = 2;
  const MuGrid grid{0.0, 10.0, 1.0};
  p.shift = choose_shift(p, grid.points()).value;
  double worst = 0.0;
  std::string where = "none";
  std::size_t points = 0;
  for (const double beta : {1.0, 10.0}) {
    for (const double mu : grid.points()) {
      p.beta = beta;
      p.mu_final = mu;
      ++points;
      for (const auto& d : cli::compare_with_oracle(p, {})) {
        if (!(d.abs_difference <= worst)) {
          worst = d.abs_difference;
          where = d.quantity + fmt(" at beta=%g mu_f=%g", beta, mu);
        }
      }
    }
  }
  const double t = seconds_since(t0);
  return {worst < 1e-6 && t < 30.0,
          fmt("%zu points, max difference %.3g (", points, worst) + where + fmt("); %.1f s", t)};
}

Verdict quench_shape() {
  const auto& table = default_sweep().table;
  const auto& rows = table.rows;
  const double mu_c = table.mu_f_c;
  double sigma_end = NAN;
  double w_max = -INFINITY, mu_at_max = NAN;
  for (const auto& r : rows) {
    if (std::abs(r.mu_f - 10.0) < 1e-9) sigma_end = r.Sigma_f;
    if (r.W_diss > w_max) {
      w_max = r.W_diss;
      mu_at_max = r.mu_f;
    }
  }
  double early = 0.0;
  for (const auto& r : rows) {
    if (r.mu_f <= mu_c - 1.0 + 1e-9) early = std::max(early, r.W_diss);
  }
  const bool i = std::abs(sigma_end) < 0.05;
  const bool ii = early < 0.02 * w_max;
  const bool iii = mu_at_max > mu_c;
  return {i && ii && iii,
          fmt("mu_f^c = %g; (i) |Sigma(10)| = %.3g; (ii) max W_diss for mu_f <= mu_f^c - 1 is %.3g vs 0.02 x %.4g; "
              "(iii) W_diss peaks at mu_f = %g",
              mu_c, std::abs(sigma_end), early, w_max, mu_at_max)};
}

Verdict beta_convergence() {
  const auto bs = beta_sweep(defaults(), kDefaultGrid, {1.0, 2.0, 4.0, 6.0, 8.0, 10.0});
  bool finite = true;
  std::string detail = "max|Sigma'|:";
  for (const auto& d : bs.diagnostics) {
    finite = finite && d.finite;
    detail += fmt(" beta=%g %.4f", d.beta, d.max_abs_sigma_prime);
  }
  return {finite && bs.sharpening, detail + (finite ? "; all finite" : "; non-finite values")};
}

Verdict coupling_ratio() {
  double min_i = INFINITY, min_f = INFINITY;
  double first_below = NAN;
  for (const auto& r : default_sweep().table.rows) {
    min_i = std::min(min_i, r.ratio_i);
    min_f = std::min(min_f, r.ratio_f);
    if (std::isnan(first_below) && (r.ratio_i < 0.1 || r.ratio_f < 0.1)) first_below = r.mu_f;
  }
  std::string detail = fmt("min ratio_i = %.4f, min ratio_f = %.4f", min_i, min_f);
  if (!std::isnan(first_below)) detail += fmt("; below 0.1 from mu_f = %g", first_below);
  return {min_i >= 0.1 && min_f >= 0.1, detail};
}

Verdict runtime_budget() {
  const auto& s = default_sweep();
  return {s.table.rows.size() == 101 && s.seconds < 300.0,
          fmt("default sweep of %zu points in %.1f s", s.table.rows.size(), s.seconds)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"A1", "sector dimension", sector_dimension},
      {"A2", "gauge invariance", gauge_invariance},
      {"A3", "first law", first_law},
      {"A4", "second law", second_law},
      {"A5", "route equivalence", route_equivalence},
      {"A6", "null quench", null_quench},
      {"A7", "shift invariance", shift_invariance},
      {"A8", "oracle equivalence", oracle_equivalence},
      {"A9", "qualitative quench shape", quench_shape},
      {"A10", "beta convergence", beta_convergence},
      {"A11", "coupling ratio", coupling_ratio},
      {"A12", "runtime budget", runtime_budget},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    bool known = false;
    for (const auto& c : criteria) known = known || c.id == w;
    if (!known) {
      std::fprintf(stderr, "acceptance: unknown criterion %s\n", w.c_str());
      return 2;
    }
  }
  bool all = true;
  for (const auto& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("%s %s: %s | %s\n", c.id.c_str(), c.name.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
