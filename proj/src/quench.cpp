#include "z2thermo/quench.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace z2thermo {

extern template QuenchReport run_quench_at<MpReal<40>>(const ModelParams&, const QuenchOptions&);
extern template QuenchReport run_quench_at<MpReal<80>>(const ModelParams&, const QuenchOptions&);
extern template QuenchReport run_quench_at<MpReal<160>>(const ModelParams&, const QuenchOptions&);
extern template QuenchReport run_quench_at<MpReal<320>>(const ModelParams&, const QuenchOptions&);

void Tolerances::validate() const {
  const std::pair<const char*, double> entries[] = {
      {"first_law", first_law}, {"second_law", second_law}, {"route", route},
      {"route_abort", route_abort}, {"support", support}, {"equilibrium", equilibrium}};
  for (const auto& [name, v] : entries) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string("tolerances.") + name + " must be positive");
  }
  if (precision_guard < 1) throw InvalidInput("tolerances.precision_guard must be positive");
}

bool QuenchReport::laws_hold(const Tolerances& tol) const {
  return support_check && first_law_residual < tol.first_law && slack_work >= -tol.second_law &&
         slack_heat >= -tol.second_law && W_diss_route_deviation < tol.route && h_star_route_deviation < tol.route &&
         equilibrium_residual < tol.equilibrium;
}

unsigned starting_precision(const ModelParams& params, int guard) {
  ModelParams p = params;
  p.shift = 0.0;
  const DofLayout layout(p.n_sites, p.n_system);
  const auto sector = physical_sector(layout);
  double width = 0.0;
  for (const auto t : {QuenchTime::initial, QuenchTime::final}) {
    const auto products = products_of(build_terms(p, t));
    const auto d = herm_eig(matrix_in_basis<double>(products, sector.basis, layout));
    width = std::max(width, d.max_eigenvalue() - d.min_eigenvalue());
  }
  const double decades = p.beta * width / std::log(10.0) + std::log10(static_cast<double>(sector.dim()));
  const double needed = 0.6 * decades + guard;
  for (const unsigned tier : kPrecisionTiers) {
    if (tier >= needed) return tier;
  }
  return kPrecisionTiers.back();
}

namespace {

QuenchReport dispatch(unsigned digits, const ModelParams& params, const QuenchOptions& options) {
  switch (digits) {
    case 40: return run_quench_at<MpReal<40>>(params, options);
    case 80: return run_quench_at<MpReal<80>>(params, options);
    case 160: return run_quench_at<MpReal<160>>(params, options);
    case 320: return run_quench_at<MpReal<320>>(params, options);
    default: break;
  }
  throw InvalidInput("precision must be one of 40, 80, 160, 320 decimal digits");
}

}  // namespace

QuenchReport run_quench(ModelParams params, const QuenchOptions& options) {
  params.validate();
  options.tolerances.validate();
  if (!params.shift) params.shift = choose_shift(params).value;
  if (options.precision) return dispatch(*options.precision, params, options);
  const unsigned start = starting_precision(params, options.tolerances.precision_guard);
  for (const unsigned tier : kPrecisionTiers) {
    if (tier < start) continue;
    try {
      return dispatch(tier, params, options);
    } catch (const InsufficientPrecision&) {
      if (tier == kPrecisionTiers.back()) throw;
    }
  }
  throw InsufficientPrecision("run_quench: no precision tier available");
}

std::vector<double> MuGrid::points() const {
  validate();
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-3)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
  return out;
}

void MuGrid::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw InvalidInput("sweep: mu_f_start, mu_f_stop and mu_f_step must be finite");
  }
  if (!(step > 0.0)) throw InvalidInput("sweep.mu_f_step must be positive");
  if (!(start < stop)) throw InvalidInput("sweep.mu_f_start must be below sweep.mu_f_stop");
}

void locate_transition(SweepTable& table) {
  const auto n = table.rows.size();
  table.sigma_prime.assign(n, std::numeric_limits<double>::quiet_NaN());
  if (n < 3) return;
  double best_abs = -1.0;
  double best_signed = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const auto& lo = table.rows[k - 1];
    const auto& hi = table.rows[k + 1];
    const double d = (hi.Sigma_f - lo.Sigma_f) / (hi.mu_f - lo.mu_f);
    table.sigma_prime[k] = d;
    if (std::abs(d) > best_abs) {
      best_abs = std::abs(d);
      table.mu_f_c = table.rows[k].mu_f;
      table.sigma_prime_at_c = d;
    }
    if (d > best_signed) {
      best_signed = d;
      table.mu_f_c_signed = table.rows[k].mu_f;
    }
  }
}

SweepTable sweep_mu(const ModelParams& params, const MuGrid& grid, const QuenchOptions& options, int workers) {
  params.validate();
  const auto points = grid.points();
  if (points.size() < 5) throw InvalidInput("sweep: the grid needs at least 5 points");
  if (workers < 1) throw InvalidInput("workers must be at least 1");

  SweepTable table;
  table.grid = grid;
  table.shift = params.shift ? *params.shift : choose_shift(params, points).value;

  std::vector<std::optional<QuenchReport>> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, std::string>> first_error;

  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t k = next.fetch_add(1);
      if (k >= points.size()) return;
      ModelParams p = params;
      p.mu_final = points[k];
      p.shift = table.shift;
      try {
        rows[k] = run_quench(p, options);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || k < first_error->first) first_error = {k, e.what()};
        failed = true;
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::min<long>(workers, static_cast<long>(points.size())));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  if (first_error) {
    std::vector<QuenchReport> partial;
    for (auto& r : rows) {
      if (r) partial.push_back(*r);
    }
    const double mu = points[first_error->first];
    throw SweepAborted("sweep aborted at mu_f = " + std::to_string(mu) + ": " + first_error->second,
                       std::move(partial), mu);
  }
  for (auto& r : rows) table.rows.push_back(std::move(*r));
  locate_transition(table);
  return table;
}

std::vector<std::pair<std::string, double>> difference_quantities(const QuenchReport& r) {
  return {{"W", r.W},           {"Q", r.Q},           {"W_diss", r.W_diss},   {"dF_S", r.dF_S},
          {"dS", r.dS},         {"dU_S", r.dU_S},     {"Sigma_i", r.Sigma_i}, {"Sigma_f", r.Sigma_f},
          {"first_law_residual", r.first_law_residual}, {"slack_work", r.slack_work},
          {"slack_heat", r.slack_heat}, {"ratio_i", r.ratio_i}, {"ratio_f", r.ratio_f}};
}

BetaDiagnostics diagnose(const SweepTable& table) {
  BetaDiagnostics d;
  if (!table.rows.empty()) d.beta = table.rows.front().beta;
  for (const auto& r : table.rows) {
    for (const auto& [name, v] : difference_quantities(r)) {
      if (!std::isfinite(v)) {
        d.finite = false;
        d.non_finite.push_back(name + " at mu_f = " + std::to_string(r.mu_f));
      }
    }
  }
  for (std::size_t k = 1; k + 1 < table.rows.size(); ++k) {
    const auto a = difference_quantities(table.rows[k - 1]);
    const auto b = difference_quantities(table.rows[k]);
    const auto c = difference_quantities(table.rows[k + 1]);
    for (std::size_t q = 0; q < b.size(); ++q) {
      const double second = std::abs(c[q].second - 2.0 * b[q].second + a[q].second);
      auto& slot = d.max_second_difference[b[q].first];
      slot = std::max(slot, second);
    }
  }
  for (const double s : table.sigma_prime) {
    if (std::isfinite(s)) d.max_abs_sigma_prime = std::max(d.max_abs_sigma_prime, std::abs(s));
  }
  return d;
}

BetaSweep beta_sweep(const ModelParams& params, const MuGrid& grid, const std::vector<double>& betas,
                     const QuenchOptions& options, int workers) {
  if (betas.empty()) throw InvalidInput("betas must not be empty");
  for (std::size_t k = 0; k < betas.size(); ++k) {
    if (!(betas[k] > 0.0)) throw InvalidInput("betas must be positive");
    if (k > 0 && !(betas[k] > betas[k - 1])) throw InvalidInput("betas must be strictly ascending");
  }
  ModelParams base = params;
  if (!base.shift) base.shift = choose_shift(base, grid.points()).value;
  BetaSweep out;
  for (const double beta : betas) {
    ModelParams p = base;
    p.beta = beta;
    out.tables.push_back(sweep_mu(p, grid, options, workers));
    out.diagnostics.push_back(diagnose(out.tables.back()));
  }
  for (std::size_t k = 1; k < out.diagnostics.size(); ++k) {
    if (out.diagnostics[k].max_abs_sigma_prime < out.diagnostics[k - 1].max_abs_sigma_prime) out.sharpening = false;
  }
  return out;
}

WeakComparison weak_coupling_report(const ModelParams& params, const MuGrid& grid, QuenchOptions options,
                                    int workers) {
  options.weak = true;
  WeakComparison out;
  out.table = sweep_mu(params, grid, options, workers);
  out.min_ratio_i = std::numeric_limits<double>::infinity();
  out.min_ratio_f = std::numeric_limits<double>::infinity();
  for (const auto& r : out.table.rows) {
    out.max_w_diss_difference = std::max(out.max_w_diss_difference, std::abs(r.W_diss - r.weak->W_diss));
    out.max_weak_first_law_residual = std::max(out.max_weak_first_law_residual, r.weak->first_law_residual);
    out.min_ratio_i = std::min(out.min_ratio_i, r.ratio_i);
    out.min_ratio_f = std::min(out.min_ratio_f, r.ratio_f);
  }
  return out;
}

}  // namespace z2thermo
