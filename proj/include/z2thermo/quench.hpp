#pragma once

// Instantaneous quench of the system chemical potential: work, heat,
// dissipated work, free energy, entropy, chiral condensate, parameter sweeps
// and the weak-coupling comparison.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "z2thermo/partition.hpp"

namespace z2thermo {

struct Tolerances {
  double first_law = 1e-9;
  double second_law = 1e-9;
  double route = 1e-9;        // agreement of independent computational routes
  double route_abort = 1e-6;  // route disagreement that aborts a quench
  double support = 1e-9;      // projector distance and expectation leakage
  double equilibrium = 1e-9;  // F_S = U_S − S/β
  int precision_guard = 16;   // decimal digits kept in reserve above the smallest support eigenvalue

  /// Throws InvalidInput naming the first non-positive entry.
  void validate() const;
};

struct QuenchOptions {
  Tolerances tolerances;
  bool weak = false;                  // also compute the weak-coupling bookkeeping
  std::optional<unsigned> precision;  // force one precision tier (decimal digits)
};

/// Quench quantities with ρ_S replaced by the Gibbs state of H_S alone and U_S by ⟨H_S⟩.
struct WeakReport {
  double W = 0.0;
  double Q = 0.0;
  double W_diss = 0.0;
  double dF_S = 0.0;
  double dS = 0.0;
  double dU_S = 0.0;
  double first_law_residual = 0.0;
};

struct QuenchReport {
  double mu_f = 0.0;
  double beta = 0.0;
  double W = 0.0;
  double Q = 0.0;
  double W_diss = 0.0;
  double dF_S = 0.0;
  double dS = 0.0;
  double dU_S = 0.0;
  double Sigma_i = 0.0;
  double Sigma_f = 0.0;
  double first_law_residual = 0.0;
  double slack_work = 0.0;
  double slack_heat = 0.0;
  double ratio_i = 0.0;
  double ratio_f = 0.0;
  bool support_check = false;

  double W_diss_entanglement = 0.0;  // from entanglement Hamiltonians alone
  double W_diss_route_deviation = 0.0;
  double h_star_route_deviation = 0.0;  // max over both quench times
  double equilibrium_residual = 0.0;    // max over both quench times of |F_S − (U_S − S/β)|
  double support_distance = 0.0;        // operator norm of P_i − P_f
  Eigen::Index support_dim = 0;
  Eigen::Index structural_support_dim = 0;
  unsigned precision_digits = 0;
  double shift = 0.0;

  // absolute values; they depend on the reservoir partition-function convention
  double F_S_i = 0.0;
  double F_S_f = 0.0;
  double U_S_i = 0.0;
  double U_S_f = 0.0;
  double S_i = 0.0;
  double S_f = 0.0;

  std::optional<WeakReport> weak;

  bool laws_hold(const Tolerances& tol) const;
};

/// Σ = (1/N_S) Σ_{n<N_S} (−1)^n ⟨n_n⟩ for a state on the system factor.
template <class Scalar>
RealOf<Scalar> chiral_condensate(const Operator<Scalar>& rho_s, const DofLayout& layout) {
  using Real = RealOf<Scalar>;
  if (!(rho_s.basis == layout.system_basis())) {
    throw InvalidInput("chiral_condensate: state must live on the system factor, got " + to_string(rho_s.basis));
  }
  const auto basis = system_basis(layout);
  Real sigma(0);
  for (Eigen::Index i = 0; i < basis.dim(); ++i) {
    int staggered = 0;
    for (int n = 0; n < layout.n_system(); ++n) {
      if (layout.bit(basis.label(i), layout.site(n))) staggered += n % 2 == 0 ? 1 : -1;
    }
    sigma += real_part(Scalar(rho_s.matrix(i, i))) * Real(staggered);
  }
  return sigma / Real(layout.n_system());
}

/// Smallest precision tier expected to resolve the reduced states of `params`,
/// from the spectral widths of both global Hamiltonians.
unsigned starting_precision(const ModelParams& params, int guard);

/// Full quench at one precision tier; params.shift must be set.
/// Throws InsufficientPrecision when the support of a reduced state is not resolved.
template <class Scalar>
QuenchReport run_quench_at(const ModelParams& params, const QuenchOptions& options);

/// Full quench with automatic precision escalation.  An unset shift is chosen automatically.
QuenchReport run_quench(ModelParams params, const QuenchOptions& options = {});

/// Uniform grid start, start + step, ..., up to stop (inclusive within step/1000).
struct MuGrid {
  double start = 0.0;
  double stop = 10.0;
  double step = 0.1;

  std::vector<double> points() const;
  void validate() const;
};

struct SweepTable {
  std::vector<QuenchReport> rows;
  std::vector<double> sigma_prime;  // dΣ_f/dμ_f by central differences; NaN at the two ends
  double mu_f_c = 0.0;              // maximizer of |Σ′|
  double sigma_prime_at_c = 0.0;    // signed Σ′ there
  double mu_f_c_signed = 0.0;       // maximizer of the signed Σ′
  double shift = 0.0;
  MuGrid grid;
};

/// Raised when a sweep row fails; carries the rows that did complete.
class SweepAborted : public std::runtime_error {
 public:
  SweepAborted(const std::string& what, std::vector<QuenchReport> partial, double mu_f)
      : std::runtime_error(what), partial_rows(std::move(partial)), failed_mu_f(mu_f) {}
  std::vector<QuenchReport> partial_rows;
  double failed_mu_f;
};

/// One quench per grid point, evaluated by up to `workers` threads; rows are
/// assembled in grid order.  The shift is fixed across the grid.
SweepTable sweep_mu(const ModelParams& params, const MuGrid& grid, const QuenchOptions& options = {},
                    int workers = 1);

/// Fills sigma_prime and the transition location of a table whose rows are set.
void locate_transition(SweepTable& table);

struct BetaDiagnostics {
  double beta = 0.0;
  bool finite = true;
  std::vector<std::string> non_finite;                // "quantity at mu_f" descriptions
  std::map<std::string, double> max_second_difference;  // per reported quantity
  double max_abs_sigma_prime = 0.0;
};

struct BetaSweep {
  std::vector<SweepTable> tables;
  std::vector<BetaDiagnostics> diagnostics;
  bool sharpening = true;  // max|Σ′| non-decreasing in β
};

BetaSweep beta_sweep(const ModelParams& params, const MuGrid& grid, const std::vector<double>& betas,
                     const QuenchOptions& options = {}, int workers = 1);

BetaDiagnostics diagnose(const SweepTable& table);

struct WeakComparison {
  SweepTable table;  // rows carry weak sub-reports
  double max_w_diss_difference = 0.0;
  double max_weak_first_law_residual = 0.0;
  double min_ratio_i = 0.0;
  double min_ratio_f = 0.0;
};

WeakComparison weak_coupling_report(const ModelParams& params, const MuGrid& grid, QuenchOptions options = {},
                                    int workers = 1);

/// Named difference quantities of a row, in CSV order.
std::vector<std::pair<std::string, double>> difference_quantities(const QuenchReport& r);

}  // namespace z2thermo
