#pragma once

// Definition of run_quench_at, included by the translation units that
// instantiate it for each scalar type.

#include <algorithm>
#include <sstream>
#include <type_traits>

#include "z2thermo/quench.hpp"
#include "z2thermo/thermo.hpp"

namespace z2thermo {

/// Relative support cut for reduced states at the working precision of Real.
template <class Real>
Real support_tolerance(int guard) {
  if (decimal_digits<Real>() >= guard + 12) return resolvable_fraction<Real>(guard);
  return Real(1e-12);
}

namespace detail {

template <class Scalar>
Eigen::Index count_support(const SpectralDecomposition<Scalar>& d, const RealOf<Scalar>& support_tol) {
  const auto cut = support_tol * d.max_eigenvalue();
  Eigen::Index n = 0;
  for (const auto& blk : d.blocks()) {
    for (Eigen::Index k = 0; k < blk.eigenvalues.size(); ++k) n += blk.eigenvalues(k) > cut ? 1 : 0;
  }
  return n;
}

template <class Scalar>
WeakReport weak_quench(const PartitionedHamiltonian<Scalar>& h, const RealOf<Scalar>& beta) {
  using Real = RealOf<Scalar>;
  const auto rho_i = gibbs(h.system_factor_initial, beta, StateSource::system_factor);
  const auto rho_f = gibbs(h.system_factor_final, beta, StateSource::system_factor);
  const Real u_ii = expectation(rho_i.rho, h.system_factor_initial);
  const Real u_if = expectation(rho_i.rho, h.system_factor_final);
  const Real u_ff = expectation(rho_f.rho, h.system_factor_final);
  WeakReport w;
  w.W = to_double(Real(u_if - u_ii));
  w.Q = to_double(Real(u_ff - u_if));
  w.dU_S = to_double(Real(u_ff - u_ii));
  const Real df = -(rho_f.log_z - rho_i.log_z) / beta;
  w.dF_S = to_double(df);
  w.dS = to_double(Real(gibbs_entropy(rho_f) - gibbs_entropy(rho_i)));
  w.W_diss = to_double(Real(u_if - u_ii - df));
  w.first_law_residual = std::abs(w.dU_S - (w.W + w.Q));
  return w;
}

}  // namespace detail

template <class Scalar>
QuenchReport run_quench_at(const ModelParams& params, const QuenchOptions& options) {
  using Real = RealOf<Scalar>;
  using std::abs;
  params.validate();
  options.tolerances.validate();
  if (!params.shift) throw InvalidInput("run_quench_at: the shift c must be resolved before the quench");
  const auto& tol = options.tolerances;

  const DofLayout layout(params.n_sites, params.n_system);
  const auto sector = physical_sector(layout);
  const auto h = partition_model<Scalar>(params, sector, layout);
  const Real beta(params.beta);
  const Real support_tol = support_tolerance<Real>(tol.precision_guard);
  const Real leak_tol(tol.support);

  const auto pi_i = gibbs(h.total_initial, beta, StateSource::sector);
  const auto pi_f = gibbs(h.total_final, beta, StateSource::sector);
  const Real log_z_r = log_partition(herm_eig(h.reservoir_factor).eigenvalues(), beta);
  const auto red_i = reduced_thermal(pi_i, sector.basis, layout);
  const auto red_f = reduced_thermal(pi_f, sector.basis, layout);

  const auto structural = structural_support_dim(layout);
  for (const auto* red : {&red_i, &red_f}) {
    const auto rank = detail::count_support(red->spectrum, support_tol);
    if (rank != structural) {
      std::ostringstream msg;
      msg << "reduced state resolves " << rank << " of " << structural << " support eigenvalues at "
          << decimal_digits<Real>() << " digits (mu_f = " << params.mu_final << ", beta = " << params.beta << ")";
      throw InsufficientPrecision(msg.str());
    }
  }

  const Real f_i = free_energy(pi_i.log_z, log_z_r, beta);
  const Real f_f = free_energy(pi_f.log_z, log_z_r, beta);
  const Real abort_tol(tol.route_abort);
  const auto mf_i = mean_force_hamiltonian(red_i, f_i, beta, support_tol, abort_tol);
  const auto mf_f = mean_force_hamiltonian(red_f, f_f, beta, support_tol, abort_tol);

  const Real support_distance = operator_norm_distance(mf_i.h_star.projector, mf_f.h_star.projector);
  if (mf_i.support_dim != mf_f.support_dim || !(support_distance < Real(tol.support))) {
    std::ostringstream msg;
    msg << "supports of the initial and final reduced states differ: dims " << mf_i.support_dim << " and "
        << mf_f.support_dim << ", projector distance " << to_double(support_distance);
    throw SupportMismatch(msg.str());
  }

  const auto& rho_i = red_i.rho;
  const auto& rho_f = red_f.rho;
  const auto& proj = mf_i.h_star.projector;
  const Eigen::Index dim = mf_i.support_dim;
  const SupportOperator<Scalar> d_star{mf_f.h_star.value - mf_i.h_star.value, proj, dim};
  const SupportOperator<Scalar> d_ent{mf_f.h_ent.value - mf_i.h_ent.value, proj, dim};

  const Real w = expectation(rho_i, d_star, leak_tol);
  const Real u_i = internal_energy(rho_i, mf_i.h_star, leak_tol);
  const Real u_f = internal_energy(rho_f, mf_f.h_star, leak_tol);
  const Real u_if = expectation(rho_i, mf_f.h_star, leak_tol);
  const Real q = u_f - u_if;
  const Real du = u_f - u_i;
  const Real w_diss_ent = expectation(rho_i, d_ent, leak_tol) / beta;
  const Real s_i = vn_entropy(red_i.spectrum, support_tol);
  const Real s_f = vn_entropy(red_f.spectrum, support_tol);
  const Real df = f_f - f_i;
  const Real ds = s_f - s_i;

  auto coupling_ratio = [&](const ThermalState<Scalar>& pi, QuenchTime t) {
    const Real v = expectation(pi.rho, h.interaction);
    const Real hs = expectation(pi.rho, h.system(t)) - Real(*params.shift) * Real(params.n_system);
    return to_double(Real(abs(v / hs)));
  };

  QuenchReport r;
  r.mu_f = params.mu_final;
  r.beta = params.beta;
  r.W = to_double(w);
  r.Q = to_double(q);
  r.dF_S = to_double(df);
  r.W_diss = to_double(Real(w - df));
  r.dS = to_double(ds);
  r.dU_S = to_double(du);
  r.Sigma_i = to_double(chiral_condensate(rho_i, layout));
  r.Sigma_f = to_double(chiral_condensate(rho_f, layout));
  r.first_law_residual = to_double(Real(abs(du - (w + q))));
  r.slack_work = to_double(Real(w - df));
  r.slack_heat = to_double(Real(ds - beta * q));
  r.ratio_i = coupling_ratio(pi_i, QuenchTime::initial);
  r.ratio_f = coupling_ratio(pi_f, QuenchTime::final);
  r.support_check = true;

  r.W_diss_entanglement = to_double(w_diss_ent);
  r.W_diss_route_deviation = to_double(Real(abs(w_diss_ent - (w - df))));
  r.h_star_route_deviation = std::max(to_double(mf_i.route_deviation), to_double(mf_f.route_deviation));
  r.equilibrium_residual = std::max(to_double(Real(abs(f_i - (u_i - s_i / beta)))),
                                    to_double(Real(abs(f_f - (u_f - s_f / beta)))));
  r.support_distance = to_double(support_distance);
  r.support_dim = dim;
  r.structural_support_dim = structural;
  r.precision_digits = static_cast<unsigned>(decimal_digits<Real>());
  r.shift = *params.shift;
  r.F_S_i = to_double(f_i);
  r.F_S_f = to_double(f_f);
  r.U_S_i = to_double(u_i);
  r.U_S_f = to_double(u_f);
  r.S_i = to_double(s_i);
  r.S_f = to_double(s_f);
  if (options.weak) r.weak = detail::weak_quench(h, beta);
  return r;
}

}  // namespace z2thermo
