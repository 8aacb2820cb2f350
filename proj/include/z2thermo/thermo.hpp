#pragma once

// Gibbs states, reduced states, entanglement Hamiltonian, Hamiltonian of mean
// force, free energy, entropy and internal energy.

#include <sstream>

#include "z2thermo/layout.hpp"

namespace z2thermo {

enum class StateSource { sector, system_factor, reservoir_factor, plain };

template <class Scalar>
struct ThermalState {
  using Real = RealOf<Scalar>;

  Operator<Scalar> rho;
  Real beta;
  Real log_z;
  StateSource source = StateSource::plain;
  Vector<Real> energies;  // spectrum of the generating Hamiltonian, ascending
};

/// log Tr e^{-βH} from a spectrum, with the lowest level factored out.
template <class Real>
Real log_partition(const Vector<Real>& energies, const Real& beta) {
  using std::exp;
  using std::log;
  const Real e0 = energies.minCoeff();
  Real sum(0);
  for (Eigen::Index k = 0; k < energies.size(); ++k) sum += exp(-beta * (energies(k) - e0));
  return -beta * e0 + log(sum);
}

/// e^{-βH}/Z with every exponent taken relative to the lowest eigenvalue.
template <class Scalar>
ThermalState<Scalar> gibbs(const Operator<Scalar>& h, RealOf<Scalar> beta, StateSource source = StateSource::plain) {
  using Real = RealOf<Scalar>;
  using std::exp;
  using std::log;
  if (!(beta > Real(0))) throw InvalidInput("gibbs: beta must be positive");
  const auto d = herm_eig(h);
  const Real e0 = d.min_eigenvalue();
  const auto energies = d.eigenvalues();
  Real sum(0);
  for (Eigen::Index k = 0; k < energies.size(); ++k) sum += exp(-beta * (energies(k) - e0));
  auto rho = d.reconstruct([&](const Real& lam) { return exp(-beta * (lam - e0)) / sum; });
  return {{std::move(rho), h.basis}, beta, -beta * e0 + log(sum), source, energies};
}

/// Von Neumann entropy of a Gibbs state, evaluated from its spectrum as β⟨E⟩ + log Z.
template <class Scalar>
RealOf<Scalar> gibbs_entropy(const ThermalState<Scalar>& state) {
  using Real = RealOf<Scalar>;
  using std::exp;
  Real s(0);
  for (Eigen::Index k = 0; k < state.energies.size(); ++k) {
    const Real minus_log_p = state.beta * state.energies(k) + state.log_z;
    s += exp(-minus_log_p) * minus_log_p;
  }
  return s;
}

template <class Scalar>
struct ReducedState {
  Operator<Scalar> rho;
  SpectralDecomposition<Scalar> spectrum;
};

/// ρ_S = Tr_R of a sector-represented state.
template <class Scalar>
ReducedState<Scalar> reduced_thermal(const ThermalState<Scalar>& state, const ProductBasis& basis,
                                     const DofLayout& layout) {
  auto rho = partial_trace_to_S(state.rho, basis, layout);
  auto spectrum = herm_eig(rho);
  return {std::move(rho), std::move(spectrum)};
}

/// −Σ p ln p over the support eigenvalues (λ > support_tol · largest).
template <class Scalar>
RealOf<Scalar> vn_entropy(const SpectralDecomposition<Scalar>& d,
                          RealOf<Scalar> support_tol = RealOf<Scalar>(1e-12)) {
  using Real = RealOf<Scalar>;
  using std::log;
  const Real cut = support_tol * d.max_eigenvalue();
  Real s(0);
  for (const auto& blk : d.blocks()) {
    for (Eigen::Index k = 0; k < blk.eigenvalues.size(); ++k) {
      const Real p = blk.eigenvalues(k);
      if (p > cut) s -= p * log(p);
    }
  }
  return s;
}

template <class Scalar>
RealOf<Scalar> vn_entropy(const Operator<Scalar>& rho, RealOf<Scalar> support_tol = RealOf<Scalar>(1e-12)) {
  return vn_entropy(herm_eig(rho), support_tol);
}

/// −ln ρ_S on its support.
template <class Scalar>
SupportOperator<Scalar> entanglement_hamiltonian(const SpectralDecomposition<Scalar>& rho_spectrum,
                                                 RealOf<Scalar> support_tol = RealOf<Scalar>(1e-12)) {
  auto l = log_support(rho_spectrum, support_tol);
  l.value.matrix = -l.value.matrix;
  return l;
}

/// F_S = −(ln Z_SR − ln Z_R)/β.
template <class Real>
Real free_energy(const Real& log_z_sr, const Real& log_z_r, const Real& beta) {
  return -(log_z_sr - log_z_r) / beta;
}

template <class Scalar>
struct MeanForceBundle {
  using Real = RealOf<Scalar>;

  Operator<Scalar> rho_S;
  SupportOperator<Scalar> h_ent;
  Real free_energy;
  SupportOperator<Scalar> h_star;
  Eigen::Index support_dim = 0;
  Real route_deviation;  // max-entry distance to the direct logarithm of ρ_S e^{−βF_S}
};

/// H* = H_ent/β + F_S·P, cross-checked against −(1/β) ln(ρ_S e^{−βF_S}) computed
/// from an independent eigendecomposition.  Throws NumericalInstability when the
/// two routes differ by more than `abort_tol` or disagree on the support.
template <class Scalar>
MeanForceBundle<Scalar> mean_force_hamiltonian(const ReducedState<Scalar>& reduced, RealOf<Scalar> free_energy_s,
                                               RealOf<Scalar> beta,
                                               RealOf<Scalar> support_tol = RealOf<Scalar>(1e-12),
                                               RealOf<Scalar> abort_tol = RealOf<Scalar>(1e-6)) {
  using Real = RealOf<Scalar>;
  using std::exp;
  auto h_ent = entanglement_hamiltonian(reduced.spectrum, support_tol);
  SupportOperator<Scalar> h_star{
      {(h_ent.value.matrix / Scalar(beta) + Scalar(free_energy_s) * h_ent.projector.matrix).eval(),
       h_ent.value.basis},
      h_ent.projector,
      h_ent.support_dim};

  const Scalar scale(exp(-beta * free_energy_s));
  const Operator<Scalar> scaled{(reduced.rho.matrix * scale).eval(), reduced.rho.basis};
  auto direct = log_support(herm_eig(scaled), support_tol);
  direct.value.matrix /= Scalar(-beta);

  const Real deviation = max_abs(direct.value.matrix - h_star.value.matrix);
  if (direct.support_dim != h_star.support_dim || !(deviation <= abort_tol)) {
    std::ostringstream msg;
    msg << "mean_force_hamiltonian: routes disagree (max-entry " << to_double(deviation) << ", support "
        << h_star.support_dim << " vs " << direct.support_dim << "); spectrum of H*:";
    const auto a = herm_eig(h_star.value).eigenvalues();
    const auto b = herm_eig(direct.value).eigenvalues();
    for (Eigen::Index k = 0; k < a.size(); ++k) msg << ' ' << to_double(a(k));
    msg << "; direct route:";
    for (Eigen::Index k = 0; k < b.size(); ++k) msg << ' ' << to_double(b(k));
    throw NumericalInstability(msg.str());
  }
  const auto dim = h_star.support_dim;
  return {reduced.rho, std::move(h_ent), free_energy_s, std::move(h_star), dim, deviation};
}

/// U_S = Tr(ρ_S H*), with ρ_S required to live inside the support of H*.
template <class Scalar>
RealOf<Scalar> internal_energy(const Operator<Scalar>& rho_s, const SupportOperator<Scalar>& h_star,
                               RealOf<Scalar> leakage_tol = RealOf<Scalar>(1e-9)) {
  return expectation(rho_s, h_star, leakage_tol);
}

}  // namespace z2thermo
