#pragma once

// System / reservoir / interaction split of the Hamiltonian and the choice
// of the per-site constant shift.

#include <string>
#include <vector>

#include "z2thermo/model.hpp"

namespace z2thermo {

/// Sets the region of every term from the DOFs it touches.
std::vector<LabeledTerm> classify(std::vector<LabeledTerm> terms, const DofLayout& layout);

std::vector<Product> region_products(std::span<const LabeledTerm> terms, Region region);

template <class Scalar>
struct PartitionedHamiltonian {
  std::vector<LabeledTerm> terms_initial;
  std::vector<LabeledTerm> terms_final;
  double shift = 0.0;

  // physical-sector representation
  Operator<Scalar> total_initial;
  Operator<Scalar> total_final;
  Operator<Scalar> system_initial;
  Operator<Scalar> system_final;
  Operator<Scalar> reservoir;
  Operator<Scalar> interaction;

  // factor-space representation
  Operator<Scalar> system_factor_initial;
  Operator<Scalar> system_factor_final;
  Operator<Scalar> reservoir_factor;

  const Operator<Scalar>& total(QuenchTime t) const { return t == QuenchTime::initial ? total_initial : total_final; }
  const Operator<Scalar>& system(QuenchTime t) const { return t == QuenchTime::initial ? system_initial : system_final; }
  const Operator<Scalar>& system_factor(QuenchTime t) const {
    return t == QuenchTime::initial ? system_factor_initial : system_factor_final;
  }
};

/// Sums classified terms by region; throws NumericalInstability if the region
/// sums do not reproduce the directly assembled total within 1e-12.
template <class Scalar>
PartitionedHamiltonian<Scalar> assemble(std::vector<LabeledTerm> initial, std::vector<LabeledTerm> final_terms,
                                        double shift, const PhysicalSector& sector, const DofLayout& layout) {
  for (const auto* list : {&initial, &final_terms}) {
    for (const auto& t : *list) {
      if (t.region == Region::unset) throw InvalidInput("assemble: term without a region");
    }
  }
  const auto& basis = sector.basis;
  const auto sys = system_basis(layout);
  const auto res = reservoir_basis(layout);
  auto on = [&](std::span<const LabeledTerm> terms, Region r, const ProductBasis& b) {
    const auto p = region_products(terms, r);
    return matrix_in_basis<Scalar>(p, b, layout);
  };

  PartitionedHamiltonian<Scalar> h;
  h.shift = shift;
  h.total_initial = matrix_in_basis<Scalar>(products_of(initial), basis, layout);
  h.total_final = matrix_in_basis<Scalar>(products_of(final_terms), basis, layout);
  h.system_initial = on(initial, Region::system, basis);
  h.system_final = on(final_terms, Region::system, basis);
  h.reservoir = on(initial, Region::reservoir, basis);
  h.interaction = on(initial, Region::interaction, basis);
  h.system_factor_initial = on(initial, Region::system, sys);
  h.system_factor_final = on(final_terms, Region::system, sys);
  h.reservoir_factor = on(initial, Region::reservoir, res);

  const auto reservoir_final = on(final_terms, Region::reservoir, basis);
  const auto interaction_final = on(final_terms, Region::interaction, basis);
  const RealOf<Scalar> tol(1e-12);
  if (max_abs(reservoir_final.matrix - h.reservoir.matrix) > tol ||
      max_abs(interaction_final.matrix - h.interaction.matrix) > tol) {
    throw NumericalInstability("assemble: reservoir or interaction part changes across the quench");
  }
  for (const auto t : {QuenchTime::initial, QuenchTime::final}) {
    const auto sum = h.system(t) + h.reservoir + h.interaction;
    if (max_abs(sum.matrix - h.total(t).matrix) > tol) {
      throw NumericalInstability("assemble: region sums do not reproduce the total Hamiltonian");
    }
  }
  h.terms_initial = std::move(initial);
  h.terms_final = std::move(final_terms);
  return h;
}

/// build_terms + classify + assemble for both quench times.
template <class Scalar>
PartitionedHamiltonian<Scalar> partition_model(const ModelParams& params, const PhysicalSector& sector,
                                               const DofLayout& layout) {
  auto initial = classify(build_terms(params, QuenchTime::initial), layout);
  auto final_terms = classify(build_terms(params, QuenchTime::final), layout);
  return assemble<Scalar>(std::move(initial), std::move(final_terms), params.shift.value_or(0.0), sector, layout);
}

struct ComponentMinimum {
  std::string name;
  double lambda_min = 0.0;  // at c = 0
  int n_sites = 0;          // sites carrying a constant term
};

struct ShiftChoice {
  double value = 0.0;
  bool automatic = true;
  std::vector<ComponentMinimum> components;
  std::vector<std::string> warnings;  // explicit c leaving a component with negative spectrum
};

inline constexpr double kShiftGranularity = 1.0 / 16.0;

/// Lowest eigenvalue of each component at c = 0.
std::vector<ComponentMinimum> shift_components(const ModelParams& params);

/// Smallest multiple of `granularity` making every component non-negative.
double minimal_shift(std::span<const ComponentMinimum> components, double granularity = kShiftGranularity);

/// Automatic when params.shift is empty; otherwise validates the given c and records warnings.
ShiftChoice choose_shift(const ModelParams& params, double granularity = kShiftGranularity);

/// Automatic shift large enough for every final chemical potential in `mu_finals`.
ShiftChoice choose_shift(const ModelParams& params, std::span<const double> mu_finals,
                         double granularity = kShiftGranularity);

}  // namespace z2thermo
