#pragma once

// Z2 gauge field on links coupled to hardcore bosons on sites of a periodic
// chain: Hamiltonian terms, Gauss-law operators, and the physical sector.

#include <optional>
#include <vector>

#include "z2thermo/layout.hpp"

namespace z2thermo {

struct ModelParams {
  int n_sites = 6;
  int n_system = 4;
  double hopping = -0.5;   // J
  double electric = 0.5;   // epsilon
  double mass = 0.5;       // m
  double mu_initial = 0.0;
  double mu_final = 0.0;
  std::optional<double> shift;  // per-site constant c; empty means automatic
  double beta = 10.0;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

enum class QuenchTime { initial, final };
enum class TermFamily { hopping, electric, mass, chemical, constant };
enum class Region { unset, system, reservoir, interaction };

std::string_view to_string(TermFamily f);
std::string_view to_string(Region r);

struct LabeledTerm {
  double coefficient = 0.0;
  std::vector<Factor> factors;
  bool hermitian_conjugate = false;  // term is coefficient·(P + P†)
  TermFamily family = TermFamily::constant;
  int index = 0;
  Region region = Region::unset;

  std::vector<Product> products() const;
};

/// Chemical potential seen by site n at the given time (zero in the reservoir).
double chemical_potential(const ModelParams& params, const DofLayout& layout, int n, QuenchTime at);

/// 5N terms in family order hopping, electric, mass, chemical, constant; each family by index.
/// The constant term uses params.shift, or zero when it is unset.
std::vector<LabeledTerm> build_terms(const ModelParams& params, QuenchTime at);

std::vector<Product> products_of(std::span<const LabeledTerm> terms);

/// G_n eigenvalue (+1 or -1) of a product-basis label.
int gauss_eigenvalue(Label label, int n, const DofLayout& layout);

bool is_physical(Label label, const DofLayout& layout);

/// G_n as a diagonal operator on a product basis.
template <class Scalar>
Operator<Scalar> gauss_operator(int n, const DofLayout& layout, const ProductBasis& basis) {
  if (n < 0 || n >= layout.n_sites()) throw InvalidInput("gauss_operator: site index out of range");
  Operator<Scalar> g = Operator<Scalar>::zero(basis.dim(), basis.id());
  for (Eigen::Index i = 0; i < basis.dim(); ++i) g.matrix(i, i) = Scalar(gauss_eigenvalue(basis.label(i), n, layout));
  return g;
}

template <class Scalar>
Operator<Scalar> gauss_operator(int n, const DofLayout& layout) {
  return gauss_operator<Scalar>(n, layout, full_basis(layout));
}

/// Max-entry norm of [H, G_n] on the full space, with H given as operator strings.
/// G_n is diagonal, so [H, G_n]_ab = H_ab (g_b - g_a); nothing dense is formed.
double gauss_commutator_norm(std::span<const Product> products, int n, const DofLayout& layout);

/// Sites whose Gauss operator acts on system DOFs only.
std::vector<int> interior_sites(const DofLayout& layout);

/// Dimension of the system-factor subspace on which every interior Gauss
/// operator is +1; reduced states of sector states live inside it.
Eigen::Index structural_support_dim(const DofLayout& layout);

struct PhysicalSector {
  ProductBasis basis;

  Eigen::Index dim() const { return basis.dim(); }

  /// Full-space columns of the sector basis states.
  template <class Scalar>
  Matrix<Scalar> isometry() const {
    const auto full_dim = Eigen::Index{1} << (2 * basis.id().n_sites);
    Matrix<Scalar> v = Matrix<Scalar>::Zero(full_dim, dim());
    for (Eigen::Index i = 0; i < dim(); ++i) v(static_cast<Eigen::Index>(basis.label(i)), i) = Scalar(1);
    return v;
  }
};

/// Product-basis states with G_n = +1 for every n.
PhysicalSector physical_sector(const DofLayout& layout);

/// V† A V for a full-space operator A.
template <class Scalar>
Operator<Scalar> restrict(const Operator<Scalar>& a, const PhysicalSector& sector) {
  const BasisId full{SpaceKind::full, sector.basis.id().n_sites, sector.basis.id().n_system};
  if (!(a.basis == full)) throw InvalidInput("restrict: operator is on " + to_string(a.basis) + ", not the full space");
  const auto v = sector.isometry<Scalar>();
  return {v.adjoint() * a.matrix * v, sector.basis.id()};
}

}  // namespace z2thermo
