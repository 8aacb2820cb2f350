#pragma once

// Degree-of-freedom layout, local operators, product bases, and the
// operations that act on them: tensor embedding, matrices of operator
// strings in a product basis, and the partial trace onto the system.
//
// Basis convention.  A product-basis state of the 2N qubits is a bit label;
// DOF k (layout order site 0, link 0, site 1, link 1, ...) is bit 2N-1-k, so
// the first DOF is the most significant and label order equals Kronecker
// order.  A matter bit is the occupation (1 = occupied).  A link bit is the
// electric-field value in the eigenbasis of the link's x Pauli (0 = +1, 1 = -1),
// so the link's z Pauli is a bit flip.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "z2thermo/linalg.hpp"

namespace z2thermo {

using Label = std::uint64_t;
using DofId = int;

enum class DofKind { site, link };

struct Dof {
  DofKind kind;
  int index;      // lattice site or link number
  int qubit;      // position in layout order
  bool in_system;
};

/// Ordered DOFs of a periodic N-site chain with N links, split into a
/// contiguous system (sites 0..N_S-1, links 0..N_S-2) and the reservoir.
class DofLayout {
 public:
  DofLayout(int n_sites, int n_system);

  int n_sites() const { return n_sites_; }
  int n_system() const { return n_system_; }
  int size() const { return static_cast<int>(dofs_.size()); }

  /// DOF of site n (periodic).
  DofId site(int n) const { return 2 * wrap(n); }
  /// DOF of the link to the right of site n (periodic).
  DofId link(int n) const { return 2 * wrap(n) + 1; }

  const Dof& dof(DofId id) const { return dofs_.at(static_cast<std::size_t>(id)); }
  std::span<const Dof> dofs() const { return dofs_; }
  bool in_system(DofId id) const { return dof(id).in_system; }
  bool contains(DofId id) const { return id >= 0 && id < size(); }

  std::span<const DofId> system_dofs() const { return system_dofs_; }
  std::span<const DofId> reservoir_dofs() const { return reservoir_dofs_; }

  int bit_position(DofId id) const { return size() - 1 - id; }
  unsigned bit(Label label, DofId id) const { return static_cast<unsigned>((label >> bit_position(id)) & 1u); }
  Label with_bit(Label label, DofId id, unsigned value) const {
    const Label mask = Label{1} << bit_position(id);
    return value ? (label | mask) : (label & ~mask);
  }

  /// Index of the system-factor state carried by a full label.
  Label system_label(Label full) const { return gather(full, system_dofs_); }
  /// Index of the reservoir-factor state carried by a full label.
  Label reservoir_label(Label full) const { return gather(full, reservoir_dofs_); }
  Label compose(Label system, Label reservoir) const {
    return scatter(system, system_dofs_) | scatter(reservoir, reservoir_dofs_);
  }

  BasisId full_basis() const { return {SpaceKind::full, n_sites_, n_system_}; }
  BasisId sector_basis() const { return {SpaceKind::sector, n_sites_, n_system_}; }
  BasisId system_basis() const { return {SpaceKind::system, n_sites_, n_system_}; }
  BasisId reservoir_basis() const { return {SpaceKind::reservoir, n_sites_, n_system_}; }

 private:
  int wrap(int n) const { return ((n % n_sites_) + n_sites_) % n_sites_; }
  Label gather(Label full, std::span<const DofId> ids) const;
  Label scatter(Label packed, std::span<const DofId> ids) const;

  int n_sites_;
  int n_system_;
  std::vector<Dof> dofs_;
  std::vector<DofId> system_dofs_;
  std::vector<DofId> reservoir_dofs_;
};

enum class LocalOp { x, z, plus, minus, number, identity };

LocalOp parse_local_op(std::string_view label);
std::string_view to_string(LocalOp op);

/// 2x2 matrix of a local operator in the DOF's basis convention.
Eigen::Matrix2d local_matrix(DofKind kind, LocalOp op);

/// Hermitian conjugate of a local operator label.
LocalOp adjoint(LocalOp op);

struct Factor {
  DofId dof;
  LocalOp op;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// coefficient × (tensor product of factors), identity elsewhere.
struct Product {
  double coefficient = 1.0;
  std::vector<Factor> factors;
};

/// Rejects unknown or repeated DOFs.
void validate_factors(std::span<const Factor> factors, const DofLayout& layout);

/// Ordered set of product-basis labels spanning a subspace.
class ProductBasis {
 public:
  ProductBasis(BasisId id, std::vector<Label> labels);

  const BasisId& id() const { return id_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(labels_.size()); }
  std::span<const Label> labels() const { return labels_; }
  Label label(Eigen::Index i) const { return labels_[static_cast<std::size_t>(i)]; }
  std::optional<Eigen::Index> index_of(Label label) const;

 private:
  BasisId id_;
  std::vector<Label> labels_;
};

/// All 4^N labels.
ProductBasis full_basis(const DofLayout& layout);
/// System-factor basis: labels with every reservoir bit zero, ordered by system index.
ProductBasis system_basis(const DofLayout& layout);
/// Reservoir-factor basis: labels with every system bit zero, ordered by reservoir index.
ProductBasis reservoir_basis(const DofLayout& layout);

/// Calls emit(target_label, amplitude) for every nonzero ⟨target| P |label⟩.
template <class Emit>
void apply_product(const Product& p, const DofLayout& layout, Label label, Emit&& emit) {
  struct Walker {
    const Product& p;
    const DofLayout& layout;
    Emit& emit;
    void operator()(std::size_t k, Label current, double amp) const {
      if (k == p.factors.size()) {
        emit(current, amp);
        return;
      }
      const Factor& f = p.factors[k];
      const auto m = local_matrix(layout.dof(f.dof).kind, f.op);
      const unsigned in = layout.bit(current, f.dof);
      for (unsigned out = 0; out < 2; ++out) {
        const double a = m(out, in);
        if (a != 0.0) (*this)(k + 1, layout.with_bit(current, f.dof, out), amp * a);
      }
    }
  };
  Walker{p, layout, emit}(0, label, p.coefficient);
}

/// Matrix of Σ products in `basis`; components leaving the basis are dropped,
/// which is exactly the compression P† A P onto the span of the basis.
template <class Scalar>
Operator<Scalar> matrix_in_basis(std::span<const Product> products, const ProductBasis& basis,
                                 const DofLayout& layout) {
  Operator<Scalar> out = Operator<Scalar>::zero(basis.dim(), basis.id());
  for (const auto& p : products) {
    for (Eigen::Index col = 0; col < basis.dim(); ++col) {
      apply_product(p, layout, basis.label(col), [&](Label target, double amp) {
        if (const auto row = basis.index_of(target)) out.matrix(*row, col) += Scalar(amp);
      });
    }
  }
  return out;
}

/// Sparse full-space matrix of Σ products (for lattices too large for dense full-space storage).
Eigen::SparseMatrix<double> sparse_full_matrix(std::span<const Product> products, const DofLayout& layout);

/// Tensor product of local operators at their DOFs, identity elsewhere, on the full space.
template <class Scalar>
Operator<Scalar> embed(std::span<const Factor> factors, const DofLayout& layout) {
  validate_factors(factors, layout);
  const Product p{1.0, {factors.begin(), factors.end()}};
  return matrix_in_basis<Scalar>(std::span<const Product>(&p, 1), full_basis(layout), layout);
}

/// Same tensor product on a factor basis (system or reservoir); every factor must live there.
template <class Scalar>
Operator<Scalar> embed(std::span<const Factor> factors, const DofLayout& layout, const ProductBasis& basis) {
  validate_factors(factors, layout);
  const bool system = basis.id().kind == SpaceKind::system;
  const bool reservoir = basis.id().kind == SpaceKind::reservoir;
  for (const auto& f : factors) {
    if ((system && !layout.in_system(f.dof)) || (reservoir && layout.in_system(f.dof))) {
      throw InvalidInput("embed: DOF " + std::to_string(f.dof) + " is outside " + to_string(basis.id()));
    }
  }
  const Product p{1.0, {factors.begin(), factors.end()}};
  return matrix_in_basis<Scalar>(std::span<const Product>(&p, 1), basis, layout);
}

/// Reduced operator on the system factor: ρ_S[s,s'] = Σ_r ρ[(s,r),(s',r)].
///
/// `rho` is expressed in `basis` (full space or any product sub-basis such as
/// the physical sector).  Matrix elements are accumulated directly from pairs
/// of basis states with equal reservoir labels; nothing is lifted to the full
/// tensor space.
template <class Scalar>
Operator<Scalar> partial_trace_to_S(const Operator<Scalar>& rho, const ProductBasis& basis, const DofLayout& layout,
                                    RealOf<Scalar> trace_tol = RealOf<Scalar>(1e-9)) {
  using std::abs;
  if (!(rho.basis == basis.id()) || rho.dim() != basis.dim()) {
    throw InvalidInput("partial_trace_to_S: operator basis " + to_string(rho.basis) + " does not match " +
                       to_string(basis.id()));
  }
  const auto tr = real_part(Scalar(rho.matrix.trace()));
  if (abs(tr - RealOf<Scalar>(1)) > trace_tol) {
    throw InvalidDensity("partial_trace_to_S: input trace " + std::to_string(to_double(tr)) + " is not 1");
  }
  std::map<Label, std::vector<std::pair<Eigen::Index, Label>>> groups;
  for (Eigen::Index i = 0; i < basis.dim(); ++i) {
    const Label l = basis.label(i);
    groups[layout.reservoir_label(l)].push_back({i, layout.system_label(l)});
  }
  const auto dim_s = Eigen::Index{1} << layout.system_dofs().size();
  Operator<Scalar> out = Operator<Scalar>::zero(dim_s, layout.system_basis());
  for (const auto& [r, members] : groups) {
    for (const auto& [a, sa] : members) {
      for (const auto& [b, sb] : members) {
        out.matrix(static_cast<Eigen::Index>(sa), static_cast<Eigen::Index>(sb)) += rho.matrix(a, b);
      }
    }
  }
  return out;
}

}  // namespace z2thermo
