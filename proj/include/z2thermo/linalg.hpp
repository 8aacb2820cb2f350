#pragma once

// Dense Hermitian operator algebra: labeled operators, block-aware
// eigendecomposition, spectral matrix functions with support restriction,
// and expectation values.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "z2thermo/errors.hpp"
#include "z2thermo/scalar.hpp"

namespace z2thermo {

enum class SpaceKind { plain, full, sector, system, reservoir };

/// Identifies the labeled basis an operator acts on.
struct BasisId {
  SpaceKind kind = SpaceKind::plain;
  int n_sites = 0;
  int n_system = 0;

  friend bool operator==(const BasisId&, const BasisId&) = default;
};

inline std::string to_string(const BasisId& b) {
  const char* kind = "plain";
  switch (b.kind) {
    case SpaceKind::plain: kind = "plain"; break;
    case SpaceKind::full: kind = "full"; break;
    case SpaceKind::sector: kind = "sector"; break;
    case SpaceKind::system: kind = "system"; break;
    case SpaceKind::reservoir: kind = "reservoir"; break;
  }
  return std::string(kind) + "(N=" + std::to_string(b.n_sites) + ",N_S=" + std::to_string(b.n_system) + ")";
}

template <class Scalar>
struct Operator {
  Matrix<Scalar> matrix;
  BasisId basis;

  Eigen::Index dim() const { return matrix.rows(); }

  static Operator identity(Eigen::Index dim, BasisId basis = {}) {
    return {Matrix<Scalar>::Identity(dim, dim), basis};
  }
  static Operator zero(Eigen::Index dim, BasisId basis = {}) {
    return {Matrix<Scalar>::Zero(dim, dim), basis};
  }
};

template <class Scalar>
void require_same_basis(const Operator<Scalar>& a, const Operator<Scalar>& b, const char* what) {
  if (!(a.basis == b.basis) || a.dim() != b.dim()) {
    throw InvalidInput(std::string(what) + ": basis mismatch " + to_string(a.basis) + " vs " +
                       to_string(b.basis));
  }
}

template <class Scalar>
Operator<Scalar> operator+(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_same_basis(a, b, "operator+");
  return {a.matrix + b.matrix, a.basis};
}

template <class Scalar>
Operator<Scalar> operator-(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_same_basis(a, b, "operator-");
  return {a.matrix - b.matrix, a.basis};
}

template <class Scalar>
Operator<Scalar> operator*(const Scalar& s, const Operator<Scalar>& a) {
  return {s * a.matrix, a.basis};
}

template <class Derived>
RealOf<typename Derived::Scalar> max_abs(const Eigen::MatrixBase<Derived>& m) {
  using Real = RealOf<typename Derived::Scalar>;
  if (m.size() == 0) return Real(0);
  return m.cwiseAbs().maxCoeff();
}

template <class Scalar>
RealOf<Scalar> hermiticity_deviation(const Operator<Scalar>& a) {
  return max_abs(a.matrix - a.matrix.adjoint());
}

/// max-entry norm of [A, B].
template <class Scalar>
RealOf<Scalar> commutator_norm(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_same_basis(a, b, "commutator_norm");
  return max_abs(a.matrix * b.matrix - b.matrix * a.matrix);
}

/// Eigenpairs of one exactly decoupled block of a Hermitian matrix.
template <class Scalar>
struct SpectralBlock {
  std::vector<Eigen::Index> indices;        // ascending positions in the parent basis
  Vector<RealOf<Scalar>> eigenvalues;       // ascending
  Matrix<Scalar> eigenvectors;              // rows follow `indices`
};

template <class Scalar>
class SpectralDecomposition {
 public:
  using Real = RealOf<Scalar>;

  SpectralDecomposition(BasisId basis, Eigen::Index dim, std::vector<SpectralBlock<Scalar>> blocks)
      : basis_(basis), dim_(dim), blocks_(std::move(blocks)) {
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (Eigen::Index k = 0; k < blocks_[b].eigenvalues.size(); ++k) order_.push_back({b, k});
    }
    std::stable_sort(order_.begin(), order_.end(), [this](const auto& l, const auto& r) {
      return blocks_[l.first].eigenvalues(l.second) < blocks_[r.first].eigenvalues(r.second);
    });
  }

  const BasisId& source_basis() const { return basis_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<SpectralBlock<Scalar>>& blocks() const { return blocks_; }

  Vector<Real> eigenvalues() const {
    Vector<Real> out(dim_);
    for (std::size_t j = 0; j < order_.size(); ++j) {
      out(static_cast<Eigen::Index>(j)) = blocks_[order_[j].first].eigenvalues(order_[j].second);
    }
    return out;
  }

  /// Dense unitary whose column k pairs with eigenvalues()(k).
  Matrix<Scalar> eigenvectors() const {
    Matrix<Scalar> v = Matrix<Scalar>::Zero(dim_, dim_);
    for (std::size_t j = 0; j < order_.size(); ++j) {
      const auto& blk = blocks_[order_[j].first];
      for (std::size_t r = 0; r < blk.indices.size(); ++r) {
        v(blk.indices[r], static_cast<Eigen::Index>(j)) =
            blk.eigenvectors(static_cast<Eigen::Index>(r), order_[j].second);
      }
    }
    return v;
  }

  Real min_eigenvalue() const { return at(order_.front()); }
  Real max_eigenvalue() const { return at(order_.back()); }

  /// V diag(f(λ)) V†, evaluated block by block; f returns Scalar or Real.
  template <class F>
  Matrix<Scalar> reconstruct(F&& f) const {
    Matrix<Scalar> out = Matrix<Scalar>::Zero(dim_, dim_);
    for (const auto& blk : blocks_) {
      const auto n = static_cast<Eigen::Index>(blk.indices.size());
      Vector<Scalar> fv(n);
      for (Eigen::Index k = 0; k < n; ++k) fv(k) = Scalar(f(blk.eigenvalues(k)));
      const Matrix<Scalar> local = blk.eigenvectors * fv.asDiagonal() * blk.eigenvectors.adjoint();
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) out(blk.indices[r], blk.indices[c]) = local(r, c);
      }
    }
    return out;
  }

 private:
  Real at(const std::pair<std::size_t, Eigen::Index>& p) const { return blocks_[p.first].eigenvalues(p.second); }

  BasisId basis_;
  Eigen::Index dim_;
  std::vector<SpectralBlock<Scalar>> blocks_;
  std::vector<std::pair<std::size_t, Eigen::Index>> order_;
};

namespace detail {

inline Eigen::Index find_root(std::vector<Eigen::Index>& parent, Eigen::Index i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

/// Index sets of the connected components of the nonzero pattern of `m`.
template <class Scalar>
std::vector<std::vector<Eigen::Index>> exact_blocks(const Matrix<Scalar>& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  const Scalar zero(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (m(i, j) != zero || m(j, i) != zero) {
        const auto ri = find_root(parent, i);
        const auto rj = find_root(parent, j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = find_root(parent, i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

}  // namespace detail

/// Eigendecomposition of a Hermitian operator.
///
/// Rows and columns that are exactly decoupled (structural zeros) are solved
/// as independent blocks; the result is identical to a dense solve up to the
/// ordering of degenerate eigenvectors and costs far less for block-sparse
/// input such as symmetry-resolved Hamiltonians or reduced states.
template <class Scalar>
SpectralDecomposition<Scalar> herm_eig(const Operator<Scalar>& a,
                                       RealOf<Scalar> hermitian_tol = RealOf<Scalar>(1e-12)) {
  using Real = RealOf<Scalar>;
  if (a.matrix.rows() != a.matrix.cols() || a.matrix.rows() == 0) {
    throw InvalidInput("herm_eig: operator must be square and non-empty");
  }
  const Real scale = std::max(Real(1), max_abs(a.matrix));
  const Real dev = hermiticity_deviation(a);
  if (dev > hermitian_tol * scale) {
    throw InvalidInput("herm_eig: operator is not Hermitian (deviation " + std::to_string(to_double(dev)) + ")");
  }

  std::vector<SpectralBlock<Scalar>> blocks;
  for (auto& idx : detail::exact_blocks(a.matrix)) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    SpectralBlock<Scalar> blk;
    if (n == 1) {
      blk.eigenvalues = Vector<Real>::Constant(1, real_part(a.matrix(idx[0], idx[0])));
      blk.eigenvectors = Matrix<Scalar>::Identity(1, 1);
    } else {
      Matrix<Scalar> sub(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = a.matrix(idx[r], idx[c]);
      }
      Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sub);
      if (solver.info() != Eigen::Success) {
        throw NumericalInstability("herm_eig: eigensolver did not converge");
      }
      blk.eigenvalues = solver.eigenvalues();
      blk.eigenvectors = solver.eigenvectors();
    }
    blk.indices = std::move(idx);
    blocks.push_back(std::move(blk));
  }
  return SpectralDecomposition<Scalar>(a.basis, a.dim(), std::move(blocks));
}

enum class SpectralFunction { exp_neg_beta, log_support };

/// f(A) restricted to a support, paired with the projector onto that support.
template <class Scalar>
struct SupportOperator {
  Operator<Scalar> value;
  Operator<Scalar> projector;
  Eigen::Index support_dim = 0;
};

template <class Scalar>
SupportOperator<Scalar> func_herm(const SpectralDecomposition<Scalar>& d, SpectralFunction f,
                                  RealOf<Scalar> beta, RealOf<Scalar> support_tol) {
  using Real = RealOf<Scalar>;
  using std::exp;
  using std::log;
  const BasisId basis = d.source_basis();

  if (f == SpectralFunction::exp_neg_beta) {
    if (!(beta > Real(0))) throw InvalidInput("func_herm: beta must be positive");
    auto value = d.reconstruct([&](const Real& lam) { return exp(-beta * lam); });
    return {{std::move(value), basis}, Operator<Scalar>::identity(d.dim(), basis), d.dim()};
  }

  const Real top = d.max_eigenvalue();
  if (!(top > Real(0))) throw DegenerateInput("log_support: operator has empty support");
  if (d.min_eigenvalue() < -support_tol * std::max(Real(1), top)) {
    throw InvalidDensity("log_support: negative eigenvalue " + std::to_string(to_double(d.min_eigenvalue())) +
                         " below -support_tol");
  }
  const Real cut = support_tol * top;
  Eigen::Index rank = 0;
  for (const auto& blk : d.blocks()) {
    for (Eigen::Index k = 0; k < blk.eigenvalues.size(); ++k) rank += blk.eigenvalues(k) > cut ? 1 : 0;
  }
  auto value = d.reconstruct([&](const Real& lam) { return lam > cut ? log(lam) : Real(0); });
  auto proj = d.reconstruct([&](const Real& lam) { return lam > cut ? Real(1) : Real(0); });
  return {{std::move(value), basis}, {std::move(proj), basis}, rank};
}

template <class Scalar>
Operator<Scalar> exp_neg_beta(const SpectralDecomposition<Scalar>& d, RealOf<Scalar> beta) {
  return func_herm(d, SpectralFunction::exp_neg_beta, beta, RealOf<Scalar>(0)).value;
}

template <class Scalar>
SupportOperator<Scalar> log_support(const SpectralDecomposition<Scalar>& d,
                                    RealOf<Scalar> support_tol = RealOf<Scalar>(1e-12)) {
  return func_herm(d, SpectralFunction::log_support, RealOf<Scalar>(1), support_tol);
}

/// Tr(A B) without forming the product.
template <class Scalar>
Scalar trace_product(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_same_basis(a, b, "trace_product");
  return a.matrix.transpose().cwiseProduct(b.matrix).sum();
}

/// Re Tr(ρ O); the imaginary part must vanish.
template <class Scalar>
RealOf<Scalar> expectation(const Operator<Scalar>& rho, const Operator<Scalar>& o,
                           RealOf<Scalar> imag_tol = RealOf<Scalar>(1e-10)) {
  using std::abs;
  const Scalar t = trace_product(rho, o);
  if (abs(imag_part(t)) > imag_tol) {
    throw InvalidInput("expectation: imaginary part " + std::to_string(to_double(imag_part(t))));
  }
  return real_part(t);
}

/// Tr(ρ(1 - P)): weight of ρ outside the support P.
template <class Scalar>
RealOf<Scalar> support_leakage(const Operator<Scalar>& rho, const Operator<Scalar>& projector) {
  return real_part(Scalar(rho.matrix.trace())) - expectation(rho, projector);
}

/// Expectation of a support-restricted operator; ρ must live inside the support.
template <class Scalar>
RealOf<Scalar> expectation(const Operator<Scalar>& rho, const SupportOperator<Scalar>& o,
                           RealOf<Scalar> leakage_tol = RealOf<Scalar>(1e-9)) {
  using std::abs;
  const auto leak = support_leakage(rho, o.projector);
  if (abs(leak) > leakage_tol) {
    throw SupportMismatch("expectation: state leaks " + std::to_string(to_double(leak)) +
                          " outside the operator's support");
  }
  return expectation(rho, o.value);
}

/// Operator-norm distance between two Hermitian operators.
template <class Scalar>
RealOf<Scalar> operator_norm_distance(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  using std::abs;
  const auto d = herm_eig(a - b);
  return std::max(abs(d.min_eigenvalue()), abs(d.max_eigenvalue()));
}

}  // namespace z2thermo
