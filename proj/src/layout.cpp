#include "z2thermo/layout.hpp"

#include <set>

namespace z2thermo {

DofLayout::DofLayout(int n_sites, int n_system) : n_sites_(n_sites), n_system_(n_system) {
  if (n_sites < 2 || n_sites > 16) throw InvalidInput("DofLayout: N must lie in [2, 16]");
  if (n_system < 1 || n_system >= n_sites) throw InvalidInput("DofLayout: need 1 <= N_S < N");
  for (int n = 0; n < n_sites; ++n) {
    dofs_.push_back({DofKind::site, n, 2 * n, n < n_system});
    dofs_.push_back({DofKind::link, n, 2 * n + 1, n < n_system - 1});
  }
  for (const auto& d : dofs_) (d.in_system ? system_dofs_ : reservoir_dofs_).push_back(d.qubit);
}

Label DofLayout::gather(Label full, std::span<const DofId> ids) const {
  Label out = 0;
  for (const DofId id : ids) out = (out << 1) | bit(full, id);
  return out;
}

Label DofLayout::scatter(Label packed, std::span<const DofId> ids) const {
  Label out = 0;
  const auto n = ids.size();
  for (std::size_t j = 0; j < n; ++j) {
    const unsigned b = static_cast<unsigned>((packed >> (n - 1 - j)) & 1u);
    out = with_bit(out, ids[j], b);
  }
  return out;
}

LocalOp parse_local_op(std::string_view label) {
  if (label == "x") return LocalOp::x;
  if (label == "z") return LocalOp::z;
  if (label == "plus") return LocalOp::plus;
  if (label == "minus") return LocalOp::minus;
  if (label == "number") return LocalOp::number;
  if (label == "identity") return LocalOp::identity;
  throw InvalidInput("unknown local operator label '" + std::string(label) + "'");
}

std::string_view to_string(LocalOp op) {
  switch (op) {
    case LocalOp::x: return "x";
    case LocalOp::z: return "z";
    case LocalOp::plus: return "plus";
    case LocalOp::minus: return "minus";
    case LocalOp::number: return "number";
    case LocalOp::identity: return "identity";
  }
  return "?";
}

Eigen::Matrix2d local_matrix(DofKind kind, LocalOp op) {
  Eigen::Matrix2d m;
  if (kind == DofKind::site) {
    // occupation basis: |0> empty, |1> occupied; sigma^+ = |1><0|
    switch (op) {
      case LocalOp::x: m << 0, 1, 1, 0; break;
      case LocalOp::z: m << -1, 0, 0, 1; break;
      case LocalOp::plus: m << 0, 0, 1, 0; break;
      case LocalOp::minus: m << 0, 1, 0, 0; break;
      case LocalOp::number: m << 0, 0, 0, 1; break;
      case LocalOp::identity: m << 1, 0, 0, 1; break;
    }
  } else {
    // electric basis: |0> has x = +1, |1> has x = -1; z flips
    switch (op) {
      case LocalOp::x: m << 1, 0, 0, -1; break;
      case LocalOp::z: m << 0, 1, 1, 0; break;
      case LocalOp::plus: m << 0.5, -0.5, 0.5, -0.5; break;
      case LocalOp::minus: m << 0.5, 0.5, -0.5, -0.5; break;
      case LocalOp::number: m << 0.5, 0.5, 0.5, 0.5; break;
      case LocalOp::identity: m << 1, 0, 0, 1; break;
    }
  }
  return m;
}

LocalOp adjoint(LocalOp op) {
  if (op == LocalOp::plus) return LocalOp::minus;
  if (op == LocalOp::minus) return LocalOp::plus;
  return op;
}

void validate_factors(std::span<const Factor> factors, const DofLayout& layout) {
  std::set<DofId> seen;
  for (const auto& f : factors) {
    if (!layout.contains(f.dof)) throw InvalidInput("unknown DOF id " + std::to_string(f.dof));
    if (!seen.insert(f.dof).second) throw InvalidInput("DOF id " + std::to_string(f.dof) + " repeated");
  }
}

ProductBasis::ProductBasis(BasisId id, std::vector<Label> labels) : id_(id), labels_(std::move(labels)) {
  if (!std::is_sorted(labels_.begin(), labels_.end()) ||
      std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end()) {
    throw InvalidInput("ProductBasis: labels must be strictly increasing");
  }
}

std::optional<Eigen::Index> ProductBasis::index_of(Label label) const {
  const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<Eigen::Index>(it - labels_.begin());
}

ProductBasis full_basis(const DofLayout& layout) {
  std::vector<Label> labels(Label{1} << layout.size());
  for (Label l = 0; l < labels.size(); ++l) labels[l] = l;
  return {layout.full_basis(), std::move(labels)};
}

ProductBasis system_basis(const DofLayout& layout) {
  std::vector<Label> labels;
  const Label n = Label{1} << layout.system_dofs().size();
  for (Label s = 0; s < n; ++s) labels.push_back(layout.compose(s, 0));
  return {layout.system_basis(), std::move(labels)};
}

ProductBasis reservoir_basis(const DofLayout& layout) {
  std::vector<Label> labels;
  const Label n = Label{1} << layout.reservoir_dofs().size();
  for (Label r = 0; r < n; ++r) labels.push_back(layout.compose(0, r));
  return {layout.reservoir_basis(), std::move(labels)};
}

Eigen::SparseMatrix<double> sparse_full_matrix(std::span<const Product> products, const DofLayout& layout) {
  const auto dim = static_cast<Eigen::Index>(Label{1} << layout.size());
  std::vector<Eigen::Triplet<double>> entries;
  for (const auto& p : products) {
    for (Label col = 0; col < static_cast<Label>(dim); ++col) {
      apply_product(p, layout, col, [&](Label row, double amp) {
        entries.emplace_back(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), amp);
      });
    }
  }
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace z2thermo
