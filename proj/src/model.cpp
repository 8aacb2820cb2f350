#include "z2thermo/model.hpp"

#include <cmath>

namespace z2thermo {

namespace {

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) throw InvalidInput(std::string("model.") + field + " must be finite");
}

}  // namespace

void ModelParams::validate() const {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw InvalidInput("model.N must be even and >= 2: the staggered mass sign (-1)^n needs an even periodic chain");
  }
  if (n_sites > 8) throw InvalidInput("model.N must be <= 8 for exact diagonalization");
  if (n_system < 1 || n_system >= n_sites) throw InvalidInput("model.N_S must satisfy 1 <= N_S < N");
  require_finite(hopping, "J");
  require_finite(electric, "epsilon");
  require_finite(mass, "m");
  require_finite(mu_initial, "mu_i");
  require_finite(mu_final, "mu_f");
  if (shift) require_finite(*shift, "c");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("model.beta must be positive and finite");
}

std::string_view to_string(TermFamily f) {
  switch (f) {
    case TermFamily::hopping: return "hopping";
    case TermFamily::electric: return "electric";
    case TermFamily::mass: return "mass";
    case TermFamily::chemical: return "chemical";
    case TermFamily::constant: return "constant";
  }
  return "?";
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::unset: return "unset";
    case Region::system: return "S";
    case Region::reservoir: return "R";
    case Region::interaction: return "V";
  }
  return "?";
}

std::vector<Product> LabeledTerm::products() const {
  std::vector<Product> out{{coefficient, factors}};
  if (hermitian_conjugate) {
    Product h{coefficient, factors};
    for (auto& f : h.factors) f.op = adjoint(f.op);
    out.push_back(std::move(h));
  }
  return out;
}

double chemical_potential(const ModelParams& params, const DofLayout& layout, int n, QuenchTime at) {
  if (!layout.in_system(layout.site(n))) return 0.0;
  return at == QuenchTime::initial ? params.mu_initial : params.mu_final;
}

std::vector<LabeledTerm> build_terms(const ModelParams& params, QuenchTime at) {
  params.validate();
  const DofLayout layout(params.n_sites, params.n_system);
  const int n_sites = params.n_sites;
  std::vector<LabeledTerm> terms;
  terms.reserve(static_cast<std::size_t>(5 * n_sites));
  for (int n = 0; n < n_sites; ++n) {
    terms.push_back({-params.hopping,
                     {{layout.site(n), LocalOp::plus}, {layout.link(n), LocalOp::z}, {layout.site(n + 1), LocalOp::minus}},
                     true, TermFamily::hopping, n});
  }
  for (int n = 0; n < n_sites; ++n) {
    terms.push_back({-params.electric, {{layout.link(n), LocalOp::x}}, false, TermFamily::electric, n});
  }
  for (int n = 0; n < n_sites; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    terms.push_back({params.mass * sign, {{layout.site(n), LocalOp::number}}, false, TermFamily::mass, n});
  }
  for (int n = 0; n < n_sites; ++n) {
    terms.push_back({-chemical_potential(params, layout, n, at), {{layout.site(n), LocalOp::number}}, false,
                     TermFamily::chemical, n});
  }
  const double c = params.shift.value_or(0.0);
  for (int n = 0; n < n_sites; ++n) {
    terms.push_back({c, {{layout.site(n), LocalOp::identity}}, false, TermFamily::constant, n});
  }
  return terms;
}

std::vector<Product> products_of(std::span<const LabeledTerm> terms) {
  std::vector<Product> out;
  for (const auto& t : terms) {
    for (auto& p : t.products()) out.push_back(std::move(p));
  }
  return out;
}

int gauss_eigenvalue(Label label, int n, const DofLayout& layout) {
  if (n < 0 || n >= layout.n_sites()) throw InvalidInput("gauss_eigenvalue: site index out of range");
  // link bit 0 is electric value +1
  const unsigned flips = layout.bit(label, layout.link(n)) + layout.bit(label, layout.link(n - 1)) +
                         layout.bit(label, layout.site(n)) + (n % 2 == 1 ? 1u : 0u);
  return flips % 2 == 0 ? 1 : -1;
}

bool is_physical(Label label, const DofLayout& layout) {
  for (int n = 0; n < layout.n_sites(); ++n) {
    if (gauss_eigenvalue(label, n, layout) != 1) return false;
  }
  return true;
}

std::vector<int> interior_sites(const DofLayout& layout) {
  std::vector<int> out;
  for (int n = 0; n < layout.n_sites(); ++n) {
    if (layout.in_system(layout.site(n)) && layout.in_system(layout.link(n)) && layout.in_system(layout.link(n - 1))) {
      out.push_back(n);
    }
  }
  return out;
}

Eigen::Index structural_support_dim(const DofLayout& layout) {
  const auto interior = interior_sites(layout);
  const auto sys = system_basis(layout);
  Eigen::Index count = 0;
  for (const auto l : sys.labels()) {
    bool ok = true;
    for (const int n : interior) ok = ok && gauss_eigenvalue(l, n, layout) == 1;
    count += ok ? 1 : 0;
  }
  return count;
}

double gauss_commutator_norm(std::span<const Product> products, int n, const DofLayout& layout) {
  const auto h = sparse_full_matrix(products, layout);
  double worst = 0.0;
  for (Eigen::Index col = 0; col < h.outerSize(); ++col) {
    const int g_col = gauss_eigenvalue(static_cast<Label>(col), n, layout);
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it) {
      const int g_row = gauss_eigenvalue(static_cast<Label>(it.row()), n, layout);
      worst = std::max(worst, std::abs(it.value() * (g_col - g_row)));
    }
  }
  return worst;
}

PhysicalSector physical_sector(const DofLayout& layout) {
  std::vector<Label> labels;
  const Label total = Label{1} << layout.size();
  for (Label l = 0; l < total; ++l) {
    if (is_physical(l, layout)) labels.push_back(l);
  }
  if (labels.empty()) throw InvalidInput("physical_sector: Gauss constraints admit no state");
  return {ProductBasis(layout.sector_basis(), std::move(labels))};
}

}  // namespace z2thermo
