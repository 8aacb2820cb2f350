#include "doctest.h"

#include <unsupported/Eigen/MatrixFunctions>

#include "z2thermo/model.hpp"

using namespace z2thermo;

namespace {

ModelParams default_model(double mu_f = 0.0) {
  ModelParams p;
  p.mu_final = mu_f;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.n_sites = 5;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.n_system = 6;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_CASE("build_terms produces five families per site") {
  const auto terms = build_terms(default_model(), QuenchTime::initial);
  CHECK(terms.size() == 30);
  const DofLayout layout(6, 4);
  for (const auto& t : terms) {
    if (t.family == TermFamily::hopping) {
      REQUIRE(t.factors.size() == 3);
      CHECK(t.factors[0].dof == layout.site(t.index));
      CHECK(t.factors[1].dof == layout.link(t.index));
      CHECK(t.factors[2].dof == layout.site(t.index + 1));
      CHECK(t.hermitian_conjugate);
    } else if (t.family == TermFamily::electric) {
      CHECK(t.factors == std::vector<Factor>{{layout.link(t.index), LocalOp::x}});
    } else {
      REQUIRE(t.factors.size() == 1);
      CHECK(t.factors[0].dof == layout.site(t.index));
    }
  }
}

TEST_CASE("quench changes only system chemical terms") {
  ModelParams p = default_model(2.5);
  p.mu_initial = 0.5;
  const auto a = build_terms(p, QuenchTime::initial);
  const auto b = build_terms(p, QuenchTime::final);
  REQUIRE(a.size() == b.size());
  int changed = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].factors == b[k].factors);
    if (a[k].coefficient != b[k].coefficient) {
      ++changed;
      CHECK(a[k].family == TermFamily::chemical);
      CHECK(a[k].index < p.n_system);
      CHECK(b[k].coefficient - a[k].coefficient == doctest::Approx(-(2.5 - 0.5)));
    }
  }
  CHECK(changed == p.n_system);

  const auto i0 = build_terms(default_model(0.0), QuenchTime::final);
  const auto f0 = build_terms(default_model(0.0), QuenchTime::initial);
  for (std::size_t k = 0; k < i0.size(); ++k) CHECK(i0[k].coefficient == f0[k].coefficient);
}

TEST_CASE("Hamiltonian commutes with every Gauss operator") {
  const DofLayout layout(6, 4);
  for (const double mu : {0.0, 3.0, 10.0}) {
    for (const auto t : {QuenchTime::initial, QuenchTime::final}) {
      const auto products = products_of(build_terms(default_model(mu), t));
      for (int n = 0; n < 6; ++n) CHECK(gauss_commutator_norm(products, n, layout) < 1e-12);
    }
  }
}

TEST_CASE("commutator norm detects a gauge-violating term") {
  const DofLayout layout(4, 2);
  const std::vector<Product> bare_hop{{1.0, {{layout.site(0), LocalOp::plus}, {layout.site(1), LocalOp::minus}}}};
  CHECK(gauss_commutator_norm(bare_hop, 0, layout) == doctest::Approx(2.0));
}

TEST_CASE("Gauss operators square to one and commute") {
  const DofLayout layout(6, 4);
  for (Label l = 0; l < (Label{1} << 12); ++l) {
    for (int n = 0; n < 6; ++n) {
      const int g = gauss_eigenvalue(l, n, layout);
      CHECK((g == 1 || g == -1));
    }
  }
  const DofLayout small(4, 2);
  for (int n = 0; n < 4; ++n) {
    const auto g = gauss_operator<double>(n, small);
    CHECK(max_abs(g.matrix * g.matrix - Matrix<double>::Identity(256, 256)) == 0.0);
    for (int k = 0; k < 4; ++k) CHECK(commutator_norm(g, gauss_operator<double>(k, small)) < 1e-14);
  }
  CHECK_THROWS_AS(gauss_operator<double>(4, small), InvalidInput);
}

TEST_CASE("Gauss operator matches the literal exponential form") {
  using C = std::complex<double>;
  const DofLayout layout(4, 2);
  const double pi = std::acos(-1.0);
  for (int n = 0; n < 4; ++n) {
    const std::vector<Factor> links{{layout.link(n), LocalOp::x}, {layout.link(n - 1), LocalOp::x}};
    const std::vector<Factor> number{{layout.site(n), LocalOp::number}};
    const Matrix<C> xx = embed<double>(links, layout).matrix.cast<C>();
    const Matrix<C> occ = embed<double>(number, layout).matrix.cast<C>();
    const double offset = ((n % 2 == 0 ? 1.0 : -1.0) - 1.0) / 2.0;
    const Matrix<C> arg = C(0, pi) * (occ + C(offset) * Matrix<C>::Identity(256, 256));
    const Matrix<C> phase = arg.exp();
    const Matrix<C> literal = xx * phase;
    const auto g = gauss_operator<double>(n, layout);
    CHECK((literal - g.matrix.cast<C>()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Gauss eigenvalue case analysis") {
  const DofLayout layout(4, 2);
  for (Label l = 0; l < 256; ++l) {
    for (int n = 0; n < 4; ++n) {
      const int x_right = layout.bit(l, layout.link(n)) ? -1 : 1;
      const int x_left = layout.bit(l, layout.link(n - 1)) ? -1 : 1;
      const int occ = layout.bit(l, layout.site(n)) ? -1 : 1;
      const int expected = x_right * x_left * occ * (n % 2 == 1 ? -1 : 1);
      CHECK(gauss_eigenvalue(l, n, layout) == expected);
    }
  }
}

TEST_CASE("physical sector dimension is 2^N") {
  for (const int n : {2, 4, 6}) {
    const DofLayout layout(n, 1);
    const auto sector = physical_sector(layout);
    CHECK(sector.dim() == (Eigen::Index{1} << n));
    for (const auto l : sector.basis.labels()) {
      for (int k = 0; k < n; ++k) CHECK(gauss_eigenvalue(l, k, layout) == 1);
    }
  }
}

TEST_CASE("physical sector has odd total occupation") {
  const DofLayout layout(6, 4);
  const auto sector = physical_sector(layout);
  for (const auto l : sector.basis.labels()) {
    int occ = 0;
    for (int n = 0; n < 6; ++n) occ += static_cast<int>(layout.bit(l, layout.site(n)));
    CHECK(occ % 2 == 1);
  }
}

TEST_CASE("restrict onto the physical sector") {
  const DofLayout layout(4, 2);
  const auto sector = physical_sector(layout);
  const auto id = restrict(Operator<double>::identity(256, layout.full_basis()), sector);
  CHECK(max_abs(id.matrix - Matrix<double>::Identity(16, 16)) == 0.0);

  Operator<double> penalty = Operator<double>::zero(256, layout.full_basis());
  for (int n = 0; n < 4; ++n) {
    penalty = penalty + (Operator<double>::identity(256, layout.full_basis()) - gauss_operator<double>(n, layout));
  }
  CHECK(max_abs(restrict(penalty, sector).matrix) == 0.0);
  CHECK_THROWS_AS(restrict(Operator<double>::identity(16, layout.sector_basis()), sector), InvalidInput);

  // compression by isometry equals direct assembly in the sector basis
  ModelParams p;
  p.n_sites = 4;
  p.n_system = 2;
  p.mu_final = 1.5;
  const auto products = products_of(build_terms(p, QuenchTime::final));
  const auto h_full = matrix_in_basis<double>(products, full_basis(layout), layout);
  const auto h_sector = matrix_in_basis<double>(products, sector.basis, layout);
  CHECK(max_abs(restrict(h_full, sector).matrix - h_sector.matrix) < 1e-15);
  CHECK(hermiticity_deviation(h_sector) == 0.0);
}

TEST_CASE("sector spectrum equals the kappa-stationary spectrum of the penalized full Hamiltonian") {
  ModelParams p;
  p.n_sites = 4;
  p.n_system = 2;
  p.mu_final = 2.0;
  const DofLayout layout(4, 2);
  const auto products = products_of(build_terms(p, QuenchTime::final));
  const auto h_full = matrix_in_basis<double>(products, full_basis(layout), layout);
  const double kappa = 1e3 * std::max({std::abs(p.hopping), p.electric, p.mass, std::abs(p.mu_final)});
  Matrix<double> penalized = h_full.matrix;
  for (int n = 0; n < 4; ++n) {
    penalized += kappa * (Matrix<double>::Identity(256, 256) - gauss_operator<double>(n, layout).matrix);
  }
  Eigen::SelfAdjointEigenSolver<Matrix<double>> full(penalized);
  std::vector<double> low;
  for (Eigen::Index k = 0; k < 256; ++k) {
    if (full.eigenvalues()(k) < kappa) low.push_back(full.eigenvalues()(k));
  }
  const auto sector = physical_sector(layout);
  const auto spec = herm_eig(matrix_in_basis<double>(products, sector.basis, layout)).eigenvalues();
  REQUIRE(low.size() == 16);
  for (std::size_t k = 0; k < 16; ++k) CHECK(std::abs(low[k] - spec(static_cast<Eigen::Index>(k))) < 1e-9);
}
