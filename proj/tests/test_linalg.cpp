#include "doctest.h"

#include <random>

#include <unsupported/Eigen/KroneckerProduct>

#include "z2thermo/layout.hpp"

using namespace z2thermo;

namespace {

Operator<double> plain(const Matrix<double>& m) { return {m, {}}; }

Matrix<double> pauli_x() { return (Matrix<double>(2, 2) << 0, 1, 1, 0).finished(); }
Matrix<double> pauli_z() { return (Matrix<double>(2, 2) << 1, 0, 0, -1).finished(); }

Matrix<double> random_hermitian(int dim, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Matrix<double> a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = g(rng);
  }
  return (a + a.transpose()) / 2;
}

Matrix<double> kron_chain(const std::vector<Eigen::Matrix2d>& locals) {
  Matrix<double> out = Matrix<double>::Identity(1, 1);
  for (const auto& m : locals) {
    Matrix<double> next = Eigen::kroneckerProduct(out, Matrix<double>(m)).eval();
    out = next;
  }
  return out;
}

}  // namespace

TEST_CASE("embed builds tensor products in layout order") {
  const DofLayout layout(2, 1);
  const std::vector<Factor> link0{{layout.link(0), LocalOp::x}};
  CHECK(embed<double>(link0, layout).matrix.trace() == doctest::Approx(0.0));
  CHECK(embed<double>(std::vector<Factor>{}, layout).matrix.trace() == doctest::Approx(16.0));
  const std::vector<Factor> number0{{layout.site(0), LocalOp::number}};
  CHECK(embed<double>(number0, layout).matrix.trace() == doctest::Approx(8.0));
}

TEST_CASE("embed agrees with an explicit Kronecker product") {
  const DofLayout layout(2, 1);
  const std::vector<Factor> factors{{layout.site(0), LocalOp::plus}, {layout.link(0), LocalOp::z},
                                    {layout.site(1), LocalOp::minus}};
  std::vector<Eigen::Matrix2d> locals;
  for (const auto& d : layout.dofs()) {
    LocalOp op = LocalOp::identity;
    for (const auto& f : factors) {
      if (f.dof == d.qubit) op = f.op;
    }
    locals.push_back(local_matrix(d.kind, op));
  }
  const auto e = embed<double>(factors, layout);
  CHECK(max_abs(e.matrix - kron_chain(locals)) == 0.0);
}

TEST_CASE("local operators satisfy their algebra") {
  for (const auto kind : {DofKind::site, DofKind::link}) {
    const auto x = local_matrix(kind, LocalOp::x);
    const auto z = local_matrix(kind, LocalOp::z);
    const auto p = local_matrix(kind, LocalOp::plus);
    const auto m = local_matrix(kind, LocalOp::minus);
    const auto n = local_matrix(kind, LocalOp::number);
    const Eigen::Matrix2d one = Eigen::Matrix2d::Identity();
    CHECK((x * x - one).norm() < 1e-15);
    CHECK((z * z - one).norm() < 1e-15);
    CHECK((x * z + z * x).norm() < 1e-15);
    CHECK((p.transpose() - m).norm() < 1e-15);
    CHECK((p * m - n).norm() < 1e-15);
    CHECK((p * m + m * p - one).norm() < 1e-15);
  }
  // on a site the number operator is diagonal, on a link x is diagonal
  CHECK(local_matrix(DofKind::site, LocalOp::number).isDiagonal());
  CHECK(local_matrix(DofKind::link, LocalOp::x).isDiagonal());
}

TEST_CASE("embed rejects bad factors") {
  const DofLayout layout(2, 1);
  CHECK_THROWS_AS(embed<double>(std::vector<Factor>{{7, LocalOp::x}}, layout), InvalidInput);
  CHECK_THROWS_AS(embed<double>(std::vector<Factor>{{0, LocalOp::x}, {0, LocalOp::z}}, layout), InvalidInput);
  CHECK_THROWS_AS(parse_local_op("y"), InvalidInput);
  CHECK(parse_local_op("plus") == LocalOp::plus);
}

TEST_CASE("herm_eig spectra") {
  const auto z = herm_eig(plain(pauli_z())).eigenvalues();
  CHECK(z(0) == doctest::Approx(-1.0));
  CHECK(z(1) == doctest::Approx(1.0));

  const auto zero = herm_eig(plain(Matrix<double>::Zero(4, 4))).eigenvalues();
  CHECK(max_abs(zero) == 0.0);

  const Matrix<double> xx = Eigen::kroneckerProduct(pauli_x(), pauli_x());
  const auto e = herm_eig(plain(xx)).eigenvalues();
  CHECK(e(0) == doctest::Approx(-1.0));
  CHECK(e(1) == doctest::Approx(-1.0));
  CHECK(e(2) == doctest::Approx(1.0));
  CHECK(e(3) == doctest::Approx(1.0));

  Matrix<double> bad = pauli_x();
  bad(0, 1) = 2.0;
  CHECK_THROWS_AS(herm_eig(plain(bad)), InvalidInput);
}

TEST_CASE("herm_eig reconstruction and unitarity on block-sparse input") {
  std::mt19937 rng(7);
  Matrix<double> a = Matrix<double>::Zero(9, 9);
  const std::vector<std::vector<int>> groups{{0, 3, 7}, {1, 2}, {4}, {5, 6, 8}};
  for (const auto& g : groups) {
    const auto sub = random_hermitian(static_cast<int>(g.size()), rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) a(g[i], g[j]) = sub(i, j);
    }
  }
  const auto d = herm_eig(plain(a));
  CHECK(d.blocks().size() == groups.size());
  const auto v = d.eigenvectors();
  const auto lam = d.eigenvalues();
  CHECK(max_abs(v * lam.asDiagonal() * v.transpose() - a) < 1e-10 * max_abs(a));
  CHECK(max_abs(v.transpose() * v - Matrix<double>::Identity(9, 9)) < 1e-10);
  for (int k = 1; k < 9; ++k) CHECK(lam(k - 1) <= lam(k));

  Eigen::SelfAdjointEigenSolver<Matrix<double>> dense(a);
  CHECK(max_abs(dense.eigenvalues() - lam) < 1e-12);
}

TEST_CASE("func_herm exponential and support logarithm") {
  std::mt19937 rng(11);
  const auto zero = herm_eig(plain(Matrix<double>::Zero(3, 3)));
  CHECK(max_abs(exp_neg_beta(zero, 2.5).matrix - Matrix<double>::Identity(3, 3)) < 1e-15);

  const Matrix<double> h = random_hermitian(6, rng);
  const double beta = 0.7;
  const auto expd = exp_neg_beta(herm_eig(plain(h)), beta);
  const auto logd = log_support(herm_eig(expd));
  CHECK(logd.support_dim == 6);
  CHECK(max_abs(logd.value.matrix + beta * h) < 1e-9);

  // every matrix function commutes with its source
  CHECK(commutator_norm(expd, plain(h)) < 1e-10);
  CHECK(commutator_norm(logd.value, expd) < 1e-10);
  // and the exponential is positive definite
  CHECK(herm_eig(expd).min_eigenvalue() > 0.0);
}

TEST_CASE("log_support restricts to the support and rejects non-densities") {
  Matrix<double> rho = Matrix<double>::Zero(4, 4);
  rho(0, 0) = 0.7;
  rho(2, 2) = 0.3;
  const auto l = log_support(herm_eig(plain(rho)));
  CHECK(l.support_dim == 2);
  CHECK(l.projector.matrix.trace() == doctest::Approx(2.0));
  CHECK(l.value.matrix(0, 0) == doctest::Approx(std::log(0.7)));
  CHECK(l.value.matrix(1, 1) == 0.0);

  CHECK_THROWS_AS(log_support(herm_eig(plain(Matrix<double>::Zero(2, 2)))), DegenerateInput);
  Matrix<double> neg = Matrix<double>::Identity(2, 2);
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(log_support(herm_eig(plain(neg))), InvalidDensity);
}

TEST_CASE("expectation values") {
  const auto rho = plain(Matrix<double>::Identity(2, 2) / 2);
  CHECK(expectation(rho, plain(Matrix<double>::Identity(2, 2))) == doctest::Approx(1.0));
  CHECK(expectation(rho, plain(pauli_z())) == doctest::Approx(0.0));
  Matrix<double> ground = Matrix<double>::Zero(2, 2);
  ground(1, 1) = 1.0;
  CHECK(expectation(plain(ground), plain(pauli_z())) == doctest::Approx(-1.0));

  const Operator<double> other{Matrix<double>::Identity(2, 2), {SpaceKind::system, 2, 1}};
  CHECK_THROWS_AS(expectation(rho, other), InvalidInput);

  Matrix<double> partial = Matrix<double>::Zero(2, 2);
  partial(0, 0) = 1.0;
  const auto restricted = log_support(herm_eig(plain(partial)));
  CHECK_THROWS_AS(expectation(rho, restricted), SupportMismatch);
  CHECK(expectation(plain(partial), restricted) == doctest::Approx(0.0));
}

TEST_CASE("complex scalars are supported") {
  using C = std::complex<double>;
  Matrix<C> y(2, 2);
  y << C(0, 0), C(0, -1), C(0, 1), C(0, 0);
  const Operator<C> op{y, {}};
  const auto d = herm_eig(op);
  CHECK(d.eigenvalues()(0) == doctest::Approx(-1.0));
  const Operator<C> rho{Matrix<C>::Identity(2, 2) / C(2), {}};
  CHECK(expectation(rho, op) == doctest::Approx(0.0));
}

TEST_CASE("partial trace onto the system factor") {
  const DofLayout layout(2, 1);  // S = {site 0}, R = {link 0, site 1, link 1}
  const auto full = full_basis(layout);

  const Operator<double> mixed{Matrix<double>::Identity(16, 16) / 16.0, layout.full_basis()};
  const auto rs = partial_trace_to_S(mixed, full, layout);
  CHECK(rs.dim() == 2);
  CHECK(max_abs(rs.matrix - Matrix<double>::Identity(2, 2) / 2.0) < 1e-15);

  // |1>_S (x) |r = 5>_R
  const Label product = layout.compose(1, 5);
  Operator<double> pure = Operator<double>::zero(16, layout.full_basis());
  pure.matrix(static_cast<Eigen::Index>(product), static_cast<Eigen::Index>(product)) = 1.0;
  const auto rp = partial_trace_to_S(pure, full, layout);
  CHECK(rp.matrix(1, 1) == doctest::Approx(1.0));
  CHECK(rp.matrix(0, 0) == doctest::Approx(0.0));

  // Bell pair between site 0 (S) and site 1 (R)
  Vector<double> psi = Vector<double>::Zero(16);
  psi(static_cast<Eigen::Index>(layout.compose(0, 0))) = std::sqrt(0.5);
  psi(static_cast<Eigen::Index>(layout.compose(1, 0b010))) = std::sqrt(0.5);
  const Operator<double> bell{psi * psi.transpose(), layout.full_basis()};
  const auto rb = partial_trace_to_S(bell, full, layout);
  CHECK(max_abs(rb.matrix - Matrix<double>::Identity(2, 2) / 2.0) < 1e-15);

  const Operator<double> unnormalized{Matrix<double>::Identity(16, 16), layout.full_basis()};
  CHECK_THROWS_AS(partial_trace_to_S(unnormalized, full, layout), InvalidDensity);
}

TEST_CASE("system and reservoir labels round trip") {
  const DofLayout layout(6, 4);
  CHECK(layout.system_dofs().size() == 7);
  CHECK(layout.reservoir_dofs().size() == 5);
  CHECK(!layout.in_system(layout.link(3)));
  CHECK(!layout.in_system(layout.link(5)));
  CHECK(layout.in_system(layout.link(2)));
  for (Label l = 0; l < (Label{1} << 12); l += 37) {
    CHECK(layout.compose(layout.system_label(l), layout.reservoir_label(l)) == l);
  }
  const auto s = system_basis(layout);
  CHECK(s.dim() == 128);
  for (Eigen::Index i = 0; i < s.dim(); ++i) CHECK(layout.system_label(s.label(i)) == static_cast<Label>(i));
}
