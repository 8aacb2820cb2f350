#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace z2oracle {

namespace {

using cplx = std::complex<real>;
using cmat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

mat m2(real a, real b, real c, real d) {
  mat m(2, 2);
  m << a, b, c, d;
  return m;
}

const mat pauli_x = m2(0, 1, 1, 0);
const mat pauli_z = m2(1, 0, 0, -1);
const mat raising = m2(0, 1, 0, 0);
const mat lowering = m2(0, 0, 1, 0);
const mat occupation = raising * lowering;

enum class region { system, reservoir, interaction };

// a product of single-qubit matrices over qubits [first, first + count)
mat kron_ops(const std::map<int, mat>& ops, int first, int count) {
  mat out = mat::Identity(1, 1);
  for (int q = first; q < first + count; ++q) {
    const auto it = ops.find(q);
    const mat local = it == ops.end() ? mat(mat::Identity(2, 2)) : it->second;
    mat next = Eigen::kroneckerProduct(out, local).eval();
    out.swap(next);
  }
  return out;
}

struct term {
  real coefficient;
  std::map<int, mat> ops;
  region where;
  bool shift;
};

struct model {
  const params& p;
  int qubits;
  int system_qubits;

  int site(int n) const { return 2 * (((n % p.n_sites) + p.n_sites) % p.n_sites); }
  int link(int n) const { return site(n) + 1; }
  bool in_s(int q) const { return q < system_qubits; }

  region place(const std::vector<int>& qs) const {
    const auto inside = std::count_if(qs.begin(), qs.end(), [&](int q) { return in_s(q); });
    if (inside == static_cast<long>(qs.size())) return region::system;
    if (inside == 0) return region::reservoir;
    return region::interaction;
  }

  std::vector<term> hamiltonian(real mu) const {
    std::vector<term> out;
    for (int n = 0; n < p.n_sites; ++n) {
      const int a = site(n), l = link(n), b = site(n + 1);
      const region r = place({a, l, b});
      out.push_back({-p.hopping, {{a, raising}, {l, pauli_z}, {b, lowering}}, r, false});
      out.push_back({-p.hopping, {{a, lowering}, {l, pauli_z}, {b, raising}}, r, false});
      // the electric term on a reservoir link next to a system site couples S and R
      region e = region::reservoir;
      if (in_s(l)) {
        e = region::system;
      } else if (in_s(a) || in_s(b)) {
        e = region::interaction;
      }
      out.push_back({-p.electric, {{l, pauli_x}}, e, false});
      const region on_site = in_s(a) ? region::system : region::reservoir;
      out.push_back({p.mass * (n % 2 == 0 ? 1 : -1), {{a, occupation}}, on_site, false});
      out.push_back({in_s(a) ? -mu : real(0), {{a, occupation}}, on_site, false});
      out.push_back({p.shift, {}, on_site, true});
    }
    return out;
  }

  // G_n as a map of local factors: links enter through x, the site through exp(iπ[n + ((−1)^n − 1)/2])
  std::map<int, mat> gauss_factors(int n) const {
    const real pi = std::acos(real(-1));
    const real offset = ((n % 2 == 0 ? real(1) : real(-1)) - 1) / 2;
    const cmat arg = cplx(0, pi) * (occupation.cast<cplx>() + cplx(offset) * cmat::Identity(2, 2));
    const cmat phase = arg.exp();
    if (phase.imag().cwiseAbs().maxCoeff() > 1e-15L) throw std::logic_error("oracle: Gauss phase is not real");
    return {{link(n), pauli_x}, {link(n - 1), pauli_x}, {site(n), phase.real()}};
  }

  std::vector<term> penalties(real kappa) const {
    std::vector<term> out;
    for (int n = 0; n < p.n_sites; ++n) {
      const region r = place({link(n - 1), site(n), link(n)});
      out.push_back({kappa, {}, r, true});
      out.push_back({-kappa, gauss_factors(n), r, false});
    }
    return out;
  }

  mat full(const std::vector<term>& terms, std::initializer_list<region> keep, bool with_shift = true) const {
    const auto dim = Eigen::Index{1} << qubits;
    mat h = mat::Zero(dim, dim);
    for (const auto& t : terms) {
      if (std::find(keep.begin(), keep.end(), t.where) == keep.end()) continue;
      if (t.shift && !with_shift) continue;
      h += t.coefficient * kron_ops(t.ops, 0, qubits);
    }
    return h;
  }

  // operator on the qubits of one side only; every kept term must live there
  mat factor(const std::vector<term>& terms, region side) const {
    const int first = side == region::system ? 0 : system_qubits;
    const int count = side == region::system ? system_qubits : qubits - system_qubits;
    const auto dim = Eigen::Index{1} << count;
    mat h = mat::Zero(dim, dim);
    for (const auto& t : terms) {
      if (t.where != side) continue;
      std::map<int, mat> local;
      for (const auto& [q, m] : t.ops) local[q] = m;
      h += t.coefficient * kron_ops(local, first, count);
    }
    return h;
  }
};

real log_sum_exp_partition(const vec& energies, real beta) {
  const real e0 = energies.minCoeff();
  real s = 0;
  for (Eigen::Index k = 0; k < energies.size(); ++k) s += std::exp(-beta * (energies(k) - e0));
  return -beta * e0 + std::log(s);
}

struct global_state {
  mat rho;
  real log_z;
  int physical;
};

global_state penalized_gibbs(const mat& h, const mat& violation, real beta, int expected) {
  Eigen::SelfAdjointEigenSolver<mat> es(h);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    const vec v = es.eigenvectors().col(k);
    if (v.dot(violation * v) < 0.5L) keep.push_back(k);
  }
  if (static_cast<int>(keep.size()) != expected) {
    throw std::runtime_error("oracle: found " + std::to_string(keep.size()) + " Gauss-invariant states, expected " +
                             std::to_string(expected));
  }
  vec energies(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) energies(static_cast<Eigen::Index>(j)) = es.eigenvalues()(keep[j]);
  const real e0 = energies.minCoeff();
  mat rho = mat::Zero(h.rows(), h.cols());
  real z = 0;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    const real w = std::exp(-beta * (energies(static_cast<Eigen::Index>(j)) - e0));
    const vec v = es.eigenvectors().col(keep[j]);
    rho += w * v * v.transpose();
    z += w;
  }
  return {rho / z, -beta * e0 + std::log(z), static_cast<int>(keep.size())};
}

mat trace_out_reservoir(const mat& rho, Eigen::Index dim_s) {
  const Eigen::Index dim_r = rho.rows() / dim_s;
  mat out = mat::Zero(dim_s, dim_s);
  for (Eigen::Index a = 0; a < dim_s; ++a) {
    for (Eigen::Index b = 0; b < dim_s; ++b) {
      for (Eigen::Index r = 0; r < dim_r; ++r) out(a, b) += rho(a * dim_r + r, b * dim_r + r);
    }
  }
  return out;
}

real trace_of_product(const mat& a, const mat& b) { return (a.transpose().array() * b.array()).sum(); }

}  // namespace

result run(const params& p) {
  if (p.n_sites < 2 || p.n_sites > 4 || p.n_sites % 2 != 0) throw std::invalid_argument("oracle: N must be 2 or 4");
  if (p.n_system < 1 || p.n_system > 2 || p.n_system >= p.n_sites) {
    throw std::invalid_argument("oracle: needs N_S <= 2 so that the reduced state has full rank");
  }
  const model md{p, 2 * p.n_sites, 2 * p.n_system - 1};
  const real kappa = 1000 * std::max({std::abs(p.hopping), std::abs(p.electric), std::abs(p.mass), std::abs(p.mu_final)});
  const auto pen = md.penalties(kappa);
  const auto all = {region::system, region::reservoir, region::interaction};

  mat violation = mat::Zero(Eigen::Index{1} << md.qubits, Eigen::Index{1} << md.qubits);
  for (const auto& t : pen) violation += (t.coefficient / kappa) * kron_ops(t.ops, 0, md.qubits);

  result out;
  out.kappa = kappa;
  const Eigen::Index dim_s = Eigen::Index{1} << md.system_qubits;

  struct side {
    global_state global;
    mat rho_s, log_rho_s;
    real f_s, u_s, s, sigma, ratio;
  };
  std::vector<term> terms_i = md.hamiltonian(p.mu_initial);
  std::vector<term> terms_f = md.hamiltonian(p.mu_final);
  for (auto* t : {&terms_i, &terms_f}) t->insert(t->end(), pen.begin(), pen.end());

  // reservoir partition functions: unrestricted factor, and with the penalties internal to R
  std::vector<term> reservoir_plain;
  for (const auto& t : md.hamiltonian(p.mu_initial)) {
    if (t.where == region::reservoir) reservoir_plain.push_back(t);
  }
  Eigen::SelfAdjointEigenSolver<mat> hr(md.factor(reservoir_plain, region::reservoir), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<mat> hr_pen(md.factor(terms_i, region::reservoir), Eigen::EigenvaluesOnly);
  const real log_z_r = log_sum_exp_partition(hr.eigenvalues(), p.beta);
  const real log_z_r_pen = log_sum_exp_partition(hr_pen.eigenvalues(), p.beta);

  auto evaluate = [&](const std::vector<term>& terms) {
    side sd;
    sd.global = penalized_gibbs(md.full(terms, all), violation, p.beta, 1 << p.n_sites);
    sd.rho_s = trace_out_reservoir(sd.global.rho, dim_s);
    Eigen::SelfAdjointEigenSolver<mat> es(sd.rho_s, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0)) throw std::runtime_error("oracle: reduced state is not full rank");
    sd.log_rho_s = sd.rho_s.log();
    sd.f_s = -(sd.global.log_z - log_z_r) / p.beta;
    sd.s = -trace_of_product(sd.rho_s, sd.log_rho_s);
    sd.sigma = 0;
    for (int n = 0; n < p.n_system; ++n) {
      const mat occ = kron_ops({{md.site(n), occupation}}, 0, md.system_qubits);
      sd.sigma += (n % 2 == 0 ? 1 : -1) * trace_of_product(sd.rho_s, occ);
    }
    sd.sigma /= p.n_system;
    const real v = trace_of_product(sd.global.rho, md.full(terms, {region::interaction}));
    const real hs = trace_of_product(sd.global.rho, md.full(terms, {region::system}, false));
    sd.ratio = std::abs(v / hs);
    return sd;
  };
  const side si = evaluate(terms_i);
  const side sf = evaluate(terms_f);
  out.physical_states = si.global.physical;

  const mat id = mat::Identity(dim_s, dim_s);
  const mat h_star_i = -si.log_rho_s / p.beta + si.f_s * id;
  const mat h_star_f = -sf.log_rho_s / p.beta + sf.f_s * id;

  out.F_S_i = si.f_s;
  out.F_S_f = sf.f_s;
  out.U_S_i = trace_of_product(si.rho_s, h_star_i);
  out.U_S_f = trace_of_product(sf.rho_s, h_star_f);
  out.S_i = si.s;
  out.S_f = sf.s;
  out.W = trace_of_product(si.rho_s, h_star_f - h_star_i);
  out.Q = out.U_S_f - trace_of_product(si.rho_s, h_star_f);
  out.dU_S = out.U_S_f - out.U_S_i;
  out.dF_S = sf.f_s - si.f_s;
  out.dS = sf.s - si.s;
  out.W_diss = out.W - out.dF_S;
  out.W_diss_entanglement = trace_of_product(si.rho_s, si.log_rho_s - sf.log_rho_s) / p.beta;
  out.Sigma_i = si.sigma;
  out.Sigma_f = sf.sigma;
  out.first_law_residual = std::abs(out.dU_S - (out.W + out.Q));
  out.slack_work = out.W - out.dF_S;
  out.slack_heat = out.dS - p.beta * out.Q;
  out.ratio_i = si.ratio;
  out.ratio_f = sf.ratio;
  out.dF_S_penalized_reservoir =
      -(sf.global.log_z - log_z_r_pen) / p.beta + (si.global.log_z - log_z_r_pen) / p.beta;
  return out;
}

}  // namespace z2oracle
