#pragma once

// Brute-force reference implementation on the full tensor space.
//
// Shares no code with the main library: standard Pauli matrices with the
// gauge links in their z basis, Kronecker products, Gauss's law imposed by a
// large energy penalty, reduced states by reshaping, and matrix logarithms
// from Eigen's MatrixFunctions, all in long double.

#include <Eigen/Dense>

namespace z2oracle {

using real = long double;
using mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using vec = Eigen::Matrix<real, Eigen::Dynamic, 1>;

struct params {
  int n_sites = 4;
  int n_system = 2;
  real hopping = -0.5L;
  real electric = 0.5L;
  real mass = 0.5L;
  real mu_initial = 0.0L;
  real mu_final = 0.0L;
  real shift = 0.0L;
  real beta = 10.0L;
};

struct result {
  real W = 0, Q = 0, W_diss = 0, W_diss_entanglement = 0, dF_S = 0, dS = 0, dU_S = 0;
  real Sigma_i = 0, Sigma_f = 0;
  real first_law_residual = 0, slack_work = 0, slack_heat = 0;
  real ratio_i = 0, ratio_f = 0;
  real F_S_i = 0, F_S_f = 0, U_S_i = 0, U_S_f = 0, S_i = 0, S_f = 0;
  real dF_S_penalized_reservoir = 0;  // ΔF_S with Z_R taken over the Gauss-penalized reservoir
  int physical_states = 0;
  real kappa = 0;
};

/// Requires N <= 4 and a full-rank reduced state (no Gauss operator inside the system).
result run(const params& p);

}  // namespace z2oracle
