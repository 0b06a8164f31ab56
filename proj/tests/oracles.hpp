#pragma once

// Brute-force reference implementations used only by the tests.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXcd;
using Cd = std::complex<double>;

inline MatrixXcd ket_bra(Eigen::Index d, Eigen::Index a, Eigen::Index b) {
  MatrixXcd m = MatrixXcd::Zero(d, d);
  m(a, b) = 1.0;
  return m;
}

// Column-stacked vec convention: vec(A X B) = (B^T kron A) vec(X).
inline MatrixXcd dissipator_super(const MatrixXcd& a) {
  const auto d = a.rows();
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  const MatrixXcd ada = a.adjoint() * a;
  return Eigen::kroneckerProduct(a.conjugate(), a).eval() - 0.5 * Eigen::kroneckerProduct(id, ada).eval() -
         0.5 * Eigen::kroneckerProduct(ada.transpose(), id).eval();
}

// Liouvillian of the system + sink + loss master equation written out from
// its jump operators.
inline MatrixXcd liouvillian(const MatrixXcd& h_sys, const std::vector<double>& gamma, Eigen::Index source_sink,
                             double trap, double kappa) {
  const auto n = h_sys.rows();
  const auto d = n + 2;
  MatrixXcd h = MatrixXcd::Zero(d, d);
  h.topLeftCorner(n, n) = h_sys;
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  MatrixXcd l = Cd(0, -1) * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (Eigen::Index m = 0; m < n; ++m) {
    if (gamma[m] != 0.0) l += gamma[m] * dissipator_super(ket_bra(d, m, m));
    if (kappa != 0.0) l += kappa * dissipator_super(ket_bra(d, n + 1, m));
  }
  if (trap != 0.0) l += trap * dissipator_super(ket_bra(d, n, source_sink));
  return l;
}

inline MatrixXcd vec(const MatrixXcd& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

inline MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index d) { return Eigen::Map<const MatrixXcd>(v.data(), d, d); }

inline MatrixXcd evolve_dense(const MatrixXcd& l, const MatrixXcd& rho0, double t) {
  const MatrixXcd prop = (l * t).exp();
  return unvec(prop * vec(rho0), rho0.rows());
}

inline MatrixXcd random_hermitian(Eigen::Index d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Cd(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

inline MatrixXcd random_density(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Cd(g(rng), g(rng));
  MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace oracle
