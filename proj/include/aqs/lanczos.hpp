#pragma once

// Lanczos with full reorthogonalisation for the low end of real symmetric
// sparse spectra.

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "aqs/hamiltonian.hpp"

namespace aqs {

using SparseMatrixD = Eigen::SparseMatrix<double>;

struct Eigenpairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // one column per value
};

struct LanczosOptions {
  std::size_t max_iterations = 3000;
  double residual_tol = 1e-9;  // relative to the spectral radius estimate
  std::uint64_t seed = 0x5eed;
};

// k lowest eigenpairs with ||Hv - lambda v|| <= residual_tol * ||H|| each.
// When the Krylov space becomes invariant the iteration restarts from a fresh
// random vector orthogonal to everything seen so far, which recovers
// degenerate copies. For large matrices whose Krylov space never closes, a
// degenerate eigenvalue may still be reported with multiplicity one.
// Throws NumericalError if the pairs do not converge within max_iterations.
Eigenpairs low_spectrum(const SparseMatrixD& h, std::size_t k, const LanczosOptions& opt = {});

// Real-valued Hamiltonians only (all BH and tight-binding cases used here).
Eigenpairs low_spectrum(const Hamiltonian& h, std::size_t k, const LanczosOptions& opt = {});

struct KrylovLine {
  double energy;
  double weight;  // |<e|start>|^2 / ||start||^2
  Eigen::VectorXd vector;
};

// Lowest eigenvalue of h whose spectral weight in `start` is at least
// `min_weight`, found from the Krylov space of `start` alone. `deflate` (may
// be empty) is projected out of every Krylov vector. Returns nullopt when
// `start` vanishes or no line reaches the weight threshold.
std::optional<KrylovLine> lowest_spectral_line(const SparseMatrixD& h, const Eigen::VectorXd& start,
                                               const Eigen::VectorXd& deflate, double min_weight,
                                               const LanczosOptions& opt = {});

}  // namespace aqs
