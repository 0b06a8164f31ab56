#pragma once

// Exact diagonalisation of the Bose-Hubbard model
//
//   H = -J sum_<j,k> (b_j^dagger b_k + b_k^dagger b_j) + (U/2) sum_j n_j (n_j - 1)
//
// in the fixed-particle-number sector, plus the finite-size superfluid
// diagnostics and interaction-modulation absorption spectroscopy.
//
// Hopping carries the Hermitian conjugate explicitly. The mean-field order
// parameter <b_i> vanishes identically at fixed N, so the largest eigenvalue
// of the one-body density matrix over N (condensate fraction) stands in as
// the superfluid diagnostic. The drive modulates U only:
// U(t) = U (1 + delta sin(2 pi nu t)).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "aqs/hamiltonian.hpp"
#include "aqs/lanczos.hpp"

namespace aqs {

inline constexpr std::size_t kDefaultBasisCap = 200'000;

// Occupation-number states of N bosons on L sites, in descending
// lexicographic order: (N,0,...,0) first, (0,...,0,N) last.
class FockBasis {
 public:
  FockBasis(std::size_t n_sites, std::size_t n_bosons, std::size_t cap = kDefaultBasisCap);

  std::size_t n_sites() const noexcept { return sites_; }
  std::size_t n_bosons() const noexcept { return bosons_; }
  std::size_t size() const noexcept { return count_; }
  std::span<const std::uint16_t> state(std::size_t i) const {
    return {occ_.data() + i * sites_, sites_};
  }
  std::optional<std::size_t> index_of(std::span<const std::uint16_t> occupation) const;

 private:
  std::size_t sites_, bosons_, count_;
  std::vector<std::uint16_t> occ_;
};

// C(N+L-1, N) as a double (exact below 2^53).
double basis_dimension(std::size_t n_sites, std::size_t n_bosons);

FockBasis enumerate_basis(std::size_t n_sites, std::size_t n_bosons, std::size_t cap = kDefaultBasisCap);

struct Lattice {
  std::size_t n_sites = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // undirected, j < k

  static Lattice chain(std::size_t length);
  static Lattice plaquette(std::size_t rows, std::size_t cols);
  // Only the second-neighbour bonds (j, j+2) of a chain; its hopping operator
  // is the next-nearest-neighbour correction term.
  static Lattice chain_next_nearest(std::size_t length);
  void validate() const;
};

struct BHParams {
  double J = 0.0;
  double U = 0.0;
  Lattice lattice;

  void validate() const;
  double j_ratio() const;  // J/U; throws if U == 0
};

class BoseHubbardModel {
 public:
  BoseHubbardModel(BHParams params, FockBasis basis);

  const BHParams& params() const noexcept { return params_; }
  const FockBasis& basis() const noexcept { return basis_; }
  // sum over bonds of (b_j^dagger b_k + h.c.), no prefactor.
  const SparseMatrixD& hopping() const noexcept { return hopping_; }
  // (1/2) sum_j n_j (n_j - 1) on each basis state; this is the operator the
  // drive couples through.
  const Eigen::VectorXd& interaction() const noexcept { return interaction_; }

  SparseMatrixD hamiltonian() const { return hamiltonian_with(params_.J, params_.U); }
  SparseMatrixD hamiltonian_with(double j, double u) const;
  Eigen::VectorXd number_operator_diagonal() const;
  // Dense form with occupation-string basis labels.
  Hamiltonian to_hamiltonian() const;

 private:
  BHParams params_;
  FockBasis basis_;
  SparseMatrixD hopping_;
  Eigen::VectorXd interaction_;
};

BoseHubbardModel build_bh(const BHParams& params, const FockBasis& basis);

// Largest eigenvalue of <b_i^dagger b_j> divided by N.
double condensate_fraction(const Eigen::VectorXd& state, const FockBasis& basis);
Eigen::MatrixXd one_body_density_matrix(const Eigen::VectorXd& state, const FockBasis& basis);

struct AbsorptionSpectrum {
  std::vector<double> nu_grid;
  std::vector<double> absorbed_energy;
  std::vector<bool> flagged;  // ungapped ground state and nu below the drive resolution
  double delta = 0.0;
  double t_drive = 0.0;
  double ground_energy = 0.0;
};

inline constexpr double kAbsorptionFloor = -1e-9;

// Energy absorbed from the ground state after driving for t_drive:
// <psi(T)|H0|psi(T)> - E0 for each drive frequency nu (cycles per unit time).
AbsorptionSpectrum modulation_absorption(const BHParams& params, const FockBasis& basis, double delta,
                                         const std::vector<double>& nu_grid, double t_drive, double tol = 1e-10,
                                         unsigned threads = 0);

struct CoupledExcitation {
  double gap;        // E_k - E_0
  double weight;     // share of the drive-generated vector on this state
  double ground_energy;
};

// Lowest excited state reachable from the ground state through the drive
// operator, i.e. the lowest E_k with <k|W|0> != 0 (weight >= min_weight).
std::optional<CoupledExcitation> lowest_coupled_excitation(const BoseHubbardModel& model,
                                                           double min_weight = 1e-8);

struct ScanPoint {
  double j_ratio;
  double gap;  // NaN when no coupled excitation exists
  double condensate_fraction;
};

// One ED per j = J/U at fixed U.
std::vector<ScanPoint> bh_scan(const Lattice& lattice, std::size_t n_bosons, double u,
                               const std::vector<double>& j_ratios, unsigned threads = 0);

}  // namespace aqs
