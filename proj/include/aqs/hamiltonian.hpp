#pragma once

// Tight-binding site networks, coupled-waveguide geometries and the
// relabel-and-rescale map between them.
//
// Units: every energy (on-site energies, propagation constants, couplings) is
// an angular frequency with hbar = 1, so exp(-iHt) takes t in the reciprocal
// unit. When a waveguide length is converted to time via z = ct/n the
// Hamiltonian must therefore be in rad/s.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aqs {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;

class Hamiltonian {
 public:
  Hamiltonian() = default;
  // Throws InputError if the matrix is not square, labels mismatch, or
  // max |H - H^dagger| exceeds kHermitianTol.
  Hamiltonian(Eigen::MatrixXcd matrix, std::vector<std::string> basis_labels);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const std::vector<std::string>& basis_labels() const noexcept { return labels_; }

  // Largest entrywise |H - H^dagger|.
  double hermiticity_defect() const;
  Eigen::VectorXd eigenvalues() const;
  // Stable 64-bit digest of the matrix bits and labels, used in metadata.
  std::uint64_t digest() const;

 private:
  Eigen::MatrixXcd matrix_;
  std::vector<std::string> labels_;
};

double hermiticity_defect(const Eigen::MatrixXcd& m);
std::vector<std::string> default_site_labels(std::size_t n);

// Sites with real on-site energies and a symmetric zero-diagonal coupling
// matrix. Covers both the exciton network (energies, hoppings) and the
// waveguide array (propagation constants, evanescent couplings).
struct SiteNetwork {
  std::size_t n_sites = 0;
  std::vector<double> on_site;
  Eigen::MatrixXd couplings;
  std::vector<std::string> labels;

  // Throws InputError describing the first broken invariant.
  void validate() const;
};

SiteNetwork make_network(std::vector<double> on_site, const Eigen::MatrixXd& couplings,
                         std::vector<std::string> labels = {});

struct WaveguideGeometry {
  std::size_t n_guides = 0;
  Eigen::MatrixXd separations;  // micrometres, symmetric, diagonal ignored
  std::vector<double> prop_constants;
  double coupling_scale = 1.0;  // C0
  double decay_length = 1.0;    // d0, micrometres
  std::vector<std::string> labels;

  void validate() const;
};

// Site relabeling pi plus an energy-unit conversion factor.
struct MappingRecord {
  std::vector<std::size_t> site_bijection;
  double unit_scale = 1.0;

  void validate() const;
  MappingRecord inverse() const;
  static MappingRecord identity(std::size_t n);
};

Hamiltonian build_tight_binding(const SiteNetwork& net);

// H[m][m] = beta_m, H[m][n] = C0 * exp(-d_mn / d0).
Hamiltonian waveguide_hamiltonian(const WaveguideGeometry& geom);
double evanescent_coupling(double separation, double coupling_scale, double decay_length);

// Returns H_source with H_source[pi(m)][pi(n)] = unit_scale * H_target[m][n].
Hamiltonian map_network(const Hamiltonian& target, const MappingRecord& rec);

// Adds independent N(0, sigma^2) offsets to the diagonal. Off-diagonals are
// copied untouched; sigma == 0 returns an exact copy.
Hamiltonian apply_static_disorder(const Hamiltonian& h, double sigma, std::uint64_t seed);

// The offsets apply_static_disorder would draw for an n-site system.
std::vector<double> disorder_offsets(std::size_t n, double sigma, std::uint64_t seed);

// Mean absolute off-diagonal coupling over non-zero entries; 0 if uncoupled.
double mean_coupling(const Hamiltonian& h);

}  // namespace aqs
