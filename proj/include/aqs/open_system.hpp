#pragma once

// Lindblad dynamics of a single excitation on a site network with pure
// dephasing, trapping into a sink and recombination into a loss register:
//
//   drho/dt = -i[H, rho] + sum_m gamma_m D[|m><m|] rho
//             + Gamma D[|sink><s|] rho + kappa sum_m D[|loss><m|] rho
//
// with D[A] rho = A rho A^dagger - {A^dagger A, rho} / 2. The sink and the
// loss register are two extra basis states appended after the system sites,
// so the generator is trace preserving and transport efficiency is simply the
// final sink population.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "aqs/hamiltonian.hpp"

namespace aqs {

struct TransportSpec {
  std::size_t source_site = 0;
  std::size_t sink_site = 0;
  double trap_rate = 0.0;            // Gamma
  double recombination_rate = 0.0;   // kappa
  std::vector<double> dephasing_rates;  // gamma_m, one per system site

  void validate(std::size_t n_sites) const;
  static TransportSpec uniform(std::size_t n_sites, std::size_t source, std::size_t sink, double trap_rate,
                               double recombination_rate, double gamma);
  TransportSpec with_uniform_dephasing(double gamma) const;
};

inline constexpr double kTraceTol = 1e-9;
inline constexpr double kHermitianRhoTol = 1e-10;
inline constexpr double kPositivityTol = 1e-8;

class DensityMatrix {
 public:
  DensityMatrix() = default;
  // Checks the invariants; throws InvariantError if any fails.
  explicit DensityMatrix(Eigen::MatrixXcd m);
  static DensityMatrix pure_site(std::size_t dim, std::size_t site);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return m_; }
  Complex trace() const { return m_.trace(); }
  double population(std::size_t i) const { return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real(); }
  double purity() const { return (m_ * m_).trace().real(); }
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd m_;
};

// The generator of the master equation above. Acts on (n+2)x(n+2) matrices;
// index n is the sink, n+1 the loss register.
class Superoperator {
 public:
  Superoperator(const Hamiltonian& h, const TransportSpec& spec);

  std::size_t system_dim() const noexcept { return n_; }
  std::size_t total_dim() const noexcept { return n_ + 2; }
  std::size_t sink_index() const noexcept { return n_; }
  std::size_t loss_index() const noexcept { return n_ + 1; }
  const TransportSpec& spec() const noexcept { return spec_; }
  const Eigen::MatrixXcd& extended_hamiltonian() const noexcept { return h_; }

  // L(rho) without forming the superoperator matrix.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

  // Matrix of L on column-stacked vec(rho), built from Kronecker products of
  // the jump operators. Size (n+2)^2 square.
  Eigen::MatrixXcd dense() const;

  // Largest relaxation/oscillation rate; sets the explicit-step stability scale.
  double stiffness_scale() const;

 private:
  std::size_t n_;
  TransportSpec spec_;
  Eigen::MatrixXcd h_;
  Eigen::VectorXd decay_;     // population outflow rate from each basis state
  Eigen::VectorXd dephasing_; // gamma per basis state, zero on registers
};

Superoperator build_liouvillian(const Hamiltonian& h, const TransportSpec& spec);

struct EvolveOptions {
  double tol = 1e-9;
  std::size_t max_steps = 20'000'000;
};

// rho(t) by adaptive Dormand-Prince stepping. Throws NumericalError naming the
// rates when the problem is too stiff for explicit stepping, and
// InvariantError if the result breaks trace, Hermiticity or positivity bounds.
DensityMatrix evolve(const DensityMatrix& rho0, const Superoperator& l, double t, double tol = 1e-9);

struct TransportResult {
  double eta = 0.0;
  bool converged = false;  // true: remaining system population fell below tol
  double stop_time = 0.0;
};

// Sink population at the earlier of t_max or convergence. Convergence fires
// when Gamma * (population still on the system sites) <= tol * Gamma, which
// bounds d(sink)/dt from above for all later times.
TransportResult transport_efficiency(const Hamiltonian& h, const TransportSpec& spec, double t_max,
                                     double tol = 1e-9);

// 1e3 in units of inverse mean coupling (1e3 if the network is uncoupled).
double default_horizon(const Hamiltonian& h);

struct EfficiencyCurve {
  std::vector<double> gamma_grid;
  std::vector<double> efficiencies;
  std::vector<bool> converged;
  std::uint64_t hamiltonian_digest = 0;
  TransportSpec spec_template;
  double horizon = 0.0;
  double tol = 0.0;

  std::size_t argmax() const;
};

// Evaluates transport_efficiency with uniform gamma at every grid point. Grid
// points are independent and run on up to `threads` workers; the output order
// (and every value) is independent of the thread count.
EfficiencyCurve goldilocks_sweep(const Hamiltonian& h, const TransportSpec& spec_template,
                                 const std::vector<double>& gamma_grid, double t_max, double tol = 1e-9,
                                 unsigned threads = 0);

// `steps` points log-spaced from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t steps);

}  // namespace aqs
