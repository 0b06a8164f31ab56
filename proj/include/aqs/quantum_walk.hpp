#pragma once

// Single-particle dynamics on coupled-waveguide arrays: exp(-iHt)|m>, the
// length <-> time map of the guided mode, and dephasing emulated by random
// on-site phase kicks averaged over many trajectories.
//
// A bright classical beam obeys the same amplitude equations, so populations
// here also read as normalised output intensities of a laser-fed array.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "aqs/hamiltonian.hpp"

namespace aqs {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kNormTol = 1e-10;

struct WalkState {
  Eigen::VectorXcd amplitudes;
  double time = 0.0;

  Eigen::VectorXd populations() const { return amplitudes.cwiseAbs2(); }
  double norm_drift() const { return std::abs(amplitudes.squaredNorm() - 1.0); }
};

struct DephasingEnsembleSpec {
  std::size_t n_segments = 1;
  double phase_sigma = 0.0;  // radians per segment
  std::size_t shots = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// exp(-iHt). Hermitian eigendecomposition up to dimension 512, scaling and
// squaring above that.
Eigen::MatrixXcd propagator(const Hamiltonian& h, double t);

WalkState evolve_unitary(const Hamiltonian& h, std::size_t input_mode, double t);

// t = n z / c for a waveguide of length z (metres) and refractive index n.
double length_to_time(double z_metres, double refractive_index);
double time_to_length(double t_seconds, double refractive_index);

// Ensemble-averaged site populations at time t. Each trajectory applies
// exp(-iH t/n_segments) followed by independent N(0, phase_sigma^2) phases on
// every site, n_segments times. Shot k draws from its own counter-based
// stream, so the result is identical for any thread count.
Eigen::VectorXd dephased_walk(const Hamiltonian& h, std::size_t input_mode, double t,
                              const DephasingEnsembleSpec& spec, unsigned threads = 0);

// Lindblad pure-dephasing rate reproduced by the phase-kick ensemble: each
// kick multiplies a coherence by E[exp(i(phi_j - phi_k))] = exp(-sigma^2).
double equivalent_dephasing_rate(const DephasingEnsembleSpec& spec, double t);

struct SpreadPoint {
  double t;
  double sigma_x;
};

// Coherent walk from the centre of an odd-length chain.
std::vector<SpreadPoint> spreading_stats(const Hamiltonian& chain, std::size_t input_center,
                                         const std::vector<double>& times);

// Same observable for the phase-kick ensemble. Segments have length
// times.back() / spec.n_segments and every requested time must fall on a
// segment boundary.
std::vector<SpreadPoint> dephased_spreading_stats(const Hamiltonian& chain, std::size_t input_center,
                                                  const std::vector<double>& times,
                                                  const DephasingEnsembleSpec& spec, unsigned threads = 0);

double spread_width(const Eigen::VectorXd& populations, std::size_t origin);

// Uniform nearest-neighbour chain with coupling c and zero on-site energy.
Hamiltonian uniform_chain(std::size_t n, double c);
// Same, closed into a ring.
Hamiltonian uniform_ring(std::size_t n, double c);

struct LineFit {
  double slope;
  double intercept;
  double r_squared;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Fits y = a x^p in log-log space; slope is the exponent p.
LineFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace aqs
