#include "aqs/quantum_walk.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "aqs/error.hpp"
#include "aqs/parallel.hpp"
#include "aqs/random.hpp"

namespace aqs {

void DephasingEnsembleSpec::validate() const {
  if (shots == 0) throw InputError("ensemble needs at least one shot");
  if (n_segments == 0) throw InputError("ensemble needs at least one segment");
  if (!(phase_sigma >= 0.0) || !std::isfinite(phase_sigma)) throw InputError("phase_sigma must be >= 0");
}

Eigen::MatrixXcd propagator(const Hamiltonian& h, double t) {
  if (h.dim() <= 512) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  }
  const Eigen::MatrixXcd a = Complex(0.0, -t) * h.matrix();
  return a.exp();
}

WalkState evolve_unitary(const Hamiltonian& h, std::size_t input_mode, double t) {
  if (input_mode >= h.dim())
    throw InputError("input mode " + std::to_string(input_mode + 1) + " out of range 1.." + std::to_string(h.dim()));
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("walk time must be finite and >= 0");
  WalkState s;
  s.time = t;
  if (t == 0.0) {
    s.amplitudes = Eigen::VectorXcd::Unit(static_cast<Eigen::Index>(h.dim()), static_cast<Eigen::Index>(input_mode));
    return s;
  }
  s.amplitudes = propagator(h, t).col(static_cast<Eigen::Index>(input_mode));
  return s;
}

double length_to_time(double z_metres, double refractive_index) {
  if (!(refractive_index > 0.0)) throw InputError("refractive index must be > 0");
  if (!(z_metres >= 0.0)) throw InputError("length must be >= 0");
  return refractive_index * z_metres / kSpeedOfLight;
}

double time_to_length(double t_seconds, double refractive_index) {
  if (!(refractive_index > 0.0)) throw InputError("refractive index must be > 0");
  if (!(t_seconds >= 0.0)) throw InputError("time must be >= 0");
  return kSpeedOfLight * t_seconds / refractive_index;
}

namespace {

constexpr std::size_t kShotBlock = 64;

// Populations at each checkpoint (segment counts, ascending), averaged over
// shots. Shots are summed in fixed blocks and blocks in index order so the
// floating-point result does not depend on scheduling.
std::vector<Eigen::VectorXd> ensemble_populations(const Hamiltonian& h, std::size_t input, double segment_time,
                                                  const std::vector<std::size_t>& checkpoints,
                                                  const DephasingEnsembleSpec& spec, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  const Eigen::MatrixXcd u = propagator(h, segment_time);
  const std::size_t blocks = (spec.shots + kShotBlock - 1) / kShotBlock;
  std::vector<std::vector<Eigen::VectorXd>> partial(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    std::vector<Eigen::VectorXd> acc(checkpoints.size(), Eigen::VectorXd::Zero(n));
    Eigen::VectorXcd psi(n), next(n);
    const std::size_t first = b * kShotBlock, last = std::min(spec.shots, first + kShotBlock);
    for (std::size_t shot = first; shot < last; ++shot) {
      auto engine = stream_engine(spec.seed, shot);
      std::normal_distribution<double> normal(0.0, spec.phase_sigma);
      psi.setZero();
      psi(static_cast<Eigen::Index>(input)) = 1.0;
      std::size_t seg = 0;
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        for (; seg < checkpoints[c]; ++seg) {
          next.noalias() = u * psi;
          for (Eigen::Index j = 0; j < n; ++j) {
            const double phi = normal(engine);
            next(j) *= Complex(std::cos(phi), std::sin(phi));
          }
          psi.swap(next);
        }
        acc[c] += psi.cwiseAbs2();
      }
    }
    partial[b] = std::move(acc);
  });

  std::vector<Eigen::VectorXd> total(checkpoints.size(), Eigen::VectorXd::Zero(n));
  for (const auto& block : partial)
    for (std::size_t c = 0; c < checkpoints.size(); ++c) total[c] += block[c];
  for (auto& p : total) p /= static_cast<double>(spec.shots);
  return total;
}

}  // namespace

Eigen::VectorXd dephased_walk(const Hamiltonian& h, std::size_t input_mode, double t,
                              const DephasingEnsembleSpec& spec, unsigned threads) {
  spec.validate();
  if (input_mode >= h.dim()) throw InputError("input mode out of range");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("walk time must be finite and >= 0");
  if (spec.phase_sigma == 0.0 || t == 0.0) return evolve_unitary(h, input_mode, t).populations();
  auto pops = ensemble_populations(h, input_mode, t / static_cast<double>(spec.n_segments), {spec.n_segments},
                                   spec, threads);
  return pops.front();
}

double equivalent_dephasing_rate(const DephasingEnsembleSpec& spec, double t) {
  if (!(t > 0.0)) throw InputError("time must be > 0");
  return spec.phase_sigma * spec.phase_sigma * static_cast<double>(spec.n_segments) / t;
}

double spread_width(const Eigen::VectorXd& populations, std::size_t origin) {
  double acc = 0.0;
  for (Eigen::Index m = 0; m < populations.size(); ++m) {
    const double d = static_cast<double>(m) - static_cast<double>(origin);
    acc += populations(m) * d * d;
  }
  return std::sqrt(acc);
}

namespace {

void check_centered(const Hamiltonian& chain, std::size_t center, const std::vector<double>& times) {
  if (chain.dim() % 2 == 0) throw InputError("spreading statistics need an odd-length chain");
  if (center != chain.dim() / 2)
    throw InputError("input not centered: expected site " + std::to_string(chain.dim() / 2 + 1));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw InputError("times must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1])) throw InputError("times must ascend");
  }
}

}  // namespace

std::vector<SpreadPoint> spreading_stats(const Hamiltonian& chain, std::size_t input_center,
                                         const std::vector<double>& times) {
  check_centered(chain, input_center, times);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(chain.matrix());
  const Eigen::VectorXcd overlap = es.eigenvectors().row(static_cast<Eigen::Index>(input_center)).adjoint();
  std::vector<SpreadPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t == 0.0) {
      out.push_back({t, 0.0});
      continue;
    }
    const Eigen::VectorXcd phases =
        (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    const Eigen::VectorXcd psi = es.eigenvectors() * phases.cwiseProduct(overlap);
    out.push_back({t, spread_width(psi.cwiseAbs2(), input_center)});
  }
  return out;
}

std::vector<SpreadPoint> dephased_spreading_stats(const Hamiltonian& chain, std::size_t input_center,
                                                  const std::vector<double>& times,
                                                  const DephasingEnsembleSpec& spec, unsigned threads) {
  spec.validate();
  check_centered(chain, input_center, times);
  if (times.empty()) return {};
  const double dt = times.back() / static_cast<double>(spec.n_segments);
  std::vector<std::size_t> checkpoints;
  for (double t : times) {
    const double k = t / dt;
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-9 * std::max(1.0, k))
      throw InputError("time " + std::to_string(t) + " is not on a segment boundary");
    checkpoints.push_back(static_cast<std::size_t>(r));
  }
  const auto pops = ensemble_populations(chain, input_center, dt, checkpoints, spec, threads);
  std::vector<SpreadPoint> out;
  for (std::size_t i = 0; i < times.size(); ++i) out.push_back({times[i], spread_width(pops[i], input_center)});
  return out;
}

Hamiltonian uniform_chain(std::size_t n, double c) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(n); ++i) h(i, i + 1) = h(i + 1, i) = c;
  return Hamiltonian(std::move(h), default_site_labels(n));
}

Hamiltonian uniform_ring(std::size_t n, double c) {
  if (n < 3) throw InputError("a ring needs at least 3 sites");
  Eigen::MatrixXcd h = uniform_chain(n, c).matrix();
  const auto last = static_cast<Eigen::Index>(n - 1);
  h(0, last) = h(last, 0) = c;
  return Hamiltonian(std::move(h), default_site_labels(n));
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("line fit needs two or more matching points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("line fit needs distinct x values");
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, my - slope * mx, r2};
}

LineFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InputError("power-law fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

}  // namespace aqs
