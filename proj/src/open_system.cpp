#include "aqs/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "aqs/error.hpp"
#include "aqs/io_util.hpp"
#include "aqs/ode.hpp"
#include "aqs/parallel.hpp"

namespace aqs {

void TransportSpec::validate(std::size_t n_sites) const {
  if (source_site >= n_sites)
    throw InputError("source site " + std::to_string(source_site + 1) + " out of range 1.." + std::to_string(n_sites));
  if (sink_site >= n_sites)
    throw InputError("sink site " + std::to_string(sink_site + 1) + " out of range 1.." + std::to_string(n_sites));
  if (!(trap_rate >= 0.0) || !std::isfinite(trap_rate)) throw InputError("trap rate must be >= 0");
  if (!(recombination_rate >= 0.0) || !std::isfinite(recombination_rate))
    throw InputError("recombination rate must be >= 0");
  if (dephasing_rates.size() != n_sites)
    throw InputError("expected " + std::to_string(n_sites) + " dephasing rates, got " +
                     std::to_string(dephasing_rates.size()));
  for (double g : dephasing_rates)
    if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("dephasing rates must be >= 0");
}

TransportSpec TransportSpec::uniform(std::size_t n_sites, std::size_t source, std::size_t sink, double trap_rate,
                                     double recombination_rate, double gamma) {
  TransportSpec s{source, sink, trap_rate, recombination_rate, std::vector<double>(n_sites, gamma)};
  s.validate(n_sites);
  return s;
}

TransportSpec TransportSpec::with_uniform_dephasing(double gamma) const {
  TransportSpec s = *this;
  std::fill(s.dephasing_rates.begin(), s.dephasing_rates.end(), gamma);
  return s;
}

namespace {

void check_density_invariants(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvariantError("density matrix must be non-empty and square");
  const double herm = hermiticity_defect(m);
  if (!(herm <= kHermitianRhoTol))
    throw InvariantError("density matrix not Hermitian (defect " + format_double(herm) + ")");
  const double drift = std::abs(m.trace() - Complex(1.0, 0.0));
  if (!(drift <= kTraceTol)) throw InvariantError("density matrix trace drift " + format_double(drift));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo >= -kPositivityTol))
    throw InvariantError("density matrix has negative eigenvalue " + format_double(lo));
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) { check_density_invariants(m_); }

DensityMatrix DensityMatrix::pure_site(std::size_t dim, std::size_t site) {
  if (site >= dim) throw InputError("initial site out of range");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(site), static_cast<Eigen::Index>(site)) = 1.0;
  return DensityMatrix(std::move(m));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Superoperator::Superoperator(const Hamiltonian& h, const TransportSpec& spec) : n_(h.dim()), spec_(spec) {
  spec_.validate(n_);
  const auto n = static_cast<Eigen::Index>(n_);
  const Eigen::Index d = n + 2;
  h_ = Eigen::MatrixXcd::Zero(d, d);
  h_.topLeftCorner(n, n) = h.matrix();
  decay_ = Eigen::VectorXd::Zero(d);
  dephasing_ = Eigen::VectorXd::Zero(d);
  for (Eigen::Index m = 0; m < n; ++m) {
    dephasing_(m) = spec_.dephasing_rates[static_cast<std::size_t>(m)];
    decay_(m) = spec_.recombination_rate;
  }
  decay_(static_cast<Eigen::Index>(spec_.sink_site)) += spec_.trap_rate;
}

Eigen::MatrixXcd Superoperator::apply(const Eigen::MatrixXcd& rho) const {
  const Complex minus_i(0.0, -1.0);
  Eigen::MatrixXcd out = minus_i * (h_ * rho - rho * h_);
  const Eigen::Index d = rho.rows();
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double rate = 0.5 * (decay_(j) + decay_(k));
      if (j != k) rate += 0.5 * (dephasing_(j) + dephasing_(k));
      out(j, k) -= rate * rho(j, k);
    }
  }
  const auto s = static_cast<Eigen::Index>(spec_.sink_site);
  const auto sink = static_cast<Eigen::Index>(sink_index());
  const auto loss = static_cast<Eigen::Index>(loss_index());
  out(sink, sink) += spec_.trap_rate * rho(s, s);
  if (spec_.recombination_rate != 0.0) {
    Complex pop = 0.0;
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(n_); ++m) pop += rho(m, m);
    out(loss, loss) += spec_.recombination_rate * pop;
  }
  return out;
}

Eigen::MatrixXcd Superoperator::dense() const {
  using Eigen::kroneckerProduct;
  const Eigen::Index d = static_cast<Eigen::Index>(total_dim());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd l = -i * Eigen::MatrixXcd(kroneckerProduct(id, h_)) +
                       i * Eigen::MatrixXcd(kroneckerProduct(h_.transpose(), id));
  auto add_jump = [&](const Eigen::MatrixXcd& a, double rate) {
    if (rate == 0.0) return;
    const Eigen::MatrixXcd ada = a.adjoint() * a;
    l += rate * (Eigen::MatrixXcd(kroneckerProduct(a.conjugate(), a)) -
                 0.5 * Eigen::MatrixXcd(kroneckerProduct(id, ada)) -
                 0.5 * Eigen::MatrixXcd(kroneckerProduct(ada.transpose(), id)));
  };
  const auto n = static_cast<Eigen::Index>(n_);
  for (Eigen::Index m = 0; m < n; ++m) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
    p(m, m) = 1.0;
    add_jump(p, dephasing_(m));
  }
  {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    a(static_cast<Eigen::Index>(sink_index()), static_cast<Eigen::Index>(spec_.sink_site)) = 1.0;
    add_jump(a, spec_.trap_rate);
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    a(static_cast<Eigen::Index>(loss_index()), m) = 1.0;
    add_jump(a, spec_.recombination_rate);
  }
  return l;
}

double Superoperator::stiffness_scale() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_, Eigen::EigenvaluesOnly);
  const double spread = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  return spread + decay_.maxCoeff() + dephasing_.maxCoeff();
}

Superoperator build_liouvillian(const Hamiltonian& h, const TransportSpec& spec) { return Superoperator(h, spec); }

namespace {

std::string describe_rates(const Superoperator& l) {
  const auto& s = l.spec();
  const double gmax = s.dephasing_rates.empty() ? 0.0 : *std::max_element(s.dephasing_rates.begin(), s.dephasing_rates.end());
  std::ostringstream out;
  out << "problem too stiff for explicit stepping: max dephasing rate gamma=" << format_double(gmax)
      << ", trap rate Gamma=" << format_double(s.trap_rate) << ", recombination rate kappa="
      << format_double(s.recombination_rate) << ", stiffness scale " << format_double(l.stiffness_scale());
  return out.str();
}

// DOPRI5 is stable for h * |lambda| up to roughly 3.3 along the negative real
// axis; refuse up front when the required step count exceeds the budget.
void check_step_budget(const Superoperator& l, double t, const EvolveOptions& opt) {
  const double needed = t * l.stiffness_scale() / 3.3;
  if (needed > static_cast<double>(opt.max_steps)) throw NumericalError(describe_rates(l));
}

template <class Observer>
Eigen::MatrixXcd run(const DensityMatrix& rho0, const Superoperator& l, double t, const EvolveOptions& opt,
                     Observer&& observe, OdeStats* stats_out = nullptr) {
  if (rho0.dim() != l.total_dim())
    throw InputError("density matrix dimension " + std::to_string(rho0.dim()) + " does not match generator dimension " +
                     std::to_string(l.total_dim()));
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("evolution time must be finite and >= 0");
  check_step_budget(l, t, opt);
  Eigen::MatrixXcd y = rho0.matrix();
  OdeOptions ode;
  ode.tol = opt.tol * 1e-2;
  ode.max_steps = opt.max_steps;
  try {
    auto stats = integrate_dopri5([&](double, const Eigen::MatrixXcd& r) { return l.apply(r); }, y, 0.0, t, ode,
                                  std::forward<Observer>(observe));
    if (stats_out) *stats_out = stats;
  } catch (const StepSizeUnderflow&) {
    throw NumericalError(describe_rates(l));
  }
  return y;
}

}  // namespace

DensityMatrix evolve(const DensityMatrix& rho0, const Superoperator& l, double t, double tol) {
  if (t == 0.0) return rho0;
  EvolveOptions opt;
  opt.tol = tol;
  Eigen::MatrixXcd y = run(rho0, l, t, opt, [](double, const Eigen::MatrixXcd&) { return false; });
  return DensityMatrix(std::move(y));
}

TransportResult transport_efficiency(const Hamiltonian& h, const TransportSpec& spec, double t_max, double tol) {
  spec.validate(h.dim());
  if (!(spec.trap_rate > 0.0)) throw InputError("transport efficiency needs a sink: trap rate must be > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("horizon t_max must be positive");
  if (!(tol > 0.0)) throw InputError("tolerance must be positive");

  const Superoperator l(h, spec);
  const auto rho0 = DensityMatrix::pure_site(l.total_dim(), spec.source_site);
  const auto n = static_cast<Eigen::Index>(l.system_dim());
  const auto sink = static_cast<Eigen::Index>(l.sink_index());

  TransportResult result;
  double last_sink = 0.0;
  EvolveOptions opt;
  opt.tol = tol;
  OdeStats stats;
  Eigen::MatrixXcd y = run(
      rho0, l, t_max, opt,
      [&](double, const Eigen::MatrixXcd& r) {
        const double s = r(sink, sink).real();
        // The sink only ever gains population; allow integrator-level noise.
        if (s < last_sink - 10.0 * tol)
          throw InvariantError("sink population decreased from " + format_double(last_sink) + " to " + format_double(s));
        last_sink = std::max(last_sink, s);
        double remaining = 0.0;
        for (Eigen::Index m = 0; m < n; ++m) remaining += r(m, m).real();
        if (remaining <= tol) {
          result.converged = true;
          return true;
        }
        return false;
      },
      &stats);
  DensityMatrix rho(std::move(y));
  result.eta = std::clamp(rho.population(l.sink_index()), 0.0, 1.0);
  result.stop_time = stats.t_end;
  return result;
}

double default_horizon(const Hamiltonian& h) {
  const double c = mean_coupling(h);
  return c > 0.0 ? 1e3 / c : 1e3;
}

std::size_t EfficiencyCurve::argmax() const {
  return static_cast<std::size_t>(std::max_element(efficiencies.begin(), efficiencies.end()) - efficiencies.begin());
}

std::vector<double> log_grid(double lo, double hi, std::size_t steps) {
  if (!(lo > 0.0) || !(hi > lo) || steps < 2) throw InputError("log grid needs 0 < lo < hi and at least 2 steps");
  std::vector<double> grid(steps);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < steps; ++i)
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(steps - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

EfficiencyCurve goldilocks_sweep(const Hamiltonian& h, const TransportSpec& spec_template,
                                 const std::vector<double>& gamma_grid, double t_max, double tol, unsigned threads) {
  if (gamma_grid.empty()) throw InputError("dephasing grid is empty");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    if (!(gamma_grid[i] > 0.0)) throw InputError("dephasing grid values must be > 0");
    if (i > 0 && !(gamma_grid[i] > gamma_grid[i - 1])) throw InputError("grid must ascend");
  }
  spec_template.validate(h.dim());

  EfficiencyCurve curve;
  curve.gamma_grid = gamma_grid;
  curve.efficiencies.assign(gamma_grid.size(), 0.0);
  std::vector<char> conv(gamma_grid.size(), 0);
  parallel_for(gamma_grid.size(), threads, [&](std::size_t i) {
    const auto r = transport_efficiency(h, spec_template.with_uniform_dephasing(gamma_grid[i]), t_max, tol);
    curve.efficiencies[i] = r.eta;
    conv[i] = r.converged ? 1 : 0;
  });
  curve.converged.assign(conv.begin(), conv.end());
  curve.hamiltonian_digest = h.digest();
  curve.spec_template = spec_template;
  curve.horizon = t_max;
  curve.tol = tol;
  return curve;
}

}  // namespace aqs
