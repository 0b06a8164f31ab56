#include "aqs/bose_hubbard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "aqs/error.hpp"
#include "aqs/ode.hpp"
#include "aqs/parallel.hpp"

namespace aqs {

double basis_dimension(std::size_t n_sites, std::size_t n_bosons) {
  if (n_sites == 0) return 0.0;
  // C(N + L - 1, L - 1), accumulated to stay exact while small.
  double c = 1.0;
  const std::size_t r = n_sites - 1;
  for (std::size_t i = 1; i <= r; ++i) c = c * static_cast<double>(n_bosons + i) / static_cast<double>(i);
  return std::round(c);
}

namespace {

void fill_states(std::vector<std::uint16_t>& out, std::vector<std::uint16_t>& cur, std::size_t site,
                 std::size_t remaining) {
  if (site + 1 == cur.size()) {
    cur[site] = static_cast<std::uint16_t>(remaining);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (std::size_t k = remaining + 1; k-- > 0;) {
    cur[site] = static_cast<std::uint16_t>(k);
    fill_states(out, cur, site + 1, remaining - k);
  }
}

}  // namespace

FockBasis::FockBasis(std::size_t n_sites, std::size_t n_bosons, std::size_t cap)
    : sites_(n_sites), bosons_(n_bosons), count_(0) {
  if (n_sites == 0) throw InputError("basis needs at least one site");
  if (n_bosons > std::numeric_limits<std::uint16_t>::max()) throw InputError("too many bosons");
  const double dim = basis_dimension(n_sites, n_bosons);
  if (dim > static_cast<double>(cap))
    throw InputError("basis size " + std::to_string(static_cast<unsigned long long>(dim)) + " exceeds cap " +
                     std::to_string(cap));
  count_ = static_cast<std::size_t>(dim);
  occ_.reserve(count_ * sites_);
  std::vector<std::uint16_t> cur(sites_, 0);
  fill_states(occ_, cur, 0, bosons_);
}

std::optional<std::size_t> FockBasis::index_of(std::span<const std::uint16_t> occupation) const {
  if (occupation.size() != sites_) return std::nullopt;
  // States are sorted descending, so "a before b" means a > b lexicographically.
  std::size_t lo = 0, hi = count_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto s = state(mid);
    if (std::lexicographical_compare(occupation.begin(), occupation.end(), s.begin(), s.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < count_ && std::equal(occupation.begin(), occupation.end(), state(lo).begin())) return lo;
  return std::nullopt;
}

FockBasis enumerate_basis(std::size_t n_sites, std::size_t n_bosons, std::size_t cap) {
  return FockBasis(n_sites, n_bosons, cap);
}

Lattice Lattice::chain(std::size_t length) {
  Lattice l;
  l.n_sites = length;
  for (std::size_t j = 0; j + 1 < length; ++j) l.edges.emplace_back(j, j + 1);
  l.validate();
  return l;
}

Lattice Lattice::plaquette(std::size_t rows, std::size_t cols) {
  Lattice l;
  l.n_sites = rows * cols;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      if (c + 1 < cols) l.edges.emplace_back(i, i + 1);
      if (r + 1 < rows) l.edges.emplace_back(i, i + cols);
    }
  l.validate();
  return l;
}

Lattice Lattice::chain_next_nearest(std::size_t length) {
  Lattice l;
  l.n_sites = length;
  for (std::size_t j = 0; j + 2 < length; ++j) l.edges.emplace_back(j, j + 2);
  l.validate();
  return l;
}

void Lattice::validate() const {
  if (n_sites == 0) throw InputError("lattice needs at least one site");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : edges) {
    if (a >= n_sites || b >= n_sites) throw InputError("lattice edge references a missing site");
    if (a == b) throw InputError("lattice edge must join two different sites");
    if (!seen.insert(std::minmax(a, b)).second) throw InputError("lattice edge listed twice");
  }
}

void BHParams::validate() const {
  if (!(J >= 0.0) || !std::isfinite(J)) throw InputError("hopping J must be >= 0");
  if (!(U >= 0.0) || !std::isfinite(U)) throw InputError("interaction U must be >= 0");
  lattice.validate();
}

double BHParams::j_ratio() const {
  if (U == 0.0) throw InputError("j = J/U undefined at U = 0");
  return J / U;
}

BoseHubbardModel::BoseHubbardModel(BHParams params, FockBasis basis)
    : params_(std::move(params)), basis_(std::move(basis)) {
  params_.validate();
  if (params_.lattice.n_sites != basis_.n_sites())
    throw InputError("lattice has " + std::to_string(params_.lattice.n_sites) + " sites but the basis has " +
                     std::to_string(basis_.n_sites()));
  const std::size_t dim = basis_.size();
  const auto d = static_cast<Eigen::Index>(dim);
  interaction_.resize(d);
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<std::uint16_t> work(basis_.n_sites());
  for (std::size_t i = 0; i < dim; ++i) {
    const auto s = basis_.state(i);
    double w = 0.0;
    for (auto n : s) w += 0.5 * n * (n - 1.0);
    interaction_(static_cast<Eigen::Index>(i)) = w;
    for (auto [a, b] : params_.lattice.edges) {
      // b_a^dagger b_b and b_b^dagger b_a
      for (auto [to, from] : {std::pair{a, b}, std::pair{b, a}}) {
        if (s[from] == 0) continue;
        std::copy(s.begin(), s.end(), work.begin());
        const double amp = std::sqrt(static_cast<double>(s[from]) * (s[to] + 1.0));
        --work[from];
        ++work[to];
        const auto j = basis_.index_of(work);
        trips.emplace_back(static_cast<int>(*j), static_cast<int>(i), amp);
      }
    }
  }
  hopping_.resize(d, d);
  hopping_.setFromTriplets(trips.begin(), trips.end());
  hopping_.makeCompressed();
}

SparseMatrixD BoseHubbardModel::hamiltonian_with(double j, double u) const {
  SparseMatrixD diag(hopping_.rows(), hopping_.cols());
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < interaction_.size(); ++i)
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), u * interaction_(i));
  diag.setFromTriplets(trips.begin(), trips.end());
  SparseMatrixD h = -j * hopping_ + diag;
  h.makeCompressed();
  return h;
}

Eigen::VectorXd BoseHubbardModel::number_operator_diagonal() const {
  Eigen::VectorXd n(static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    double total = 0.0;
    for (auto o : basis_.state(i)) total += o;
    n(static_cast<Eigen::Index>(i)) = total;
  }
  return n;
}

Hamiltonian BoseHubbardModel::to_hamiltonian() const {
  std::vector<std::string> labels;
  labels.reserve(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    std::string l = "|";
    for (auto o : basis_.state(i)) l += std::to_string(o) + ",";
    l.back() = '>';
    labels.push_back(std::move(l));
  }
  Eigen::MatrixXd dense = Eigen::MatrixXd(hamiltonian());
  return Hamiltonian(dense.cast<Complex>(), std::move(labels));
}

BoseHubbardModel build_bh(const BHParams& params, const FockBasis& basis) { return BoseHubbardModel(params, basis); }

Eigen::MatrixXd one_body_density_matrix(const Eigen::VectorXd& state, const FockBasis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.size()) throw InputError("state does not match basis size");
  const auto l = static_cast<Eigen::Index>(basis.n_sites());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(l, l);
  std::vector<std::uint16_t> work(basis.n_sites());
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const double c = state(static_cast<Eigen::Index>(idx));
    if (c == 0.0) continue;
    const auto s = basis.state(idx);
    for (Eigen::Index i = 0; i < l; ++i) {
      rho(i, i) += c * c * s[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < l; ++j) {
        if (i == j || s[static_cast<std::size_t>(j)] == 0) continue;
        // <n'| b_i^dagger b_j |n> with n' = n + e_i - e_j
        std::copy(s.begin(), s.end(), work.begin());
        const double amp =
            std::sqrt(static_cast<double>(s[static_cast<std::size_t>(j)]) * (s[static_cast<std::size_t>(i)] + 1.0));
        --work[static_cast<std::size_t>(j)];
        ++work[static_cast<std::size_t>(i)];
        const auto target = basis.index_of(work);
        rho(i, j) += state(static_cast<Eigen::Index>(*target)) * amp * c;
      }
    }
  }
  return rho;
}

double condensate_fraction(const Eigen::VectorXd& state, const FockBasis& basis) {
  if (basis.n_bosons() == 0) throw InputError("condensate fraction undefined for N = 0");
  if (std::abs(state.norm() - 1.0) > 1e-8) throw InputError("condensate fraction needs a normalised state");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_body_density_matrix(state, basis), Eigen::EigenvaluesOnly);
  return std::clamp(es.eigenvalues().maxCoeff() / static_cast<double>(basis.n_bosons()), 0.0, 1.0);
}

AbsorptionSpectrum modulation_absorption(const BHParams& params, const FockBasis& basis, double delta,
                                         const std::vector<double>& nu_grid, double t_drive, double tol,
                                         unsigned threads) {
  if (!(delta >= 0.0 && delta <= 0.1)) throw InputError("drive amplitude delta must lie in [0, 0.1]");
  if (!(t_drive > 0.0) || !std::isfinite(t_drive)) throw InputError("drive duration must be positive");
  for (std::size_t i = 0; i < nu_grid.size(); ++i) {
    if (!(nu_grid[i] >= 0.0) || !std::isfinite(nu_grid[i])) throw InputError("drive frequencies must be >= 0");
    if (i > 0 && !(nu_grid[i] > nu_grid[i - 1])) throw InputError("grid must ascend");
  }
  if (params.J == 0.0 && params.U == 0.0) throw InputError("spectroscopy needs J or U non-zero");

  const BoseHubbardModel model(params, basis);
  const SparseMatrixD h0 = model.hamiltonian();
  const auto low = low_spectrum(h0, std::min<std::size_t>(2, basis.size()));
  const double e0 = low.values(0);
  const bool gapless = low.values.size() > 1 && low.values(1) - e0 < 1e-8;
  const Eigen::VectorXd ground = low.vectors.col(0);
  const Eigen::VectorXd& w = model.interaction();
  const SparseMatrixD& k = model.hopping();

  AbsorptionSpectrum out;
  out.nu_grid = nu_grid;
  out.absorbed_energy.assign(nu_grid.size(), 0.0);
  out.delta = delta;
  out.t_drive = t_drive;
  out.ground_energy = e0;
  std::vector<char> flags(nu_grid.size(), 0);

  parallel_for(nu_grid.size(), threads, [&](std::size_t idx) {
    const double omega = 2.0 * std::numbers::pi * nu_grid[idx];
    const double j = params.J, u = params.U;
    auto rhs = [&](double t, const Eigen::VectorXcd& psi) -> Eigen::VectorXcd {
      const double ut = u * (1.0 + delta * std::sin(omega * t));
      const Eigen::VectorXd re = psi.real(), im = psi.imag();
      const Eigen::VectorXd hre = -j * (k * re) + ut * w.cwiseProduct(re);
      const Eigen::VectorXd him = -j * (k * im) + ut * w.cwiseProduct(im);
      // -i (hre + i him) = him - i hre
      Eigen::VectorXcd out(psi.size());
      out.real() = him;
      out.imag() = -hre;
      return out;
    };
    Eigen::VectorXcd psi = ground.cast<Complex>();
    OdeOptions ode;
    ode.tol = tol;
    try {
      integrate_dopri5(rhs, psi, 0.0, t_drive, ode);
    } catch (const StepSizeUnderflow& e) {
      throw NumericalError(std::string("spectroscopy integration failed: ") + e.what());
    }
    const Eigen::VectorXd re = psi.real(), im = psi.imag();
    const double energy = (re.dot(h0 * re) + im.dot(h0 * im)) / psi.squaredNorm();
    const double absorbed = energy - e0;
    if (absorbed < kAbsorptionFloor)
      throw InvariantError("absorbed energy " + std::to_string(absorbed) + " below the ground state at nu=" +
                           std::to_string(nu_grid[idx]));
    out.absorbed_energy[idx] = absorbed;
    flags[idx] = gapless && nu_grid[idx] < 1.0 / t_drive;
  });
  out.flagged.assign(flags.begin(), flags.end());
  return out;
}

std::optional<CoupledExcitation> lowest_coupled_excitation(const BoseHubbardModel& model, double min_weight) {
  const SparseMatrixD h = model.hamiltonian();
  const auto ground = low_spectrum(h, 1);
  const Eigen::VectorXd psi0 = ground.vectors.col(0);
  const Eigen::VectorXd drive = model.interaction().cwiseProduct(psi0);
  const auto line = lowest_spectral_line(h, drive, psi0, min_weight);
  if (!line) return std::nullopt;
  return CoupledExcitation{line->energy - ground.values(0), line->weight, ground.values(0)};
}

std::vector<ScanPoint> bh_scan(const Lattice& lattice, std::size_t n_bosons, double u,
                               const std::vector<double>& j_ratios, unsigned threads) {
  if (!(u > 0.0)) throw InputError("scan needs U > 0");
  for (std::size_t i = 0; i < j_ratios.size(); ++i) {
    if (!(j_ratios[i] >= 0.0)) throw InputError("j ratios must be >= 0");
    if (i > 0 && !(j_ratios[i] > j_ratios[i - 1])) throw InputError("grid must ascend");
  }
  const FockBasis basis(lattice.n_sites, n_bosons);
  std::vector<ScanPoint> out(j_ratios.size());
  parallel_for(j_ratios.size(), threads, [&](std::size_t i) {
    const BoseHubbardModel model(BHParams{j_ratios[i] * u, u, lattice}, basis);
    const auto ground = low_spectrum(model.hamiltonian(), 1);
    const auto ex = lowest_coupled_excitation(model);
    out[i] = {j_ratios[i], ex ? ex->gap : std::numeric_limits<double>::quiet_NaN(),
              n_bosons == 0 ? 0.0 : condensate_fraction(ground.vectors.col(0), basis)};
  });
  return out;
}

}  // namespace aqs
