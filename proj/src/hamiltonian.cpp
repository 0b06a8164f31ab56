#include "aqs/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <string>

#include "aqs/error.hpp"
#include "aqs/io_util.hpp"
#include "aqs/random.hpp"

namespace aqs {

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<std::string> default_site_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("site" + std::to_string(i + 1));
  return labels;
}

Hamiltonian::Hamiltonian(Eigen::MatrixXcd matrix, std::vector<std::string> basis_labels)
    : matrix_(std::move(matrix)), labels_(std::move(basis_labels)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
    throw InputError("hamiltonian must be a non-empty square matrix");
  if (labels_.empty()) labels_ = default_site_labels(dim());
  if (labels_.size() != dim())
    throw InputError("hamiltonian has " + std::to_string(dim()) + " rows but " +
                     std::to_string(labels_.size()) + " basis labels");
  if (!matrix_.allFinite()) throw InputError("hamiltonian has non-finite entries");
  const double defect = aqs::hermiticity_defect(matrix_);
  if (defect > kHermitianTol)
    throw InputError("hamiltonian is not Hermitian (max |H - H^dagger| = " + format_double(defect) + ")");
}

double Hamiltonian::hermiticity_defect() const { return aqs::hermiticity_defect(matrix_); }

Eigen::VectorXd Hamiltonian::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

std::uint64_t Hamiltonian::digest() const {
  std::uint64_t h = fnv1a64(std::to_string(dim()));
  for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
    for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
      const double parts[2] = {matrix_(i, j).real(), matrix_(i, j).imag()};
      char bytes[sizeof(parts)];
      std::memcpy(bytes, parts, sizeof(parts));
      h = fnv1a64(std::string_view(bytes, sizeof(bytes)), h);
    }
  }
  for (const auto& l : labels_) h = fnv1a64(l + '\n', h);
  return h;
}

void SiteNetwork::validate() const {
  if (n_sites == 0) throw InputError("invalid network: n_sites must be positive");
  if (on_site.size() != n_sites)
    throw InputError("invalid network: " + std::to_string(on_site.size()) + " on-site energies for " +
                     std::to_string(n_sites) + " sites");
  if (couplings.rows() != static_cast<Eigen::Index>(n_sites) ||
      couplings.cols() != static_cast<Eigen::Index>(n_sites))
    throw InputError("invalid network: coupling matrix must be " + std::to_string(n_sites) + "x" +
                     std::to_string(n_sites));
  if (!labels.empty() && labels.size() != n_sites)
    throw InputError("invalid network: label count does not match n_sites");
  for (double e : on_site)
    if (!std::isfinite(e)) throw InputError("invalid network: non-finite on-site energy");
  for (std::size_t m = 0; m < n_sites; ++m) {
    if (couplings(m, m) != 0.0)
      throw InputError("invalid network: coupling diagonal must be zero (site " + std::to_string(m + 1) + ")");
    for (std::size_t n = m + 1; n < n_sites; ++n) {
      if (!std::isfinite(couplings(m, n)))
        throw InputError("invalid network: non-finite coupling");
      if (couplings(m, n) != couplings(n, m))
        throw InputError("invalid network: couplings not symmetric at (" + std::to_string(m + 1) + ", " +
                         std::to_string(n + 1) + ")");
    }
  }
}

SiteNetwork make_network(std::vector<double> on_site, const Eigen::MatrixXd& couplings,
                         std::vector<std::string> labels) {
  SiteNetwork net;
  net.n_sites = on_site.size();
  net.on_site = std::move(on_site);
  net.couplings = couplings;
  net.labels = labels.empty() ? default_site_labels(net.n_sites) : std::move(labels);
  net.validate();
  return net;
}

Hamiltonian build_tight_binding(const SiteNetwork& net) {
  net.validate();
  const auto n = static_cast<Eigen::Index>(net.n_sites);
  Eigen::MatrixXcd h = net.couplings.cast<Complex>();
  for (Eigen::Index m = 0; m < n; ++m) h(m, m) = net.on_site[static_cast<std::size_t>(m)];
  return Hamiltonian(std::move(h), net.labels.empty() ? default_site_labels(net.n_sites) : net.labels);
}

void WaveguideGeometry::validate() const {
  if (n_guides == 0) throw InputError("geometry error: n_guides must be positive");
  if (prop_constants.size() != n_guides)
    throw InputError("geometry error: propagation constant count does not match n_guides");
  if (separations.rows() != static_cast<Eigen::Index>(n_guides) ||
      separations.cols() != static_cast<Eigen::Index>(n_guides))
    throw InputError("geometry error: separation matrix has wrong shape");
  if (!(coupling_scale > 0.0) || !std::isfinite(coupling_scale))
    throw InputError("geometry error: coupling scale C0 must be positive");
  if (!(decay_length > 0.0) || !std::isfinite(decay_length))
    throw InputError("geometry error: decay length d0 must be positive");
  if (!labels.empty() && labels.size() != n_guides)
    throw InputError("geometry error: label count does not match n_guides");
  for (std::size_t m = 0; m < n_guides; ++m) {
    if (!std::isfinite(prop_constants[m])) throw InputError("geometry error: non-finite propagation constant");
    for (std::size_t n = m + 1; n < n_guides; ++n) {
      const double d = separations(m, n);
      if (!(d > 0.0) || !std::isfinite(d))
        throw InputError("geometry error: separation between guides " + std::to_string(m + 1) + " and " +
                         std::to_string(n + 1) + " must be positive");
      if (d != separations(n, m)) throw InputError("geometry error: separations not symmetric");
    }
  }
}

double evanescent_coupling(double separation, double coupling_scale, double decay_length) {
  return coupling_scale * std::exp(-separation / decay_length);
}

Hamiltonian waveguide_hamiltonian(const WaveguideGeometry& geom) {
  geom.validate();
  const auto n = static_cast<Eigen::Index>(geom.n_guides);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    h(m, m) = geom.prop_constants[static_cast<std::size_t>(m)];
    for (Eigen::Index k = m + 1; k < n; ++k) {
      const double c = evanescent_coupling(geom.separations(m, k), geom.coupling_scale, geom.decay_length);
      h(m, k) = c;
      h(k, m) = c;
    }
  }
  return Hamiltonian(std::move(h), geom.labels.empty() ? default_site_labels(geom.n_guides) : geom.labels);
}

void MappingRecord::validate() const {
  if (!(unit_scale > 0.0) || !std::isfinite(unit_scale))
    throw InputError("mapping record: unit_scale must be positive");
  std::vector<bool> seen(site_bijection.size(), false);
  for (auto p : site_bijection) {
    if (p >= site_bijection.size() || seen[p])
      throw InputError("mapping record: site_bijection is not a permutation");
    seen[p] = true;
  }
}

MappingRecord MappingRecord::inverse() const {
  validate();
  MappingRecord inv;
  inv.site_bijection.resize(site_bijection.size());
  for (std::size_t m = 0; m < site_bijection.size(); ++m) inv.site_bijection[site_bijection[m]] = m;
  inv.unit_scale = 1.0 / unit_scale;
  return inv;
}

MappingRecord MappingRecord::identity(std::size_t n) {
  MappingRecord rec;
  rec.site_bijection.resize(n);
  std::iota(rec.site_bijection.begin(), rec.site_bijection.end(), std::size_t{0});
  return rec;
}

Hamiltonian map_network(const Hamiltonian& target, const MappingRecord& rec) {
  rec.validate();
  if (rec.site_bijection.size() != target.dim())
    throw InputError("mapping record has " + std::to_string(rec.site_bijection.size()) +
                     " entries but the hamiltonian has dimension " + std::to_string(target.dim()));
  const auto n = static_cast<Eigen::Index>(target.dim());
  const auto& pi = rec.site_bijection;
  Eigen::MatrixXcd out(n, n);
  std::vector<std::string> labels(target.dim());
  for (Eigen::Index m = 0; m < n; ++m) {
    const auto pm = static_cast<Eigen::Index>(pi[static_cast<std::size_t>(m)]);
    labels[static_cast<std::size_t>(pm)] = target.basis_labels()[static_cast<std::size_t>(m)];
    for (Eigen::Index k = 0; k < n; ++k)
      out(pm, static_cast<Eigen::Index>(pi[static_cast<std::size_t>(k)])) = rec.unit_scale * target.matrix()(m, k);
  }
  return Hamiltonian(std::move(out), std::move(labels));
}

std::vector<double> disorder_offsets(std::size_t n, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("disorder sigma must be >= 0");
  std::vector<double> offsets(n, 0.0);
  if (sigma == 0.0) return offsets;
  auto engine = stream_engine(seed, 0);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& o : offsets) o = normal(engine);
  return offsets;
}

Hamiltonian apply_static_disorder(const Hamiltonian& h, double sigma, std::uint64_t seed) {
  const auto offsets = disorder_offsets(h.dim(), sigma, seed);
  if (sigma == 0.0) return h;
  Eigen::MatrixXcd m = h.matrix();
  for (std::size_t i = 0; i < h.dim(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    m(k, k) += offsets[i];
  }
  return Hamiltonian(std::move(m), h.basis_labels());
}

double mean_coupling(const Hamiltonian& h) {
  double sum = 0.0;
  std::size_t count = 0;
  const auto& m = h.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > 0.0) {
        sum += std::abs(m(i, j));
        ++count;
      }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace aqs
