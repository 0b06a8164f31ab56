#include "aqs/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "aqs/error.hpp"

namespace aqs {
namespace {

double inf_norm(const SparseMatrixD& h) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(h.rows());
  for (Eigen::Index k = 0; k < h.outerSize(); ++k)
    for (SparseMatrixD::InnerIterator it(h, k); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

void orthogonalize(Eigen::VectorXd& w, const std::vector<Eigen::VectorXd>& basis) {
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) w -= q.dot(w) * q;
}

class LanczosBasis {
 public:
  explicit LanczosBasis(const SparseMatrixD& h) : h_(h) {}

  // Appends a unit vector; `coupling` is the off-diagonal T entry linking it to
  // the previous vector (0 after a restart).
  void push(Eigen::VectorXd v, double coupling) {
    if (!vectors_.empty()) beta_.push_back(coupling);
    vectors_.push_back(std::move(v));
  }

  // One Lanczos step on the newest vector; returns the unnormalised residual.
  Eigen::VectorXd step(const Eigen::VectorXd& deflate) {
    const auto j = vectors_.size() - 1;
    Eigen::VectorXd w = h_ * vectors_[j];
    const double a = vectors_[j].dot(w);
    alpha_.push_back(a);
    w -= a * vectors_[j];
    if (j > 0) w -= beta_[j - 1] * vectors_[j - 1];
    orthogonalize(w, vectors_);
    if (deflate.size()) {
      w -= deflate.dot(w) * deflate;
      orthogonalize(w, vectors_);
    }
    return w;
  }

  std::size_t size() const { return vectors_.size(); }
  const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz() const {
    const auto m = static_cast<Eigen::Index>(alpha_.size());
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha_.data(), m);
    Eigen::VectorXd sub(std::max<Eigen::Index>(m - 1, 0));
    for (Eigen::Index i = 0; i + 1 < m; ++i) sub(i) = beta_[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (m == 1) {
      Eigen::MatrixXd t(1, 1);
      t(0, 0) = diag(0);
      es.compute(t);
    } else {
      es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    }
    return es;
  }

  Eigen::VectorXd ritz_vector(const Eigen::VectorXd& s) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(h_.rows());
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.size()); ++i) v += s(static_cast<Eigen::Index>(i)) * vectors_[i];
    return v.normalized();
  }

 private:
  const SparseMatrixD& h_;
  std::vector<Eigen::VectorXd> vectors_;
  std::vector<double> alpha_, beta_;
};

Eigen::VectorXd random_unit(Eigen::Index n, std::mt19937_64& engine, const std::vector<Eigen::VectorXd>& against) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uni(engine);
    orthogonalize(v, against);
    const double nv = v.norm();
    if (nv > 1e-8) return v / nv;
  }
  return {};
}

bool check_interval(std::size_t m) { return m < 16 || m % std::max<std::size_t>(4, m / 10) == 0; }

}  // namespace

Eigenpairs low_spectrum(const SparseMatrixD& h, std::size_t k, const LanczosOptions& opt) {
  if (h.rows() != h.cols()) throw InputError("low_spectrum needs a square matrix");
  const auto n = static_cast<std::size_t>(h.rows());
  if (k == 0 || k > n) throw InputError("requested " + std::to_string(k) + " eigenpairs of a dimension-" +
                                        std::to_string(n) + " matrix");
  const double hnorm = std::max(inf_norm(h), 1e-300);
  std::mt19937_64 engine(opt.seed);

  LanczosBasis basis(h);
  basis.push(random_unit(h.rows(), engine, {}), 0.0);
  const Eigen::VectorXd no_deflation;

  while (true) {
    Eigen::VectorXd w = basis.step(no_deflation);
    const std::size_t m = basis.size();
    const double b = w.norm();
    const bool exhausted = m == n;
    const bool breakdown = !exhausted && b <= 1e-10 * hnorm;

    if (exhausted || (!breakdown && m >= k && check_interval(m))) {
      auto es = basis.ritz();
      const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
      const double target = opt.residual_tol * scale;
      bool estimates_ok = true;
      for (std::size_t i = 0; i < k && !exhausted; ++i)
        if (b * std::abs(es.eigenvectors()(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(i))) > 0.5 * target)
          estimates_ok = false;
      if (estimates_ok) {
        Eigenpairs out;
        out.values = es.eigenvalues().head(static_cast<Eigen::Index>(k));
        out.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
        bool residuals_ok = true;
        for (std::size_t i = 0; i < k; ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          out.vectors.col(ii) = basis.ritz_vector(es.eigenvectors().col(ii));
          const double res = (h * out.vectors.col(ii) - out.values(ii) * out.vectors.col(ii)).norm();
          if (res > target) residuals_ok = false;
        }
        if (residuals_ok) return out;
        if (exhausted)
          throw NumericalError("Lanczos lost orthogonality: residuals above tolerance with an exhausted basis");
      }
    }
    if (m >= opt.max_iterations)
      throw NumericalError("Lanczos did not converge " + std::to_string(k) + " eigenpairs in " +
                           std::to_string(opt.max_iterations) + " iterations");
    if (breakdown) {
      Eigen::VectorXd fresh = random_unit(h.rows(), engine, basis.vectors());
      if (fresh.size() == 0) throw NumericalError("Lanczos restart failed to find a new direction");
      basis.push(std::move(fresh), 0.0);
    } else {
      basis.push(w / b, b);
    }
  }
}

Eigenpairs low_spectrum(const Hamiltonian& h, std::size_t k, const LanczosOptions& opt) {
  if (h.matrix().imag().cwiseAbs().maxCoeff() != 0.0)
    throw InputError("low_spectrum supports real symmetric Hamiltonians only");
  SparseMatrixD s = h.matrix().real().sparseView();
  return low_spectrum(s, k, opt);
}

std::optional<KrylovLine> lowest_spectral_line(const SparseMatrixD& h, const Eigen::VectorXd& start,
                                               const Eigen::VectorXd& deflate, double min_weight,
                                               const LanczosOptions& opt) {
  const auto n = static_cast<std::size_t>(h.rows());
  Eigen::VectorXd v = start;
  Eigen::VectorXd unit_deflate;
  if (deflate.size()) {
    unit_deflate = deflate.normalized();
    v -= unit_deflate.dot(v) * unit_deflate;
  }
  const double norm0 = v.norm();
  if (!(norm0 > 1e-14 * std::max(1.0, start.norm()))) return std::nullopt;
  const double hnorm = std::max(inf_norm(h), 1e-300);

  LanczosBasis basis(h);
  basis.push(v / norm0, 0.0);
  while (true) {
    Eigen::VectorXd w = basis.step(unit_deflate);
    const std::size_t m = basis.size();
    const double b = w.norm();
    const bool closed = m == n || b <= 1e-10 * hnorm;

    if (closed || check_interval(m)) {
      auto es = basis.ritz();
      const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
      const double target = opt.residual_tol * scale;
      bool unresolved = false;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double weight = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        if (weight < min_weight) continue;
        const double estimate = closed ? 0.0 : b * std::abs(es.eigenvectors()(static_cast<Eigen::Index>(m - 1), i));
        if (estimate > 0.5 * target) {
          unresolved = true;
          break;
        }
        KrylovLine line{es.eigenvalues()(i), weight, basis.ritz_vector(es.eigenvectors().col(i))};
        const double res = (h * line.vector - line.energy * line.vector).norm();
        if (res > target) {
          unresolved = true;
          break;
        }
        return line;
      }
      if (closed) {
        if (unresolved) throw NumericalError("Lanczos lost orthogonality resolving the lowest spectral line");
        return std::nullopt;
      }
    }
    if (m >= opt.max_iterations)
      throw NumericalError("Lanczos did not resolve the lowest spectral line in " +
                           std::to_string(opt.max_iterations) + " iterations");
    basis.push(w / b, b);
  }
}

}  // namespace aqs
