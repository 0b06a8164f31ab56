#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "aqs/error.hpp"
#include "aqs/hamiltonian.hpp"
#include "oracles.hpp"

using namespace aqs;

TEST_CASE("single site network is its energy") {
  const auto h = build_tight_binding(make_network({3.0}, Eigen::MatrixXd::Zero(1, 1)));
  REQUIRE(h.dim() == 1);
  CHECK(h.matrix()(0, 0) == Complex(3.0, 0.0));
  CHECK(h.basis_labels() == std::vector<std::string>{"site1"});
}

TEST_CASE("symmetric coupler") {
  Eigen::MatrixXd v(2, 2);
  v << 0, 1, 1, 0;
  const auto h = build_tight_binding(make_network({0.0, 0.0}, v));
  Eigen::MatrixXcd expect(2, 2);
  expect << 0, 1, 1, 0;
  CHECK(h.matrix() == expect);
  CHECK(h.hermiticity_defect() == 0.0);
}

TEST_CASE("network invariants are enforced") {
  Eigen::MatrixXd v(2, 2);
  v << 0, 1, 0.5, 0;
  CHECK_THROWS_AS(build_tight_binding(make_network({0.0, 0.0}, v)), InputError);
  v << 1, 1, 1, 0;
  CHECK_THROWS_AS(build_tight_binding(make_network({0.0, 0.0}, v)), InputError);
  CHECK_THROWS_AS(build_tight_binding(make_network({0.0, 0.0, 0.0}, Eigen::MatrixXd::Zero(2, 2))), InputError);
  CHECK_THROWS_AS(make_network({}, Eigen::MatrixXd::Zero(0, 0)).validate(), InputError);
}

TEST_CASE("non-Hermitian matrix is rejected") {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1.0 + 1e-9, 0;
  CHECK_THROWS_AS(Hamiltonian(m, {}), InputError);
  m << 0, Complex(0, 1), Complex(0, -1), 0;
  CHECK_NOTHROW(Hamiltonian(m, {}));
}

namespace {

WaveguideGeometry line_of_guides(std::size_t n, double spacing, double c0, double d0) {
  WaveguideGeometry g;
  g.n_guides = n;
  g.prop_constants.assign(n, 0.0);
  g.separations = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g.separations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          spacing * std::abs(static_cast<double>(i) - static_cast<double>(j));
  g.coupling_scale = c0;
  g.decay_length = d0;
  return g;
}

}  // namespace

TEST_CASE("evanescent coupling") {
  SUBCASE("separation equal to the decay length") {
    const auto h = waveguide_hamiltonian(line_of_guides(2, 7.0, 1.0, 7.0));
    CHECK(h.matrix()(0, 1).real() == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  }
  SUBCASE("decoupled limit") {
    const auto h = waveguide_hamiltonian(line_of_guides(2, 100.0 * 3.0, 2.0, 3.0));
    CHECK(std::abs(h.matrix()(0, 1)) <= 2.0 * std::exp(-100.0) * (1 + 1e-12));
  }
  SUBCASE("three equally spaced guides") {
    const double c0 = 1.7;
    const auto h = waveguide_hamiltonian(line_of_guides(3, 12.0, c0, 9.0));
    const double c12 = h.matrix()(0, 1).real(), c13 = h.matrix()(0, 2).real();
    CHECK(c13 == doctest::Approx(c12 * c12 / c0).epsilon(1e-14));
  }
  SUBCASE("propagation constants on the diagonal") {
    auto g = line_of_guides(2, 5.0, 1.0, 5.0);
    g.prop_constants = {2.5, -1.0};
    const auto h = waveguide_hamiltonian(g);
    CHECK(h.matrix()(0, 0).real() == 2.5);
    CHECK(h.matrix()(1, 1).real() == -1.0);
  }
  SUBCASE("non-positive separation") {
    auto g = line_of_guides(2, 5.0, 1.0, 5.0);
    g.separations(0, 1) = g.separations(1, 0) = 0.0;
    CHECK_THROWS_AS(waveguide_hamiltonian(g), InputError);
  }
}

TEST_CASE("map_network examples") {
  Eigen::MatrixXcd a(2, 2);
  a << 0, 1, 1, 0;
  const Hamiltonian h(a, {});
  CHECK(map_network(h, MappingRecord::identity(2)).matrix() == a);
  CHECK(map_network(h, MappingRecord{{1, 0}, 1.0}).matrix() == a);

  Eigen::MatrixXcd b(2, 2);
  b << 1, 0.5, 0.5, 0;
  Eigen::MatrixXcd b2(2, 2);
  b2 << 2, 1, 1, 0;
  CHECK(map_network(Hamiltonian(b, {}), MappingRecord{{0, 1}, 2.0}).matrix() == b2);

  CHECK_THROWS_AS(MappingRecord({0, 0}, 1.0).validate(), InputError);
  CHECK_THROWS_AS(MappingRecord({0, 1}, 0.0).validate(), InputError);
  CHECK_THROWS_AS(map_network(h, MappingRecord::identity(3)), InputError);
}

TEST_CASE("map_network properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 5;
    const Hamiltonian h1(oracle::random_hermitian(n, rng), {});
    const Hamiltonian h2(oracle::random_hermitian(n, rng), {});
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const MappingRecord rec{perm, 0.5 + 0.1 * trial};

    // Entry rule, written out directly.
    const auto out = map_network(h1, rec);
    for (Eigen::Index m = 0; m < n; ++m)
      for (Eigen::Index k = 0; k < n; ++k)
        CHECK(out.matrix()(static_cast<Eigen::Index>(perm[m]), static_cast<Eigen::Index>(perm[k])) ==
              rec.unit_scale * h1.matrix()(m, k));

    // Linearity.
    const Hamiltonian sum(h1.matrix() + 3.0 * h2.matrix(), {});
    const Eigen::MatrixXcd lin = map_network(h1, rec).matrix() + 3.0 * map_network(h2, rec).matrix();
    CHECK(oracle::max_abs(map_network(sum, rec).matrix() - lin) <= 1e-13);

    // Inverse round trip.
    const auto back = map_network(map_network(h1, rec), rec.inverse());
    CHECK(oracle::max_abs(back.matrix() - h1.matrix()) <= 1e-14);

    // Spectrum scales by unit_scale.
    const Eigen::VectorXd ev = map_network(h1, rec).eigenvalues();
    CHECK((ev - rec.unit_scale * h1.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("static disorder") {
  Eigen::MatrixXcd a(3, 3);
  a << 1, 0.2, 0, 0.2, -1, 0.3, 0, 0.3, 0.5;
  const Hamiltonian h(a, {});

  SUBCASE("zero sigma is an exact copy") {
    const auto out = apply_static_disorder(h, 0.0, 99);
    CHECK(std::memcmp(out.matrix().data(), h.matrix().data(), sizeof(Complex) * 9) == 0);
  }
  SUBCASE("same seed, same output; other seed differs") {
    const auto x = apply_static_disorder(h, 0.7, 5);
    const auto y = apply_static_disorder(h, 0.7, 5);
    const auto z = apply_static_disorder(h, 0.7, 6);
    CHECK(x.matrix() == y.matrix());
    CHECK(x.matrix() != z.matrix());
  }
  SUBCASE("off-diagonals untouched, diagonal shifted by the offsets") {
    const auto out = apply_static_disorder(h, 0.7, 5);
    const auto off = disorder_offsets(3, 0.7, 5);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        if (i == j)
          CHECK(out.matrix()(i, i).real() == h.matrix()(i, i).real() + off[static_cast<std::size_t>(i)]);
        else
          CHECK(out.matrix()(i, j) == h.matrix()(i, j));
      }
  }
  SUBCASE("sample standard deviation of a one-site system") {
    const Hamiltonian one(Eigen::MatrixXcd::Zero(1, 1), {});
    const int samples = 10000;
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double x = apply_static_disorder(one, 1.0, static_cast<std::uint64_t>(k)).matrix()(0, 0).real();
      s += x;
      s2 += x * x;
    }
    const double mean = s / samples;
    const double sd = std::sqrt((s2 - samples * mean * mean) / (samples - 1));
    CHECK(std::abs(sd - 1.0) <= 0.05);
  }
  SUBCASE("negative sigma") { CHECK_THROWS_AS(apply_static_disorder(h, -1.0, 0), InputError); }
}

TEST_CASE("mean coupling and digest") {
  Eigen::MatrixXcd a(3, 3);
  a << 0, 1, 0, 1, 0, 3, 0, 3, 0;
  const Hamiltonian h(a, {});
  CHECK(mean_coupling(h) == 2.0);
  CHECK(mean_coupling(Hamiltonian(Eigen::MatrixXcd::Identity(2, 2), {})) == 0.0);
  CHECK(h.digest() == Hamiltonian(a, {}).digest());
  a(0, 0) = 1e-300;
  CHECK(h.digest() != Hamiltonian(a, {}).digest());
}
