#include <doctest.h>

#include <numeric>
#include <random>

#include "aqs/bose_hubbard.hpp"
#include "aqs/error.hpp"
#include "aqs/quantum_walk.hpp"
#include "aqs/validation.hpp"
#include "oracles.hpp"

using namespace aqs;

namespace {

Hamiltonian from_sparse(const SparseMatrixD& s) { return Hamiltonian(Eigen::MatrixXd(s).cast<Complex>(), {}); }

CorrespondenceCheck passing_check() {
  const Hamiltonian h(Eigen::MatrixXcd::Identity(2, 2), {});
  return check_isomorphism(h, h, MappingRecord::identity(2), 1e-12);
}

}  // namespace

TEST_CASE("isomorphism check") {
  std::mt19937_64 rng(4);
  const Hamiltonian a(oracle::random_hermitian(4, rng), {});

  SUBCASE("identical models") {
    const auto c = check_isomorphism(a, a, MappingRecord::identity(4), 1e-12);
    CHECK(c.metric == 0.0);
    CHECK(c.pass);
    CHECK(c.kind == CheckKind::isomorphism);
  }
  SUBCASE("round trip through the inverse record") {
    const MappingRecord rec{{3, 1, 0, 2}, 2.5e-3};
    const auto b = map_network(a, rec.inverse());
    const auto c = check_isomorphism(a, b, rec, 1e-12);
    CHECK(c.pass);
    CHECK(c.metric <= 1e-12);
  }
  SUBCASE("injected defect") {
    Eigen::MatrixXcd m = a.matrix();
    m(1, 1) += 1e-3;
    const auto c = check_isomorphism(Hamiltonian(m, {}), a, MappingRecord::identity(4), 1e-6);
    CHECK_FALSE(c.pass);
    CHECK(c.metric == doctest::Approx(1e-3).epsilon(1e-9));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(check_isomorphism(a, Hamiltonian(Eigen::MatrixXcd::Identity(2, 2), {}), MappingRecord::identity(2),
                                      1e-12),
                    InputError);
  }
}

TEST_CASE("exciton network and waveguide array evolve identically after rescaling time") {
  // Source model in cm^-1-like units, device model in rad/ps-like units.
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(3, 3);
  v(0, 1) = v(1, 0) = -87.7;
  v(1, 2) = v(2, 1) = 30.8;
  v(0, 2) = v(2, 0) = 5.5;
  const auto fmo = build_tight_binding(make_network({200.0, 320.0, 0.0}, v));
  const MappingRecord rec{{1, 2, 0}, 40.0};
  const auto guides = map_network(fmo, rec.inverse());
  CHECK(check_isomorphism(fmo, guides, rec, 1e-12).pass);

  const double t_src = 0.013;
  for (std::size_t m = 0; m < 3; ++m) {
    const auto p_src = evolve_unitary(fmo, rec.site_bijection[m], t_src).populations();
    const auto p_dev = evolve_unitary(guides, m, t_src * rec.unit_scale).populations();
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(std::abs(p_src(static_cast<Eigen::Index>(rec.site_bijection[k])) - p_dev(static_cast<Eigen::Index>(k))) <=
            1e-12);
  }
}

TEST_CASE("approximation bound") {
  SUBCASE("identical models") {
    const Hamiltonian h(Eigen::MatrixXcd::Identity(3, 3), {});
    const auto c = approximation_bound(h, h, lowest_eigenstates(h, 2), 0.0);
    CHECK(c.metric == 0.0);
    CHECK(c.pass);
  }
  SUBCASE("next-nearest-neighbour hopping on a Bose-Hubbard chain") {
    const std::size_t l = 5, n = 3;
    const double j = 0.2, u = 1.0, jp = 0.01 * j;
    const FockBasis basis(l, n);
    const auto plain = build_bh(BHParams{j, u, Lattice::chain(l)}, basis);
    const SparseMatrixD k_nnn = build_bh(BHParams{j, u, Lattice::chain_next_nearest(l)}, basis).hopping();
    const SparseMatrixD full = plain.hamiltonian() - jp * k_nnn;
    const auto h_full = from_sparse(full);
    const auto h_red = from_sparse(plain.hamiltonian());
    const auto states = lowest_eigenstates(h_red, 4);
    const auto c = approximation_bound(h_full, h_red, states, 0.1);

    // Dense residual computed directly.
    const Eigen::MatrixXd d = Eigen::MatrixXd(full) - Eigen::MatrixXd(plain.hamiltonian());
    double expect = 0.0;
    for (const auto& psi : states) {
      const Eigen::VectorXcd hv = h_red.matrix() * psi;
      expect = std::max(expect, (d.cast<Complex>() * psi).norm() / hv.norm());
    }
    CHECK(c.metric == doctest::Approx(expect).epsilon(1e-10));
    CHECK(c.pass);
    CHECK(c.metric > 0.1 * jp / j);
    CHECK(c.metric < 10 * jp / j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
    CHECK(c.metadata.at("operator_norm_distance") == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()));

    const auto tight = approximation_bound(h_full, h_red, states, 0.5 * c.metric);
    CHECK_FALSE(tight.pass);
  }
}

TEST_CASE("speedup classification over every answer combination") {
  for (int bits = 0; bits < 8; ++bits) {
    const SpeedupAnswers a{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0};
    int expect;
    if (a.hardness_proof)
      expect = 1;
    else if (!a.efficient_classical_known)
      expect = a.scalable_accuracy ? 2 : 3;
    else
      expect = 4;
    const auto c = classify_speedup(a);
    CHECK(c.class_id == expect);
    CHECK_FALSE(c.justification.empty());
  }
  CHECK(classify_speedup({true, true, true}).class_id == 1);
  CHECK(classify_speedup({false, false, false}).class_id == 3);
  CHECK(classify_speedup({false, true, true}).class_id == 4);
}

TEST_CASE("report rules") {
  const auto speed = classify_speedup({false, false, false});
  SUBCASE("simulation with internal checks only") {
    const auto r = build_report(ExperimentRole::simulation, {passing_check()}, {}, speed);
    CHECK(r.internally_valid());
    CHECK_FALSE(r.externally_valid());
    CHECK(r.tags() == std::vector<std::string>{"internally valid"});
  }
  SUBCASE("emulation without external checks is rejected") {
    CHECK_THROWS_AS(build_report(ExperimentRole::emulation, {passing_check()}, {}, speed), InvariantError);
  }
  SUBCASE("simulation may not carry external checks") {
    CHECK_THROWS_AS(build_report(ExperimentRole::simulation, {passing_check()}, {passing_check()}, speed),
                    InvariantError);
  }
  SUBCASE("emulation with passing checks is valid both ways") {
    const auto r = build_report(ExperimentRole::emulation, {passing_check()}, {passing_check()}, speed);
    CHECK(r.tags() == std::vector<std::string>{"internally valid", "externally valid"});
  }
  SUBCASE("failing external check") {
    auto bad = passing_check();
    bad.metric = 1.0;
    bad.pass = false;
    const auto r = build_report(ExperimentRole::emulation, {passing_check()}, {bad}, speed);
    CHECK(r.tags() == std::vector<std::string>{"internally valid"});
  }
  SUBCASE("no internal checks") {
    CHECK_THROWS_AS(build_report(ExperimentRole::simulation, {}, {}, speed), InputError);
  }
}

TEST_CASE("report JSON round trip") {
  const auto r = build_report(ExperimentRole::emulation, {passing_check()}, {passing_check()},
                              classify_speedup({false, true, true}), {{"target", "cold atoms"}});
  const std::string text = serialize_report(r);
  const auto back = parse_report(text);
  CHECK(back == r);
  CHECK(serialize_report(back) == text);
  auto j = nlohmann::json::parse(text);
  CHECK(j.at("schema") == "aqsim/validation-report");
  j["schema_version"] = 99;
  CHECK_THROWS_AS(report_from_json(j), InputError);
  CHECK_THROWS_AS(parse_report("{not json"), InputError);
}
