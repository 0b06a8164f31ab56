#include "aqs/validation.hpp"

#include <algorithm>
#include <cmath>

#include "aqs/error.hpp"

namespace aqs {

std::string_view to_string(CheckKind kind) {
  return kind == CheckKind::isomorphism ? "isomorphism" : "approximation";
}

std::string_view to_string(ExperimentRole role) {
  return role == ExperimentRole::simulation ? "simulation" : "emulation";
}

ExperimentRole parse_role(std::string_view s) {
  if (s == "simulation") return ExperimentRole::simulation;
  if (s == "emulation") return ExperimentRole::emulation;
  throw InputError("role must be 'simulation' or 'emulation', got '" + std::string(s) + "'");
}

CorrespondenceCheck check_isomorphism(const Hamiltonian& h_a, const Hamiltonian& h_b, const MappingRecord& rec,
                                      double tol) {
  if (h_a.dim() != h_b.dim())
    throw InputError("isomorphism check needs equal dimensions (" + std::to_string(h_a.dim()) + " vs " +
                     std::to_string(h_b.dim()) + ")");
  if (!(tol >= 0.0)) throw InputError("tolerance must be >= 0");
  const Hamiltonian mapped = map_network(h_b, rec);
  CorrespondenceCheck c;
  c.kind = CheckKind::isomorphism;
  c.inputs = {"H_a#" + std::to_string(h_a.digest()), "H_b#" + std::to_string(h_b.digest())};
  c.metric = (h_a.matrix() - mapped.matrix()).cwiseAbs().maxCoeff();
  c.tolerance = tol;
  c.pass = c.metric <= tol;
  c.metadata["unit_scale"] = rec.unit_scale;
  return c;
}

CorrespondenceCheck approximation_bound(const Hamiltonian& h_full, const Hamiltonian& h_reduced,
                                        const std::vector<Eigen::VectorXcd>& state_set, double tol) {
  if (h_full.dim() != h_reduced.dim())
    throw InputError("approximation bound needs equal dimensions (" + std::to_string(h_full.dim()) + " vs " +
                     std::to_string(h_reduced.dim()) + ")");
  if (state_set.empty()) throw InputError("approximation bound needs a non-empty state set");
  if (!(tol >= 0.0)) throw InputError("tolerance must be >= 0");
  const Eigen::MatrixXcd diff = h_full.matrix() - h_reduced.matrix();
  double metric = 0.0;
  for (const auto& psi : state_set) {
    if (static_cast<std::size_t>(psi.size()) != h_full.dim()) throw InputError("state dimension mismatch");
    const double num = (diff * psi).norm();
    const double den = (h_reduced.matrix() * psi).norm();
    metric = std::max(metric, den > 0.0 ? num / den : num);
  }
  CorrespondenceCheck c;
  c.kind = CheckKind::approximation;
  c.inputs = {"H_full#" + std::to_string(h_full.digest()), "H_reduced#" + std::to_string(h_reduced.digest())};
  c.metric = metric;
  c.tolerance = tol;
  c.pass = metric <= tol;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  c.metadata["operator_norm_distance"] = es.eigenvalues().cwiseAbs().maxCoeff();
  c.metadata["states"] = static_cast<double>(state_set.size());
  return c;
}

std::vector<Eigen::VectorXcd> lowest_eigenstates(const Hamiltonian& h, std::size_t k) {
  if (k == 0 || k > h.dim()) throw InputError("requested eigenstate count out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
  std::vector<Eigen::VectorXcd> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(es.eigenvectors().col(static_cast<Eigen::Index>(i)));
  return out;
}

SpeedupClass classify_speedup(const SpeedupAnswers& a) {
  if (a.hardness_proof) return {1, "the simulated problem is proven strictly harder than anything classically simulable"};
  if (!a.efficient_classical_known && a.scalable_accuracy)
    return {2, "no hardness proof; best known classical algorithms are inefficient and the simulator scales up without losing accuracy"};
  if (!a.efficient_classical_known)
    return {3, "no hardness proof; best known classical algorithms are inefficient but scalability of the simulator's accuracy is unknown"};
  return {4, "efficient classical algorithms exist but the quantum resource scaling is more favourable"};
}

bool ValidationReport::internally_valid() const {
  return !internal_checks.empty() &&
         std::all_of(internal_checks.begin(), internal_checks.end(), [](const auto& c) { return c.pass; });
}

bool ValidationReport::externally_valid() const {
  return role == ExperimentRole::emulation && !external_checks.empty() &&
         std::all_of(external_checks.begin(), external_checks.end(), [](const auto& c) { return c.pass; });
}

std::vector<std::string> ValidationReport::tags() const {
  std::vector<std::string> t;
  if (internally_valid()) t.emplace_back("internally valid");
  if (externally_valid()) t.emplace_back("externally valid");
  return t;
}

ValidationReport build_report(ExperimentRole role, std::vector<CorrespondenceCheck> internal_checks,
                              std::vector<CorrespondenceCheck> external_checks, SpeedupClass speedup,
                              std::map<std::string, std::string> narrative) {
  if (internal_checks.empty()) throw InputError("a validation report needs at least one internal check");
  if (speedup.class_id < 1 || speedup.class_id > 4) throw InputError("speedup class must be 1..4");
  if (role == ExperimentRole::emulation && external_checks.empty())
    throw InvariantError(
        "emulation report rejected: no external checks. Re-request with role=simulation to reinterpret the "
        "experiment as a simulation of its source model");
  if (role == ExperimentRole::simulation && !external_checks.empty())
    throw InvariantError("simulation reports cannot claim external validation");
  return ValidationReport{role, std::move(internal_checks), std::move(external_checks), std::move(speedup),
                          std::move(narrative)};
}

namespace {

nlohmann::json check_to_json(const CorrespondenceCheck& c) {
  return {{"kind", to_string(c.kind)}, {"inputs", c.inputs},       {"metric", c.metric},
          {"tolerance", c.tolerance},  {"pass", c.pass},           {"metadata", c.metadata}};
}

CorrespondenceCheck check_from_json(const nlohmann::json& j) {
  CorrespondenceCheck c;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "isomorphism")
    c.kind = CheckKind::isomorphism;
  else if (kind == "approximation")
    c.kind = CheckKind::approximation;
  else
    throw InputError("unknown check kind '" + kind + "'");
  c.inputs = j.at("inputs").get<std::vector<std::string>>();
  c.metric = j.at("metric").get<double>();
  c.tolerance = j.at("tolerance").get<double>();
  c.pass = j.at("pass").get<bool>();
  c.metadata = j.at("metadata").get<std::map<std::string, double>>();
  if (c.metric < 0.0) throw InputError("check metric must be >= 0");
  if (c.pass != (c.metric <= c.tolerance)) throw InputError("check pass flag inconsistent with metric and tolerance");
  return c;
}

}  // namespace

nlohmann::json report_to_json(const ValidationReport& r) {
  nlohmann::json internal = nlohmann::json::array(), external = nlohmann::json::array();
  for (const auto& c : r.internal_checks) internal.push_back(check_to_json(c));
  for (const auto& c : r.external_checks) external.push_back(check_to_json(c));
  return {{"schema", kReportSchema},
          {"schema_version", kReportSchemaVersion},
          {"role", to_string(r.role)},
          {"internal_checks", internal},
          {"external_checks", external},
          {"speedup", {{"class_id", r.speedup.class_id}, {"justification", r.speedup.justification}}},
          {"narrative", r.narrative},
          {"tags", r.tags()}};
}

ValidationReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<std::string>() != kReportSchema) throw InputError("not a validation report");
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
      throw InputError("unsupported report schema version");
    std::vector<CorrespondenceCheck> internal, external;
    for (const auto& c : j.at("internal_checks")) internal.push_back(check_from_json(c));
    for (const auto& c : j.at("external_checks")) external.push_back(check_from_json(c));
    SpeedupClass s{j.at("speedup").at("class_id").get<int>(), j.at("speedup").at("justification").get<std::string>()};
    return build_report(parse_role(j.at("role").get<std::string>()), std::move(internal), std::move(external),
                        std::move(s), j.at("narrative").get<std::map<std::string, std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed validation report: ") + e.what());
  }
}

std::string serialize_report(const ValidationReport& report) { return report_to_json(report).dump(2) + "\n"; }

ValidationReport parse_report(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed validation report: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace aqs
