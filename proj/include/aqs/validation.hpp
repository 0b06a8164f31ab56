#pragma once

// Source/target correspondence checks, speedup classification and the
// validation report that ties them together.
//
// Internal checks ask whether a device or engine really realises its own
// source model (exact isomorphism, bounded neglected terms). External checks
// ask whether that source model is probative about a concrete target system
// and only make sense for emulation.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "aqs/hamiltonian.hpp"

namespace aqs {

enum class CheckKind { isomorphism, approximation };

struct CorrespondenceCheck {
  CheckKind kind = CheckKind::isomorphism;
  std::vector<std::string> inputs;  // human-readable references to the compared models
  double metric = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> metadata;

  bool operator==(const CorrespondenceCheck&) const = default;
};

// metric = max |H_a - map_network(H_b, rec)|.
CorrespondenceCheck check_isomorphism(const Hamiltonian& h_a, const Hamiltonian& h_b, const MappingRecord& rec,
                                      double tol);

// metric = max over states of ||(H_full - H_reduced) psi|| / ||H_reduced psi||,
// falling back to the absolute residual when H_reduced psi = 0. The
// operator-norm distance ||H_full - H_reduced||_2 goes into metadata.
CorrespondenceCheck approximation_bound(const Hamiltonian& h_full, const Hamiltonian& h_reduced,
                                        const std::vector<Eigen::VectorXcd>& state_set, double tol);

// The k lowest eigenvectors of h, the default state set for approximation_bound.
std::vector<Eigen::VectorXcd> lowest_eigenstates(const Hamiltonian& h, std::size_t k);

struct SpeedupAnswers {
  bool hardness_proof = false;
  bool efficient_classical_known = false;
  bool scalable_accuracy = false;
};

// 1: proven classically hard. 2: no efficient classical algorithm known and
// the simulator scales without losing accuracy. 3: no efficient classical
// algorithm known, scalability unknown. 4: efficient classical algorithms
// exist but quantum resource scaling is better.
struct SpeedupClass {
  int class_id = 0;
  std::string justification;

  bool operator==(const SpeedupClass&) const = default;
};

SpeedupClass classify_speedup(const SpeedupAnswers& answers);

enum class ExperimentRole { simulation, emulation };

struct ValidationReport {
  ExperimentRole role = ExperimentRole::simulation;
  std::vector<CorrespondenceCheck> internal_checks;
  std::vector<CorrespondenceCheck> external_checks;
  SpeedupClass speedup;
  std::map<std::string, std::string> narrative;

  bool internally_valid() const;
  bool externally_valid() const;
  std::vector<std::string> tags() const;

  bool operator==(const ValidationReport&) const = default;
};

inline constexpr std::string_view kReportSchema = "aqsim/validation-report";
inline constexpr int kReportSchemaVersion = 1;

// Rejects (InvariantError) an emulation without external checks and a
// simulation that carries external checks; an emulation is never silently
// downgraded. Throws InputError when there are no internal checks.
ValidationReport build_report(ExperimentRole role, std::vector<CorrespondenceCheck> internal_checks,
                              std::vector<CorrespondenceCheck> external_checks, SpeedupClass speedup,
                              std::map<std::string, std::string> narrative = {});

nlohmann::json report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const nlohmann::json& j);
std::string serialize_report(const ValidationReport& report);
ValidationReport parse_report(std::string_view text);

std::string_view to_string(CheckKind kind);
std::string_view to_string(ExperimentRole role);
ExperimentRole parse_role(std::string_view s);

}  // namespace aqs
