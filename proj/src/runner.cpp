#include "aqs/runner.hpp"

#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aqs/bose_hubbard.hpp"
#include "aqs/error.hpp"
#include "aqs/io_util.hpp"
#include "aqs/open_system.hpp"
#include "aqs/param_io.hpp"
#include "aqs/quantum_walk.hpp"
#include "aqs/validation.hpp"

namespace aqs {
namespace {

using json = nlohmann::json;

std::string seed_text(const ExperimentConfig& cfg) {
  auto s = cfg.seed();
  return s ? std::to_string(*s) : "none";
}

std::string csv_preamble(const ExperimentConfig& cfg) {
  return "# " + std::string(kToolName) + " " + std::string(kToolVersion) + " command=" + cfg.command() +
         " config_hash=" + hex64(cfg.hash()) + " seed=" + seed_text(cfg) + "\n";
}

json metadata(const ExperimentConfig& cfg) {
  json m = {{"schema", "aqsim/run-metadata"},
            {"schema_version", 1},
            {"tool", kToolName},
            {"tool_version", kToolVersion},
            {"command", cfg.command()},
            {"config_hash", hex64(cfg.hash())},
            {"config", cfg.canonical()}};
  if (auto s = cfg.seed())
    m["seed"] = *s;
  else
    m["seed"] = nullptr;
  return m;
}

std::string csv_number(double v) { return std::isnan(v) ? "nan" : format_double(v); }

struct Artifact {
  std::filesystem::path path;
  std::string contents;
};

std::vector<Artifact> csv_with_sidecar(const ExperimentConfig& cfg, const std::string& body, json meta) {
  const std::filesystem::path out = cfg.text("output");
  std::filesystem::path side = out;
  side += ".json";
  return {{out, csv_preamble(cfg) + body}, {side, meta.dump(2) + "\n"}};
}

Lattice lattice_from(const ExperimentConfig& cfg, std::size_t sites) {
  const auto& spec = cfg.text("lattice");
  if (spec == "chain") return Lattice::chain(sites);
  const auto x = spec.find('x');
  const auto rows = static_cast<std::size_t>(*parse_integer(spec.substr(0, x)));
  const auto cols = static_cast<std::size_t>(*parse_integer(spec.substr(x + 1)));
  if (rows * cols != sites)
    throw InputError("lattice " + spec + " has " + std::to_string(rows * cols) + " sites but sites = " +
                     std::to_string(sites));
  return Lattice::plaquette(rows, cols);
}

unsigned threads_of(const ExperimentConfig& cfg) { return static_cast<unsigned>(cfg.integer("threads")); }

std::vector<Artifact> run_enaqt(const ExperimentConfig& cfg) {
  Hamiltonian h = load_hamiltonian(cfg.path("network"));
  const double sigma = cfg.real("disorder_sigma");
  if (sigma > 0.0) h = apply_static_disorder(h, sigma, *cfg.seed());
  const auto spec = TransportSpec::uniform(h.dim(), static_cast<std::size_t>(cfg.integer("source") - 1),
                                           static_cast<std::size_t>(cfg.integer("sink") - 1), cfg.real("trap_rate"),
                                           cfg.real("recombination_rate"), 0.0);
  const auto grid = cfg.has("gamma_grid")
                        ? cfg.real_list("gamma_grid")
                        : log_grid(cfg.real("gamma_min"), cfg.real("gamma_max"),
                                   static_cast<std::size_t>(cfg.integer("gamma_steps")));
  const double t_max = cfg.has("t_max") ? cfg.real("t_max") : default_horizon(h);
  const double tol = cfg.real("tol");
  const auto curve = goldilocks_sweep(h, spec, grid, t_max, tol, threads_of(cfg));

  std::string body = "gamma,eta,converged\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    body += format_double(grid[i]) + "," + format_double(curve.efficiencies[i]) + "," +
            (curve.converged[i] ? "true" : "false") + "\n";
  json meta = metadata(cfg);
  meta["grid"] = grid;
  meta["horizon"] = t_max;
  meta["tolerances"] = {{"integrator", tol}, {"convergence", tol}};
  meta["hamiltonian_digest"] = hex64(curve.hamiltonian_digest);
  meta["argmax_gamma"] = grid[curve.argmax()];
  return csv_with_sidecar(cfg, body, std::move(meta));
}

std::vector<Artifact> run_walk(const ExperimentConfig& cfg) {
  const Hamiltonian h = load_hamiltonian(cfg.path("network"));
  const auto mode = static_cast<std::size_t>(cfg.integer("input_mode") - 1);
  if (mode >= h.dim())
    throw InputError("input_mode " + std::to_string(mode + 1) + " out of range 1.." + std::to_string(h.dim()));
  const double t = cfg.has("time") ? cfg.real("time") : length_to_time(cfg.real("length"), cfg.real("refractive_index"));
  Eigen::VectorXd pops;
  if (cfg.real("phase_sigma") > 0.0) {
    DephasingEnsembleSpec spec{static_cast<std::size_t>(cfg.integer("n_segments")), cfg.real("phase_sigma"),
                               static_cast<std::size_t>(cfg.integer("shots")), *cfg.seed()};
    pops = dephased_walk(h, mode, t, spec, threads_of(cfg));
  } else {
    const auto state = evolve_unitary(h, mode, t);
    if (state.norm_drift() > kNormTol) throw InvariantError("walk norm drifted by " + format_double(state.norm_drift()));
    pops = state.populations();
  }
  if (std::abs(pops.sum() - 1.0) > 1e-9) throw InvariantError("walk populations do not sum to 1");
  std::string body = "site,population\n";
  for (Eigen::Index i = 0; i < pops.size(); ++i) body += std::to_string(i + 1) + "," + format_double(pops(i)) + "\n";
  json meta = metadata(cfg);
  meta["time"] = t;
  meta["hamiltonian_digest"] = hex64(h.digest());
  return csv_with_sidecar(cfg, body, std::move(meta));
}

std::vector<Artifact> run_bh_spectrum(const ExperimentConfig& cfg) {
  const auto sites = static_cast<std::size_t>(cfg.integer("sites"));
  const auto bosons = static_cast<std::size_t>(cfg.integer("bosons"));
  const BHParams params{cfg.real("J"), cfg.real("U"), lattice_from(cfg, sites)};
  const FockBasis basis(sites, bosons);
  std::vector<double> grid;
  if (cfg.has("nu_grid")) {
    grid = cfg.real_list("nu_grid");
  } else {
    const double lo = cfg.real("nu_min"), hi = cfg.real("nu_max");
    const auto steps = static_cast<std::size_t>(cfg.integer("nu_steps"));
    for (std::size_t i = 0; i < steps; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  const auto spec = modulation_absorption(params, basis, cfg.real("delta"), grid, cfg.real("t_drive"), cfg.real("tol"),
                                          threads_of(cfg));
  std::string body = "nu,absorbed_energy\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    body += format_double(grid[i]) + "," + format_double(spec.absorbed_energy[i]) + "\n";
  json meta = metadata(cfg);
  meta["ground_energy"] = spec.ground_energy;
  meta["basis_size"] = basis.size();
  std::vector<double> flagged;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (spec.flagged[i]) flagged.push_back(grid[i]);
  meta["flagged_nu"] = flagged;
  return csv_with_sidecar(cfg, body, std::move(meta));
}

std::vector<Artifact> run_bh_scan(const ExperimentConfig& cfg) {
  const auto sites = static_cast<std::size_t>(cfg.integer("sites"));
  const auto bosons = static_cast<std::size_t>(cfg.integer("bosons"));
  const auto points = bh_scan(lattice_from(cfg, sites), bosons, cfg.real("U"), cfg.real_list("j_grid"), threads_of(cfg));
  std::string body = "j_ratio,gap,condensate_fraction\n";
  for (const auto& p : points)
    body += format_double(p.j_ratio) + "," + csv_number(p.gap) + "," + format_double(p.condensate_fraction) + "\n";
  json meta = metadata(cfg);
  meta["basis_size"] = basis_dimension(sites, bosons);
  return csv_with_sidecar(cfg, body, std::move(meta));
}

std::vector<Artifact> run_validate(const ExperimentConfig& cfg) {
  const Hamiltonian source = load_hamiltonian(cfg.path("source"));
  const Hamiltonian target = load_hamiltonian(cfg.path("target"));
  const MappingRecord rec = load_mapping(cfg.path("mapping"));
  std::vector<CorrespondenceCheck> internal{check_isomorphism(source, target, rec, cfg.real("tol"))};
  std::vector<CorrespondenceCheck> external;
  const auto role = parse_role(cfg.text("role"));
  if (cfg.has("external")) {
    const Hamiltonian full = load_hamiltonian(cfg.path("external"));
    const std::size_t k = cfg.has("external_states") ? static_cast<std::size_t>(cfg.integer("external_states"))
                                                     : std::min<std::size_t>(4, target.dim());
    external.push_back(approximation_bound(full, target, lowest_eigenstates(target, k), cfg.real("external_tol")));
  }
  const auto speedup = classify_speedup(
      {cfg.boolean("hardness_proof"), cfg.boolean("efficient_classical_known"), cfg.boolean("scalable_accuracy")});
  std::map<std::string, std::string> narrative{{"source_model", cfg.text("source")},
                                               {"target_model", cfg.text("target")},
                                               {"mapping", cfg.text("mapping")}};
  if (cfg.has("external")) narrative["external_model"] = cfg.text("external");
  const auto report = build_report(role, std::move(internal), std::move(external), speedup, std::move(narrative));
  json out = report_to_json(report);
  out["metadata"] = metadata(cfg);
  return {{cfg.text("output"), out.dump(2) + "\n"}};
}

}  // namespace

RunOutcome run(const ExperimentConfig& config) {
  std::vector<Artifact> artifacts;
  const auto& cmd = config.command();
  if (cmd == "enaqt-sweep")
    artifacts = run_enaqt(config);
  else if (cmd == "walk")
    artifacts = run_walk(config);
  else if (cmd == "bh-spectrum")
    artifacts = run_bh_spectrum(config);
  else if (cmd == "bh-scan")
    artifacts = run_bh_scan(config);
  else if (cmd == "validate")
    artifacts = run_validate(config);
  else
    throw InputError("unknown command '" + cmd + "'");

  RunOutcome outcome;
  for (const auto& a : artifacts) {
    write_file_atomic(a.path, a.contents);
    outcome.files.push_back(a.path);
  }
  return outcome;
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ParseError& e) {
    err << "error: invalid input\n" << e.what() << "\n";
    return kExitParse;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_and_report(const ExperimentConfig& config, std::ostream& err) {
  try {
    run(config);
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

}  // namespace aqs
