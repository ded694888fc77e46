#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polydg/forms.hpp"
#include "polydg/timeint.hpp"

namespace polydg {

// ---------------------------------------------------------------- norms

enum class NormKind { energy_E, dG_e, dG_p_semi, dG_a, L2_field, L2_pressure };

const char* to_string(NormKind kind);

struct NormSpec {
  NormKind which = NormKind::energy_E;
  int quadrature_boost = 4;
};

/// Squared constituents of the energy norm and the L2 errors, all for
/// e = exact - discrete (or e = -discrete when no exact solution is given).
struct ErrorReport {
  double mass = 0.0;     // M(de/dt, de/dt)
  double damping = 0.0;  // B(e_w, e_w)
  double elastic = 0.0;  // ||e_u||^2_dG,e
  double poro = 0.0;     // |beta e_u + e_w|^2_dG,p
  double acoustic = 0.0; // ||e_phi||^2_dG,a
  double l2_u = 0.0, l2_w = 0.0, l2_phi = 0.0, l2_pressure = 0.0;  // squared

  double energy() const;
  double l2_field() const;
  double pressure() const;
  double value(NormKind kind) const;
};

/// Element-wise quadrature of every norm at time state.t. Jump terms use the
/// exact traces, so on interior faces only the discrete jumps contribute.
ErrorReport compute_errors(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                           const SimState& state, const ManufacturedSolution* exact, int quadrature_boost = 4);

double compute_error(const DgSpace& space, const MaterialField& materials, const PenaltyField& penalties,
                     const SimState& state, const ManufacturedSolution& exact, const NormSpec& norm);

/// The same energy norm as a matrix quadratic form:
/// Z^T A Z + w^T B_visc w + u^T N_e u + (U,W)^T N_p (U,W) + Phi^T N_a Phi.
double energy_norm_matrix(const BlockSystem& system, const NormMatrices& norms, const SimState& state);

// ---------------------------------------------------------------- running

enum class Scheme { newmark, leapfrog };
Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme scheme);

struct RunSettings {
  Scheme scheme = Scheme::newmark;
  NewmarkParams newmark;  // dt lives here for both schemes
  LeapfrogVariant leapfrog = LeapfrogVariant::paper;
  double final_time = 0.05;
  SolverOptions solver;
  int energy_stride = 1;
  int probe_stride = 10;
  std::vector<double> snapshots;
  Index raster_nx = 100, raster_ny = 100;
  int quadrature_boost = 0;
  std::optional<std::filesystem::path> output;  // CSV artifacts when set
  /// Called with (k, state) after the start and after every step.
  std::function<void(Index, const SimState&)> observer;

  double dt() const { return newmark.dt; }
  Index steps() const;
};

/// Assembled problem: space, media, operators, loads and initial state.
struct Problem {
  std::shared_ptr<const DgSpace> space;
  MaterialField materials;
  BlockSystem system;
  SourceTerms sources;
  BoundaryData boundary;
  SimState initial;
};

Problem make_problem(std::shared_ptr<const DgSpace> space, MaterialField materials, SourceTerms sources,
                     BoundaryData boundary, const PenaltyConstants& penalties = {}, int quadrature_boost = 0);

struct EnergySample {
  double t = 0.0;
  EnergyParts parts;
};

struct ProbeSample {
  double t = 0.0;
  double value = 0.0;
};

struct SimulationResult {
  SimState final;
  std::vector<EnergySample> energy;
  std::vector<ProbeSample> probe;
  std::vector<std::filesystem::path> snapshots;
  Index steps = 0;
  double wall_seconds = 0.0;
  std::string solver;  // backend of the per-step system
};

/// Time loop with energy and interface sampling. Writes energy.csv,
/// probe.csv and fields_t<k>.csv when settings.output is set.
SimulationResult simulate(const Problem& problem, const RunSettings& settings);

// ---------------------------------------------------------------- monitors

/// tau > 0: || p_h|_p - rho_a dphi_h/dt|_a ||_{Gamma_I}; tau = 0: || dw_h/dt . n_p ||_{Gamma_I}.
double interface_continuity_probe(const DgSpace& space, const MaterialField& materials, const SimState& state,
                                  int quadrature_boost = 2);

struct DissipativityVerdict {
  bool pass = false;
  double max_increase = 0.0;  // largest E^{k+1} - E^k over the checked samples
  double reference = 0.0;     // energy at the first checked sample
  Index checked = 0;
};

/// PASS iff max increase between consecutive samples with t >= from is at
/// most tolerance * E(first such sample).
DissipativityVerdict dissipativity_check(const std::vector<EnergySample>& series, double from,
                                         double tolerance = 1e-8);

// ---------------------------------------------------------------- studies

struct StudySettings {
  double dt = 1e-3;
  double final_time = 0.05;
  double tau = 1.0;
  Scheme scheme = Scheme::newmark;
  LeapfrogVariant leapfrog = LeapfrogVariant::centered;
  NewmarkParams newmark;  // dt overridden by `dt`
  PenaltyConstants penalties;
  SolverOptions solver;
  int quadrature_boost = 4;
  int sup_stride = 1;  // steps between samples of the sup-in-time errors
  PoroParams poro = testcase1_poro();
  AcousticParams acoustic = testcase1_acoustic();
};

/// Test case 1 at full fidelity: dt = 1e-4, T = 0.25.
StudySettings paper_study_settings();

enum class TimeNorm { final, sup };

struct ConvergenceRow {
  double h = 0.0;
  int degree = 0;
  Index elements = 0;
  Index dofs = 0;
  ErrorReport errors;  // at T
  std::array<double, 6> sup{};  // max over sampled t in [0, T], indexed by NormKind
  double projection_l2 = 0.0;  // L2 error of the projected exact solution at T
  double seconds = 0.0;

  double value(NormKind kind, TimeNorm when = TimeNorm::final) const;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool monotone = true;

  /// log(e_i / e_{i+1}) / log(h_i / h_{i+1}) between rows i and i+1.
  std::vector<double> rates(NormKind kind, TimeNorm when = TimeNorm::final) const;
  double last_rate(NormKind kind, TimeNorm when = TimeNorm::final) const;
};

struct SemilogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log(y) = slope * x + intercept.
SemilogFit semilog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Test case 1 problem on `space` with L2-projected initial data.
Problem manufactured_problem(std::shared_ptr<const DgSpace> space, MaterialField materials,
                             const ManufacturedSolution& exact, const PenaltyConstants& penalties = {},
                             int quadrature_boost = 0);

/// Runs the manufactured Test case 1 problem on one mesh to settings.final_time.
ConvergenceRow run_manufactured(std::shared_ptr<const PolyMesh> mesh, int degree, const StudySettings& settings);

ConvergenceReport h_convergence_study(const std::vector<std::shared_ptr<const PolyMesh>>& meshes, int degree,
                                      const StudySettings& settings);
ConvergenceReport p_convergence_study(std::shared_ptr<const PolyMesh> mesh, const std::vector<int>& degrees,
                                      const StudySettings& settings);

/// Cartesian Test case 1 meshes 8 x 4, 16 x 8, ... (levels of them).
std::vector<std::shared_ptr<const PolyMesh>> testcase1_mesh_sequence(Index levels, Index nx0 = 8, Index ny0 = 4);

// ---------------------------------------------------------------- output

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report);
void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergySample>& series);
void write_probe_csv(const std::filesystem::path& path, const std::vector<ProbeSample>& series);
/// Raster samples (x, y, region, p_h, |u_h|, |w_h|, phi_h); points outside the mesh are skipped.
void write_snapshot_csv(const std::filesystem::path& path, const DgSpace& space, const MaterialField& materials,
                        const SimState& state, Index nx, Index ny);

}  // namespace polydg
