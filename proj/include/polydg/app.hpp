#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polydg/harness.hpp"

namespace polydg {

/// Everything a run needs. Zero or empty fields take the defaults of the
/// selected case (see resolve()).
struct RunConfig {
  int case_id = 1;  // 1, 2, 3, or 0 for a custom run on a mesh file
  std::optional<std::filesystem::path> mesh;
  Index nx = 0, ny = 0;
  int degree_p = 0, degree_a = 0;
  int quadrature_boost = 0;
  double dt = 0.0, final_time = 0.0;
  Scheme scheme = Scheme::newmark;
  double newmark_beta = 0.25, newmark_gamma = 0.5;
  LeapfrogVariant leapfrog = LeapfrogVariant::centered;
  std::optional<double> tau, eta;
  PenaltyConstants penalties;
  SolverOptions solver;
  std::map<std::string, double> poro_overrides;      // PoroParams field name -> value
  std::map<std::string, double> acoustic_overrides;  // c, rho_a
  std::vector<Vec2> source_centers;                  // custom runs only
  double source_radius = 0.0, source_f0 = 20.0, source_value = 1.0;
  std::filesystem::path output = "out";
  std::optional<std::vector<double>> snapshots;
  Index raster_nx = 100, raster_ny = 100;
  int energy_stride = 1, probe_stride = 10;
  Index levels = 0;             // case 1: h-study over this many Cartesian levels
  std::vector<int> p_study;     // case 1: p-study degrees on the mesh
  bool paper = false;           // full-fidelity time step, horizon and mesh size
};

/// Sets one `section.key` entry from text. Throws ConfigError for unknown keys
/// and malformed values. Recognized sections: run, mesh, space, time,
/// physics, penalty, solver, output, poro, acoustic, source.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Reads an INI file (`[section]` headers, `key = value`, `;` or `#` comments).
RunConfig load_config(const std::filesystem::path& path);
/// Applies the INI entries of `path` on top of `config`. A relative mesh.file
/// is taken relative to the INI file; output.dir stays relative to the working directory.
void merge_config(RunConfig& config, const std::filesystem::path& path);

/// Range checks on every field; runs before any allocation. Throws ConfigError.
void validate(const RunConfig& config);

/// The config with case defaults filled in.
RunConfig resolve(const RunConfig& config);

enum class ExitCode : int { ok = 0, failure = 1, config = 2, mesh = 3, solver = 4, model = 5 };

/// Executes the run, writes CSV artifacts and manifest.json into
/// config.output and logs progress to `log`. On failure, writes a structured
/// error report to `err` (and to manifest.json when possible).
ExitCode run(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace polydg
