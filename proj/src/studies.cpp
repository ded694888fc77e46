#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "polydg/harness.hpp"

namespace polydg {

StudySettings paper_study_settings() {
  StudySettings s;
  s.dt = 1e-4;
  s.final_time = 0.25;
  return s;
}

double ConvergenceRow::value(NormKind kind, TimeNorm when) const {
  return when == TimeNorm::final ? errors.value(kind) : sup[static_cast<Index>(kind)];
}

std::vector<double> ConvergenceReport::rates(NormKind kind, TimeNorm when) const {
  std::vector<double> r;
  for (Index i = 0; i + 1 < rows.size(); ++i)
    r.push_back(std::log(rows[i].value(kind, when) / rows[i + 1].value(kind, when)) /
                std::log(rows[i].h / rows[i + 1].h));
  return r;
}

double ConvergenceReport::last_rate(NormKind kind, TimeNorm when) const {
  const auto r = rates(kind, when);
  if (r.empty()) throw Error("a rate needs at least two rows");
  return r.back();
}

SemilogFit semilog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("semilog fit needs two or more points");
  const Index n = x.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> ly(n);
  for (Index i = 0; i < n; ++i) {
    if (!(y[i] > 0.0)) throw Error("semilog fit needs positive values");
    ly[i] = std::log(y[i]);
    mx += x[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Index i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (ly[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  SemilogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

namespace {

auto at(const auto& f, double t) {
  return [&f, t](const Vec2& x) { return f(x, t); };
}

}  // namespace

Problem manufactured_problem(std::shared_ptr<const DgSpace> space, MaterialField materials,
                             const ManufacturedSolution& exact, const PenaltyConstants& penalties,
                             int quadrature_boost) {
  Problem problem =
      make_problem(space, std::move(materials), exact.sources, exact.boundary, penalties, quadrature_boost);
  problem.initial = project_initial_conditions(*space, at(exact.u, 0.0), at(exact.w, 0.0), at(exact.phi, 0.0),
                                               at(exact.u_t, 0.0), at(exact.w_t, 0.0), at(exact.phi_t, 0.0));
  return problem;
}

ConvergenceRow run_manufactured(std::shared_ptr<const PolyMesh> mesh, int degree, const StudySettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  auto space = std::make_shared<const DgSpace>(build_space(mesh, degree, degree));
  const ManufacturedSolution ms = testcase1_solution(derived_coefficients(settings.poro), settings.acoustic);
  Problem problem = manufactured_problem(
      space, MaterialField::uniform(*mesh, settings.poro, settings.acoustic, settings.tau), ms, settings.penalties);

  RunSettings run;
  run.scheme = settings.scheme;
  run.newmark = settings.newmark;
  run.newmark.dt = settings.dt;
  run.leapfrog = settings.leapfrog;
  run.final_time = settings.final_time;
  run.solver = settings.solver;
  run.energy_stride = std::numeric_limits<int>::max();
  run.probe_stride = std::numeric_limits<int>::max();
  if (settings.sup_stride < 1) throw ConfigError("sup_stride must be >= 1");
  ConvergenceRow row;
  const Index steps = run.steps();
  run.observer = [&](Index k, const SimState& state) {
    if (k % settings.sup_stride != 0 && k != steps) return;
    const ErrorReport e = compute_errors(*space, problem.materials, problem.system.penalties, state, &ms,
                                         settings.quadrature_boost);
    for (Index i = 0; i < row.sup.size(); ++i) row.sup[i] = std::max(row.sup[i], e.value(static_cast<NormKind>(i)));
  };
  const SimulationResult result = simulate(problem, run);

  row.h = mesh->max_diameter();
  row.degree = degree;
  row.elements = mesh->num_elements();
  row.dofs = space->size();
  row.errors = compute_errors(*space, problem.materials, problem.system.penalties, result.final, &ms,
                              settings.quadrature_boost);
  const double t = result.final.t;
  SimState projected{t, project_fields(*space, at(ms.u, t), at(ms.w, t), at(ms.phi, t)), Vector::Zero(space->size())};
  row.projection_l2 =
      compute_errors(*space, problem.materials, problem.system.penalties, projected, &ms, settings.quadrature_boost)
          .l2_field();
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

namespace {

void check_monotone(ConvergenceReport& report, NormKind kind) {
  for (Index i = 0; i + 1 < report.rows.size(); ++i)
    if (!(report.rows[i + 1].errors.value(kind) < report.rows[i].errors.value(kind))) report.monotone = false;
  if (!report.monotone) std::cerr << "warning: non-monotone " << to_string(kind) << " error sequence\n";
}

}  // namespace

ConvergenceReport h_convergence_study(const std::vector<std::shared_ptr<const PolyMesh>>& meshes, int degree,
                                      const StudySettings& settings) {
  ConvergenceReport report;
  for (const auto& mesh : meshes) report.rows.push_back(run_manufactured(mesh, degree, settings));
  check_monotone(report, NormKind::energy_E);
  return report;
}

ConvergenceReport p_convergence_study(std::shared_ptr<const PolyMesh> mesh, const std::vector<int>& degrees,
                                      const StudySettings& settings) {
  ConvergenceReport report;
  for (int p : degrees) report.rows.push_back(run_manufactured(mesh, p, settings));
  check_monotone(report, NormKind::L2_field);
  return report;
}

std::vector<std::shared_ptr<const PolyMesh>> testcase1_mesh_sequence(Index levels, Index nx0, Index ny0) {
  const CaseSetup setup = testcase_geometry(1);
  std::vector<std::shared_ptr<const PolyMesh>> meshes;
  for (Index l = 0; l < levels; ++l)
    meshes.push_back(std::make_shared<const PolyMesh>(
        build_cartesian_mesh(setup.domain, nx0 << l, ny0 << l, setup.region)));
  return meshes;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(12);
  out << "h,p,elements,dofs,err_energy,err_L2,err_pressure,err_dG_e,err_dG_p,err_dG_a,proj_L2,"
         "sup_energy,sup_pressure,rate_energy,rate_L2,rate_pressure,rate_sup_energy,rate_sup_pressure,seconds\n";
  const auto re = report.rates(NormKind::energy_E), rl = report.rates(NormKind::L2_field),
             rp = report.rates(NormKind::L2_pressure),
             rse = report.rates(NormKind::energy_E, TimeNorm::sup),
             rsp = report.rates(NormKind::L2_pressure, TimeNorm::sup);
  for (Index i = 0; i < report.rows.size(); ++i) {
    const ConvergenceRow& r = report.rows[i];
    auto rate = [&](const std::vector<double>& v) -> std::string {
      if (i == 0 || !std::isfinite(v[i - 1])) return "";
      std::ostringstream s;
      s << std::setprecision(6) << v[i - 1];
      return s.str();
    };
    out << r.h << ',' << r.degree << ',' << r.elements << ',' << r.dofs << ',' << r.errors.energy() << ','
        << r.errors.l2_field() << ',' << r.errors.pressure() << ',' << std::sqrt(r.errors.elastic) << ','
        << std::sqrt(r.errors.poro) << ',' << std::sqrt(r.errors.acoustic) << ',' << r.projection_l2 << ','
        << r.value(NormKind::energy_E, TimeNorm::sup) << ',' << r.value(NormKind::L2_pressure, TimeNorm::sup)
        << ',' << rate(re) << ',' << rate(rl) << ',' << rate(rp) << ',' << rate(rse) << ',' << rate(rsp) << ','
        << std::setprecision(4) << r.seconds
        << std::setprecision(12) << '\n';
  }
}

}  // namespace polydg
