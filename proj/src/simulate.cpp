#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "polydg/harness.hpp"

namespace polydg {

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(12);
  return out;
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "newmark") return Scheme::newmark;
  if (name == "leapfrog") return Scheme::leapfrog;
  throw ConfigError("unknown scheme '" + name + "' (expected newmark|leapfrog)");
}

const char* to_string(Scheme scheme) { return scheme == Scheme::newmark ? "newmark" : "leapfrog"; }

Index RunSettings::steps() const {
  if (!(newmark.dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(final_time >= 0.0)) throw ConfigError("final time must be non-negative");
  return static_cast<Index>(std::llround(final_time / newmark.dt));
}

Problem make_problem(std::shared_ptr<const DgSpace> space, MaterialField materials, SourceTerms sources,
                     BoundaryData boundary, const PenaltyConstants& penalties, int quadrature_boost) {
  Problem p;
  p.system = assemble_block_system(*space, materials, penalties, {false, quadrature_boost});
  p.space = std::move(space);
  p.materials = std::move(materials);
  p.sources = std::move(sources);
  p.boundary = std::move(boundary);
  p.initial = {0.0, Vector::Zero(p.system.size()), Vector::Zero(p.system.size())};
  return p;
}

double interface_continuity_probe(const DgSpace& space, const MaterialField& materials, const SimState& state,
                                  int quadrature_boost) {
  const PolyMesh& mesh = space.mesh();
  const PressureField pressure(space, materials, state.X, state.Z);
  double sum = 0.0;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.kind != FaceClass::interface) continue;
    const Index ep = face.owner, ea = face.neighbor;
    const int p = std::max(space.degree(ep), space.degree(ea));
    const QuadratureRule rule = face_quadrature(mesh, f, 2 * p + quadrature_boost);
    for (Index q = 0; q < rule.size(); ++q) {
      const Vec2& x = rule.points[q];
      double value;
      if (materials.tau == 0.0) {
        value = 0.0;
        for (int c = 0; c < 2; ++c) value += space.eval_scalar(ep, state.Z, space.w_index(ep, c), x) * face.normal[c];
      } else {
        value = pressure(ep, x) - pressure(ea, x);
      }
      sum += rule.weights[q] * value * value;
    }
  }
  return std::sqrt(sum);
}

DissipativityVerdict dissipativity_check(const std::vector<EnergySample>& series, double from, double tolerance) {
  DissipativityVerdict v;
  const EnergySample* prev = nullptr;
  for (const auto& s : series) {
    if (s.t < from) continue;
    if (!prev) {
      v.reference = s.parts.total();
    } else {
      v.max_increase = std::max(v.max_increase, s.parts.total() - prev->parts.total());
      ++v.checked;
    }
    prev = &s;
  }
  v.pass = v.checked > 0 && v.max_increase <= tolerance * std::abs(v.reference);
  return v;
}

SimulationResult simulate(const Problem& problem, const RunSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  const DgSpace& space = *problem.space;
  const Index steps = settings.steps();
  if (settings.energy_stride < 1 || settings.probe_stride < 1) throw ConfigError("sampling strides must be >= 1");
  const SecondOrderSystem so = view(problem.system, space);
  const LoadAssembler loads(space, problem.materials, problem.system.penalties, problem.sources, problem.boundary,
                            settings.quadrature_boost);
  const Forcing forcing = [&](double t, Vector& out) { loads.evaluate(t, out); };
  const bool has_interface = space.mesh().count(FaceClass::interface) > 0;

  SimulationResult result;
  SimState state = problem.initial;
  auto sample = [&](Index k) {
    if (k % settings.energy_stride == 0 || k == steps)
      result.energy.push_back({state.t, discrete_energy(so, state, &problem.system.viscous)});
    if (has_interface && (k % settings.probe_stride == 0 || k == steps))
      result.probe.push_back({state.t, interface_continuity_probe(space, problem.materials, state)});
  };

  std::vector<double> pending = settings.snapshots;
  std::sort(pending.begin(), pending.end());
  Index snapshot_id = 0;
  auto snapshot = [&]() {
    while (snapshot_id < pending.size() && pending[snapshot_id] <= state.t + 0.5 * settings.dt()) {
      if (settings.output) {
        const auto path = *settings.output / ("fields_t" + std::to_string(snapshot_id) + ".csv");
        write_snapshot_csv(path, space, problem.materials, state, settings.raster_nx, settings.raster_ny);
        result.snapshots.push_back(path);
      }
      ++snapshot_id;
    }
  };

  std::unique_ptr<NewmarkIntegrator> newmark;
  std::unique_ptr<LeapfrogIntegrator> leapfrog;
  if (settings.scheme == Scheme::newmark) {
    newmark = std::make_unique<NewmarkIntegrator>(so, settings.newmark, settings.solver);
    newmark->initialize(state, forcing);
    result.solver = newmark->solver_name();
  } else {
    leapfrog = std::make_unique<LeapfrogIntegrator>(so, settings.dt(), settings.leapfrog, settings.solver);
    leapfrog->initialize(state, forcing);
    result.solver = leapfrog->solver_name();
  }
  sample(0);
  snapshot();
  if (settings.observer) settings.observer(0, state);
  for (Index k = 1; k <= steps; ++k) {
    if (newmark)
      newmark->step(state, forcing);
    else
      leapfrog->step(state, forcing);
    // Keep t on the grid to avoid drift in the sampling times.
    state.t = static_cast<double>(k) * settings.dt();
    sample(k);
    snapshot();
    if (settings.observer) settings.observer(k, state);
  }
  result.steps = steps;
  result.final = std::move(state);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (settings.output) {
    write_energy_csv(*settings.output / "energy.csv", result.energy);
    write_probe_csv(*settings.output / "probe.csv", result.probe);
  }
  return result;
}

void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergySample>& series) {
  std::ofstream out = open_csv(path);
  out << "t,E,M_part,A_part,B_part\n";
  for (const auto& s : series)
    out << s.t << ',' << s.parts.total() << ',' << s.parts.mass << ',' << s.parts.stiffness << ','
        << s.parts.damping << '\n';
}

void write_probe_csv(const std::filesystem::path& path, const std::vector<ProbeSample>& series) {
  std::ofstream out = open_csv(path);
  out << "t,probe\n";
  for (const auto& s : series) out << s.t << ',' << s.value << '\n';
}

void write_snapshot_csv(const std::filesystem::path& path, const DgSpace& space, const MaterialField& materials,
                        const SimState& state, Index nx, Index ny) {
  if (nx < 1 || ny < 1) throw ConfigError("snapshot raster must be at least 1 x 1");
  const PolyMesh& mesh = space.mesh();
  const PressureField pressure(space, materials, state.X, state.Z);
  const Rectangle box = mesh.extent();
  std::ofstream out = open_csv(path);
  out << "x,y,region,p_h,u_abs,w_abs,phi_h\n";
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) {
      const Vec2 x(box.x0 + (i + 0.5) * (box.x1 - box.x0) / nx, box.y0 + (j + 0.5) * (box.y1 - box.y0) / ny);
      const auto e = mesh.locate(x);
      if (!e) continue;
      const bool ac = mesh.region(*e) == Region::acoustic;
      double u_abs = 0.0, w_abs = 0.0, phi = 0.0;
      if (ac) {
        phi = space.eval_scalar(*e, state.X, space.phi_index(*e), x);
      } else {
        const Vec2 u(space.eval_scalar(*e, state.X, space.u_index(*e, 0), x),
                     space.eval_scalar(*e, state.X, space.u_index(*e, 1), x));
        const Vec2 w(space.eval_scalar(*e, state.X, space.w_index(*e, 0), x),
                     space.eval_scalar(*e, state.X, space.w_index(*e, 1), x));
        u_abs = u.norm();
        w_abs = w.norm();
      }
      out << x.x() << ',' << x.y() << ',' << (ac ? 'a' : 'p') << ',' << pressure(*e, x) << ',' << u_abs << ','
          << w_abs << ',' << phi << '\n';
    }
}

}  // namespace polydg
