#include "polydg/app.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "polydg/kernels.hpp"
#include "polydg/parallel.hpp"

namespace polydg {

namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError("config " + std::string(key) + ": expected " + expected + ", got '" + std::string(value) + "'");
}

double to_double(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) bad_value(key, text, "a number");
  return v;
}

long to_int(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) bad_value(key, text, "an integer");
  return v;
}

Index to_count(std::string_view key, std::string_view text) {
  const long v = to_int(key, text);
  if (v < 0) bad_value(key, text, "a non-negative integer");
  return static_cast<Index>(v);
}

bool to_bool(std::string_view key, std::string_view text) {
  const auto s = trim(text);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad_value(key, text, "a boolean");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    const auto part = trim(text.substr(0, pos));
    if (!part.empty()) parts.push_back(part);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

std::vector<double> to_doubles(std::string_view key, std::string_view text) {
  std::vector<double> v;
  for (auto part : split(text, ',')) v.push_back(to_double(key, part));
  return v;
}

// "x1 y1; x2 y2" or "x1,y1; x2,y2"
std::vector<Vec2> to_points(std::string_view key, std::string_view text) {
  std::vector<Vec2> pts;
  for (auto item : split(text, ';')) {
    std::string s(item);
    for (char& c : s)
      if (c == ',') c = ' ';
    const auto coords = split(s, ' ');
    if (coords.size() != 2) bad_value(key, text, "points 'x y; x y'");
    pts.emplace_back(to_double(key, coords[0]), to_double(key, coords[1]));
  }
  return pts;
}

const std::vector<std::string>& poro_fields() {
  static const std::vector<std::string> names{"rho_s", "rho_f", "porosity", "tortuosity", "permeability",
                                              "lambda", "mu", "beta", "m"};
  return names;
}

double& poro_field(PoroParams& p, const std::string& name) {
  if (name == "rho_s") return p.rho_s;
  if (name == "rho_f") return p.rho_f;
  if (name == "porosity") return p.porosity;
  if (name == "tortuosity") return p.tortuosity;
  if (name == "permeability") return p.permeability;
  if (name == "lambda") return p.lambda;
  if (name == "mu") return p.mu;
  if (name == "beta") return p.beta;
  if (name == "m") return p.m;
  throw ConfigError("unknown poroelastic parameter " + name);
}

double& acoustic_field(AcousticParams& a, const std::string& name) {
  if (name == "c") return a.c;
  if (name == "rho_a") return a.rho_a;
  throw ConfigError("unknown acoustic parameter " + name);
}

struct Media {
  PoroParams poro;
  AcousticParams acoustic;
  double tau = 1.0;
};

Media media(const RunConfig& c) {
  const CaseSetup setup = testcase_geometry(c.case_id == 0 ? 2 : c.case_id);
  Media m{setup.poro, setup.acoustic, c.tau.value_or(setup.tau)};
  if (c.eta) m.poro.eta = *c.eta;
  for (const auto& [k, v] : c.poro_overrides) poro_field(m.poro, k) = v;
  for (const auto& [k, v] : c.acoustic_overrides) acoustic_field(m.acoustic, k) = v;
  return m;
}

Json mesh_json(const PolyMesh& mesh, const std::vector<int>& degrees) {
  const auto bv = bounded_variation_check(mesh, degrees);
  const Rectangle box = mesh.extent();
  return {{"elements", mesh.num_elements()},
          {"faces", mesh.num_faces()},
          {"vertices", mesh.num_vertices()},
          {"poroelastic_elements", mesh.count(Region::poroelastic)},
          {"acoustic_elements", mesh.count(Region::acoustic)},
          {"interface_faces", mesh.count(FaceClass::interface)},
          {"extent", {box.x0, box.x1, box.y0, box.y1}},
          {"h_max", mesh.max_diameter()},
          {"regularity_constant", regularity_constant(mesh)},
          {"max_neighbor_h_ratio", bv.max_h_ratio},
          {"bounded_variation_warning", bv.warning}};
}

Json errors_json(const ErrorReport& e) {
  return {{"energy", e.energy()},        {"L2", e.l2_field()},
          {"pressure", e.pressure()},    {"dG_e", std::sqrt(e.elastic)},
          {"dG_p", std::sqrt(e.poro)},   {"dG_a", std::sqrt(e.acoustic)}};
}

Json config_json(const RunConfig& c) {
  Json poro = Json::object(), acoustic = Json::object();
  Media m = media(c);
  for (const auto& name : poro_fields()) poro[name] = poro_field(m.poro, name);
  poro["eta"] = m.poro.eta;
  acoustic["c"] = m.acoustic.c;
  acoustic["rho_a"] = m.acoustic.rho_a;
  Json j = {{"case", c.case_id == 0 ? Json("custom") : Json(c.case_id)},
            {"mesh", c.mesh ? Json(c.mesh->string()) : Json(std::to_string(c.nx) + "x" + std::to_string(c.ny))},
            {"p", c.degree_p},
            {"pa", c.degree_a},
            {"quadrature_boost", c.quadrature_boost},
            {"dt", c.dt},
            {"T", c.final_time},
            {"scheme", to_string(c.scheme)},
            {"newmark_beta", c.newmark_beta},
            {"newmark_gamma", c.newmark_gamma},
            {"leapfrog", to_string(c.leapfrog)},
            {"tau", m.tau},
            {"penalty", {c.penalties.c1, c.penalties.c2, c.penalties.c3}},
            {"penalty_one_sided", c.penalties.scale_one_sided ? "scaled" : "literal"},
            {"solver", to_string(c.solver.kind)},
            {"poro", poro},
            {"acoustic", acoustic},
            {"snapshots", c.snapshots.value_or(std::vector<double>{})},
            {"levels", c.levels},
            {"p_study", c.p_study},
            {"paper", c.paper}};
  if (!c.source_centers.empty()) {
    Json centers = Json::array();
    for (const Vec2& x : c.source_centers) centers.push_back({x.x(), x.y()});
    j["source"] = {{"centers", centers}, {"radius", c.source_radius}, {"f0", c.source_f0}, {"value", c.source_value}};
  }
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

StudySettings study_settings(const RunConfig& c) {
  StudySettings s;
  const Media m = media(c);
  s.dt = c.dt;
  s.final_time = c.final_time;
  s.tau = m.tau;
  s.poro = m.poro;
  s.acoustic = m.acoustic;
  s.scheme = c.scheme;
  s.leapfrog = c.leapfrog;
  s.newmark = {c.newmark_beta, c.newmark_gamma, c.dt};
  s.penalties = c.penalties;
  s.solver = c.solver;
  return s;
}

Json report_json(const ConvergenceReport& report) {
  Json rows = Json::array();
  for (const ConvergenceRow& r : report.rows)
    rows.push_back({{"h", r.h}, {"p", r.degree}, {"dofs", r.dofs}, {"errors", errors_json(r.errors)},
                    {"sup_pressure", r.value(NormKind::L2_pressure, TimeNorm::sup)}, {"seconds", r.seconds}});
  Json j = {{"rows", rows}, {"monotone", report.monotone}};
  if (report.rows.size() > 1) {
    j["rates_energy"] = report.rates(NormKind::energy_E);
    j["rates_L2"] = report.rates(NormKind::L2_field);
    j["rates_pressure"] = report.rates(NormKind::L2_pressure);
    j["rates_sup_pressure"] = report.rates(NormKind::L2_pressure, TimeNorm::sup);
  }
  return j;
}

std::shared_ptr<const PolyMesh> build_mesh(const RunConfig& c) {
  if (c.mesh) return std::make_shared<const PolyMesh>(load_mesh(*c.mesh));
  const CaseSetup setup = testcase_geometry(c.case_id);
  return std::make_shared<const PolyMesh>(build_cartesian_mesh(setup.domain, c.nx, c.ny, setup.region));
}

const char* error_kind(ExitCode code) {
  switch (code) {
    case ExitCode::config: return "config";
    case ExitCode::mesh: return "mesh";
    case ExitCode::solver: return "solver";
    case ExitCode::model: return "model";
    default: return "runtime";
  }
}

}  // namespace

void set_config_value(RunConfig& c, std::string_view key_view, std::string_view value) {
  const std::string key(trim(key_view));
  const auto dot = key.find('.');
  if (dot == std::string::npos) throw ConfigError("config key '" + key + "' needs a section (section.key)");
  const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
  const std::string text(trim(value));

  if (section == "run") {
    if (name == "case") {
      c.case_id = text == "custom" ? 0 : static_cast<int>(to_int(key, text));
      if (c.case_id < 0 || c.case_id > 3) bad_value(key, text, "1, 2, 3 or custom");
    } else if (name == "levels") {
      c.levels = to_count(key, text);
    } else if (name == "p_study") {
      c.p_study.clear();
      for (double d : to_doubles(key, text)) {
        if (d != std::floor(d)) bad_value(key, text, "integer degrees");
        c.p_study.push_back(static_cast<int>(d));
      }
    } else if (name == "paper") {
      c.paper = to_bool(key, text);
    } else {
      throw ConfigError("unknown config key " + key);
    }
  } else if (section == "mesh") {
    if (name == "file") {
      c.mesh = text;
      c.nx = c.ny = 0;
    } else if (name == "nx" || name == "ny") {
      (name == "nx" ? c.nx : c.ny) = to_count(key, text);
      c.mesh.reset();
    } else {
      throw ConfigError("unknown config key " + key);
    }
  } else if (section == "space") {
    if (name == "p") c.degree_p = static_cast<int>(to_int(key, text));
    else if (name == "pa") c.degree_a = static_cast<int>(to_int(key, text));
    else if (name == "quadrature_boost") c.quadrature_boost = static_cast<int>(to_int(key, text));
    else throw ConfigError("unknown config key " + key);
  } else if (section == "time") {
    if (name == "dt") c.dt = to_double(key, text);
    else if (name == "T") c.final_time = to_double(key, text);
    else if (name == "scheme") c.scheme = parse_scheme(text);
    else if (name == "newmark_beta") c.newmark_beta = to_double(key, text);
    else if (name == "newmark_gamma") c.newmark_gamma = to_double(key, text);
    else if (name == "leapfrog" || name == "leapfrog_variant") c.leapfrog = parse_leapfrog_variant(text);
    else throw ConfigError("unknown config key " + key);
  } else if (section == "physics") {
    if (name == "tau") c.tau = to_double(key, text);
    else if (name == "eta") c.eta = to_double(key, text);
    else throw ConfigError("unknown config key " + key);
  } else if (section == "penalty") {
    if (name == "c1") c.penalties.c1 = to_double(key, text);
    else if (name == "c2") c.penalties.c2 = to_double(key, text);
    else if (name == "c3") c.penalties.c3 = to_double(key, text);
    else if (name == "one_sided") {
      if (text == "scaled") c.penalties.scale_one_sided = true;
      else if (text == "literal") c.penalties.scale_one_sided = false;
      else bad_value(key, text, "scaled or literal");
    } else {
      throw ConfigError("unknown config key " + key);
    }
  } else if (section == "solver") {
    if (name == "kind") c.solver.kind = parse_solver_kind(text);
    else if (name == "tolerance") c.solver.tolerance = to_double(key, text);
    else if (name == "max_iterations") c.solver.max_iterations = static_cast<int>(to_int(key, text));
    else throw ConfigError("unknown config key " + key);
  } else if (section == "output") {
    if (name == "dir") c.output = text;
    else if (name == "snapshots") c.snapshots = to_doubles(key, text);
    else if (name == "raster_nx") c.raster_nx = to_count(key, text);
    else if (name == "raster_ny") c.raster_ny = to_count(key, text);
    else if (name == "energy_stride") c.energy_stride = static_cast<int>(to_int(key, text));
    else if (name == "probe_stride") c.probe_stride = static_cast<int>(to_int(key, text));
    else throw ConfigError("unknown config key " + key);
  } else if (section == "poro") {
    PoroParams probe;
    if (name == "eta") c.eta = to_double(key, text);
    else {
      poro_field(probe, name);
      c.poro_overrides[name] = to_double(key, text);
    }
  } else if (section == "acoustic") {
    AcousticParams probe;
    acoustic_field(probe, name);
    c.acoustic_overrides[name] = to_double(key, text);
  } else if (section == "source") {
    if (name == "centers") c.source_centers = to_points(key, text);
    else if (name == "radius") c.source_radius = to_double(key, text);
    else if (name == "f0") c.source_f0 = to_double(key, text);
    else if (name == "value") c.source_value = to_double(key, text);
    else throw ConfigError("unknown config key " + key);
  } else {
    throw ConfigError("unknown config section '" + section + "'");
  }
}

void merge_config(RunConfig& config, const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) throw ConfigError("config entry '" + section + "' must sit inside a [section]");
    for (const auto& [key, node] : entries) {
      set_config_value(config, section + "." + key, node.data());
      if (section == "mesh" && key == "file" && config.mesh->is_relative())
        config.mesh = path.parent_path() / *config.mesh;
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  RunConfig c;
  merge_config(c, path);
  return c;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.case_id >= 0 && c.case_id <= 3, "case must be 1, 2, 3 or custom");
  require(c.case_id != 0 || c.mesh.has_value(), "a custom run needs a mesh file");
  require(c.case_id != 0 || (c.dt > 0.0 && c.final_time > 0.0), "a custom run needs dt and T");
  require(!c.mesh || (c.nx == 0 && c.ny == 0), "give either a mesh file or nx/ny, not both");
  require((c.nx == 0) == (c.ny == 0), "nx and ny go together");
  require(c.nx <= 4096 && c.ny <= 4096, "nx and ny must be at most 4096");
  require(c.degree_p >= 0 && c.degree_p <= 10, "p must lie in 1..10");
  require(c.degree_a >= 0 && c.degree_a <= 10, "pa must lie in 1..10");
  require(c.quadrature_boost >= 0 && c.quadrature_boost <= 20, "quadrature boost must lie in 0..20");
  require(c.dt >= 0.0 && c.final_time >= 0.0, "dt and T must be positive");
  if (c.dt > 0.0 && c.final_time > 0.0) {
    require(c.final_time >= c.dt, "T must be at least dt");
    require(c.final_time / c.dt <= 1e7, "more than 1e7 time steps");
  }
  NewmarkParams{c.newmark_beta, c.newmark_gamma, c.dt > 0.0 ? c.dt : 1.0}.validate();
  if (c.tau) require(*c.tau >= 0.0 && *c.tau <= 1.0, "tau must lie in [0, 1]");
  if (c.eta) require(*c.eta >= 0.0, "eta must be non-negative");
  const auto& pc = c.penalties;
  require(pc.c1 > 0.0 && pc.c2 > 0.0 && pc.c3 > 0.0, "penalty constants must be positive");
  require(c.solver.tolerance > 0.0 && c.solver.tolerance < 1.0, "solver tolerance must lie in (0, 1)");
  require(c.solver.max_iterations >= 1, "solver max_iterations must be positive");
  require(c.raster_nx >= 1 && c.raster_ny >= 1 && c.raster_nx <= 4096 && c.raster_ny <= 4096,
          "raster size must lie in 1..4096");
  require(c.energy_stride >= 1 && c.probe_stride >= 1, "sampling strides must be positive");
  require(c.levels <= 8, "levels must be at most 8");
  require(c.levels == 0 || c.case_id == 1, "refinement studies run on case 1");
  require(c.levels == 0 || !c.mesh, "refinement studies use the Cartesian sequence, not a mesh file");
  require(c.p_study.empty() || c.case_id == 1, "p-studies run on case 1");
  require(c.p_study.empty() || c.levels == 0, "choose either levels or p_study");
  for (int p : c.p_study) require(p >= 1 && p <= 10, "p_study degrees must lie in 1..10");
  if (c.snapshots) {
    for (double t : *c.snapshots) {
      require(t >= 0.0, "snapshot times must be non-negative");
      if (c.final_time > 0.0) require(t <= c.final_time, "snapshot times must not exceed T");
    }
  }
  require(c.source_centers.empty() || c.case_id == 0, "source centers apply to custom runs");
  require(c.source_centers.empty() || c.source_radius > 0.0, "source radius must be positive");
  require(c.source_f0 > 0.0, "source f0 must be positive");
  // Media: the same checks the model applies, without allocating anything.
  try {
    const Media m = media(c);
    derived_coefficients(m.poro);
    polydg::validate(m.acoustic);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }
}

RunConfig resolve(const RunConfig& config) {
  RunConfig c = config;
  const CaseSetup setup = testcase_geometry(c.case_id == 0 ? 2 : c.case_id);
  if (c.degree_p == 0) c.degree_p = c.case_id == 0 ? 3 : setup.degree;
  if (c.degree_a == 0) c.degree_a = c.degree_p;
  if (!c.tau) c.tau = setup.tau;
  switch (c.case_id) {
    case 1:
      if (c.dt == 0.0) c.dt = c.paper ? 1e-4 : 1e-3;
      if (c.final_time == 0.0) c.final_time = c.paper ? 0.25 : 0.05;
      if (!c.mesh && c.nx == 0) {
        c.nx = c.levels > 0 ? 8 : 16;
        c.ny = c.nx / 2;
      }
      break;
    case 2:
    case 3:
      if (c.dt == 0.0) c.dt = setup.dt;
      if (c.final_time == 0.0) c.final_time = setup.final_time;
      if (!c.mesh && c.nx == 0) c.nx = c.ny = c.case_id == 2 ? (c.paper ? 80 : 30) : (c.paper ? 120 : 40);
      if (!c.snapshots) {
        std::vector<double> s;
        for (double t : setup.snapshots)
          if (t <= c.final_time + 0.5 * c.dt) s.push_back(t);
        c.snapshots = s;
      }
      break;
    default:
      break;
  }
  return c;
}

ExitCode run(const RunConfig& input, std::ostream& log, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<std::filesystem::path> out_dir;
  Json manifest;
  try {
    validate(input);
    const RunConfig c = resolve(input);
    validate(c);
    std::filesystem::create_directories(c.output);
    out_dir = c.output;
    manifest["status"] = "running";
    manifest["config"] = config_json(c);
    manifest["kernels"] = kernels::to_string(kernels::active_isa());
    manifest["threads"] = thread_count();
    manifest["direct_backend"] = direct_backend_is_umfpack() ? "UMFPACK" : "Eigen SparseLU";
    std::vector<std::string> artifacts;
    const Media m = media(c);

    if (c.case_id == 1 && (c.levels > 0 || !c.p_study.empty())) {
      const StudySettings settings = study_settings(c);
      ConvergenceReport report;
      if (c.levels > 0) {
        log << "h-study: " << c.levels << " levels from " << c.nx << "x" << c.ny << ", p = " << c.degree_p << '\n';
        const auto meshes = testcase1_mesh_sequence(c.levels, c.nx, c.ny);
        report = h_convergence_study(meshes, c.degree_p, settings);
        manifest["mesh"] = mesh_json(*meshes.back(), std::vector<int>(meshes.back()->num_elements(), c.degree_p));
      } else {
        const auto mesh = build_mesh(c);
        log << "p-study on " << mesh->num_elements() << " elements\n";
        report = p_convergence_study(mesh, c.p_study, settings);
        manifest["mesh"] = mesh_json(*mesh, std::vector<int>(mesh->num_elements(), c.p_study.back()));
      }
      for (const ConvergenceRow& r : report.rows)
        log << "  h " << r.h << "  p " << r.degree << "  dofs " << r.dofs << "  energy " << r.errors.energy()
            << "  L2 " << r.errors.l2_field() << "  pressure " << r.errors.pressure() << "  (" << r.seconds
            << " s)\n";
      write_convergence_csv(c.output / "convergence.csv", report);
      artifacts.push_back("convergence.csv");
      manifest["study"] = report_json(report);
      manifest["dofs"] = report.rows.back().dofs;
    } else {
      const auto mesh = build_mesh(c);
      auto space = std::make_shared<const DgSpace>(build_space(mesh, c.degree_p, c.degree_a));
      MaterialField mats = MaterialField::uniform(*mesh, m.poro, m.acoustic, m.tau);
      manifest["mesh"] = mesh_json(*mesh, space->degrees());
      manifest["dofs"] = space->size();
      log << "case " << (c.case_id == 0 ? std::string("custom") : std::to_string(c.case_id)) << ": "
          << mesh->num_elements() << " elements, " << space->size() << " dofs, dt " << c.dt << ", T " << c.final_time
          << '\n';

      std::optional<ManufacturedSolution> exact;
      Problem problem;
      if (c.case_id == 1) {
        exact = testcase1_solution(mats.poro.front(), m.acoustic);
        problem = manufactured_problem(space, std::move(mats), *exact, c.penalties, c.quadrature_boost);
      } else {
        SourceTerms sources;
        if (c.case_id == 0) {
          CaseSetup custom;
          custom.source_centers = c.source_centers;
          custom.source_radius = c.source_radius;
          custom.source_value = c.source_value;
          custom.f0 = c.source_f0;
          sources = ricker_sources(custom);
        } else {
          sources = ricker_sources(testcase_geometry(c.case_id));
        }
        problem = make_problem(space, std::move(mats), std::move(sources), {}, c.penalties, c.quadrature_boost);
      }

      RunSettings run;
      run.scheme = c.scheme;
      run.newmark = {c.newmark_beta, c.newmark_gamma, c.dt};
      run.leapfrog = c.leapfrog;
      run.final_time = c.final_time;
      run.solver = c.solver;
      run.energy_stride = c.energy_stride;
      run.probe_stride = c.probe_stride;
      run.snapshots = c.snapshots.value_or(std::vector<double>{});
      run.raster_nx = c.raster_nx;
      run.raster_ny = c.raster_ny;
      run.quadrature_boost = c.quadrature_boost;
      run.output = c.output;
      const SimulationResult result = simulate(problem, run);

      artifacts.push_back("energy.csv");
      artifacts.push_back("probe.csv");
      for (const auto& p : result.snapshots) artifacts.push_back(p.filename().string());
      manifest["steps"] = result.steps;
      manifest["solver"] = result.solver;
      manifest["time_loop_seconds"] = result.wall_seconds;
      const EnergyParts& last = result.energy.back().parts;
      manifest["final_energy"] = {{"E", last.total()}, {"M_part", last.mass}, {"A_part", last.stiffness},
                                  {"B_part", last.damping}};
      if (!problem.sources.empty() && std::isfinite(problem.sources.cutoff)) {
        const DissipativityVerdict v = dissipativity_check(result.energy, problem.sources.cutoff);
        manifest["dissipativity"] = {{"from", problem.sources.cutoff},
                                     {"checked", v.checked},
                                     {"pass", v.checked > 0 ? Json(v.pass) : Json(nullptr)},
                                     {"max_increase", v.max_increase},
                                     {"reference", v.reference}};
      }
      if (exact) {
        const ErrorReport e = compute_errors(*space, problem.materials, problem.system.penalties, result.final,
                                             &*exact, 4);
        manifest["errors_at_T"] = errors_json(e);
        log << "errors at T: energy " << e.energy() << ", L2 " << e.l2_field() << ", pressure " << e.pressure() << '\n';
      }
      log << "energy at T: " << last.total() << " (" << result.steps << " steps, " << result.wall_seconds << " s)\n";
    }
    manifest["artifacts"] = artifacts;
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["status"] = "ok";
    write_json(c.output / "manifest.json", manifest);
    log << "wrote " << (c.output / "manifest.json").string() << '\n';
    return ExitCode::ok;
  } catch (const std::exception& e) {
    ExitCode code = ExitCode::failure;
    if (dynamic_cast<const ConfigError*>(&e)) code = ExitCode::config;
    else if (dynamic_cast<const MeshError*>(&e)) code = ExitCode::mesh;
    else if (dynamic_cast<const SolverError*>(&e)) code = ExitCode::solver;
    else if (dynamic_cast<const ModelError*>(&e)) code = ExitCode::model;
    const Json report = {{"status", "error"},
                         {"kind", error_kind(code)},
                         {"exit_code", static_cast<int>(code)},
                         {"message", e.what()}};
    err << report.dump() << '\n';
    if (out_dir) {
      manifest["status"] = "error";
      manifest["error"] = report;
      try {
        write_json(*out_dir / "manifest.json", manifest);
      } catch (const std::exception&) {
      }
    }
    return code;
  }
}

}  // namespace polydg
