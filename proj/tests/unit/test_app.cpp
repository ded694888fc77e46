#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "polydg/app.hpp"

using namespace polydg;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("polydg_app_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("config keys") {
  RunConfig c;
  set_config_value(c, "run.case", "custom");
  set_config_value(c, "time.dt", " 2.5e-4 ");
  set_config_value(c, "time.scheme", "leapfrog");
  set_config_value(c, "physics.tau", "0.5");
  set_config_value(c, "poro.permeability", "1e-12");
  set_config_value(c, "acoustic.c", "1500");
  set_config_value(c, "source.centers", "0.1 0.2; 0.3,0.4");
  set_config_value(c, "output.snapshots", "0.1, 0.2");
  set_config_value(c, "penalty.one_sided", "literal");
  CHECK(c.case_id == 0);
  CHECK(c.dt == 2.5e-4);
  CHECK(c.scheme == Scheme::leapfrog);
  CHECK(*c.tau == 0.5);
  CHECK(c.poro_overrides.at("permeability") == 1e-12);
  CHECK(c.acoustic_overrides.at("c") == 1500.0);
  REQUIRE(c.source_centers.size() == 2);
  CHECK(c.source_centers[1].y() == 0.4);
  CHECK(c.snapshots->size() == 2);
  CHECK_FALSE(c.penalties.scale_one_sided);

  set_config_value(c, "mesh.nx", "10");
  set_config_value(c, "mesh.file", "m.txt");
  CHECK(c.nx == 0);
  set_config_value(c, "mesh.ny", "5");
  CHECK_FALSE(c.mesh.has_value());

  CHECK_THROWS_AS(set_config_value(c, "time.dt", "fast"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "time.dt", "1e-3x"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "mesh.nx", "-3"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "poro.colour", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "nosection", "1"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "run.case", "4"), ConfigError);
  CHECK_THROWS_AS(set_config_value(c, "source.centers", "1 2 3"), ConfigError);
}

TEST_CASE("INI files") {
  const auto dir = scratch("ini");
  {
    std::ofstream out(dir / "run.ini");
    out << "; comment\n[run]\ncase = 2\n[mesh]\nfile = sub/m.txt\n[time]\nT = 0.1\n[physics]\ntau = 0\n";
  }
  const RunConfig c = load_config(dir / "run.ini");
  CHECK(c.case_id == 2);
  CHECK(c.final_time == 0.1);
  CHECK(*c.tau == 0.0);
  CHECK(*c.mesh == dir / "sub/m.txt");

  {
    std::ofstream out(dir / "bad.ini");
    out << "[time]\nstep = 1\n";
  }
  CHECK_THROWS_AS(load_config(dir / "bad.ini"), ConfigError);
  {
    std::ofstream out(dir / "loose.ini");
    out << "dt = 1\n";
  }
  CHECK_THROWS_AS(load_config(dir / "loose.ini"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.ini"), ConfigError);
}

TEST_CASE("validation rejects out-of-range input") {
  auto rejects = [](auto edit) {
    RunConfig c;
    edit(c);
    CHECK_THROWS_AS(validate(c), ConfigError);
  };
  CHECK_NOTHROW(validate(RunConfig{}));
  rejects([](RunConfig& c) { c.tau = 2.0; });
  rejects([](RunConfig& c) { c.tau = -0.1; });
  rejects([](RunConfig& c) { c.eta = -1.0; });
  rejects([](RunConfig& c) { c.dt = -1e-3; });
  rejects([](RunConfig& c) { c.dt = 1e-3, c.final_time = 1e-4; });
  rejects([](RunConfig& c) { c.newmark_gamma = 1.5; });
  rejects([](RunConfig& c) { c.penalties.c2 = 0.0; });
  rejects([](RunConfig& c) { c.degree_p = 11; });
  rejects([](RunConfig& c) { c.nx = 8; });
  rejects([](RunConfig& c) { c.nx = c.ny = 5000; });
  rejects([](RunConfig& c) { c.case_id = 0; });
  rejects([](RunConfig& c) { c.case_id = 2, c.levels = 3; });
  rejects([](RunConfig& c) { c.levels = 2, c.p_study = {1, 2}; });
  rejects([](RunConfig& c) { c.poro_overrides["porosity"] = 1.5; });
  rejects([](RunConfig& c) { c.acoustic_overrides["c"] = 0.0; });
  rejects([](RunConfig& c) { c.energy_stride = 0; });
  rejects([](RunConfig& c) { c.final_time = 0.1, c.snapshots = std::vector<double>{0.2}; });
}

TEST_CASE("case defaults") {
  RunConfig c;
  c.case_id = 2;
  const RunConfig r = resolve(c);
  CHECK(r.degree_p == 4);
  CHECK(r.degree_a == 4);
  CHECK(r.nx == 30);
  CHECK(r.dt > 0.0);
  CHECK(r.final_time > 0.0);
  REQUIRE(r.snapshots);
  for (double t : *r.snapshots) CHECK(t <= r.final_time);
  c.paper = true;
  CHECK(resolve(c).nx == 80);

  RunConfig h;
  h.levels = 3;
  CHECK(resolve(h).nx == 8);
  CHECK(resolve(h).ny == 4);
}

TEST_CASE("run writes artifacts and a manifest") {
  const auto dir = scratch("run");
  RunConfig c;
  c.nx = 4;
  c.ny = 2;
  c.degree_p = 2;
  c.dt = 1e-3;
  c.final_time = 5e-3;
  c.snapshots = std::vector<double>{5e-3};
  c.raster_nx = c.raster_ny = 8;
  c.output = dir;
  std::ostringstream log, err;
  REQUIRE(run(c, log, err) == ExitCode::ok);
  CHECK(err.str().empty());
  const auto m = read_json(dir / "manifest.json");
  CHECK(m["status"] == "ok");
  CHECK(m["steps"] == 5);
  CHECK(m["mesh"]["elements"] == 8);
  CHECK(m["config"]["p"] == 2);
  CHECK(m["errors_at_T"]["energy"].get<double>() > 0.0);
  for (const auto& name : m["artifacts"]) CHECK(std::filesystem::exists(dir / name.get<std::string>()));
  CHECK(m["artifacts"].size() == 3);
}

TEST_CASE("study runs write convergence.csv") {
  const auto dir = scratch("study");
  RunConfig c;
  c.levels = 2;
  c.degree_p = 1;
  c.dt = 1e-3;
  c.final_time = 2e-3;
  c.output = dir;
  std::ostringstream log, err;
  REQUIRE(run(c, log, err) == ExitCode::ok);
  const auto m = read_json(dir / "manifest.json");
  CHECK(m["study"]["rows"].size() == 2);
  CHECK(m["study"]["rates_energy"].size() == 1);
  CHECK(std::filesystem::exists(dir / "convergence.csv"));
}

TEST_CASE("failures map to exit codes and a structured report") {
  std::ostringstream log, err;
  RunConfig c;
  c.tau = 2.0;
  c.output = scratch("fail");
  CHECK(run(c, log, err) == ExitCode::config);
  const auto report = nlohmann::json::parse(err.str());
  CHECK(report["kind"] == "config");
  CHECK(report["exit_code"] == 2);

  RunConfig m;
  m.case_id = 0;
  m.mesh = c.output / "absent.txt";
  m.dt = 1e-3;
  m.final_time = 1e-2;
  m.output = c.output;
  std::ostringstream err2;
  CHECK(run(m, log, err2) == ExitCode::mesh);
  CHECK(read_json(c.output / "manifest.json")["status"] == "error");
}
