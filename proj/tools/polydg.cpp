#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polydg/app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Polytopic DG solver for coupled poro-elasto-acoustic waves"};
  cli.set_version_flag("--version", "polydg 1.0");

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> sets;
  auto record = [&sets](const char* key) {
    return [&sets, key](const std::string& v) { sets.emplace_back(key, v); };
  };
  auto flag = [&sets](const char* key, const char* value) {
    return [&sets, key, value](std::int64_t) { sets.emplace_back(key, value); };
  };

  cli.add_option("--config", config_path, "INI file; command-line options override it")->check(CLI::ExistingFile);
  cli.add_option_function<std::string>("--case", record("run.case"), "1, 2, 3 or custom");
  cli.add_option_function<std::string>("--mesh", record("mesh.file"), "mesh file (required for custom runs)");
  cli.add_option_function<std::string>("--nx", record("mesh.nx"), "Cartesian cells in x");
  cli.add_option_function<std::string>("--ny", record("mesh.ny"), "Cartesian cells in y");
  cli.add_option_function<std::string>("--p", record("space.p"), "polynomial degree on poroelastic elements");
  cli.add_option_function<std::string>("--pa", record("space.pa"), "polynomial degree on acoustic elements");
  cli.add_option_function<std::string>("--dt", record("time.dt"), "time step");
  cli.add_option_function<std::string>("--T", record("time.T"), "final time");
  cli.add_option_function<std::string>("--scheme", record("time.scheme"), "newmark or leapfrog");
  cli.add_option_function<std::string>("--leapfrog", record("time.leapfrog"), "leap-frog variant: paper or centered");
  cli.add_option_function<std::string>("--tau", record("physics.tau"), "interface parameter in [0, 1]");
  cli.add_option_function<std::string>("--eta", record("physics.eta"), "fluid viscosity");
  cli.add_option_function<std::string>(
      "--penalty",
      [&sets](const std::string& v) {
        std::vector<std::string> parts;
        std::string item;
        for (char ch : v + ",") {
          if (ch == ',') {
            parts.push_back(item);
            item.clear();
          } else {
            item += ch;
          }
        }
        if (parts.size() != 3) throw CLI::ValidationError("--penalty", "expected c1,c2,c3");
        sets.emplace_back("penalty.c1", parts[0]);
        sets.emplace_back("penalty.c2", parts[1]);
        sets.emplace_back("penalty.c3", parts[2]);
      },
      "penalty constants c1,c2,c3");
  cli.add_option_function<std::string>("--penalty-one-sided", record("penalty.one_sided"),
                                       "boundary and interface penalties: scaled or literal");
  cli.add_option_function<std::string>("--solver", record("solver.kind"), "direct or iterative");
  cli.add_option_function<std::string>("--out", record("output.dir"), "output directory");
  cli.add_option_function<std::string>("--snapshots", record("output.snapshots"), "comma-separated snapshot times");
  cli.add_option_function<std::string>("--levels", record("run.levels"), "case 1: h-study over this many levels");
  cli.add_option_function<std::string>("--p-study", record("run.p_study"), "case 1: comma-separated degrees");
  cli.add_flag_function("--paper", flag("run.paper", "true"), "full-size meshes, time steps and horizons");
  cli.add_option_function<std::vector<std::string>>(
         "--set",
         [&sets](const std::vector<std::string>& items) {
           for (const auto& item : items) {
             const auto eq = item.find('=');
             if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected section.key=value");
             sets.emplace_back(item.substr(0, eq), item.substr(eq + 1));
           }
         },
         "section.key=value override, repeatable")
      ->take_all();

  // `polydg run ...` and `polydg ...` are the same command.
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args.front() == "run") args.erase(args.begin());
  std::reverse(args.begin(), args.end());
  try {
    cli.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : static_cast<int>(polydg::ExitCode::config);
  }

  polydg::RunConfig config;
  try {
    if (!config_path.empty()) polydg::merge_config(config, config_path);
    for (const auto& [key, value] : sets) polydg::set_config_value(config, key, value);
  } catch (const polydg::ConfigError& e) {
    const nlohmann::ordered_json report = {
        {"status", "error"}, {"kind", "config"}, {"exit_code", 2}, {"message", e.what()}};
    std::cerr << report.dump() << '\n';
    return static_cast<int>(polydg::ExitCode::config);
  }
  return static_cast<int>(polydg::run(config, std::cout, std::cerr));
}
