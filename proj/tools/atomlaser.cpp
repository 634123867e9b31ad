// Copyright 2026 The atomlaser Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// atomlaser run <config>       run a scenario and write its CSV files
// atomlaser check <config>     rerun with dt/2 and n*2 and report column changes
// atomlaser print-defaults     print the resolved defaults of every scenario
//
// Exit status: 0 success, 1 configuration error, 2 numerical failure.
// ATOMLASER_WORKERS overrides the number of propagation threads.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atomlaser/config.hpp"
#include "atomlaser/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int run(const std::string& path) {
  const auto config = atomlaser::load_config(path);
  const auto output = atomlaser::run_scenario(config);
  for (const auto& p : atomlaser::write_outputs(config, output)) std::cout << "wrote " << p.string() << '\n';
  return kExitOk;
}

int check(const std::string& path) {
  const auto config = atomlaser::load_config(path);
  const auto report = atomlaser::convergence_check(config);
  std::cout << "convergence of " << atomlaser::to_string(config.scenario) << " (tolerance "
            << atomlaser::format_number(report.tolerance) << ")\n";
  for (const auto& c : report.worst()) {
    std::cout << "  " << (c.change < report.tolerance && c.matched > 0 ? "ok  " : "FAIL") << ' ' << c.variant << ' '
              << c.table << ':' << c.column << " change=" << atomlaser::format_number(c.change)
              << " rows=" << c.matched << '\n';
  }
  std::cout << (report.passed() ? "converged\n" : "NOT converged\n");
  return report.passed() ? kExitOk : kExitNumerical;
}

int print_defaults() {
  for (auto s : atomlaser::kAllScenarios) {
    std::cout << "# " << atomlaser::to_string(s) << '\n' << atomlaser::to_text(atomlaser::default_config(s)) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Atom-laser outcoupling simulator"};
  app.set_version_flag("--version", std::string(atomlaser::kVersion));
  app.require_subcommand(1);
  std::string path;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its CSV outputs");
  run_cmd->add_option("config", path, "Configuration file")->required();
  auto* check_cmd = app.add_subcommand("check", "Convergence check: rerun with dt/2 and n*2");
  check_cmd->add_option("config", path, "Configuration file")->required();
  app.add_subcommand("print-defaults", "Print the default configuration of every scenario");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  try {
    if (run_cmd->parsed()) return run(path);
    if (check_cmd->parsed()) return check(path);
    return print_defaults();
  } catch (const atomlaser::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const atomlaser::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const atomlaser::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
