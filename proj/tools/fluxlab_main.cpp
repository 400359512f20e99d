// Copyright 2026 The fluxlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fluxlab/cli/run.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;
constexpr int kExitSingular = 4;

int default_jobs() {
  if (const char* env = std::getenv("FLUXLAB_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw fluxlab::ConfigError("cannot read config file \"" + path + "\"");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermodynamic information flux and divisibility studies"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  bool emit_svg = false;
  int jobs = default_jobs();

  const std::vector<std::string> commands{"protocol", "cnot-flux",
                                          "phase-diagram", "blp", "simulate"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--svg", emit_svg, "emit SVG plots next to the CSVs");
    sub->add_option("--jobs", jobs, "worker pool size");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    fluxlab::cli::RunConfig rc =
        fluxlab::cli::parse_config(read_file(config_path));
    if (rc.command != command) {
      throw fluxlab::ConfigError("config command \"" + rc.command +
                                 "\" does not match subcommand \"" + command +
                                 "\"");
    }
    const std::string dir = rc.output_dir && out_dir == "." ? *rc.output_dir
                                                            : out_dir;
    const auto artifacts = fluxlab::cli::run(rc, dir, emit_svg, jobs);
    for (const auto& a : artifacts) std::cout << dir << "/" << a << "\n";
    return kExitOk;
  } catch (const fluxlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fluxlab::SingularityError& e) {
    std::cerr << "singularity: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return kExitCompute;
  }
}
