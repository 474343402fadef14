// Copyright 2026 The mdmsim Authors
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

#include <iostream>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "experiment.h"

int main(int argc, char **argv) {
    CLI::App app{"mdmsim: mode-division multiplexed photonic weight bank and network simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Show warnings from the simulation core");

    auto *run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Experiment config (YAML)")->required();
    run->add_option("-o,--output-dir", output_dir,
                    "Override the output directory (also settable via MDMSIM_OUTPUT_DIR)");

    auto *validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("config", config_path, "Experiment config (YAML)")->required();

    app.add_subcommand("version", "Print the version");

    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(verbose ? spdlog::level::warn : spdlog::level::err);

    if (run->parsed()) {
        std::optional<std::filesystem::path> override_dir;
        if (!output_dir.empty()) {
            override_dir = output_dir;
        }
        return mdm::cli::command_run(config_path, std::cout, std::cerr, override_dir);
    }
    if (validate->parsed()) {
        return mdm::cli::command_validate(config_path, std::cout, std::cerr);
    }
    std::cout << mdm::cli::version_string() << "\n";
    return 0;
}
