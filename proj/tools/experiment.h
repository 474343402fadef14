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

#ifndef MDM_TOOLS_EXPERIMENT_H
#define MDM_TOOLS_EXPERIMENT_H

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "config.h"

namespace mdm::cli {

/// Overrides every config's output_dir when set.
inline constexpr const char *kOutputDirEnv = "MDMSIM_OUTPUT_DIR";

inline constexpr const char *kManifestName = "manifest.txt";

struct Artifact {
    std::string name;
    std::string content;
};

struct RunResult {
    std::vector<Artifact> files;
    std::string summary;
};

/// Runs the experiment entirely in memory; nothing touches the filesystem.
RunResult execute(const ExperimentConfig &config);

/// Explicit override, then $MDMSIM_OUTPUT_DIR, then the config's output_dir.
std::filesystem::path resolve_output_dir(
    const ExperimentConfig &config, const std::optional<std::filesystem::path> &override_dir = std::nullopt);

/// Writes every artifact, then a manifest with one SHA-256 line per file.
void write_run(const std::filesystem::path &dir, const ExperimentConfig &config, const RunResult &result);

std::string sha256_hex(std::string_view data);

/// Exit codes: 0 success, 1 simulation failure, 2 invalid config.
int command_run(const std::filesystem::path &config_path,
                std::ostream &out,
                std::ostream &err,
                const std::optional<std::filesystem::path> &override_dir = std::nullopt);
int command_validate(const std::filesystem::path &config_path, std::ostream &out, std::ostream &err);

std::string version_string();

}  // namespace mdm::cli

#endif  // MDM_TOOLS_EXPERIMENT_H
