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

#ifndef MDM_TOOLS_CONFIG_H
#define MDM_TOOLS_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mdm/mzi.h"
#include "mdm/network.h"
#include "mdm/weightbank.h"

namespace mdm::cli {

/// A config problem, reported with the dotted path of the offending field.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string &field, const std::string &problem);
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

enum class ExperimentKind { mzi_sweep, bank_calibrate, network_run, demix };

std::string to_string(ExperimentKind kind);

struct MixingChoice {
    enum class Kind { identity, reversal, rotation, random };
    Kind kind = Kind::identity;
    double angle_rad = 0.0;

    MixingMatrix build(std::size_t modes, Rng &rng) const;
    std::string describe() const;
};

struct MziExperiment {
    MziSpec spec;
};

struct BankCalibrateExperiment {
    std::size_t modes = 2;
    double wavelength_nm = 1550.0;
    BankRingDesign ring;
    MixingChoice mixing;
    double probe_noise_sigma = 0.0;
    double tolerance = 1e-6;
    /// Optional weights to compensate against the calibrated matrix.
    std::optional<RVector> weights;
};

struct NetworkExperiment {
    std::vector<NeuronSpec> neurons;
    RMatrix weights;
    BankRingDesign bank_ring;
    double cascade_drop = 0.5;
    MixingChoice bus_mixing;
    bool compensate = true;
    double calibration_noise_sigma = 0.0;
    FeedbackSign feedback_sign = FeedbackSign::drop_minus_through;
    double tolerance = 1e-12;
    std::size_t max_iterations = 10000;
    double damping = 0.5;
};

struct DemixExperiment {
    std::size_t modes = 4;
    std::vector<double> wavelengths_nm{1550.0};
    BankRingDesign ring;
    MixingChoice mixing;
    /// Unmixed channel powers; drawn uniformly from [0, 1) when absent.
    std::optional<RVector> input_powers;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::mzi_sweep;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    std::variant<MziExperiment, BankCalibrateExperiment, NetworkExperiment, DemixExperiment> body;
};

/// Parses and fully validates a YAML experiment config. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path &path);
ExperimentConfig parse_config(const std::string &text);

}  // namespace mdm::cli

#endif  // MDM_TOOLS_CONFIG_H
