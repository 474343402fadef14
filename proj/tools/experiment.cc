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

#include "experiment.h"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <type_traits>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "mdm/coupler.h"
#include "mdm/mzi.h"
#include "mdm/network.h"
#include "mdm/random.h"
#include "mdm/weightbank.h"

namespace mdm::cli {

namespace {

std::string format_matrix(const RMatrix &m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out += fmt::format("{}{:.17g}", j == 0 ? "" : " ", m(i, j));
        }
        out += "\n";
    }
    return out;
}

RunResult run_mzi(const MziExperiment &e, Rng &rng) {
    const auto &spec = e.spec;
    auto spectrum = sweep(spec, &rng);
    auto er = extinction_ratio(spectrum);
    auto candidates = recover_alpha(er.db);
    double predicted = coupling_ratio(spec.coupler);
    double recovered = disambiguate(candidates, predicted);

    RunResult r;
    std::ostringstream spectrum_text;
    write_spectrum(spectrum_text, spectrum, spec);
    r.files.push_back({"spectrum.dat", spectrum_text.str()});

    std::string analysis = "# mzi extinction analysis (key value)\n";
    analysis += fmt::format("extinction_ratio_db {:.17g}\n", er.db);
    analysis += fmt::format("clamped {}\n", er.clamped ? 1 : 0);
    analysis += fmt::format("max_transmission {:.17g}\n", er.max_transmission);
    analysis += fmt::format("min_transmission {:.17g}\n", er.min_transmission);
    analysis += fmt::format("cosine_amplitude {:.17g}\n", er.cosine_amplitude);
    analysis += fmt::format("fringes {:.17g}\n", er.fit.fringes);
    analysis += fmt::format("alpha_low {:.17g}\n", candidates.low);
    analysis += fmt::format("alpha_high {:.17g}\n", candidates.high);
    analysis += fmt::format("predicted_alpha {:.17g}\n", predicted);
    analysis += fmt::format("recovered_alpha {:.17g}\n", recovered);
    analysis += fmt::format("model_alpha {:.17g}\n", spec.alpha());
    r.files.push_back({"extinction.dat", analysis});

    r.summary = fmt::format("mzi-sweep: {} points, ER {:.4f} dB{}, recovered alpha {:.9f} (model {:.9f})",
                            spectrum.size(), er.db, er.clamped ? " (clamped)" : "", recovered, spec.alpha());
    return r;
}

RunResult run_bank(const BankCalibrateExperiment &e, Rng &rng) {
    auto mix = e.mixing.build(e.modes, rng);
    SimulatedBankHardware hardware(
        make_bank(e.modes, {e.wavelength_nm}, e.ring), mix, e.probe_noise_sigma, e.probe_noise_sigma > 0 ? &rng : nullptr);
    CalibrationOptions options;
    options.tolerance = e.tolerance;
    auto result = calibrate(hardware.runner(), e.modes, options);

    RunResult r;
    std::ostringstream cal;
    write_calibration(cal, result);
    r.files.push_back({"calibration.dat", cal.str()});

    std::string truth = fmt::format("# true power mixing matrix |M|^2, mixing {}\n", e.mixing.describe());
    truth += format_matrix(mix.power());
    r.files.push_back({"mixing_truth.dat", truth});

    if (e.weights) {
        auto comp = compensate(WeightVector(*e.weights), result.power);
        std::string text = "# weight compensation w' = w (|M|^2)^-1\n";
        text += fmt::format("# condition_number {:.17g}\n", comp.condition_number);
        text += fmt::format("# saturated {}\n", comp.saturated ? 1 : 0);
        text += fmt::format("# fit_scale {:.17g}\n", comp.fit_scale);
        text += "# columns: mode weight compensated compensated_clamped\n";
        for (Eigen::Index i = 0; i < e.weights->size(); ++i) {
            text += fmt::format("{} {:.17g} {:.17g} {:.17g}\n", i, (*e.weights)(i), comp.unclamped(i),
                                comp.weights.values()(i));
        }
        r.files.push_back({"compensation.dat", text});
    }
    r.summary = fmt::format("bank-calibrate: {} modes, {} probes, residual {:.3e}, condition number {:.4g}{}",
                            e.modes, result.probes, result.residual, result.condition_number,
                            result.consistent ? "" : " (inconsistent with lossless mixing)");
    return r;
}

RunResult run_network(const NetworkExperiment &e, Rng &rng) {
    auto mix = e.bus_mixing.build(e.neurons.size(), rng);
    auto net = make_hairpin(e.neurons, mix, e.bank_ring, e.cascade_drop);
    net.feedback_sign = e.feedback_sign;

    RunResult r;
    if (e.compensate) {
        std::vector<RMatrix> paths;
        for (std::size_t k = 0; k < net.size(); ++k) {
            auto cal = calibrate_bank_path(net, k, e.calibration_noise_sigma,
                                           e.calibration_noise_sigma > 0 ? &rng : nullptr);
            std::ostringstream text;
            write_calibration(text, cal);
            r.files.push_back({fmt::format("calibration_bank_{}.dat", k), text.str()});
            paths.push_back(cal.power);
        }
        net = program_weights(std::move(net), e.weights, std::span<const RMatrix>(paths));
    } else {
        net = program_weights(std::move(net), e.weights);
    }

    FixedPointOptions options;
    options.damping = e.damping;
    options.record_trajectory = true;
    auto fp = run_to_fixed_point(net, e.tolerance, e.max_iterations, options);

    std::ostringstream traj;
    write_trajectory(traj, fp, net.size());
    r.files.push_back({"trajectory.dat", traj.str()});

    std::string summary = "# network fixed point (key value)\n";
    summary += fmt::format("bus_mixing {}\n", e.bus_mixing.describe());
    summary += fmt::format("compensated {}\n", e.compensate ? 1 : 0);
    summary += fmt::format("converged {}\n", fp.converged ? 1 : 0);
    summary += fmt::format("iterations {}\n", fp.iterations);
    summary += fmt::format("residual {:.17g}\n", fp.residual);
    for (Eigen::Index i = 0; i < fp.state.size(); ++i) {
        summary += fmt::format("output_{} {:.17g}\n", i, fp.state(i));
    }
    for (Eigen::Index i = 0; i < fp.drives.size(); ++i) {
        summary += fmt::format("drive_{} {:.17g}\n", i, fp.drives(i));
    }
    r.files.push_back({"fixed_point.dat", summary});

    r.summary = fmt::format("network-run: {} after {} iterations (residual {:.3e})",
                            fp.converged ? "converged" : "did not converge", fp.iterations, fp.residual);
    return r;
}

RunResult run_demix(const DemixExperiment &e, Rng &rng) {
    ChannelLayout layout(e.modes, e.wavelengths_nm.size());
    auto mix = e.mixing.build(e.modes, rng);
    RVector original;
    if (e.input_powers) {
        original = *e.input_powers;
    } else {
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        original.resize(static_cast<Eigen::Index>(layout.size()));
        for (Eigen::Index i = 0; i < original.size(); ++i) {
            original(i) = uniform(rng);
        }
    }

    SimulatedBankHardware probe_bank(make_bank(e.modes, {e.wavelengths_nm.front()}, e.ring), mix);
    auto cal = calibrate(probe_bank.runner(), e.modes);

    std::vector<BankSpec> banks(layout.size(), make_bank(e.modes, e.wavelengths_nm, e.ring));
    auto programmed = program_demixer(std::move(banks), cal.power);
    auto mixed = apply_mixing(mix, ChannelPowerVector(original));
    auto recovered = demix_output(programmed, mixed);
    double suppression = crosstalk_suppression_db(programmed, mix.power());
    double max_error = (recovered.values() - original).cwiseAbs().maxCoeff();

    std::string text = fmt::format("# demixing with {} weight banks, mixing {}\n", layout.size(), e.mixing.describe());
    text += layout.ordering_header() + "\n";
    text += fmt::format("# crosstalk_suppression_db {:.17g}\n", suppression);
    text += fmt::format("# max_recovery_error {:.17g}\n", max_error);
    text += "# columns: channel mode wavelength_index original mixed recovered\n";
    for (std::size_t c = 0; c < layout.size(); ++c) {
        auto ch = layout.channel(c);
        auto i = static_cast<Eigen::Index>(c);
        text += fmt::format("{} {} {} {:.17g} {:.17g} {:.17g}\n", c, ch.mode, ch.wavelength, original(i),
                            mixed.values()(i), recovered.values()(i));
    }
    RunResult r;
    r.files.push_back({"demix.dat", text});
    std::string cal_text;
    {
        std::ostringstream os;
        write_calibration(os, cal);
        cal_text = os.str();
    }
    r.files.push_back({"calibration.dat", cal_text});
    r.summary = fmt::format("demix: {} channels, max recovery error {:.3e}, crosstalk suppression {:.1f} dB",
                            layout.size(), max_error, suppression);
    return r;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

}  // namespace

RunResult execute(const ExperimentConfig &config) {
    auto rng = make_rng(config.seed);
    return std::visit(
        [&](const auto &body) -> RunResult {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, MziExperiment>) {
                return run_mzi(body, rng);
            } else if constexpr (std::is_same_v<T, BankCalibrateExperiment>) {
                return run_bank(body, rng);
            } else if constexpr (std::is_same_v<T, NetworkExperiment>) {
                return run_network(body, rng);
            } else {
                return run_demix(body, rng);
            }
        },
        config.body);
}

std::filesystem::path resolve_output_dir(const ExperimentConfig &config,
                                         const std::optional<std::filesystem::path> &override_dir) {
    if (override_dir) {
        return *override_dir;
    }
    if (const char *env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return config.output_dir;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

void write_run(const std::filesystem::path &dir, const ExperimentConfig &config, const RunResult &result) {
    std::filesystem::create_directories(dir);
    std::string manifest = "# mdmsim run manifest\n";
    manifest += fmt::format("# version {}\n", version_string());
    manifest += fmt::format("# experiment {}\n", to_string(config.kind));
    manifest += fmt::format("# seed {}\n", config.seed);
    manifest += fmt::format("# created {}\n", utc_timestamp());
    manifest += "# columns: sha256 file\n";
    for (const auto &a : result.files) {
        auto path = dir / a.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << a.content;
        if (!out) {
            throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
        }
        manifest += fmt::format("{}  {}\n", sha256_hex(a.content), a.name);
    }
    std::ofstream out(dir / kManifestName, std::ios::binary | std::ios::trunc);
    out << manifest;
    if (!out) {
        throw std::runtime_error(fmt::format("failed writing manifest in '{}'", dir.string()));
    }
}

int command_run(const std::filesystem::path &config_path,
                std::ostream &out,
                std::ostream &err,
                const std::optional<std::filesystem::path> &override_dir) {
    ExperimentConfig config;
    try {
        config = load_config(config_path);
    } catch (const std::exception &e) {
        err << "mdmsim: invalid config: " << e.what() << "\n";
        return 2;
    }
    try {
        auto result = execute(config);
        auto dir = resolve_output_dir(config, override_dir);
        write_run(dir, config, result);
        out << result.summary << "\n";
        out << "wrote " << result.files.size() << " data files and " << kManifestName << " to " << dir.string()
            << "\n";
    } catch (const std::exception &e) {
        err << "mdmsim: " << to_string(config.kind) << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int command_validate(const std::filesystem::path &config_path, std::ostream &out, std::ostream &err) {
    try {
        auto config = load_config(config_path);
        out << "ok: " << to_string(config.kind) << " (seed " << config.seed << ")\n";
        return 0;
    } catch (const std::exception &e) {
        err << "mdmsim: invalid config: " << e.what() << "\n";
        return 2;
    }
}

std::string version_string() {
    return "mdmsim " MDMSIM_VERSION;
}

}  // namespace mdm::cli
