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

#include "mdm/weightbank.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

namespace mdm {

namespace {

std::size_t blocks_for(const RMatrix &power, std::size_t size, const char *what) {
    auto modes = static_cast<std::size_t>(power.rows());
    if (power.rows() != power.cols() || modes == 0) {
        throw DimensionError(fmt::format("{}: power matrix must be square", what), modes, power.cols());
    }
    if (size % modes != 0) {
        throw DimensionError(fmt::format("{}: channel count must be a multiple of the mode count", what), modes, size);
    }
    return size / modes;
}

}  // namespace

WeightVector::WeightVector(RVector w) : w_(std::move(w)) {
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
        if (!std::isfinite(w_(i)) || std::abs(w_(i)) > 1.0 + 1e-12) {
            throw std::domain_error(fmt::format("weight {} on channel {} outside [-1, 1]", w_(i), i));
        }
        w_(i) = std::clamp(w_(i), -1.0, 1.0);
    }
}

WeightVector WeightVector::zeros(std::size_t n) {
    return WeightVector(RVector::Zero(static_cast<Eigen::Index>(n)));
}

WeightVector WeightVector::select(std::size_t n, std::size_t i) {
    RVector w = RVector::Zero(static_cast<Eigen::Index>(n));
    w(static_cast<Eigen::Index>(i)) = 1.0;
    return WeightVector(std::move(w));
}

ChannelPowerVector::ChannelPowerVector(RVector p) : p_(std::move(p)) {
    for (Eigen::Index i = 0; i < p_.size(); ++i) {
        if (!std::isfinite(p_(i)) || p_(i) < 0.0) {
            throw std::domain_error(fmt::format("channel power {} on channel {} must be finite and >= 0", p_(i), i));
        }
    }
}

ChannelPowerVector ChannelPowerVector::unit(std::size_t n, std::size_t j) {
    RVector p = RVector::Zero(static_cast<Eigen::Index>(n));
    p(static_cast<Eigen::Index>(j)) = 1.0;
    return ChannelPowerVector(std::move(p));
}

MixingMatrix::MixingMatrix(CMatrix amplitude) : amplitude_(std::move(amplitude)) {
    if (amplitude_.rows() != amplitude_.cols() || amplitude_.rows() == 0) {
        throw DimensionError(
            "mixing matrix must be square",
            static_cast<std::size_t>(amplitude_.rows()),
            static_cast<std::size_t>(amplitude_.cols()));
    }
    if (!is_unitary(amplitude_)) {
        throw std::invalid_argument(fmt::format(
            "mixing matrix is not unitary (max |M†M - I| = {:.3e})", unitarity_deviation(amplitude_)));
    }
    power_ = power_matrix(amplitude_);
}

MixingMatrix MixingMatrix::identity(std::size_t modes) {
    auto n = static_cast<Eigen::Index>(modes);
    return MixingMatrix(CMatrix::Identity(n, n));
}

MixingMatrix MixingMatrix::reversal(std::size_t modes) {
    auto n = static_cast<Eigen::Index>(modes);
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(n - 1 - i, i) = 1.0;
    }
    return MixingMatrix(std::move(m));
}

MixingMatrix MixingMatrix::rotation(double angle_rad) {
    double c = std::cos(angle_rad);
    double s = std::sin(angle_rad);
    CMatrix m(2, 2);
    m << c, -s, s, c;
    return MixingMatrix(std::move(m));
}

MixingMatrix MixingMatrix::random(std::size_t modes, Rng &rng) {
    return MixingMatrix(haar_unitary(modes, rng));
}

double stochastic_residual(const RMatrix &m, double throughput) {
    double rows = (m.rowwise().sum().array() - throughput).abs().maxCoeff();
    double cols = (m.colwise().sum().array() - throughput).abs().maxCoeff();
    return std::max(rows, cols);
}

void BankSpec::validate() const {
    if (wavelengths_nm.size() != layout.wavelengths()) {
        throw DimensionError("bank: wavelength grid", layout.wavelengths(), wavelengths_nm.size());
    }
    if (rings.size() != layout.size()) {
        throw DimensionError("bank: ring grid", layout.size(), rings.size());
    }
    if (heaters.size() != layout.size()) {
        throw DimensionError("bank: heater grid", layout.size(), heaters.size());
    }
    for (const auto &r : rings) {
        r.validate();
    }
    if (!std::isfinite(readout_gain) || readout_gain <= 0.0) {
        throw std::invalid_argument(fmt::format("bank: readout_gain must be > 0 (got {})", readout_gain));
    }
}

double BankSpec::wavelength_of(std::size_t channel) const {
    return wavelengths_nm[layout.channel(channel).wavelength];
}

BankSpec make_bank(std::size_t modes, std::vector<double> wavelengths_nm, const BankRingDesign &design) {
    BankSpec bank;
    bank.layout = ChannelLayout(modes, wavelengths_nm.size());
    bank.wavelengths_nm = std::move(wavelengths_nm);
    bank.rings.reserve(bank.layout.size());
    for (std::size_t c = 0; c < bank.layout.size(); ++c) {
        RingSpec ring;
        ring.resonance_nm = bank.wavelength_of(c) + design.resonance_offset_nm;
        ring.fwhm_nm = design.fwhm_nm;
        ring.heater_shift_nm_per_unit = design.heater_shift_nm_per_unit;
        ring.max_drop = design.max_drop;
        bank.rings.push_back(ring);
    }
    bank.heaters.assign(bank.layout.size(), HeaterState{});
    bank.validate();
    return bank;
}

RVector drop_fractions(const BankSpec &bank) {
    bank.validate();
    RVector theta(static_cast<Eigen::Index>(bank.layout.size()));
    for (std::size_t c = 0; c < bank.layout.size(); ++c) {
        theta(static_cast<Eigen::Index>(c)) = drop_fraction(bank.rings[c], bank.heaters[c], bank.wavelength_of(c));
    }
    return theta;
}

RVector effective_weights(const BankSpec &bank) {
    RVector theta = drop_fractions(bank);
    return bank.readout_gain * (2.0 * theta.array() - 1.0).matrix();
}

BankOutput bank_output(const BankSpec &bank, const ChannelPowerVector &input) {
    if (input.size() != bank.layout.size()) {
        throw DimensionError("bank_output: input powers", bank.layout.size(), input.size());
    }
    RVector theta = drop_fractions(bank);
    RVector drop = theta.cwiseProduct(input.values());
    RVector through = input.values() - drop;
    BankOutput out;
    out.y = bank.readout_gain * (drop - through).sum();
    out.drop = ChannelPowerVector(std::move(drop));
    out.through = ChannelPowerVector(std::move(through));
    return out;
}

BankSpec set_weights(BankSpec bank, const WeightVector &w, double snap_tolerance) {
    bank.validate();
    if (w.size() != bank.layout.size()) {
        throw DimensionError("set_weights: weight vector", bank.layout.size(), w.size());
    }
    for (std::size_t c = 0; c < w.size(); ++c) {
        double theta = (w[c] + 1.0) / 2.0;
        try {
            bank.heaters[c] = solve_heater_for_weight(bank.rings[c], bank.wavelength_of(c), theta, snap_tolerance);
        } catch (const std::domain_error &e) {
            auto range = reachable_drop_range(bank.rings[c], bank.wavelength_of(c));
            auto ch = bank.layout.channel(c);
            throw std::domain_error(fmt::format(
                "weight {} on channel (mode {}, wavelength {}) unreachable; reachable weights [{:.6g}, {:.6g}]",
                w[c],
                ch.mode,
                ch.wavelength,
                2.0 * range.min - 1.0,
                2.0 * range.max - 1.0));
        }
    }
    bank.readout_gain = 1.0;
    return bank;
}

BankSpec set_weights_scaled(BankSpec bank, const RVector &weights) {
    bank.validate();
    if (static_cast<std::size_t>(weights.size()) != bank.layout.size()) {
        throw DimensionError(
            "set_weights_scaled: weight vector", bank.layout.size(), static_cast<std::size_t>(weights.size()));
    }
    if (!weights.allFinite()) {
        throw std::invalid_argument("set_weights_scaled: non-finite weight");
    }
    double scale = 1.0;
    std::vector<DropRange> ranges;
    ranges.reserve(bank.layout.size());
    for (std::size_t c = 0; c < bank.layout.size(); ++c) {
        auto range = reachable_drop_range(bank.rings[c], bank.wavelength_of(c));
        ranges.push_back(range);
        double w = weights(static_cast<Eigen::Index>(c));
        double lo = 2.0 * range.min - 1.0;
        double hi = 2.0 * range.max - 1.0;
        if (w > 0.0) {
            if (hi <= 0.0) {
                throw std::domain_error(fmt::format("set_weights_scaled: channel {} cannot realize positive weights", c));
            }
            scale = std::min(scale, hi / w);
        } else if (w < 0.0) {
            if (lo >= 0.0) {
                throw std::domain_error(fmt::format("set_weights_scaled: channel {} cannot realize negative weights", c));
            }
            scale = std::min(scale, lo / w);
        }
    }
    for (std::size_t c = 0; c < bank.layout.size(); ++c) {
        double theta = (scale * weights(static_cast<Eigen::Index>(c)) + 1.0) / 2.0;
        theta = std::clamp(theta, ranges[c].min, ranges[c].max);
        bank.heaters[c] = solve_heater_for_weight(bank.rings[c], bank.wavelength_of(c), theta, 0.0);
    }
    bank.readout_gain = 1.0 / scale;
    return bank;
}

ChannelPowerVector apply_power_mix(const RMatrix &power, const ChannelPowerVector &p) {
    std::size_t wavelengths = blocks_for(power, p.size(), "apply_mixing");
    auto modes = power.rows();
    auto stride = static_cast<Eigen::Index>(wavelengths);
    RVector out = RVector::Zero(p.values().size());
    for (Eigen::Index l = 0; l < stride; ++l) {
        RVector block(modes);
        for (Eigen::Index m = 0; m < modes; ++m) {
            block(m) = p.values()(m * stride + l);
        }
        RVector mixed = power * block;
        for (Eigen::Index m = 0; m < modes; ++m) {
            out(m * stride + l) = std::max(0.0, mixed(m));
        }
    }
    return ChannelPowerVector(std::move(out));
}

ChannelPowerVector apply_mixing(const MixingMatrix &m, const ChannelPowerVector &p) {
    return apply_power_mix(m.power(), p);
}

CalibrationResult calibrate(const ProbeRunner &probe, std::size_t n_modes, const CalibrationOptions &options) {
    if (n_modes == 0) {
        throw std::invalid_argument("calibrate: need at least one mode");
    }
    auto n = static_cast<Eigen::Index>(n_modes);
    CalibrationResult result;
    result.power = RMatrix::Zero(n, n);
    for (std::size_t i = 0; i < n_modes; ++i) {
        auto w = WeightVector::select(n_modes, i);
        for (std::size_t j = 0; j < n_modes; ++j) {
            auto p = ChannelPowerVector::unit(n_modes, j);
            result.power(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = probe(w, p);
            ++result.probes;
        }
    }
    result.residual = stochastic_residual(result.power, options.expected_throughput);
    result.condition_number = condition_number(result.power);
    result.consistent = result.residual <= options.tolerance;
    if (!result.consistent) {
        spdlog::warn(
            "calibration residual {:.3e} exceeds tolerance {:.3e}: inconsistent with lossless mixing",
            result.residual,
            options.tolerance);
    }
    return result;
}

void write_calibration(std::ostream &out, const CalibrationResult &result) {
    fmt::print(out, "# calibrated power mixing matrix |M|^2 (row = selected mode, column = probed mode)\n");
    fmt::print(out, "# modes {}\n", result.power.rows());
    fmt::print(out, "# condition_number {:.17g}\n", result.condition_number);
    fmt::print(out, "# residual {:.17g}\n", result.residual);
    fmt::print(
        out, "# status {}\n", result.consistent ? "consistent" : "inconsistent with lossless mixing");
    for (Eigen::Index i = 0; i < result.power.rows(); ++i) {
        for (Eigen::Index j = 0; j < result.power.cols(); ++j) {
            fmt::print(out, "{}{:.17g}", j == 0 ? "" : " ", result.power(i, j));
        }
        fmt::print(out, "\n");
    }
}

Compensation compensate(const WeightVector &w, const RMatrix &power_mix, double max_condition) {
    std::size_t wavelengths = blocks_for(power_mix, w.size(), "compensate");
    Compensation out;
    out.condition_number = condition_number(power_mix);
    if (!(out.condition_number <= max_condition)) {
        throw std::domain_error(fmt::format(
            "compensate: mixing matrix ill-conditioned (condition number {:.3e} > {:.3e})",
            out.condition_number,
            max_condition));
    }
    auto modes = power_mix.rows();
    auto stride = static_cast<Eigen::Index>(wavelengths);
    Eigen::FullPivLU<RMatrix> lu(power_mix.transpose());
    out.unclamped = RVector::Zero(w.values().size());
    for (Eigen::Index l = 0; l < stride; ++l) {
        RVector block(modes);
        for (Eigen::Index m = 0; m < modes; ++m) {
            block(m) = w.values()(m * stride + l);
        }
        RVector solved = lu.solve(block);
        for (Eigen::Index m = 0; m < modes; ++m) {
            out.unclamped(m * stride + l) = solved(m);
        }
    }
    double peak = out.unclamped.size() > 0 ? out.unclamped.cwiseAbs().maxCoeff() : 0.0;
    out.saturated = peak > 1.0;
    out.fit_scale = out.saturated ? 1.0 / peak : 1.0;
    out.weights = WeightVector(out.unclamped.cwiseMax(-1.0).cwiseMin(1.0));
    return out;
}

ChannelPowerVector flip_modes(const ChannelPowerVector &p, const ChannelLayout &layout) {
    if (p.size() != layout.size()) {
        throw DimensionError("flip_modes", layout.size(), p.size());
    }
    RVector out(p.values().size());
    for (std::size_t m = 0; m < layout.modes(); ++m) {
        for (std::size_t l = 0; l < layout.wavelengths(); ++l) {
            auto dst = static_cast<Eigen::Index>(layout.index({m, l}));
            auto src = static_cast<Eigen::Index>(layout.index({layout.modes() - 1 - m, l}));
            out(dst) = p.values()(src);
        }
    }
    return ChannelPowerVector(std::move(out));
}

CascadeOutput cascade(double fixed_drop, const BankSpec &bank, const ChannelPowerVector &input) {
    if (!(fixed_drop > 0.0 && fixed_drop < 1.0)) {
        throw std::domain_error(fmt::format("cascade: fixed drop fraction must lie in (0, 1) (got {})", fixed_drop));
    }
    if (input.size() != bank.layout.size()) {
        throw DimensionError("cascade: input powers", bank.layout.size(), input.size());
    }
    ChannelPowerVector diverted(fixed_drop * input.values());
    ChannelPowerVector passed((1.0 - fixed_drop) * input.values());
    CascadeOutput out;
    out.y = bank_output(bank, diverted).y;
    out.continue_bus = flip_modes(passed, bank.layout);
    return out;
}

SimulatedBankHardware::SimulatedBankHardware(BankSpec bank, MixingMatrix mix, double noise_sigma, Rng *rng)
    : bank_(std::move(bank)), mix_(std::move(mix)), noise_sigma_(noise_sigma), rng_(rng) {
    bank_.validate();
    if (mix_.modes() != bank_.layout.modes()) {
        throw DimensionError("simulated hardware: mixing modes", bank_.layout.modes(), mix_.modes());
    }
    if (noise_sigma_ > 0.0 && rng_ == nullptr) {
        throw std::invalid_argument("simulated hardware: noise requires a random generator");
    }
}

double SimulatedBankHardware::measure(const WeightVector &w, const ChannelPowerVector &p) {
    auto programmed = set_weights(bank_, w);
    auto mixed = apply_mixing(mix_, p);
    double y = bank_output(programmed, mixed).y;
    if (noise_sigma_ > 0.0) {
        y += gaussian(*rng_, noise_sigma_);
    }
    return y;
}

ProbeRunner SimulatedBankHardware::runner() {
    return [this](const WeightVector &w, const ChannelPowerVector &p) { return measure(w, p); };
}

}  // namespace mdm
