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

#include "mdm/network.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace mdm {

namespace {

double sign_of(FeedbackSign s) {
    return s == FeedbackSign::drop_minus_through ? 1.0 : -1.0;
}

bool is_terminal(const HairpinNetwork &net, std::size_t k) {
    return k + 1 == net.size();
}

}  // namespace

void NeuronSpec::validate() const {
    axon_ring.validate();
    if (!(pump_power > 0.0) || !std::isfinite(pump_power)) {
        throw std::invalid_argument(fmt::format("neuron: pump_power must be > 0 (got {})", pump_power));
    }
    if (!std::isfinite(pump_wavelength_nm) || !std::isfinite(bias) || !std::isfinite(gain)) {
        throw std::invalid_argument("neuron: non-finite parameter");
    }
}

void HairpinNetwork::validate() const {
    if (neurons.empty()) {
        throw std::invalid_argument("network: needs at least one neuron");
    }
    if (banks.size() != neurons.size()) {
        throw DimensionError("network: one bank per neuron", neurons.size(), banks.size());
    }
    if (cascade_drops.size() + 1 != neurons.size()) {
        throw DimensionError("network: cascade taps", neurons.size() - 1, cascade_drops.size());
    }
    for (double d : cascade_drops) {
        if (!(d > 0.0 && d < 1.0)) {
            throw std::domain_error(fmt::format("network: cascade drop {} outside (0, 1)", d));
        }
    }
    auto layout = bus_layout();
    if (layout.modes() < neurons.size()) {
        throw std::invalid_argument(
            fmt::format("network: {} neurons need at least as many bus modes (have {})", neurons.size(), layout.modes()));
    }
    std::vector<bool> used(layout.modes(), false);
    for (const auto &n : neurons) {
        n.validate();
        if (n.mode_channel >= layout.modes() || used[n.mode_channel]) {
            throw std::invalid_argument(fmt::format("network: mode channel {} invalid or shared", n.mode_channel));
        }
        used[n.mode_channel] = true;
    }
    for (const auto &b : banks) {
        b.validate();
        if (!(b.layout == layout)) {
            throw DimensionError("network: bank channel count", layout.size(), b.layout.size());
        }
    }
}

HairpinNetwork make_hairpin(
    std::vector<NeuronSpec> neurons, MixingMatrix bus_mix, const BankRingDesign &bank_design, double cascade_drop) {
    HairpinNetwork net;
    for (std::size_t i = 0; i < neurons.size(); ++i) {
        neurons[i].mode_channel = i;
    }
    net.neurons = std::move(neurons);
    net.bus_mix = std::move(bus_mix);
    double lambda = net.neurons.empty() ? 1550.0 : net.neurons.front().pump_wavelength_nm;
    for (std::size_t i = 0; i < net.neurons.size(); ++i) {
        net.banks.push_back(make_bank(net.bus_mix.modes(), {lambda}, bank_design));
    }
    if (!net.neurons.empty()) {
        net.cascade_drops.assign(net.neurons.size() - 1, cascade_drop);
    }
    net.validate();
    return net;
}

double axon_response(const NeuronSpec &n, double drive) {
    double detuning = (n.pump_wavelength_nm - n.axon_ring.resonance_nm) -
                      n.axon_ring.heater_shift_nm_per_unit * (drive + n.bias);
    return n.pump_power * lorentzian_drop(n.axon_ring, detuning);
}

NetworkState bias_state(const HairpinNetwork &net) {
    NetworkState x(static_cast<Eigen::Index>(net.size()));
    for (std::size_t i = 0; i < net.size(); ++i) {
        x(static_cast<Eigen::Index>(i)) = axon_response(net.neurons[i], 0.0);
    }
    return x;
}

NetworkState step(const HairpinNetwork &net, const NetworkState &state, StepTrace *trace) {
    auto n = net.size();
    if (static_cast<std::size_t>(state.size()) != n) {
        throw DimensionError("step: network state", n, static_cast<std::size_t>(state.size()));
    }
    auto layout = net.bus_layout();
    RVector bus = RVector::Zero(static_cast<Eigen::Index>(layout.size()));
    for (std::size_t i = 0; i < n; ++i) {
        double p = std::clamp(state(static_cast<Eigen::Index>(i)), 0.0, net.neurons[i].pump_power);
        bus(static_cast<Eigen::Index>(net.neurons[i].mode_channel)) += p;
    }
    double bus_power = bus.sum();
    auto q = apply_mixing(net.bus_mix, ChannelPowerVector(std::move(bus)));

    RVector drives(static_cast<Eigen::Index>(n));
    std::vector<double> bank_power(n);
    for (std::size_t k = 0; k < n; ++k) {
        double y = 0.0;
        if (is_terminal(net, k)) {
            bank_power[k] = q.total();
            y = bank_output(net.banks[k], q).y;
        } else {
            bank_power[k] = net.cascade_drops[k] * q.total();
            auto out = cascade(net.cascade_drops[k], net.banks[k], q);
            y = out.y;
            q = std::move(out.continue_bus);
        }
        drives(static_cast<Eigen::Index>(k)) = sign_of(net.feedback_sign) * net.neurons[k].gain * y;
    }

    NetworkState next(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        next(static_cast<Eigen::Index>(i)) = axon_response(net.neurons[i], drives(static_cast<Eigen::Index>(i)));
    }
    if (trace != nullptr) {
        trace->drives = drives;
        trace->outputs = next;
        trace->bus_power = bus_power;
        trace->bank_input_power = std::move(bank_power);
    }
    return next;
}

FixedPointResult run_to_fixed_point(
    const HairpinNetwork &net, double tol, std::size_t max_iter, const FixedPointOptions &options) {
    net.validate();
    if (!(tol > 0.0)) {
        throw std::invalid_argument(fmt::format("run_to_fixed_point: tolerance must be > 0 (got {})", tol));
    }
    if (!(options.damping > 0.0 && options.damping <= 1.0)) {
        throw std::invalid_argument(fmt::format("run_to_fixed_point: damping must lie in (0, 1] (got {})", options.damping));
    }
    FixedPointResult result;
    NetworkState x = options.initial ? *options.initial : bias_state(net);
    if (static_cast<std::size_t>(x.size()) != net.size()) {
        throw DimensionError("run_to_fixed_point: initial state", net.size(), static_cast<std::size_t>(x.size()));
    }
    StepTrace trace;
    double beta = options.damping;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        NetworkState target = step(net, x, &trace);
        NetworkState next = (1.0 - beta) * x + beta * target;
        result.residual = (next - x).cwiseAbs().maxCoeff();
        x = std::move(next);
        result.iterations = it;
        result.drives = trace.drives;
        if (options.record_trajectory) {
            result.trajectory.push_back(TrajectoryRow{it, trace.drives, x, result.residual});
        }
        if (result.residual < tol) {
            result.converged = true;
            break;
        }
    }
    result.state = std::move(x);
    return result;
}

void write_trajectory(std::ostream &out, const FixedPointResult &result, std::size_t neurons) {
    fmt::print(out, "# network trajectory (damped synchronous iteration)\n");
    fmt::print(out, "# converged {} iterations {} residual {:.17g}\n", result.converged, result.iterations,
               result.residual);
    fmt::print(out, "# columns: iteration");
    for (std::size_t i = 0; i < neurons; ++i) {
        fmt::print(out, " drive_{}", i);
    }
    for (std::size_t i = 0; i < neurons; ++i) {
        fmt::print(out, " output_{}", i);
    }
    fmt::print(out, " residual\n");
    for (const auto &row : result.trajectory) {
        fmt::print(out, "{}", row.iteration);
        for (Eigen::Index i = 0; i < row.drives.size(); ++i) {
            fmt::print(out, " {:.17g}", row.drives(i));
        }
        for (Eigen::Index i = 0; i < row.outputs.size(); ++i) {
            fmt::print(out, " {:.17g}", row.outputs(i));
        }
        fmt::print(out, " {:.17g}\n", row.residual);
    }
}

RMatrix bank_path_matrix(const HairpinNetwork &net, std::size_t bank) {
    net.validate();
    if (bank >= net.size()) {
        throw std::out_of_range(fmt::format("bank {} outside network of {} neurons", bank, net.size()));
    }
    RMatrix flip = MixingMatrix::reversal(net.bus_mix.modes()).power();
    RMatrix path = net.bus_mix.power();
    for (std::size_t k = 0; k < bank; ++k) {
        path = (1.0 - net.cascade_drops[k]) * (flip * path);
    }
    if (!is_terminal(net, bank)) {
        path *= net.cascade_drops[bank];
    }
    return path;
}

double bank_path_throughput(const HairpinNetwork &net, std::size_t bank) {
    double t = 1.0;
    for (std::size_t k = 0; k < bank; ++k) {
        t *= 1.0 - net.cascade_drops[k];
    }
    if (!is_terminal(net, bank)) {
        t *= net.cascade_drops[bank];
    }
    return t;
}

CalibrationResult calibrate_bank_path(const HairpinNetwork &net, std::size_t bank, double noise_sigma, Rng *rng) {
    net.validate();
    if (bank >= net.size()) {
        throw std::out_of_range(fmt::format("bank {} outside network of {} neurons", bank, net.size()));
    }
    if (noise_sigma > 0.0 && rng == nullptr) {
        throw std::invalid_argument("calibrate_bank_path: noise requires a random generator");
    }
    auto runner = [&](const WeightVector &w, const ChannelPowerVector &p) {
        auto programmed = set_weights(net.banks[bank], w);
        auto q = apply_mixing(net.bus_mix, p);
        for (std::size_t k = 0; k < bank; ++k) {
            q = cascade(net.cascade_drops[k], net.banks[k], q).continue_bus;
        }
        double y = is_terminal(net, bank) ? bank_output(programmed, q).y
                                          : cascade(net.cascade_drops[bank], programmed, q).y;
        if (noise_sigma > 0.0) {
            y += gaussian(*rng, noise_sigma);
        }
        return y;
    };
    CalibrationOptions options;
    options.expected_throughput = bank_path_throughput(net, bank);
    return calibrate(runner, net.bus_mix.modes(), options);
}

HairpinNetwork program_weights(HairpinNetwork net, const RMatrix &weights, std::optional<std::span<const RMatrix>> paths) {
    net.validate();
    auto n = net.size();
    if (static_cast<std::size_t>(weights.rows()) != n || static_cast<std::size_t>(weights.cols()) != n) {
        throw DimensionError("program_weights: weight matrix", n, static_cast<std::size_t>(weights.rows()));
    }
    if (paths && paths->size() != n) {
        throw DimensionError("program_weights: calibrated paths", n, paths->size());
    }
    auto modes = net.bus_mix.modes();
    for (std::size_t i = 0; i < n; ++i) {
        RVector row = RVector::Zero(static_cast<Eigen::Index>(modes));
        for (std::size_t j = 0; j < n; ++j) {
            row(static_cast<Eigen::Index>(net.neurons[j].mode_channel)) =
                weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        WeightVector target(std::move(row));
        if (paths) {
            auto comp = compensate(target, (*paths)[i]);
            net.banks[i] = set_weights_scaled(std::move(net.banks[i]), comp.unclamped);
        } else {
            net.banks[i] = set_weights(std::move(net.banks[i]), target);
        }
    }
    return net;
}

std::vector<BankSpec> program_demixer(std::vector<BankSpec> banks, const RMatrix &power_mix) {
    if (banks.empty()) {
        throw std::invalid_argument("demix: need at least one bank");
    }
    auto layout = banks.front().layout;
    if (banks.size() != layout.size()) {
        throw DimensionError("demix: one bank per channel", layout.size(), banks.size());
    }
    if (static_cast<std::size_t>(power_mix.rows()) != layout.modes()) {
        throw DimensionError("demix: power mix modes", layout.modes(), static_cast<std::size_t>(power_mix.rows()));
    }
    for (std::size_t c = 0; c < banks.size(); ++c) {
        if (!(banks[c].layout == layout)) {
            throw DimensionError(fmt::format("demix: bank {} channel count", c), layout.size(), banks[c].layout.size());
        }
        auto comp = compensate(WeightVector::select(layout.size(), c), power_mix);
        banks[c] = set_weights_scaled(std::move(banks[c]), comp.unclamped);
    }
    return banks;
}

ChannelPowerVector demix_output(const std::vector<BankSpec> &programmed, const ChannelPowerVector &mixed) {
    RVector out(static_cast<Eigen::Index>(programmed.size()));
    for (std::size_t c = 0; c < programmed.size(); ++c) {
        out(static_cast<Eigen::Index>(c)) = std::max(0.0, bank_output(programmed[c], mixed).y);
    }
    return ChannelPowerVector(std::move(out));
}

ChannelPowerVector demix(std::vector<BankSpec> banks, const RMatrix &power_mix, const ChannelPowerVector &mixed) {
    return demix_output(program_demixer(std::move(banks), power_mix), mixed);
}

double crosstalk_suppression_db(const std::vector<BankSpec> &programmed, const RMatrix &power_mix) {
    double worst_leak = 0.0;
    double weakest_signal = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < programmed.size(); ++j) {
        auto mixed = apply_power_mix(power_mix, ChannelPowerVector::unit(programmed.size(), j));
        for (std::size_t c = 0; c < programmed.size(); ++c) {
            double y = bank_output(programmed[c], mixed).y;
            if (c == j) {
                weakest_signal = std::min(weakest_signal, y);
            } else {
                worst_leak = std::max(worst_leak, std::abs(y));
            }
        }
    }
    constexpr double kLeakFloor = 1e-30;
    return 10.0 * std::log10(weakest_signal / std::max(worst_leak, kLeakFloor));
}

}  // namespace mdm
