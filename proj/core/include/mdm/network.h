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

#ifndef MDM_NETWORK_H
#define MDM_NETWORK_H

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mdm/linalg.h"
#include "mdm/mrr.h"
#include "mdm/random.h"
#include "mdm/weightbank.h"

namespace mdm {

/// Continuous (non-spiking) photonic neuron. The axon is a heater-driven ring
/// whose Lorentzian drop response modulates the pump; its output rides the
/// bus on `mode_channel`.
struct NeuronSpec {
    RingSpec axon_ring;
    double pump_power = 1.0;
    double pump_wavelength_nm = 1550.0;
    std::size_t mode_channel = 0;
    /// Added to the dendrite drive before the axon.
    double bias = 0.0;
    /// Photodiode current to heater drive.
    double gain = 1.0;

    void validate() const;
};

enum class FeedbackSign { drop_minus_through, through_minus_drop };

/// Folded-bus network: axons on one side, weight banks on the other, an
/// arbitrary bend (`bus_mix`) between them. banks[i] computes neuron i's
/// input; every bank but the last sits behind a fixed-drop cascade tap, the
/// last one takes what remains of the bus.
struct HairpinNetwork {
    std::vector<NeuronSpec> neurons;
    std::vector<BankSpec> banks;
    std::vector<double> cascade_drops;
    MixingMatrix bus_mix = MixingMatrix::identity(2);
    FeedbackSign feedback_sign = FeedbackSign::drop_minus_through;

    std::size_t size() const { return neurons.size(); }
    ChannelLayout bus_layout() const { return ChannelLayout(bus_mix.modes(), 1); }
    void validate() const;
};

/// Neurons on modes 0..n-1 of an n-mode bus at one wavelength; every
/// cascade tap drops `cascade_drop`.
HairpinNetwork make_hairpin(
    std::vector<NeuronSpec> neurons,
    MixingMatrix bus_mix,
    const BankRingDesign &bank_design = {},
    double cascade_drop = 0.5);

/// pump * Lorentzian(drive + bias), drive acting as heater input. The drive
/// is an electrical signal and is not clamped to the heater's [0, 1] range.
double axon_response(const NeuronSpec &n, double drive);

using NetworkState = RVector;

struct StepTrace {
    RVector drives;
    RVector outputs;
    double bus_power = 0.0;
    std::vector<double> bank_input_power;
};

/// One synchronous pass: axon powers onto the bus, bend mixing, cascade and
/// terminal banks, photodiode currents back into the axons.
NetworkState step(const HairpinNetwork &net, const NetworkState &state, StepTrace *trace = nullptr);

/// Axon outputs with zero dendrite drive.
NetworkState bias_state(const HairpinNetwork &net);

struct FixedPointOptions {
    double damping = 0.5;
    /// Defaults to bias_state().
    std::optional<NetworkState> initial;
    bool record_trajectory = false;
};

struct TrajectoryRow {
    std::size_t iteration = 0;
    RVector drives;
    RVector outputs;
    double residual = 0.0;
};

struct FixedPointResult {
    NetworkState state;
    RVector drives;
    std::size_t iterations = 0;
    bool converged = false;
    double residual = 0.0;
    std::vector<TrajectoryRow> trajectory;
};

/// x <- (1 - b) x + b step(x) until the inf-norm update drops below `tol`.
FixedPointResult run_to_fixed_point(
    const HairpinNetwork &net, double tol, std::size_t max_iter, const FixedPointOptions &options = {});

/// Rows: iteration, drive per neuron, output per neuron, residual.
void write_trajectory(std::ostream &out, const FixedPointResult &result, std::size_t neurons);

/// Modeled power matrix from bus injection (by mode) to bank k's input channels.
RMatrix bank_path_matrix(const HairpinNetwork &net, std::size_t bank);

/// Row/column sum of bank k's path matrix.
double bank_path_throughput(const HairpinNetwork &net, std::size_t bank);

/// Probes bank k through the physical bus path (mix, upstream cascades) with
/// one-hot injections and selections.
CalibrationResult calibrate_bank_path(
    const HairpinNetwork &net, std::size_t bank, double noise_sigma = 0.0, Rng *rng = nullptr);

/// Programs every bank so neuron i's drive is sign * gain_i * sum_j W_ij P_j.
/// With `paths` (one calibrated power matrix per bank) the weights are
/// compensated; without, W's rows are written straight onto the banks.
HairpinNetwork program_weights(
    HairpinNetwork net, const RMatrix &weights, std::optional<std::span<const RMatrix>> paths = std::nullopt);

/// Bank c selects channel c: its weights are row c of P^-1, applied per wavelength.
std::vector<BankSpec> program_demixer(std::vector<BankSpec> banks, const RMatrix &power_mix);

/// Each programmed bank reads a copy of the mixed bus.
ChannelPowerVector demix_output(const std::vector<BankSpec> &programmed, const ChannelPowerVector &mixed);

/// program_demixer then demix_output. Negative readings are clipped to 0.
ChannelPowerVector demix(std::vector<BankSpec> banks, const RMatrix &power_mix, const ChannelPowerVector &mixed);

/// 10 log10(selected / worst leakage) over one-hot inputs pushed through `power_mix`.
double crosstalk_suppression_db(const std::vector<BankSpec> &programmed, const RMatrix &power_mix);

}  // namespace mdm

#endif  // MDM_NETWORK_H
