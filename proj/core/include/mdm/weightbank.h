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

#ifndef MDM_WEIGHTBANK_H
#define MDM_WEIGHTBANK_H

#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "mdm/linalg.h"
#include "mdm/mrr.h"
#include "mdm/random.h"

namespace mdm {

/// Real weight per channel, each in [-1, 1].
class WeightVector {
  public:
    WeightVector() = default;
    explicit WeightVector(RVector w);

    static WeightVector zeros(std::size_t n);
    /// +1 on channel `i`, 0 elsewhere.
    static WeightVector select(std::size_t n, std::size_t i);

    const RVector &values() const { return w_; }
    std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
    double operator[](std::size_t i) const { return w_(static_cast<Eigen::Index>(i)); }

  private:
    RVector w_;
};

/// Optical power per channel (|x|^2), nonnegative.
class ChannelPowerVector {
  public:
    ChannelPowerVector() = default;
    explicit ChannelPowerVector(RVector p);

    /// Unit power on channel `j`.
    static ChannelPowerVector unit(std::size_t n, std::size_t j);

    const RVector &values() const { return p_; }
    std::size_t size() const { return static_cast<std::size_t>(p_.size()); }
    double operator[](std::size_t i) const { return p_(static_cast<Eigen::Index>(i)); }
    double total() const { return p_.sum(); }

  private:
    RVector p_;
};

/// Unitary amplitude mixing among the modes of one bus, plus its power
/// counterpart |M_ij|^2 (doubly stochastic).
class MixingMatrix {
  public:
    explicit MixingMatrix(CMatrix amplitude);

    static MixingMatrix identity(std::size_t modes);
    /// Anti-diagonal permutation: mode i -> mode n-1-i.
    static MixingMatrix reversal(std::size_t modes);
    /// Two-mode rotation [[cos, -sin], [sin, cos]]; power [[c^2, s^2], [s^2, c^2]].
    static MixingMatrix rotation(double angle_rad);
    static MixingMatrix random(std::size_t modes, Rng &rng);

    std::size_t modes() const { return static_cast<std::size_t>(amplitude_.rows()); }
    const CMatrix &amplitude() const { return amplitude_; }
    const RMatrix &power() const { return power_; }

  private:
    CMatrix amplitude_;
    RMatrix power_;
};

/// Largest |row sum - t| or |column sum - t|.
double stochastic_residual(const RMatrix &m, double throughput = 1.0);

/// Stage per mode, ring per wavelength. Ring (m, l) weights channel
/// layout.index({m, l}); `readout_gain` scales the balanced photodiode current.
struct BankSpec {
    ChannelLayout layout{1, 1};
    std::vector<double> wavelengths_nm;
    std::vector<RingSpec> rings;
    std::vector<HeaterState> heaters;
    double readout_gain = 1.0;

    void validate() const;
    double wavelength_of(std::size_t channel) const;
};

/// Ring geometry shared by every ring of a uniformly built bank. Each ring
/// sits `resonance_offset_nm` from its channel at zero drive.
struct BankRingDesign {
    double fwhm_nm = 0.05;
    double heater_shift_nm_per_unit = 2.0;
    double max_drop = 1.0;
    double resonance_offset_nm = 0.0;
};

BankSpec make_bank(std::size_t modes, std::vector<double> wavelengths_nm, const BankRingDesign &design = {});

struct BankOutput {
    double y = 0.0;
    ChannelPowerVector drop;
    ChannelPowerVector through;
};

/// y = gain * sum_c (drop_c - through_c) = gain * sum_c (2 theta_c - 1) p_c.
BankOutput bank_output(const BankSpec &bank, const ChannelPowerVector &input);

RVector drop_fractions(const BankSpec &bank);

/// gain * (2 theta - 1) per channel: the weights the bank currently applies.
RVector effective_weights(const BankSpec &bank);

/// Solves each ring's heater for theta = (w + 1) / 2 and resets the readout
/// gain to 1. Throws std::domain_error naming the channel when a weight is
/// out of reach.
BankSpec set_weights(BankSpec bank, const WeightVector &w, double snap_tolerance = kDropSnapTolerance);

/// Realizes arbitrary real weights exactly: scales them by s <= 1 into every
/// ring's reachable range and sets readout_gain = 1 / s.
BankSpec set_weights_scaled(BankSpec bank, const RVector &weights);

/// Power-domain mixing per wavelength block: p'[m, l] = sum_k P[m, k] p[k, l].
ChannelPowerVector apply_power_mix(const RMatrix &power, const ChannelPowerVector &p);

ChannelPowerVector apply_mixing(const MixingMatrix &m, const ChannelPowerVector &p);

/// Returns the measured y for a requested (w, p) probe.
using ProbeRunner = std::function<double(const WeightVector &, const ChannelPowerVector &)>;

struct CalibrationOptions {
    /// Allowed stochastic residual before the result is flagged.
    double tolerance = 1e-6;
    /// Row/column sums expected from the probed path (1 for a lossless mix).
    double expected_throughput = 1.0;
};

struct CalibrationResult {
    RMatrix power;
    double residual = 0.0;
    double condition_number = 0.0;
    bool consistent = true;
    std::size_t probes = 0;
};

/// One-hot probes p = e_j, w = e_i, so each measurement reads |M|^2_ij directly.
CalibrationResult calibrate(const ProbeRunner &probe, std::size_t n_modes, const CalibrationOptions &options = {});

/// Header carries condition number, residual, and the consistency flag.
void write_calibration(std::ostream &out, const CalibrationResult &result);

inline constexpr double kMaxConditionNumber = 1e8;

struct Compensation {
    /// w * P^-1 per wavelength block, before any clamping.
    RVector unclamped;
    /// unclamped, clamped into [-1, 1].
    WeightVector weights;
    bool saturated = false;
    /// Factor that would bring `unclamped` inside [-1, 1] (1 when it already fits).
    double fit_scale = 1.0;
    double condition_number = 1.0;
};

/// w' = w (P)^-1 for the power mix measured by `calibrate`. Rejects mixes
/// whose condition number exceeds `max_condition`.
Compensation compensate(const WeightVector &w, const RMatrix &power_mix, double max_condition = kMaxConditionNumber);

/// Mode order reversed within each wavelength block.
ChannelPowerVector flip_modes(const ChannelPowerVector &p, const ChannelLayout &layout);

struct CascadeOutput {
    double y = 0.0;
    ChannelPowerVector continue_bus;
};

/// A fixed-drop bank taps `fixed_drop` of every channel into `bank`; the rest
/// continues down the bus with its mode order reversed.
CascadeOutput cascade(double fixed_drop, const BankSpec &bank, const ChannelPowerVector &input);

/// A bank behind an unknown bus mix, with optional additive readout noise.
/// Serves as the measurement oracle for calibrate().
class SimulatedBankHardware {
  public:
    SimulatedBankHardware(BankSpec bank, MixingMatrix mix, double noise_sigma = 0.0, Rng *rng = nullptr);

    double measure(const WeightVector &w, const ChannelPowerVector &p);
    ProbeRunner runner();

    const BankSpec &bank() const { return bank_; }
    const MixingMatrix &mix() const { return mix_; }

  private:
    BankSpec bank_;
    MixingMatrix mix_;
    double noise_sigma_;
    Rng *rng_;
};

}  // namespace mdm

#endif  // MDM_WEIGHTBANK_H
