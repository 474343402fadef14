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

#ifndef MDM_MRR_H
#define MDM_MRR_H

namespace mdm {

/// Targets this close to the edge of a ring's reachable drop range are
/// realized at the edge. A Lorentzian never reaches zero drop, so an
/// "all-through" setting is only ever approximate.
inline constexpr double kDropSnapTolerance = 1e-3;

/// Normalized heater setting, clamped to [0, 1].
class HeaterState {
  public:
    constexpr HeaterState() = default;
    explicit HeaterState(double drive);

    double drive() const { return drive_; }

    friend bool operator==(const HeaterState &, const HeaterState &) = default;

  private:
    double drive_ = 0.0;
};

/// Heater-tuned microring treated as a lossless drop/through splitter with a
/// Lorentzian drop response. The heater moves the resonance linearly.
struct RingSpec {
    double resonance_nm = 1550.0;
    double fwhm_nm = 0.1;
    double heater_shift_nm_per_unit = 1.0;
    double max_drop = 1.0;

    void validate() const;
    double resonance_at(HeaterState h) const { return resonance_nm + heater_shift_nm_per_unit * h.drive(); }
};

/// max_drop / (1 + (2 detuning / fwhm)^2).
double lorentzian_drop(const RingSpec &ring, double detuning_nm);

double drop_fraction(const RingSpec &ring, HeaterState h, double wavelength_nm);

inline double through_fraction(const RingSpec &ring, HeaterState h, double wavelength_nm) {
    return 1.0 - drop_fraction(ring, h, wavelength_nm);
}

struct DropRange {
    double min = 0.0;
    double max = 0.0;
};

/// Drop fractions reachable at `wavelength_nm` as the drive sweeps [0, 1].
DropRange reachable_drop_range(const RingSpec &ring, double wavelength_nm);

/// Closed-form Lorentzian inversion; of the two roots the smaller drive wins.
/// Targets outside the reachable range by more than `snap_tolerance` throw
/// std::domain_error naming the range.
HeaterState solve_heater_for_weight(
    const RingSpec &ring, double wavelength_nm, double target_theta, double snap_tolerance = kDropSnapTolerance);

}  // namespace mdm

#endif  // MDM_MRR_H
