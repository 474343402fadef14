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

#include "mdm/mrr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace mdm {

HeaterState::HeaterState(double drive) {
    if (std::isnan(drive)) {
        throw std::invalid_argument("heater drive is NaN");
    }
    drive_ = std::clamp(drive, 0.0, 1.0);
}

void RingSpec::validate() const {
    if (!std::isfinite(resonance_nm) || !std::isfinite(fwhm_nm) || !std::isfinite(heater_shift_nm_per_unit) ||
        !std::isfinite(max_drop)) {
        throw std::invalid_argument("ring: non-finite parameter");
    }
    if (fwhm_nm <= 0.0) {
        throw std::invalid_argument(fmt::format("ring: fwhm_nm must be > 0 (got {})", fwhm_nm));
    }
    if (!(max_drop > 0.0 && max_drop <= 1.0)) {
        throw std::invalid_argument(fmt::format("ring: max_drop must lie in (0, 1] (got {})", max_drop));
    }
    if (heater_shift_nm_per_unit == 0.0) {
        throw std::invalid_argument("ring: heater_shift_nm_per_unit must be nonzero");
    }
}

double lorentzian_drop(const RingSpec &ring, double detuning_nm) {
    double x = 2.0 * detuning_nm / ring.fwhm_nm;
    return ring.max_drop / (1.0 + x * x);
}

double drop_fraction(const RingSpec &ring, HeaterState h, double wavelength_nm) {
    // Subtract the nominal resonance first: both are ~1.5e3 nm, so that step is exact.
    return lorentzian_drop(ring, (wavelength_nm - ring.resonance_nm) - ring.heater_shift_nm_per_unit * h.drive());
}

DropRange reachable_drop_range(const RingSpec &ring, double wavelength_nm) {
    ring.validate();
    double offset = wavelength_nm - ring.resonance_nm;
    double s = ring.heater_shift_nm_per_unit;
    double closest = std::clamp(offset / s, 0.0, 1.0);
    double far0 = std::abs(offset);
    double far1 = std::abs(offset - s);
    return DropRange{
        lorentzian_drop(ring, std::max(far0, far1)),
        lorentzian_drop(ring, offset - s * closest),
    };
}

HeaterState solve_heater_for_weight(
    const RingSpec &ring, double wavelength_nm, double target_theta, double snap_tolerance) {
    auto range = reachable_drop_range(ring, wavelength_nm);
    if (!std::isfinite(target_theta) || target_theta < range.min - snap_tolerance ||
        target_theta > range.max + snap_tolerance) {
        throw std::domain_error(fmt::format(
            "drop fraction {} unreachable at {} nm; reachable range [{:.6g}, {:.6g}]",
            target_theta,
            wavelength_nm,
            range.min,
            range.max));
    }
    double offset = wavelength_nm - ring.resonance_nm;
    double s = ring.heater_shift_nm_per_unit;
    if (target_theta >= range.max) {
        return HeaterState(std::clamp(offset / s, 0.0, 1.0));
    }
    if (target_theta <= range.min) {
        return HeaterState(std::abs(offset) >= std::abs(offset - s) ? 0.0 : 1.0);
    }
    double half_width = ring.fwhm_nm / 2.0 * std::sqrt(ring.max_drop / target_theta - 1.0);
    double best = std::numeric_limits<double>::infinity();
    for (double root : {(offset - half_width) / s, (offset + half_width) / s}) {
        if (root >= -1e-12 && root <= 1.0 + 1e-12) {
            best = std::min(best, std::clamp(root, 0.0, 1.0));
        }
    }
    if (!std::isfinite(best)) {
        throw std::logic_error("solve_heater_for_weight: no root inside drive range despite reachable target");
    }
    return HeaterState(best);
}

}  // namespace mdm
