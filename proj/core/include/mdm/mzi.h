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

#ifndef MDM_MZI_H
#define MDM_MZI_H

#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mdm/coupler.h"
#include "mdm/linalg.h"
#include "mdm/random.h"

namespace mdm {

inline constexpr double kExtinctionCeilingDb = 120.0;
inline constexpr double kTransmissionFloor = 1e-12;

struct WavelengthWindow {
    double start_nm = 0.0;
    double stop_nm = 0.0;
    std::size_t num_points = 0;

    double at(std::size_t i) const;
};

/// Asymmetric Mach-Zehnder test structure: two identical couplers around a
/// path-length difference.
struct MziSpec {
    CouplerSpec coupler;
    double delta_length_um = 0.0;
    double group_index = 0.0;
    WavelengthWindow window;
    /// Overrides the coupler model's alpha for every sweep point.
    std::optional<double> forced_alpha;
    /// Additive Gaussian noise on each transmission sample.
    double noise_sigma = 0.0;

    void validate() const;
    double alpha() const;
};

struct SpectrumPoint {
    double wavelength_nm = 0.0;
    double transmission = 0.0;
};

/// Transmission versus wavelength. Model spectra stay in [0, 1]; spectra
/// with additive measurement noise are marked `measured` and only need to be
/// finite.
class Spectrum {
  public:
    explicit Spectrum(std::vector<SpectrumPoint> points, bool measured = false);

    const std::vector<SpectrumPoint> &points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool measured() const { return measured_; }
    const SpectrumPoint &operator[](std::size_t i) const { return points_[i]; }

  private:
    std::vector<SpectrumPoint> points_;
    bool measured_;
};

class InsufficientFringes : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// |E_out/E_in|^2 = alpha^2 + (1-alpha)^2 - 2 alpha (1-alpha) cos(phase).
double mzi_transmission(double alpha, double phase);

/// coupler(alpha) * phase(phase) * coupler(alpha). Entry (0,0) maps E_in to E_out.
TransferMatrix mzi_matrix(double alpha, double phase);

/// k * dL with k = 2 pi n / lambda.
double mzi_phase(double wavelength_nm, double group_index, double delta_length_um);

/// Noise draws need `rng` whenever spec.noise_sigma > 0.
Spectrum sweep(const MziSpec &spec, Rng *rng = nullptr);

/// Least-squares fit T = offset - amplitude * cos(omega * u + phase) with
/// u = 1/lambda - mean(1/lambda). omega is found by a grid scan over fringe
/// counts followed by golden-section refinement.
struct FringeFit {
    double offset = 0.0;
    double amplitude = 0.0;
    /// rad per (1/nm).
    double angular_frequency = 0.0;
    double phase = 0.0;
    double fringes = 0.0;
    double rms_residual = 0.0;
    bool flat = false;

    double max_transmission() const { return offset + amplitude; }
    double min_transmission() const { return offset - amplitude; }
};

FringeFit fit_fringes(const Spectrum &s);

struct ExtinctionRatio {
    double db = 0.0;
    /// Set when the fitted minimum hit kTransmissionFloor or the result hit
    /// kExtinctionCeilingDb.
    bool clamped = false;
    double max_transmission = 0.0;
    double min_transmission = 0.0;
    /// Raw fitted cosine amplitude; 2 alpha (1 - alpha) for ideal data.
    double cosine_amplitude = 0.0;
    FringeFit fit;
};

/// 10 log10(maxT / minT) from the fitted cosine extrema. Throws
/// InsufficientFringes when the window holds less than one fringe.
ExtinctionRatio extinction_ratio(const Spectrum &s);

struct AlphaCandidates {
    double low = 0.0;
    double high = 0.0;
};

/// Inverts ER = -20 log10|1 - 2 alpha|. Values at or above the ceiling
/// (including infinity) return (0.5, 0.5).
AlphaCandidates recover_alpha(double er_db);

/// Picks the candidate closer to `predicted_alpha`; ties go to the larger.
double disambiguate(AlphaCandidates candidates, double predicted_alpha);
double disambiguate(AlphaCandidates candidates, const CouplerSpec &spec);

/// Two columns (wavelength_nm, transmission) under a '#' header describing `spec`.
void write_spectrum(std::ostream &out, const Spectrum &s, const MziSpec &spec);

}  // namespace mdm

#endif  // MDM_MZI_H
