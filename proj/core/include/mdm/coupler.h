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

#ifndef MDM_COUPLER_H
#define MDM_COUPLER_H

#include <cstddef>
#include <filesystem>
#include <istream>
#include <vector>

#include "mdm/linalg.h"

namespace mdm {

/// Asymmetric directional coupler between a single-mode waveguide and one
/// mode of a multi-mode bus.
///
/// Coupled-mode picture: the coupling coefficient is fixed by the matched beat
/// length (kappa = pi / beat_length_um) and the phase mismatch grows linearly
/// with width error (delta = detuning_slope_per_nm * (width - matched_width)).
/// Geometry defaults shipped in configs/ are placeholders, not measured data.
struct CouplerSpec {
    double width_nm = 0.0;
    double length_um = 0.0;
    std::size_t target_mode = 0;
    double matched_width_nm = 0.0;
    double beat_length_um = 0.0;
    /// Phase mismatch (1/um) per nm of width error.
    double detuning_slope_per_nm = 0.0;

    /// kappa in 1/um.
    double coupling_strength_per_um() const;
    /// delta in 1/um.
    double detuning_per_um() const;

    void validate() const;
};

/// kappa^2 / (kappa^2 + delta^2): the most power the coupler can ever transfer.
double peak_transfer(const CouplerSpec &spec);

/// Spatial period of the power exchange at the spec's width; equals
/// beat_length_um when matched and shortens as the mismatch grows.
double transfer_period_um(const CouplerSpec &spec);

/// Power coupling ratio alpha in [0, 1]:
///   alpha = F * (1 - cos(2 pi L / period)) / 2,
/// which is F(W) (1 - cos(2 pi L / beat)) / 2 with F = 1 at the matched width.
double coupling_ratio(const CouplerSpec &spec);

/// [[sqrt(1-a), j sqrt(a)], [j sqrt(a), sqrt(1-a)]].
TransferMatrix coupler_matrix(double alpha);

/// The 2x2 coupler acting on channels `first` and `second` of an n-channel
/// field, identity on the rest.
TransferMatrix coupler_matrix(double alpha, std::size_t dimension, std::size_t first, std::size_t second);

/// Tabulated effective index versus multi-mode width, one column per mode,
/// interpolated piecewise-linearly. No extrapolation.
class IndexMatchModel {
  public:
    /// `indices[mode][row]` pairs with `widths_nm[row]`.
    IndexMatchModel(std::vector<double> widths_nm, std::vector<std::vector<double>> indices);

    std::size_t modes() const { return indices_.size(); }
    const std::vector<double> &widths_nm() const { return widths_nm_; }
    const std::vector<double> &indices(std::size_t mode) const;
    double min_width_nm() const { return widths_nm_.front(); }
    double max_width_nm() const { return widths_nm_.back(); }

    double effective_index(std::size_t mode, double width_nm) const;

    /// Width at which `mode`'s effective index equals `reference_index`
    /// (e.g. the single-mode ring's index). Exact root of the interpolant.
    double matched_width(std::size_t mode, double reference_index) const;

  private:
    std::vector<double> widths_nm_;
    std::vector<std::vector<double>> indices_;
};

inline double effective_index(const IndexMatchModel &model, std::size_t mode, double width_nm) {
    return model.effective_index(mode, width_nm);
}

/// Columnar text: `width_nm neff_mode0 neff_mode1 ...`, '#' comments,
/// whitespace or comma separated.
IndexMatchModel load_index_model(std::istream &in);
IndexMatchModel load_index_model(const std::filesystem::path &path);

}  // namespace mdm

#endif  // MDM_COUPLER_H
