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

#include "mdm/coupler.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace mdm {

namespace {

void require_finite(double v, const char *name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(fmt::format("coupler: {} is not finite", name));
    }
}

}  // namespace

double CouplerSpec::coupling_strength_per_um() const {
    return std::numbers::pi / beat_length_um;
}

double CouplerSpec::detuning_per_um() const {
    return detuning_slope_per_nm * (width_nm - matched_width_nm);
}

void CouplerSpec::validate() const {
    require_finite(width_nm, "width_nm");
    require_finite(length_um, "length_um");
    require_finite(matched_width_nm, "matched_width_nm");
    require_finite(beat_length_um, "beat_length_um");
    require_finite(detuning_slope_per_nm, "detuning_slope_per_nm");
    if (width_nm <= 0.0) {
        throw std::invalid_argument(fmt::format("coupler: width_nm must be > 0 (got {})", width_nm));
    }
    if (length_um <= 0.0) {
        throw std::invalid_argument(fmt::format("coupler: length_um must be > 0 (got {})", length_um));
    }
    if (beat_length_um <= 0.0) {
        throw std::invalid_argument(fmt::format("coupler: beat_length_um must be > 0 (got {})", beat_length_um));
    }
    if (matched_width_nm <= 0.0) {
        throw std::invalid_argument(fmt::format("coupler: matched_width_nm must be > 0 (got {})", matched_width_nm));
    }
}

double peak_transfer(const CouplerSpec &spec) {
    spec.validate();
    double kappa = spec.coupling_strength_per_um();
    double delta = spec.detuning_per_um();
    return kappa * kappa / (kappa * kappa + delta * delta);
}

double transfer_period_um(const CouplerSpec &spec) {
    spec.validate();
    double kappa = spec.coupling_strength_per_um();
    double delta = spec.detuning_per_um();
    return std::numbers::pi / std::hypot(kappa, delta);
}

double coupling_ratio(const CouplerSpec &spec) {
    double f = peak_transfer(spec);
    double period = transfer_period_um(spec);
    double alpha = f * (1.0 - std::cos(2.0 * std::numbers::pi * spec.length_um / period)) / 2.0;
    return std::clamp(alpha, 0.0, 1.0);
}

TransferMatrix coupler_matrix(double alpha) {
    return coupler_matrix(alpha, 2, 0, 1);
}

TransferMatrix coupler_matrix(double alpha, std::size_t dimension, std::size_t first, std::size_t second) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error(fmt::format("coupler_matrix: alpha must lie in [0, 1] (got {})", alpha));
    }
    if (first >= dimension || second >= dimension || first == second) {
        throw std::invalid_argument(
            fmt::format("coupler_matrix: channels ({}, {}) invalid for dimension {}", first, second, dimension));
    }
    auto n = static_cast<Eigen::Index>(dimension);
    auto a = static_cast<Eigen::Index>(first);
    auto b = static_cast<Eigen::Index>(second);
    CMatrix m = CMatrix::Identity(n, n);
    Complex through(std::sqrt(1.0 - alpha), 0.0);
    Complex cross(0.0, std::sqrt(alpha));
    m(a, a) = through;
    m(b, b) = through;
    m(a, b) = cross;
    m(b, a) = cross;
    return TransferMatrix(std::move(m), fmt::format("coupler(alpha={})", alpha), true);
}

IndexMatchModel::IndexMatchModel(std::vector<double> widths_nm, std::vector<std::vector<double>> indices)
    : widths_nm_(std::move(widths_nm)), indices_(std::move(indices)) {
    if (widths_nm_.size() < 2) {
        throw std::invalid_argument("index model: need at least two width samples");
    }
    if (indices_.empty()) {
        throw std::invalid_argument("index model: need at least one mode column");
    }
    for (std::size_t i = 0; i < widths_nm_.size(); ++i) {
        if (!std::isfinite(widths_nm_[i]) || (i > 0 && widths_nm_[i] <= widths_nm_[i - 1])) {
            throw std::invalid_argument(
                fmt::format("index model: widths must be finite and strictly increasing (row {})", i));
        }
    }
    for (std::size_t m = 0; m < indices_.size(); ++m) {
        const auto &col = indices_[m];
        if (col.size() != widths_nm_.size()) {
            throw DimensionError(fmt::format("index model: mode {} column", m), widths_nm_.size(), col.size());
        }
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (!std::isfinite(col[i]) || (i > 0 && col[i] <= col[i - 1])) {
                throw std::invalid_argument(fmt::format(
                    "index model: mode {} effective index must be finite and strictly increasing with width (row {})",
                    m,
                    i));
            }
        }
    }
}

const std::vector<double> &IndexMatchModel::indices(std::size_t mode) const {
    if (mode >= indices_.size()) {
        throw std::out_of_range(fmt::format("index model: mode {} not tabulated ({} modes)", mode, indices_.size()));
    }
    return indices_[mode];
}

double IndexMatchModel::effective_index(std::size_t mode, double width_nm) const {
    const auto &col = indices(mode);
    if (!(width_nm >= min_width_nm() && width_nm <= max_width_nm())) {
        throw std::out_of_range(fmt::format(
            "index model: width {} nm outside table range [{}, {}] nm", width_nm, min_width_nm(), max_width_nm()));
    }
    auto hi = std::upper_bound(widths_nm_.begin(), widths_nm_.end(), width_nm);
    if (hi == widths_nm_.end()) {
        return col.back();
    }
    auto k = static_cast<std::size_t>(hi - widths_nm_.begin());
    double t = (width_nm - widths_nm_[k - 1]) / (widths_nm_[k] - widths_nm_[k - 1]);
    return col[k - 1] + t * (col[k] - col[k - 1]);
}

double IndexMatchModel::matched_width(std::size_t mode, double reference_index) const {
    const auto &col = indices(mode);
    if (!(reference_index >= col.front() && reference_index <= col.back())) {
        throw std::out_of_range(fmt::format(
            "index model: reference index {} never reached by mode {} (range [{}, {}])",
            reference_index,
            mode,
            col.front(),
            col.back()));
    }
    auto hi = std::lower_bound(col.begin(), col.end(), reference_index);
    auto k = static_cast<std::size_t>(hi - col.begin());
    if (k == 0) {
        return widths_nm_.front();
    }
    double t = (reference_index - col[k - 1]) / (col[k] - col[k - 1]);
    return widths_nm_[k - 1] + t * (widths_nm_[k] - widths_nm_[k - 1]);
}

IndexMatchModel load_index_model(std::istream &in) {
    std::vector<double> widths;
    std::vector<std::vector<double>> columns;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(token, &used));
                if (used != token.size()) {
                    throw std::invalid_argument(token);
                }
            } catch (const std::exception &) {
                throw std::invalid_argument(fmt::format("index table line {}: '{}' is not a number", line_no, token));
            }
        }
        if (row.empty()) {
            continue;
        }
        if (row.size() < 2) {
            throw std::invalid_argument(
                fmt::format("index table line {}: need width and at least one effective index", line_no));
        }
        if (columns.empty()) {
            columns.resize(row.size() - 1);
        } else if (row.size() - 1 != columns.size()) {
            throw std::invalid_argument(fmt::format(
                "index table line {}: expected {} index columns, found {}", line_no, columns.size(), row.size() - 1));
        }
        widths.push_back(row[0]);
        for (std::size_t m = 0; m + 1 < row.size(); ++m) {
            columns[m].push_back(row[m + 1]);
        }
    }
    return IndexMatchModel(std::move(widths), std::move(columns));
}

IndexMatchModel load_index_model(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open index table '{}'", path.string()));
    }
    return load_index_model(in);
}

}  // namespace mdm
