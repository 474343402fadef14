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

#include "mdm/linalg.h"

#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

namespace mdm {

DimensionError::DimensionError(const std::string &what, std::size_t expected, std::size_t actual)
    : std::invalid_argument(fmt::format("{}: dimension mismatch (expected {}, got {})", what, expected, actual)) {
}

ChannelLayout::ChannelLayout(std::size_t modes, std::size_t wavelengths) : modes_(modes), wavelengths_(wavelengths) {
    if (modes == 0 || wavelengths == 0) {
        throw std::invalid_argument(
            fmt::format("channel layout needs at least one mode and one wavelength (got {}x{})", modes, wavelengths));
    }
}

std::size_t ChannelLayout::index(Channel c) const {
    if (c.mode >= modes_ || c.wavelength >= wavelengths_) {
        throw std::out_of_range(fmt::format(
            "channel (mode {}, wavelength {}) outside layout {}x{}", c.mode, c.wavelength, modes_, wavelengths_));
    }
    return c.mode * wavelengths_ + c.wavelength;
}

Channel ChannelLayout::channel(std::size_t index) const {
    if (index >= size()) {
        throw std::out_of_range(fmt::format("channel index {} outside layout of size {}", index, size()));
    }
    return Channel{index / wavelengths_, index % wavelengths_};
}

std::string ChannelLayout::ordering_header() const {
    return fmt::format(
        "# channel ordering: mode-major, index = mode * {} + wavelength ({} modes x {} wavelengths)",
        wavelengths_,
        modes_,
        wavelengths_);
}

void validate_channel_list(std::span<const Channel> channels, const ChannelLayout &layout) {
    std::vector<bool> seen(layout.size(), false);
    for (const auto &c : channels) {
        auto k = layout.index(c);
        if (seen[k]) {
            throw std::invalid_argument(
                fmt::format("duplicate channel (mode {}, wavelength {}) in channel list", c.mode, c.wavelength));
        }
        seen[k] = true;
    }
}

ComplexField::ComplexField(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (!amplitudes_.allFinite()) {
        throw std::invalid_argument("complex field contains a non-finite amplitude");
    }
}

TransferMatrix::TransferMatrix(CMatrix entries, std::string label, bool lossless)
    : entries_(std::move(entries)), label_(std::move(label)), lossless_(lossless) {
    if (entries_.rows() != entries_.cols()) {
        throw DimensionError(
            fmt::format("transfer matrix '{}' must be square", label_),
            static_cast<std::size_t>(entries_.rows()),
            static_cast<std::size_t>(entries_.cols()));
    }
    if (!entries_.allFinite()) {
        throw std::invalid_argument(fmt::format("transfer matrix '{}' has non-finite entries", label_));
    }
    if (lossless_ && !is_unitary(entries_)) {
        throw std::invalid_argument(fmt::format(
            "transfer matrix '{}' flagged lossless but M†M deviates from I by {:.3e}",
            label_,
            unitarity_deviation(entries_)));
    }
}

TransferMatrix TransferMatrix::identity(std::size_t n, std::string label) {
    auto k = static_cast<Eigen::Index>(n);
    return TransferMatrix(CMatrix::Identity(k, k), std::move(label), true);
}

ComplexField apply(const TransferMatrix &m, const ComplexField &f) {
    if (m.dimension() != f.size()) {
        throw DimensionError(fmt::format("apply '{}' to field", m.label()), m.dimension(), f.size());
    }
    return ComplexField(m.entries() * f.amplitudes());
}

TransferMatrix compose(const TransferMatrix &a, const TransferMatrix &b) {
    if (a.dimension() != b.dimension()) {
        throw DimensionError(fmt::format("compose '{}' * '{}'", a.label(), b.label()), a.dimension(), b.dimension());
    }
    CMatrix product = a.entries() * b.entries();
    bool lossless = a.lossless() && b.lossless() && is_unitary(product);
    return TransferMatrix(std::move(product), a.label() + "*" + b.label(), lossless);
}

double unitarity_deviation(const CMatrix &m) {
    if (m.rows() != m.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    CMatrix gram = m.adjoint() * m;
    gram -= CMatrix::Identity(m.rows(), m.cols());
    return gram.cwiseAbs().maxCoeff();
}

bool is_unitary(const CMatrix &m, double tol) {
    return unitarity_deviation(m) <= tol;
}

bool is_unitary(const TransferMatrix &m, double tol) {
    return is_unitary(m.entries(), tol);
}

TransferMatrix phase_matrix(double phase) {
    CMatrix d = CMatrix::Identity(2, 2);
    d(0, 0) = std::polar(1.0, phase);
    return TransferMatrix(std::move(d), "phase", true);
}

RMatrix power_matrix(const CMatrix &m) {
    return m.cwiseAbs2();
}

double condition_number(const RMatrix &m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::JacobiSVD<RMatrix> svd(m);
    const auto &s = svd.singularValues();
    double smallest = s(s.size() - 1);
    if (smallest <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / smallest;
}

}  // namespace mdm
