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

#ifndef MDM_LINALG_H
#define MDM_LINALG_H

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mdm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Per-entry tolerance on M†M - I used for every "lossless" check.
inline constexpr double kUnitaryTolerance = 1e-12;

/// Raised when two operands disagree on channel count.
class DimensionError : public std::invalid_argument {
  public:
    DimensionError(const std::string &what, std::size_t expected, std::size_t actual);
};

/// One (spatial mode, wavelength) slot on a bus.
struct Channel {
    std::size_t mode = 0;
    std::size_t wavelength = 0;

    friend bool operator==(const Channel &, const Channel &) = default;
};

/// Mode-major channel ordering: index = mode * wavelengths + wavelength.
///
/// Every vector over channels in this library uses this ordering; writers emit
/// `ordering_header()` so the convention travels with the data.
class ChannelLayout {
  public:
    ChannelLayout(std::size_t modes, std::size_t wavelengths);

    std::size_t modes() const { return modes_; }
    std::size_t wavelengths() const { return wavelengths_; }
    std::size_t size() const { return modes_ * wavelengths_; }

    std::size_t index(Channel c) const;
    Channel channel(std::size_t index) const;

    std::string ordering_header() const;

    friend bool operator==(const ChannelLayout &, const ChannelLayout &) = default;

  private:
    std::size_t modes_;
    std::size_t wavelengths_;
};

/// Throws if any channel is out of range for `layout` or appears twice.
void validate_channel_list(std::span<const Channel> channels, const ChannelLayout &layout);

/// Complex field amplitude per channel. |a|^2 is power relative to 1 W.
class ComplexField {
  public:
    explicit ComplexField(CVector amplitudes);

    std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }
    const CVector &amplitudes() const { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

    double total_power() const { return amplitudes_.squaredNorm(); }
    RVector powers() const { return amplitudes_.cwiseAbs2(); }

  private:
    CVector amplitudes_;
};

class TransferMatrix {
  public:
    /// `lossless` asks for a unitarity check at kUnitaryTolerance; construction
    /// fails if the entries do not pass it.
    explicit TransferMatrix(CMatrix entries, std::string label = {}, bool lossless = false);

    static TransferMatrix identity(std::size_t n, std::string label = "identity");

    std::size_t dimension() const { return static_cast<std::size_t>(entries_.rows()); }
    const CMatrix &entries() const { return entries_; }
    Complex operator()(std::size_t row, std::size_t col) const {
        return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }
    const std::string &label() const { return label_; }
    bool lossless() const { return lossless_; }

  private:
    CMatrix entries_;
    std::string label_;
    bool lossless_;
};

ComplexField apply(const TransferMatrix &m, const ComplexField &f);

/// Matrix product a * b (b acts first). The result is flagged lossless when
/// both factors are and the product still passes the unitarity check.
TransferMatrix compose(const TransferMatrix &a, const TransferMatrix &b);

/// max_ij |(M†M - I)_ij|; infinity for non-square input.
double unitarity_deviation(const CMatrix &m);

bool is_unitary(const CMatrix &m, double tol = kUnitaryTolerance);
bool is_unitary(const TransferMatrix &m, double tol = kUnitaryTolerance);

/// diag(e^{j phase}, 1): the differential-arm phase of a two-path interferometer.
TransferMatrix phase_matrix(double phase);

/// Elementwise |m_ij|^2.
RMatrix power_matrix(const CMatrix &m);

/// Ratio of largest to smallest singular value; infinity when singular.
double condition_number(const RMatrix &m);

}  // namespace mdm

#endif  // MDM_LINALG_H
