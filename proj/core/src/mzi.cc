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

#include "mdm/mzi.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

namespace mdm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Coarse scan resolution and range, in fringes across the window.
constexpr double kScanStepFringes = 0.25;
constexpr double kScanMinFringes = 0.25;
constexpr int kGoldenIterations = 100;

struct LinearFit {
    Eigen::Vector3d coeffs = Eigen::Vector3d::Zero();
    double rss = 0.0;
};

LinearFit fit_at(const RVector &u, const RVector &y, double omega) {
    Eigen::Index n = u.size();
    Eigen::MatrixXd x(n, 3);
    for (Eigen::Index k = 0; k < n; ++k) {
        x(k, 0) = 1.0;
        x(k, 1) = std::cos(omega * u(k));
        x(k, 2) = std::sin(omega * u(k));
    }
    LinearFit out;
    out.coeffs = x.colPivHouseholderQr().solve(y);
    out.rss = (x * out.coeffs - y).squaredNorm();
    return out;
}

// Residual of the three-term fit on a uniform omega grid. Trig values are
// advanced by complex rotation so each grid point costs O(n) multiplies.
double scan_best_omega(const RVector &u, const RVector &y, double omega_lo, double omega_step, std::size_t steps) {
    Eigen::Index n = u.size();
    std::vector<Complex> z(static_cast<std::size_t>(n));
    std::vector<Complex> rot(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        z[static_cast<std::size_t>(k)] = std::polar(1.0, omega_lo * u(k));
        rot[static_cast<std::size_t>(k)] = std::polar(1.0, omega_step * u(k));
    }
    double yy = y.squaredNorm();
    double best_rss = std::numeric_limits<double>::infinity();
    double best_omega = omega_lo;
    for (std::size_t s = 0; s < steps; ++s) {
        double sc = 0, ss = 0, scc = 0, sss = 0, scs = 0, sy = 0, syc = 0, sys = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
            auto &zk = z[static_cast<std::size_t>(k)];
            double c = zk.real();
            double si = zk.imag();
            double yk = y(k);
            sc += c;
            ss += si;
            scc += c * c;
            sss += si * si;
            scs += c * si;
            sy += yk;
            syc += yk * c;
            sys += yk * si;
            zk *= rot[static_cast<std::size_t>(k)];
        }
        Eigen::Matrix3d g;
        g << static_cast<double>(n), sc, ss, sc, scc, scs, ss, scs, sss;
        Eigen::Vector3d b(sy, syc, sys);
        Eigen::Vector3d beta = g.ldlt().solve(b);
        double rss = yy - b.dot(beta);
        if (std::isfinite(rss) && rss < best_rss) {
            best_rss = rss;
            best_omega = omega_lo + omega_step * static_cast<double>(s);
        }
    }
    return best_omega;
}

// Each fringe crosses the mean twice; noise only adds crossings, so half the
// crossing count (plus slack) bounds the fringe count from above.
double fringe_upper_bound(const RVector &y) {
    double mean = y.mean();
    std::size_t crossings = 0;
    for (Eigen::Index k = 1; k < y.size(); ++k) {
        if ((y(k - 1) - mean < 0.0) != (y(k) - mean < 0.0)) {
            ++crossings;
        }
    }
    return 1.5 * static_cast<double>(crossings) / 2.0 + 4.0;
}

double golden_refine(const RVector &u, const RVector &y, double lo, double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = fit_at(u, y, c).rss;
    double fd = fit_at(u, y, d).rss;
    for (int i = 0; i < kGoldenIterations && (b - a) > 1e-15 * std::abs(b); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = fit_at(u, y, c).rss;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = fit_at(u, y, d).rss;
        }
    }
    return (a + b) / 2.0;
}

}  // namespace

double WavelengthWindow::at(std::size_t i) const {
    if (num_points < 2) {
        return start_nm;
    }
    double t = static_cast<double>(i) / static_cast<double>(num_points - 1);
    return start_nm + t * (stop_nm - start_nm);
}

void MziSpec::validate() const {
    coupler.validate();
    if (!(delta_length_um > 0.0) || !std::isfinite(delta_length_um)) {
        throw std::invalid_argument(fmt::format("mzi: delta_length_um must be > 0 (got {})", delta_length_um));
    }
    if (!(group_index > 0.0) || !std::isfinite(group_index)) {
        throw std::invalid_argument(fmt::format("mzi: group_index must be > 0 (got {})", group_index));
    }
    if (window.num_points < 16) {
        throw std::invalid_argument(fmt::format("mzi: window needs at least 16 points (got {})", window.num_points));
    }
    if (!(window.start_nm > 0.0) || !(window.start_nm < window.stop_nm) || !std::isfinite(window.stop_nm)) {
        throw std::invalid_argument(
            fmt::format("mzi: window must satisfy 0 < start < stop (got {} .. {})", window.start_nm, window.stop_nm));
    }
    if (forced_alpha && !(*forced_alpha >= 0.0 && *forced_alpha <= 1.0)) {
        throw std::domain_error(fmt::format("mzi: forced_alpha must lie in [0, 1] (got {})", *forced_alpha));
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw std::invalid_argument(fmt::format("mzi: noise_sigma must be >= 0 (got {})", noise_sigma));
    }
}

double MziSpec::alpha() const {
    return forced_alpha ? *forced_alpha : coupling_ratio(coupler);
}

Spectrum::Spectrum(std::vector<SpectrumPoint> points, bool measured) : points_(std::move(points)), measured_(measured) {
    if (points_.size() < 2) {
        throw std::invalid_argument("spectrum: need at least two points");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        auto &p = points_[i];
        if (!std::isfinite(p.wavelength_nm) || !std::isfinite(p.transmission)) {
            throw std::invalid_argument(fmt::format("spectrum: non-finite sample at index {}", i));
        }
        if (i > 0 && p.wavelength_nm <= points_[i - 1].wavelength_nm) {
            throw std::invalid_argument(fmt::format("spectrum: wavelengths not strictly increasing at index {}", i));
        }
        if (!measured_) {
            if (p.transmission < -1e-12 || p.transmission > 1.0 + 1e-12) {
                throw std::domain_error(
                    fmt::format("spectrum: transmission {} outside [0, 1] at index {}", p.transmission, i));
            }
            p.transmission = std::clamp(p.transmission, 0.0, 1.0);
        }
    }
}

double mzi_transmission(double alpha, double phase) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error(fmt::format("mzi_transmission: alpha must lie in [0, 1] (got {})", alpha));
    }
    double beta = 1.0 - alpha;
    return alpha * alpha + beta * beta - 2.0 * alpha * beta * std::cos(phase);
}

TransferMatrix mzi_matrix(double alpha, double phase) {
    auto c = coupler_matrix(alpha);
    return compose(c, compose(phase_matrix(phase), c));
}

double mzi_phase(double wavelength_nm, double group_index, double delta_length_um) {
    return kTwoPi * group_index * (delta_length_um * 1e3) / wavelength_nm;
}

Spectrum sweep(const MziSpec &spec, Rng *rng) {
    spec.validate();
    bool noisy = spec.noise_sigma > 0.0;
    if (noisy && rng == nullptr) {
        throw std::invalid_argument("mzi sweep: noise_sigma > 0 requires a random generator");
    }
    // Narrowband: alpha is wavelength independent inside one window.
    double alpha = spec.alpha();
    std::vector<SpectrumPoint> pts(spec.window.num_points);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double lambda = spec.window.at(i);
        pts[i].wavelength_nm = lambda;
        pts[i].transmission = mzi_transmission(alpha, mzi_phase(lambda, spec.group_index, spec.delta_length_um));
    }
    if (noisy) {
        for (auto &p : pts) {
            p.transmission += gaussian(*rng, spec.noise_sigma);
        }
    }
    return Spectrum(std::move(pts), noisy);
}

FringeFit fit_fringes(const Spectrum &s) {
    auto n = static_cast<Eigen::Index>(s.size());
    RVector u(n);
    RVector y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        u(k) = 1.0 / s[static_cast<std::size_t>(k)].wavelength_nm;
        y(k) = s[static_cast<std::size_t>(k)].transmission;
    }
    u.array() -= u.mean();

    FringeFit out;
    if (y.maxCoeff() - y.minCoeff() < kTransmissionFloor) {
        out.offset = y.mean();
        out.flat = true;
        return out;
    }

    double span = u.maxCoeff() - u.minCoeff();
    double max_fringes = std::min(std::max(2.0, static_cast<double>(n - 1) / 4.0), fringe_upper_bound(y));
    double omega_step = kTwoPi * kScanStepFringes / span;
    double omega_lo = kTwoPi * kScanMinFringes / span;
    auto steps = static_cast<std::size_t>((max_fringes - kScanMinFringes) / kScanStepFringes) + 1;

    double coarse = scan_best_omega(u, y, omega_lo, omega_step, steps);
    double omega = golden_refine(u, y, std::max(omega_lo * 0.5, coarse - omega_step), coarse + omega_step);
    auto fit = fit_at(u, y, omega);

    double a = fit.coeffs(1);
    double b = fit.coeffs(2);
    out.offset = fit.coeffs(0);
    out.amplitude = std::hypot(a, b);
    out.angular_frequency = omega;
    out.phase = std::atan2(b, -a);
    out.fringes = omega * span / kTwoPi;
    out.rms_residual = std::sqrt(fit.rss / static_cast<double>(n));
    return out;
}

ExtinctionRatio extinction_ratio(const Spectrum &s) {
    ExtinctionRatio er;
    er.fit = fit_fringes(s);
    er.max_transmission = er.fit.max_transmission();
    er.min_transmission = er.fit.min_transmission();
    er.cosine_amplitude = er.fit.amplitude;
    if (er.fit.flat) {
        er.db = 0.0;
        return er;
    }
    if (er.fit.fringes < 1.0) {
        throw InsufficientFringes(
            fmt::format("insufficient fringes: window holds {:.3f} fringes, need at least 1", er.fit.fringes));
    }
    double min_t = er.min_transmission;
    if (min_t < kTransmissionFloor) {
        min_t = kTransmissionFloor;
        er.clamped = true;
    }
    er.db = 10.0 * std::log10(er.max_transmission / min_t);
    if (er.db >= kExtinctionCeilingDb) {
        er.db = kExtinctionCeilingDb;
        er.clamped = true;
    }
    if (er.clamped) {
        spdlog::warn("extinction ratio clamped at {:.1f} dB (fitted minimum {:.3e})", er.db, er.min_transmission);
    }
    return er;
}

AlphaCandidates recover_alpha(double er_db) {
    if (std::isnan(er_db) || er_db < 0.0) {
        throw std::domain_error(fmt::format("recover_alpha: extinction ratio must be >= 0 dB (got {})", er_db));
    }
    if (er_db >= kExtinctionCeilingDb) {
        return {0.5, 0.5};
    }
    double residual = std::pow(10.0, -er_db / 20.0);
    double low = (1.0 - residual) / 2.0;
    return {low, 1.0 - low};
}

double disambiguate(AlphaCandidates candidates, double predicted_alpha) {
    double d_low = std::abs(candidates.low - predicted_alpha);
    double d_high = std::abs(candidates.high - predicted_alpha);
    if (d_low < d_high) {
        return candidates.low;
    }
    if (d_high < d_low) {
        return candidates.high;
    }
    if (candidates.low != candidates.high) {
        spdlog::warn(
            "alpha candidates ({}, {}) equidistant from prediction {}; taking the larger",
            candidates.low,
            candidates.high,
            predicted_alpha);
    }
    return std::max(candidates.low, candidates.high);
}

double disambiguate(AlphaCandidates candidates, const CouplerSpec &spec) {
    return disambiguate(candidates, coupling_ratio(spec));
}

void write_spectrum(std::ostream &out, const Spectrum &s, const MziSpec &spec) {
    fmt::print(out, "# mzi spectrum\n");
    fmt::print(
        out,
        "# coupler: width_nm={} length_um={} target_mode={} matched_width_nm={} beat_length_um={} "
        "detuning_slope_per_nm={}\n",
        spec.coupler.width_nm,
        spec.coupler.length_um,
        spec.coupler.target_mode,
        spec.coupler.matched_width_nm,
        spec.coupler.beat_length_um,
        spec.coupler.detuning_slope_per_nm);
    fmt::print(
        out,
        "# alpha={} forced={} delta_length_um={} group_index={} noise_sigma={}\n",
        spec.alpha(),
        spec.forced_alpha.has_value(),
        spec.delta_length_um,
        spec.group_index,
        spec.noise_sigma);
    fmt::print(out, "# columns: wavelength_nm transmission\n");
    for (const auto &p : s.points()) {
        fmt::print(out, "{:.17g} {:.17g}\n", p.wavelength_nm, p.transmission);
    }
}

}  // namespace mdm
