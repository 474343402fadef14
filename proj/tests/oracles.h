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

// Independent reference computations used only by the tests. Nothing here
// calls into the library path it is used to check.

#ifndef MDM_TESTS_ORACLES_H
#define MDM_TESTS_ORACLES_H

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace mdm::oracle {

using cplx = std::complex<double>;
using CDense = std::vector<std::vector<cplx>>;

/// Unitary by classical Gram-Schmidt on random complex columns.
inline CDense gram_schmidt_unitary(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CDense cols(n, std::vector<cplx>(n));
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            cols[c][r] = cplx(g(rng), g(rng));
        }
        for (std::size_t k = 0; k < c; ++k) {
            cplx dot = 0;
            for (std::size_t r = 0; r < n; ++r) {
                dot += std::conj(cols[k][r]) * cols[c][r];
            }
            for (std::size_t r = 0; r < n; ++r) {
                cols[c][r] -= dot * cols[k][r];
            }
        }
        double norm = 0;
        for (std::size_t r = 0; r < n; ++r) {
            norm += std::norm(cols[c][r]);
        }
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < n; ++r) {
            cols[c][r] /= norm;
        }
    }
    // rows[r][c]
    CDense m(n, std::vector<cplx>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            m[r][c] = cols[c][r];
        }
    }
    return m;
}

/// E_out / E_in of the two-coupler interferometer, written out by hand:
/// (1 - a) e^{j phi} + (j sqrt a)(j sqrt a).
inline double mzi_by_hand(double alpha, double phase) {
    cplx through = std::sqrt(1.0 - alpha);
    cplx cross = cplx(0.0, std::sqrt(alpha));
    cplx e = through * std::exp(cplx(0.0, phase)) * through + cross * cross;
    return std::norm(e);
}

/// Bisection root of f on [lo, hi], f(lo) and f(hi) of opposite sign.
inline double bisect(const std::function<double(double)> &f, double lo, double hi, double tol) {
    double flo = f(lo);
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Local minima positions of a sampled curve, refined by a parabola through
/// the three samples around each discrete minimum.
inline std::vector<double> local_minima(const std::vector<double> &x, const std::vector<double> &y) {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] < y[i - 1] && y[i] <= y[i + 1]) {
            double denom = y[i - 1] - 2 * y[i] + y[i + 1];
            double shift = denom != 0 ? 0.5 * (y[i - 1] - y[i + 1]) / denom : 0.0;
            out.push_back(x[i] + shift * (x[i + 1] - x[i]));
        }
    }
    return out;
}

/// Power left in the second guide after integrating the coupled-mode
/// equations da/dz = j d a - j k b, db/dz = -j k a - j d b from (1, 0) over
/// `length` with classical RK4.
inline double coupled_mode_transfer(double kappa, double delta, double length, int steps = 20000) {
    const cplx j(0.0, 1.0);
    cplx a = 1.0, b = 0.0;
    double h = length / steps;
    auto fa = [&](cplx x, cplx y) { return j * delta * x - j * kappa * y; };
    auto fb = [&](cplx x, cplx y) { return -j * kappa * x - j * delta * y; };
    for (int s = 0; s < steps; ++s) {
        cplx ka1 = fa(a, b), kb1 = fb(a, b);
        cplx ka2 = fa(a + 0.5 * h * ka1, b + 0.5 * h * kb1), kb2 = fb(a + 0.5 * h * ka1, b + 0.5 * h * kb1);
        cplx ka3 = fa(a + 0.5 * h * ka2, b + 0.5 * h * kb2), kb3 = fb(a + 0.5 * h * ka2, b + 0.5 * h * kb2);
        cplx ka4 = fa(a + h * ka3, b + h * kb3), kb4 = fb(a + h * ka3, b + h * kb3);
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    }
    return std::norm(b);
}

inline double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

}  // namespace mdm::oracle

#endif  // MDM_TESTS_ORACLES_H
