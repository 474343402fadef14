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

#include "mdm/random.h"

#include <cmath>

namespace mdm {

CMatrix haar_unitary(std::size_t n, Rng &rng) {
    auto k = static_cast<Eigen::Index>(n);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
    CMatrix z(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index r = 0; r < k; ++r) {
            double re = normal(rng);
            double im = normal(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(k, k);
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < k; ++i) {
        double mag = std::abs(r(i, i));
        Complex phase = mag > 0.0 ? r(i, i) / mag : Complex(1.0, 0.0);
        q.col(i) *= phase;
    }
    return q;
}

double gaussian(Rng &rng, double sigma) {
    if (sigma == 0.0) {
        return 0.0;
    }
    std::normal_distribution<double> normal(0.0, sigma);
    return normal(rng);
}

}  // namespace mdm
