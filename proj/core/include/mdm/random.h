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

#ifndef MDM_RANDOM_H
#define MDM_RANDOM_H

#include <cstddef>
#include <cstdint>
#include <random>

#include "mdm/linalg.h"

namespace mdm {

/// Every randomized construction (mixing matrices, probe noise, spectrum noise)
/// draws from a std::mt19937_64 seeded directly with the run's 64-bit seed.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
/// phases of R's diagonal folded back into Q.
CMatrix haar_unitary(std::size_t n, Rng &rng);

/// Zero-mean Gaussian sample; sigma == 0 returns 0 without touching the rng.
double gaussian(Rng &rng, double sigma);

}  // namespace mdm

#endif  // MDM_RANDOM_H
