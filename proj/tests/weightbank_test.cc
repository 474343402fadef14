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

#include "mdm/weightbank.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"

namespace mdm {
namespace {

std::vector<double> to_std(const RVector &v) {
    return {v.data(), v.data() + v.size()};
}

RVector uniform_vector(std::size_t n, double lo, double hi, Rng &rng) {
    std::uniform_real_distribution<double> u(lo, hi);
    RVector v(static_cast<Eigen::Index>(n));
    for (auto &x : v) {
        x = u(rng);
    }
    return v;
}

TEST(WeightVectorTest, RangeChecked) {
    RVector ok(3);
    ok << -1.0, 0.0, 1.0;
    EXPECT_NO_THROW(WeightVector{ok});
    RVector bad(1);
    bad << 1.01;
    EXPECT_THROW(WeightVector{bad}, std::domain_error);
    auto sel = WeightVector::select(3, 1);
    EXPECT_EQ(sel[1], 1.0);
    EXPECT_EQ(sel[0], 0.0);
}

TEST(ChannelPowerVectorTest, NonNegative) {
    RVector bad(2);
    bad << 0.5, -1e-3;
    EXPECT_THROW(ChannelPowerVector{bad}, std::domain_error);
    EXPECT_EQ(ChannelPowerVector::unit(4, 2).total(), 1.0);
}

TEST(MixingMatrixTest, PowerIsDoublyStochastic) {
    Rng rng(41);
    for (std::size_t n : {2u, 3u, 4u, 8u}) {
        for (int t = 0; t < 20; ++t) {
            auto m = MixingMatrix::random(n, rng);
            EXPECT_TRUE(is_unitary(m.amplitude(), 1e-12));
            EXPECT_LE(stochastic_residual(m.power()), 1e-10);
        }
    }
    EXPECT_LE(stochastic_residual(MixingMatrix::reversal(5).power()), 0.0);
}

TEST(MixingMatrixTest, RotationPower) {
    double phi = std::acos(std::sqrt(0.8));
    auto m = MixingMatrix::rotation(phi);
    EXPECT_NEAR(m.power()(0, 0), 0.8, 1e-15);
    EXPECT_NEAR(m.power()(0, 1), 0.2, 1e-15);
    EXPECT_NEAR(m.power()(1, 0), 0.2, 1e-15);
}

TEST(MixingMatrixTest, RejectsNonUnitary) {
    CMatrix m = CMatrix::Identity(2, 2) * 0.9;
    EXPECT_THROW(MixingMatrix{m}, std::invalid_argument);
    EXPECT_THROW(MixingMatrix{CMatrix::Identity(2, 3)}, DimensionError);
}

TEST(BankOutputTest, AllDropGivesTotalPower) {
    auto bank = make_bank(3, {1550.0});
    EXPECT_TRUE(drop_fractions(bank).isOnes(0.0));
    ChannelPowerVector p(RVector::Ones(3));
    EXPECT_DOUBLE_EQ(bank_output(bank, p).y, 3.0);
}

TEST(BankOutputTest, BalancedGivesZero) {
    auto bank = set_weights(make_bank(2, {1550.0, 1551.0}), WeightVector::zeros(4));
    EXPECT_LE((drop_fractions(bank).array() - 0.5).abs().maxCoeff(), 1e-12);
    Rng rng(3);
    ChannelPowerVector p(uniform_vector(4, 0, 1, rng));
    EXPECT_NEAR(bank_output(bank, p).y, 0.0, 1e-12);
}

TEST(BankOutputTest, HandEvaluatedSum) {
    RVector w(2);
    w << 1.0, -1.0;
    auto bank = set_weights(make_bank(2, {1550.0}), WeightVector(w));
    RVector p(2);
    p << 0.3, 0.5;
    auto theta = drop_fractions(bank);
    EXPECT_EQ(theta(0), 1.0);
    // A Lorentzian never fully releases the light: the "all-through" ring
    // keeps 1 / (1 + (2 * shift / fwhm)^2) on the drop port.
    double residual_drop = 1.0 / (1.0 + std::pow(2.0 * 2.0 / 0.05, 2));
    EXPECT_NEAR(theta(1), residual_drop, 1e-15);
    double hand = (2 * theta(0) - 1) * 0.3 + (2 * theta(1) - 1) * 0.5;
    EXPECT_NEAR(bank_output(bank, ChannelPowerVector(p)).y, hand, 1e-15);
    EXPECT_NEAR(bank_output(bank, ChannelPowerVector(p)).y, -0.2, 1e-3);
}

TEST(BankOutputTest, PowerAccountingIsExact) {
    Rng rng(4);
    auto bank = set_weights(make_bank(2, {1550.0, 1551.6}), WeightVector(uniform_vector(4, -0.9, 0.9, rng)));
    ChannelPowerVector p(uniform_vector(4, 0, 2, rng));
    auto out = bank_output(bank, p);
    for (std::size_t c = 0; c < 4; ++c) {
        EXPECT_EQ(out.drop[c] + out.through[c], p[c]);
    }
}

TEST(BankOutputTest, LinearInInputPowers) {
    Rng rng(5);
    auto bank = set_weights(make_bank(4, {1550.0}), WeightVector(uniform_vector(4, -0.9, 0.9, rng)));
    std::uniform_real_distribution<double> coef(0, 3);
    for (int t = 0; t < 100; ++t) {
        RVector a = uniform_vector(4, 0, 1, rng), b = uniform_vector(4, 0, 1, rng);
        double ca = coef(rng), cb = coef(rng);
        double lhs = bank_output(bank, ChannelPowerVector(ca * a + cb * b)).y;
        double rhs = ca * bank_output(bank, ChannelPowerVector(a)).y + cb * bank_output(bank, ChannelPowerVector(b)).y;
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
}

TEST(BankOutputTest, DimensionMismatch) {
    EXPECT_THROW(bank_output(make_bank(2, {1550.0}), ChannelPowerVector(RVector::Ones(3))), DimensionError);
}

TEST(SetWeightsTest, RandomWeightsRealizeDotProduct) {
    Rng rng(6);
    auto base = make_bank(4, {1550.0, 1550.8});
    for (int t = 0; t < 200; ++t) {
        RVector w = uniform_vector(8, -0.99, 1.0, rng);
        RVector p = uniform_vector(8, 0, 1, rng);
        auto bank = set_weights(base, WeightVector(w));
        EXPECT_NEAR(bank_output(bank, ChannelPowerVector(p)).y, oracle::dot(to_std(w), to_std(p)), 1e-9);
    }
}

TEST(SetWeightsTest, OneHotSelectsChannel) {
    auto bank = set_weights(make_bank(3, {1550.0}), WeightVector::select(3, 2));
    auto theta = drop_fractions(bank);
    EXPECT_EQ(theta(2), 1.0);
    EXPECT_NEAR(theta(0), 0.5, 1e-12);
}

TEST(SetWeightsTest, UnreachableWeightNamesChannel) {
    BankRingDesign design;
    design.max_drop = 0.8;
    auto bank = make_bank(2, {1550.0}, design);
    try {
        set_weights(bank, WeightVector::select(2, 1));
        FAIL() << "expected domain_error";
    } catch (const std::domain_error &e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("mode 1"), std::string::npos);
        EXPECT_NE(msg.find("reachable weights"), std::string::npos);
    }
}

TEST(SetWeightsScaledTest, RealizesWeightsBeyondUnity) {
    Rng rng(7);
    auto base = make_bank(3, {1550.0});
    for (int t = 0; t < 50; ++t) {
        RVector w = uniform_vector(3, -4, 4, rng);
        RVector p = uniform_vector(3, 0, 1, rng);
        auto bank = set_weights_scaled(base, w);
        EXPECT_GE(bank.readout_gain, 1.0);
        EXPECT_LE((effective_weights(bank) - w).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(bank_output(bank, ChannelPowerVector(p)).y, oracle::dot(to_std(w), to_std(p)), 1e-9);
    }
}

TEST(ApplyMixingTest, IdentityAndSwap) {
    RVector p(2);
    p << 0.7, 0.1;
    auto same = apply_mixing(MixingMatrix::identity(2), ChannelPowerVector(p));
    EXPECT_EQ(same.values(), p);
    auto swapped = apply_mixing(MixingMatrix::reversal(2), ChannelPowerVector(p));
    EXPECT_EQ(swapped[0], 0.1);
    EXPECT_EQ(swapped[1], 0.7);
}

TEST(ApplyMixingTest, ActsPerWavelengthBlock) {
    // 2 modes x 3 wavelengths, mode-major.
    RVector p(6);
    p << 1, 2, 3, 10, 20, 30;
    auto out = apply_mixing(MixingMatrix::reversal(2), ChannelPowerVector(p));
    RVector expected(6);
    expected << 10, 20, 30, 1, 2, 3;
    EXPECT_EQ(out.values(), expected);
    EXPECT_THROW(apply_mixing(MixingMatrix::identity(4), ChannelPowerVector(p)), DimensionError);
}

TEST(ApplyMixingTest, RandomUnitaryConservesPower) {
    Rng rng(8);
    for (int t = 0; t < 1000; ++t) {
        auto m = MixingMatrix::random(4, rng);
        ChannelPowerVector p(uniform_vector(8, 0, 1, rng));
        EXPECT_NEAR(apply_mixing(m, p).total(), p.total(), 1e-10 * p.total());
    }
}

TEST(CalibrateTest, IdentityHardware) {
    SimulatedBankHardware hw(make_bank(3, {1550.0}), MixingMatrix::identity(3));
    auto cal = calibrate(hw.runner(), 3);
    EXPECT_EQ(cal.probes, 9u);
    EXPECT_LE((cal.power - RMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(cal.consistent);
    EXPECT_LE(cal.residual, 1e-9);
}

TEST(CalibrateTest, KnownRotation) {
    double phi = std::acos(std::sqrt(0.8));
    SimulatedBankHardware hw(make_bank(2, {1550.0}), MixingMatrix::rotation(phi));
    auto cal = calibrate(hw.runner(), 2);
    RMatrix expected(2, 2);
    expected << 0.8, 0.2, 0.2, 0.8;
    EXPECT_LE((cal.power - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CalibrateTest, NoisyProbesMonteCarlo) {
    Rng rng(9);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        auto mix = MixingMatrix::random(3, rng);
        SimulatedBankHardware hw(make_bank(3, {1550.0}), mix, 1e-3, &rng);
        auto cal = calibrate(hw.runner(), 3, {.tolerance = 1e-1});
        worst = std::max(worst, (cal.power - mix.power()).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 5e-3);
    EXPECT_GT(worst, 0.0);
}

TEST(CalibrateTest, LossyPathIsFlagged) {
    SimulatedBankHardware hw(make_bank(2, {1550.0}), MixingMatrix::identity(2));
    auto lossy = [&](const WeightVector &w, const ChannelPowerVector &p) { return 0.9 * hw.measure(w, p); };
    auto cal = calibrate(lossy, 2);
    EXPECT_FALSE(cal.consistent);
    EXPECT_NEAR(cal.residual, 0.1, 1e-9);
    std::ostringstream out;
    write_calibration(out, cal);
    EXPECT_NE(out.str().find("inconsistent with lossless mixing"), std::string::npos);
    EXPECT_NE(out.str().find("# condition_number"), std::string::npos);
}

TEST(CalibrateTest, NoiseNeedsGenerator) {
    EXPECT_THROW(SimulatedBankHardware(make_bank(2, {1550.0}), MixingMatrix::identity(2), 1e-3), std::invalid_argument);
}

TEST(CompensateTest, IdentityAndSwap) {
    RVector w(2);
    w << 0.3, -0.6;
    auto same = compensate(WeightVector(w), RMatrix::Identity(2, 2));
    EXPECT_LE((same.unclamped - w).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_FALSE(same.saturated);
    RVector pm(2);
    pm << 1, -1;
    auto swapped = compensate(WeightVector(pm), MixingMatrix::reversal(2).power());
    EXPECT_NEAR(swapped.unclamped(0), -1.0, 1e-15);
    EXPECT_NEAR(swapped.unclamped(1), 1.0, 1e-15);
}

TEST(CompensateTest, EndToEndOnRandomMixes) {
    Rng rng(10);
    auto base = make_bank(4, {1550.0});
    for (int t = 0; t < 100; ++t) {
        auto mix = MixingMatrix::random(4, rng);
        RVector w = uniform_vector(4, -0.5, 0.5, rng);
        RVector p = uniform_vector(4, 0, 1, rng);
        auto comp = compensate(WeightVector(w), mix.power());
        auto bank = set_weights_scaled(base, comp.unclamped);
        double y = bank_output(bank, apply_mixing(mix, ChannelPowerVector(p))).y;
        EXPECT_NEAR(y, oracle::dot(to_std(w), to_std(p)), 1e-9);
    }
}

TEST(CompensateTest, SaturationIsFlaggedWithFitScale) {
    double phi = std::acos(std::sqrt(0.6));
    RVector w(2);
    w << 1.0, -1.0;
    auto comp = compensate(WeightVector(w), MixingMatrix::rotation(phi).power());
    // [[.6,.4],[.4,.6]]^-1 maps (1, -1) to (5, -5).
    EXPECT_NEAR(comp.unclamped(0), 5.0, 1e-12);
    EXPECT_TRUE(comp.saturated);
    EXPECT_NEAR(comp.fit_scale, 0.2, 1e-12);
    EXPECT_EQ(comp.weights[0], 1.0);
    EXPECT_EQ(comp.weights[1], -1.0);
}

TEST(CompensateTest, IllConditionedRejected) {
    double phi = std::numbers::pi / 4 - 1e-9;
    EXPECT_THROW(compensate(WeightVector::zeros(2), MixingMatrix::rotation(phi).power()), std::domain_error);
    EXPECT_THROW(compensate(WeightVector::zeros(2), RMatrix::Constant(2, 2, 0.5)), std::domain_error);
}

TEST(CompensateTest, PerWavelengthBlocks) {
    Rng rng(11);
    auto mix = MixingMatrix::random(2, rng);
    RVector w = uniform_vector(6, -0.5, 0.5, rng);
    RVector p = uniform_vector(6, 0, 1, rng);
    auto comp = compensate(WeightVector(w), mix.power());
    auto mixed = apply_mixing(mix, ChannelPowerVector(p));
    EXPECT_NEAR(comp.unclamped.dot(mixed.values()), w.dot(p), 1e-12);
}

TEST(CalibrateTest, CompensatedHardwareCalibratesToIdentity) {
    Rng rng(12);
    auto mix = MixingMatrix::random(3, rng);
    SimulatedBankHardware hw(make_bank(3, {1550.0}), mix);
    auto first = calibrate(hw.runner(), 3);
    auto compensated = [&](const WeightVector &w, const ChannelPowerVector &p) {
        auto comp = compensate(w, first.power);
        auto bank = set_weights_scaled(hw.bank(), comp.unclamped);
        return bank_output(bank, apply_mixing(mix, p)).y;
    };
    auto second = calibrate(compensated, 3);
    EXPECT_LE((second.power - RMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CascadeTest, HalfDropHalvesBus) {
    auto bank = make_bank(2, {1550.0});
    RVector p(2);
    p << 0.25, 0.75;
    auto out = cascade(0.5, bank, ChannelPowerVector(p));
    EXPECT_DOUBLE_EQ(out.continue_bus.total(), 0.5);
    // Modes come out reversed.
    EXPECT_DOUBLE_EQ(out.continue_bus[0], 0.375);
    EXPECT_DOUBLE_EQ(out.continue_bus[1], 0.125);
    EXPECT_DOUBLE_EQ(out.y, 0.5);
}

TEST(CascadeTest, DropOutsideOpenIntervalRejected) {
    auto bank = make_bank(2, {1550.0});
    ChannelPowerVector p(RVector::Ones(2));
    EXPECT_THROW(cascade(0.0, bank, p), std::domain_error);
    EXPECT_THROW(cascade(1.0, bank, p), std::domain_error);
}

TEST(CascadeTest, CompensationRecoversDotProductBothSides) {
    Rng rng(13);
    const double d = 0.5;
    auto base = make_bank(2, {1550.0});
    for (int t = 0; t < 50; ++t) {
        auto mix = MixingMatrix::random(2, rng);
        RVector w = uniform_vector(2, -0.5, 0.5, rng);
        RVector p = uniform_vector(2, 0, 1, rng);
        auto mixed = apply_mixing(mix, ChannelPowerVector(p));
        double expected = w.dot(p);

        RMatrix tap_path = d * mix.power();
        auto tap_bank = set_weights_scaled(base, compensate(WeightVector(w), tap_path).unclamped);
        auto out = cascade(d, tap_bank, mixed);
        EXPECT_NEAR(out.y, expected, 1e-9);

        RMatrix flip = MixingMatrix::reversal(2).power();
        RMatrix rest_path = (1 - d) * flip * mix.power();
        auto rest_bank = set_weights_scaled(base, compensate(WeightVector(w), rest_path).unclamped);
        EXPECT_NEAR(bank_output(rest_bank, out.continue_bus).y, expected, 1e-9);
    }
}

}  // namespace
}  // namespace mdm
