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

#include "mdm/network.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

namespace mdm {
namespace {

NeuronSpec neuron(double bias = 0.0) {
    NeuronSpec n;
    n.axon_ring.resonance_nm = 1549.5;
    n.axon_ring.fwhm_nm = 1.0;
    n.axon_ring.heater_shift_nm_per_unit = 1.0;
    n.axon_ring.max_drop = 1.0;
    n.pump_power = 1.0;
    n.pump_wavelength_nm = 1550.0;
    n.bias = bias;
    return n;
}

/// Drives computed straight from the weight matrix, outputs from a
/// hand-written Lorentzian. No bus, banks, or mixing involved.
RVector ideal_map(const std::vector<NeuronSpec> &ns, const RMatrix &w, const RVector &x) {
    RVector drive = w * x;
    RVector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto &n = ns[static_cast<std::size_t>(i)];
        double r = n.axon_ring.resonance_nm + n.axon_ring.heater_shift_nm_per_unit * (n.gain * drive(i) + n.bias);
        double t = 2.0 * (n.pump_wavelength_nm - r) / n.axon_ring.fwhm_nm;
        out(i) = n.pump_power * n.axon_ring.max_drop / (1.0 + t * t);
    }
    return out;
}

RVector ideal_fixed_point(const std::vector<NeuronSpec> &ns, const RMatrix &w) {
    RVector x = RVector::Zero(static_cast<Eigen::Index>(ns.size()));
    for (int it = 0; it < 100000; ++it) {
        RVector next = 0.5 * x + 0.5 * ideal_map(ns, w, x);
        if ((next - x).cwiseAbs().maxCoeff() < 1e-15) {
            return next;
        }
        x = next;
    }
    return x;
}

HairpinNetwork compensated(HairpinNetwork net, const RMatrix &w) {
    std::vector<RMatrix> paths;
    for (std::size_t k = 0; k < net.size(); ++k) {
        paths.push_back(calibrate_bank_path(net, k).power);
    }
    return program_weights(std::move(net), w, std::span<const RMatrix>(paths));
}

RMatrix weights_2x2(double a, double b, double c, double d) {
    RMatrix w(2, 2);
    w << a, b, c, d;
    return w;
}

TEST(AxonResponseTest, LorentzianAnchors) {
    auto n = neuron();
    EXPECT_DOUBLE_EQ(axon_response(n, 0.5), 1.0);
    EXPECT_NEAR(axon_response(n, 0.5 + 1.0), 0.2, 1e-12);
    EXPECT_NEAR(axon_response(n, 0.5 - 1.0), 0.2, 1e-12);
    double prev = 2.0;
    for (double d = 0.5; d < 5.0; d += 0.05) {
        double p = axon_response(n, d);
        EXPECT_LT(p, prev);
        EXPECT_GT(p, 0.0);
        prev = p;
    }
    n.bias = 0.25;
    EXPECT_DOUBLE_EQ(axon_response(n, 0.25), 1.0);
}

TEST(NetworkSpecTest, Validation) {
    auto net = make_hairpin({neuron(), neuron()}, MixingMatrix::identity(2));
    EXPECT_NO_THROW(net.validate());
    auto bad = net;
    bad.cascade_drops[0] = 1.0;
    EXPECT_THROW(bad.validate(), std::domain_error);
    bad = net;
    bad.neurons[1].mode_channel = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = net;
    bad.neurons[0].pump_power = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = net;
    bad.banks.pop_back();
    EXPECT_THROW(bad.validate(), DimensionError);
}

TEST(StepTest, ZeroWeightsGiveBiasState) {
    auto net = program_weights(make_hairpin({neuron(0.1), neuron(-0.2)}, MixingMatrix::identity(2)), RMatrix::Zero(2, 2));
    RVector start(2);
    start << 0.9, 0.05;
    auto next = step(net, start);
    EXPECT_LE((next - bias_state(net)).cwiseAbs().maxCoeff(), 1e-12);
    auto fp = run_to_fixed_point(net, 1e-12, 100);
    EXPECT_TRUE(fp.converged);
    EXPECT_LE(fp.iterations, 2u);
}

TEST(StepTest, PassiveEverywhere) {
    Rng rng(51);
    auto net = compensated(make_hairpin({neuron(), neuron()}, MixingMatrix::random(2, rng)),
                           weights_2x2(0.3, -0.5, 0.4, 0.2));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        RVector x(2);
        x << u(rng), u(rng);
        StepTrace trace;
        auto next = step(net, x, &trace);
        double pump = 2.0;
        EXPECT_LE(trace.bus_power, pump + 1e-12);
        for (double p : trace.bank_input_power) {
            EXPECT_LE(p, trace.bus_power + 1e-12);
        }
        EXPECT_LE(next.maxCoeff(), 1.0);
        EXPECT_GT(next.minCoeff(), 0.0);
    }
}

TEST(StepTest, SelfExcitationMatchesCobwebIteration) {
    // One neuron on a one-mode bus: the whole network is a scalar map.
    const double w = 0.3;
    auto n = neuron();
    RMatrix wm(1, 1);
    wm << w;
    auto net = compensated(make_hairpin({n}, MixingMatrix::identity(1)), wm);
    FixedPointOptions options;
    options.record_trajectory = true;
    auto fp = run_to_fixed_point(net, 1e-13, 1000, options);
    ASSERT_TRUE(fp.converged);

    RVector x(1);
    x << 0.5;  // bias state
    double prev_gap = std::numeric_limits<double>::infinity();
    for (const auto &row : fp.trajectory) {
        x = 0.5 * x + 0.5 * ideal_map({n}, wm, x);
        EXPECT_NEAR(row.outputs(0), x(0), 1e-12) << "iteration " << row.iteration;
        double gap = std::abs(row.outputs(0) - fp.state(0));
        EXPECT_LE(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_NEAR(fp.state(0), ideal_fixed_point({n}, wm)(0), 1e-12);
}

TEST(FixedPointTest, MutualInhibitionUniqueAttractor) {
    auto net = compensated(make_hairpin({neuron(), neuron()}, MixingMatrix::identity(2)),
                           weights_2x2(0.0, -0.3, -0.2, 0.0));
    const double tol = 1e-12;
    auto reference = run_to_fixed_point(net, tol, 10000);
    ASSERT_TRUE(reference.converged);
    Rng rng(52);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        FixedPointOptions options;
        RVector x0(2);
        x0 << u(rng), u(rng);
        options.initial = x0;
        auto fp = run_to_fixed_point(net, tol, 10000, options);
        ASSERT_TRUE(fp.converged);
        EXPECT_LE((fp.state - reference.state).cwiseAbs().maxCoeff(), 10 * tol);
    }
}

TEST(FixedPointTest, CompensatedMatchesIdealAndIdentityMix) {
    std::vector<NeuronSpec> ns{neuron(), neuron()};
    RMatrix w = weights_2x2(0.2, -0.4, -0.3, 0.1);
    auto ideal = ideal_fixed_point(ns, w);
    auto identity = run_to_fixed_point(compensated(make_hairpin(ns, MixingMatrix::identity(2)), w), 1e-12, 10000);
    ASSERT_TRUE(identity.converged);
    EXPECT_LE((identity.state - ideal).cwiseAbs().maxCoeff(), 1e-9);

    Rng rng(53);
    int naive_off = 0;
    for (int t = 0; t < 10; ++t) {
        auto mix = MixingMatrix::random(2, rng);
        auto fp = run_to_fixed_point(compensated(make_hairpin(ns, mix), w), 1e-12, 10000);
        ASSERT_TRUE(fp.converged);
        EXPECT_LE((fp.state - identity.state).cwiseAbs().maxCoeff(), 1e-6);

        auto naive = run_to_fixed_point(program_weights(make_hairpin(ns, mix), w), 1e-12, 10000);
        if ((naive.state - identity.state).cwiseAbs().maxCoeff() > 1e-6) {
            ++naive_off;
        }
    }
    EXPECT_EQ(naive_off, 10);
}

TEST(FixedPointTest, NonConvergenceIsReported) {
    auto net = compensated(make_hairpin({neuron(), neuron()}, MixingMatrix::identity(2)),
                           weights_2x2(0.2, -0.4, -0.3, 0.1));
    auto fp = run_to_fixed_point(net, 1e-12, 3);
    EXPECT_FALSE(fp.converged);
    EXPECT_EQ(fp.iterations, 3u);
    EXPECT_THROW(run_to_fixed_point(net, 0.0, 3), std::invalid_argument);
}

TEST(FixedPointTest, BitIdenticalTrajectories) {
    auto build = [] {
        Rng rng(54);
        return compensated(make_hairpin({neuron(), neuron()}, MixingMatrix::random(2, rng)),
                           weights_2x2(0.2, -0.4, -0.3, 0.1));
    };
    FixedPointOptions options;
    options.record_trajectory = true;
    auto a = run_to_fixed_point(build(), 1e-12, 10000, options);
    auto b = run_to_fixed_point(build(), 1e-12, 10000, options);
    std::ostringstream ta, tb;
    write_trajectory(ta, a, 2);
    write_trajectory(tb, b, 2);
    EXPECT_EQ(ta.str(), tb.str());
    EXPECT_NE(ta.str().find("# columns: iteration drive_0 drive_1 output_0 output_1 residual"), std::string::npos);
}

TEST(BankPathTest, CalibrationMatchesModel) {
    Rng rng(55);
    auto net = make_hairpin({neuron(), neuron(), neuron()}, MixingMatrix::random(3, rng), {}, 0.4);
    for (std::size_t k = 0; k < 3; ++k) {
        auto cal = calibrate_bank_path(net, k);
        EXPECT_LE((cal.power - bank_path_matrix(net, k)).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_TRUE(cal.consistent);
    }
    EXPECT_NEAR(bank_path_throughput(net, 0), 0.4, 1e-15);
    EXPECT_NEAR(bank_path_throughput(net, 1), 0.6 * 0.4, 1e-15);
    EXPECT_NEAR(bank_path_throughput(net, 2), 0.36, 1e-15);
}

TEST(DemixTest, IdentityAndSwap) {
    auto banks = std::vector<BankSpec>(2, make_bank(2, {1550.0}));
    RVector p(2);
    p << 0.3, 0.8;
    auto same = demix(banks, RMatrix::Identity(2, 2), ChannelPowerVector(p));
    EXPECT_LE((same.values() - p).cwiseAbs().maxCoeff(), 1e-12);
    RMatrix swap = MixingMatrix::reversal(2).power();
    auto mixed = apply_power_mix(swap, ChannelPowerVector(p));
    auto unswapped = demix(banks, swap, mixed);
    EXPECT_LE((unswapped.values() - p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DemixTest, RandomFourModeAgainstInverse) {
    Rng rng(56);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        auto mix = MixingMatrix::random(4, rng);
        RVector p(4);
        for (auto &x : p) {
            x = u(rng);
        }
        auto mixed = apply_mixing(mix, ChannelPowerVector(p));
        RVector inverse = mix.power().fullPivLu().solve(mixed.values());
        auto programmed = program_demixer(std::vector<BankSpec>(4, make_bank(4, {1550.0})), mix.power());
        auto out = demix_output(programmed, mixed);
        EXPECT_LE((out.values() - p).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE((out.values() - inverse).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_GT(crosstalk_suppression_db(programmed, mix.power()), 80.0);
    }
}

TEST(DemixTest, NaiveBanksLeak) {
    Rng rng(57);
    auto mix = MixingMatrix::random(4, rng);
    std::vector<BankSpec> naive;
    for (std::size_t c = 0; c < 4; ++c) {
        naive.push_back(set_weights(make_bank(4, {1550.0}), WeightVector::select(4, c)));
    }
    EXPECT_LT(crosstalk_suppression_db(naive, mix.power()), 20.0);
}

TEST(DemixTest, RejectsWrongBankCount) {
    auto banks = std::vector<BankSpec>(3, make_bank(2, {1550.0}));
    EXPECT_THROW(program_demixer(banks, RMatrix::Identity(2, 2)), DimensionError);
}

}  // namespace
}  // namespace mdm
