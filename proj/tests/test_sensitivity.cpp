/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <gtest/gtest.h>

#include <random>

#include "freqflux/powerflow.hpp"
#include "freqflux/sensitivity.hpp"
#include "test_util.hpp"

namespace freqflux {
namespace {

class Ieee14Sensitivity : public ::testing::Test {
protected:
    void SetUp() override {
        net = test::ieee14();
        op = solve_power_flow(net).point;
        sens = build_sensitivities(net, op);
    }
    Network net;
    OperatingPoint op;
    SensitivitySet sens;
};

TEST_F(Ieee14Sensitivity, ForwardInverseRoundTrip) {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd(0.0, 0.01);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        ComplexFrequencyState x{Vec(14), Vec(14)};
        for (int i = 0; i < 14; ++i) {
            x.rho(i) = nd(gen);
            x.omega(i) = nd(gen);
        }
        const auto [p_dot, q_dot] = injection_rates(sens, x);
        const auto back = bus_frequencies(sens, p_dot, q_dot);
        worst = std::max({worst, inf_norm(Vec(back.rho - x.rho)), inf_norm(Vec(back.omega - x.omega))});
    }
    EXPECT_LT(worst, 1e-8);
}

TEST_F(Ieee14Sensitivity, DefinitionsHold) {
    EXPECT_LT(inf_norm(Mat(sens.E - sens.A * sens.C_inv)), 1e-10);
    EXPECT_LT(inf_norm(Mat(sens.F - (sens.B - sens.E * sens.D))), 1e-10);
    EXPECT_LT(inf_norm(Mat(sens.K + sens.H * sens.E)), 1e-10);
    EXPECT_LT(sens.meta.residual_fh, 1e-10);
    EXPECT_LT(sens.meta.residual_c_inv, 1e-10);
    EXPECT_GT(sens.meta.cond_c, 1.0);
    EXPECT_GT(sens.meta.cond_f, 1.0);
}

TEST_F(Ieee14Sensitivity, MachineBusesUseNonMachineInjection) {
    // Bus 2 carries a machine and a 0.217 pu load.
    EXPECT_NEAR(sens.p(1), -0.217, 1e-12);
    EXPECT_NEAR(sens.p(3), op.p(3), 1e-12);
}

TEST_F(Ieee14Sensitivity, BareReferenceIsSingular) {
    SensitivityOptions opt;
    opt.reference = AngleReference::none;
    try {
        build_sensitivities(net, op, opt);
        FAIL() << "expected SingularMatrix";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.matrix().rfind("F", 0), 0u);
        EXPECT_EQ(e.kind(), ErrorKind::singular_matrix);
    }
}

TEST_F(Ieee14Sensitivity, RateDimensionMismatch) {
    EXPECT_THROW(bus_frequencies(sens, Vec::Zero(13), Vec::Zero(14)), Error);
}

TEST(Sensitivity, NoLoadBareCIsSingularWithFallbackHint) {
    const Network net = load_case(test::test_data_dir() / "noload3.json");
    const auto op = solve_power_flow(net).point;
    SensitivityOptions opt;
    opt.reference = AngleReference::none;
    try {
        build_sensitivities(net, op, opt);
        FAIL() << "expected SingularMatrix";
    } catch (const SingularMatrixError& e) {
        EXPECT_EQ(e.matrix().rfind("C", 0), 0u);
        EXPECT_NE(std::string(e.what()).find("simplified"), std::string::npos);
    }
}

TEST(Sensitivity, FlatLosslessEqualsImaginaryPartOfInverse) {
    Network net = test::scale_resistance(test::three_bus(false), 0.0);
    auto adm = augment_with_machines(assemble_admittance(net), net.machines);
    const auto s = build_sensitivities(net, Vec::Ones(3), Vec::Zero(3), Vec::Zero(3), Vec::Zero(3));
    const CMat z = adm.y_bus.inverse();
    EXPECT_LT(inf_norm(Mat(s.H - z.imag())), 1e-10);
    EXPECT_LT(inf_norm(s.K), 1e-12);
}

TEST(Sensitivity, FlatLossyFullEqualsComplexInversion) {
    const Network net = test::three_bus(false);
    auto adm = augment_with_machines(assemble_admittance(net), net.machines);
    const auto s = build_sensitivities(net, Vec::Ones(3), Vec::Zero(3), Vec::Zero(3), Vec::Zero(3));
    const CMat z = adm.y_bus.inverse();
    EXPECT_LT(inf_norm(Mat(s.H - z.imag())), 1e-10);
    EXPECT_LT(inf_norm(Mat(s.K + z.real())), 1e-10);
}

TEST(Simplified, EqualsComplexInversionOfBusAdmittance) {
    const Network net = test::ieee14();
    const auto s = simplified_weights(net);
    EXPECT_FALSE(s.augmented);
    EXPECT_FALSE(s.lossless_shortcut);
    const CMat z = assemble_admittance(net).y_bus.inverse();
    const double scale = inf_norm(Mat(z.imag()));
    EXPECT_LT(inf_norm(Mat(s.H - z.imag())), 1e-9 * scale);
    EXPECT_LT(inf_norm(Mat(s.K + z.real())), 1e-9 * scale);
}

TEST(Simplified, LosslessLimit) {
    const Network net = test::scale_resistance(test::ieee14(), 1e-6);
    const auto s = simplified_weights(net);
    EXPECT_FALSE(s.lossless_shortcut);
    EXPECT_LT(inf_norm(s.K), 1e-4);
    EXPECT_LT(inf_norm(Mat(s.H + s.B_inv)), 1e-4);
}

TEST(Simplified, ExactlyLosslessTakesShortcut) {
    const Network net = test::scale_resistance(test::ieee14(), 0.0);
    const auto s = simplified_weights(net);
    EXPECT_TRUE(s.lossless_shortcut);
    EXPECT_EQ(inf_norm(s.K), 0.0);
    EXPECT_EQ(inf_norm(Mat(s.H + s.B_inv)), 0.0);
}

TEST(Simplified, SingularSusceptanceIsAugmented) {
    // No shunts and no line charging: B_bus is a Laplacian.
    const Network net = test::three_bus(false);
    const auto s = simplified_weights(net);
    EXPECT_TRUE(s.augmented);
    EXPECT_FALSE(s.warning.empty());
}

TEST(Simplified, SingularWithoutMachinesThrows) {
    Network net = test::three_bus(false);
    net.machines.clear();
    EXPECT_THROW(simplified_weights(net), SingularMatrixError);
}

}  // namespace
}  // namespace freqflux
