// tests/analytic_test.cpp
#include "nla/analytic.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nla;

namespace {

std::vector<double> repeat(double t, int n) { return std::vector<double>(static_cast<std::size_t>(n), t); }

// Stage values frozen from exact rational iteration (Python fractions) of
// eta' = (1-t) eta / ((1-t) eta + (1-eta) t), p = (1-t) eta + (1-eta) t.
const double kEtas02[] = {0.5, 0.8, 0.9411764705882353, 0.9846153846153847, 0.9961089494163424};
const double kProbs02[] = {0.32, 0.5, 0.68, 0.7647058823529411, 0.7907692307692308};

}  // namespace

TEST(StepSps, ReportedLowFidelityPoint) {
    const auto r = nla_step_sps(0.2, 0.2);
    EXPECT_NEAR(r.eta_out, 0.5, 1e-15);
    EXPECT_NEAR(r.probability, 0.32, 1e-15);
}

TEST(StepSps, SmallerTransmittance) {
    EXPECT_NEAR(nla_step_sps(0.2, 0.1).eta_out, 0.18 / 0.26, 1e-15);
    EXPECT_NEAR(nla_step_sps(0.2, 0.1).eta_out, 0.69, 3e-3);
    EXPECT_NEAR(nla_step_sps(0.2, 0.01).eta_out, 0.198 / 0.206, 1e-15);
}

TEST(StepSps, HalfTransmittanceIsIdentityExactly) {
    for (double eta : {0.0, 0.05, 0.2, 1.0 / 3.0, 0.6, 0.9, 0.999, 1.0}) {
        const auto r = nla_step_sps(eta, 0.5);
        EXPECT_EQ(r.eta_out, eta);
        EXPECT_EQ(r.probability, 0.5);
    }
}

TEST(StepSps, PhotonIsFixedPoint) {
    for (double t : {0.01, 0.2, 0.5, 0.7, 0.99}) {
        const auto r = nla_step_sps(1.0, t);
        EXPECT_EQ(r.eta_out, 1.0);
        EXPECT_NEAR(r.probability, 1.0 - t, 1e-15);
    }
}

TEST(StepSps, DegenerateInputs) {
    EXPECT_THROW(nla_step_sps(0.0, 0.0), DegenerateInput);
    EXPECT_THROW(nla_step_sps(1.0, 1.0), DegenerateInput);
    EXPECT_THROW(nla_step_sps(1.2, 0.3), InvalidArgument);
    EXPECT_THROW(nla_step_sps(0.3, -0.1), InvalidArgument);
    // Endpoints with non-zero denominators are accepted.
    EXPECT_EQ(nla_step_sps(0.4, 0.0).eta_out, 1.0);
    EXPECT_EQ(nla_step_sps(0.4, 1.0).eta_out, 0.0);
}

TEST(Gain, Examples) {
    EXPECT_NEAR(gain(0.2, 0.2), 2.5, 1e-15);
    EXPECT_EQ(gain(0.2, 0.5), 1.0);
    EXPECT_NEAR(gain(0.2, 0.6), 0.4 / 0.56, 1e-15);
    EXPECT_LT(gain(0.2, 0.6), 1.0);
    EXPECT_THROW(gain(0.0, 0.0), DegenerateInput);
}

TEST(GainProperty, AmplifiesIffBelowHalf) {
    for (double eta : {0.01, 0.2, 0.6, 0.9, 0.99}) {
        for (int i = 1; i <= 99; ++i) {
            const double t = i / 100.0;
            EXPECT_EQ(gain(eta, t) > 1.0, t < 0.5) << "eta=" << eta << " t=" << t;
        }
    }
}

TEST(CascadeSps, FiveStagesAtLowFidelity) {
    const auto tr = cascade_sps(0.2, repeat(0.2, 5));
    ASSERT_EQ(tr.stages.size(), 5u);
    double cumulative = 1.0;
    for (std::size_t n = 0; n < 5; ++n) {
        EXPECT_EQ(tr.stages[n].index, static_cast<int>(n + 1));
        EXPECT_NEAR(tr.stages[n].eta, kEtas02[n], 1e-14);
        EXPECT_NEAR(tr.stages[n].stage_probability, kProbs02[n], 1e-14);
        cumulative *= kProbs02[n];
        EXPECT_NEAR(tr.stages[n].cumulative_probability, cumulative, 1e-14);
    }
    EXPECT_NEAR(tr.final_eta(), 0.996, 1e-3);
    EXPECT_NEAR(tr.cumulative_probability(), 0.065792, 1e-14);
}

TEST(CascadeSps, TwoStageClosedForm) {
    const auto tr = cascade_sps(0.2, {0.2, 0.2});
    // eta (1-t)^2 / (t^2 + eta - 2 eta t)
    EXPECT_NEAR(tr.final_eta(), 0.2 * 0.64 / (0.04 + 0.2 - 0.08), 1e-15);
    EXPECT_NEAR(tr.final_eta(), 0.8, 1e-15);
}

TEST(CascadeSps, SingleVeryLowTransmittance) {
    EXPECT_NEAR(cascade_sps(0.2, {0.01}).final_eta(), 0.9611650485436893, 1e-15);
}

TEST(CascadeSps, HeterogeneousStages) {
    const auto tr = cascade_sps(0.3, {0.1, 0.4, 0.25});
    double eta = 0.3;
    for (std::size_t n = 0; n < 3; ++n) {
        eta = nla_step_sps(eta, tr.transmittances[n]).eta_out;
        EXPECT_DOUBLE_EQ(tr.stages[n].eta, eta);
    }
}

TEST(CascadeSps, EmptyScheduleHasNoStages) {
    const auto tr = cascade_sps(0.4, {});
    EXPECT_TRUE(tr.stages.empty());
    EXPECT_EQ(total_gain(tr), 1.0);
    EXPECT_EQ(tr.cumulative_probability(), 1.0);
}

TEST(TotalGain, Examples) {
    const auto tr = cascade_sps(0.2, {0.2, 0.2});
    EXPECT_NEAR(total_gain(tr), 4.0, 1e-14);
    EXPECT_NEAR(tr.stages[0].gain, 2.5, 1e-15);
    EXPECT_NEAR(tr.stages[1].gain, 1.6, 1e-15);
    EXPECT_EQ(total_gain(cascade_sps(0.7, repeat(0.5, 4))), 1.0);
    EXPECT_THROW(total_gain(cascade_sps(0.0, {0.2})), InvalidArgument);
}

TEST(StepSpe, Examples) {
    const auto r = nla_step_spe(0.2, 0.2);
    EXPECT_NEAR(r.eta_out, 0.5, 1e-15);
    EXPECT_NEAR(r.probability, 0.064, 1e-15);
    for (double eta : {0.0, 0.2, 0.5, 0.77, 1.0}) EXPECT_EQ(nla_step_spe(eta, 0.5).probability, 0.25);
    EXPECT_EQ(nla_step_spe(1.0, 0.3).eta_out, 1.0);
    EXPECT_THROW(nla_step_spe(0.5, 0.0), DegenerateInput);
}

TEST(CascadeSpe, ProbabilityRecursion) {
    EXPECT_NEAR(cascade_spe(0.2, {0.2}).cumulative_probability(), 0.064, 1e-15);
    const auto two = cascade_spe(0.2, {0.2, 0.2});
    EXPECT_NEAR(two.stages[1].stage_probability, 0.1, 1e-15);
    EXPECT_NEAR(two.cumulative_probability(), 0.0064, 1e-15);
    EXPECT_NEAR(cascade_spe(0.2, repeat(0.2, 5)).final_eta(), 0.9961089494163424, 1e-14);
}

TEST(AnalyticProperty, MonotoneAroundHalf) {
    for (int i = 1; i < 100; ++i) {
        const double eta = i / 100.0;
        for (int j = 1; j < 100; ++j) {
            const double t = j / 100.0;
            for (Flavor f : {Flavor::kSps, Flavor::kSpe}) {
                const double out = nla_step(f, eta, t).eta_out;
                if (t < 0.5) EXPECT_GT(out, eta);
                else if (t > 0.5) EXPECT_LT(out, eta);
                else EXPECT_EQ(out, eta);
            }
        }
    }
}

TEST(AnalyticProperty, FixedPoints) {
    for (int j = 1; j < 100; ++j) {
        const double t = j / 100.0;
        for (Flavor f : {Flavor::kSps, Flavor::kSpe}) {
            EXPECT_EQ(nla_step(f, 0.0, t).eta_out, 0.0);
            EXPECT_EQ(nla_step(f, 1.0, t).eta_out, 1.0);
        }
    }
}

TEST(AnalyticProperty, GeometricConvergence) {
    for (double t : {0.05, 0.1, 0.2, 0.3, 0.45}) {
        for (double eta0 : {0.05, 0.2, 0.6}) {
            const double ratio = t / (1.0 - t);
            double eta = eta0;
            double prev_gap = 1.0 - eta;
            bool checked = false;
            for (int n = 1; n < 400; ++n) {
                const double next = nla_step_sps(eta, t).eta_out;
                ASSERT_GT(next, eta);
                const double gap = 1.0 - next;
                // x' / x = t / ((1-t) - x (1-2t)) -> t/(1-t) as x -> 0.
                if (prev_gap < 1e-4 && prev_gap > 1e-9) {
                    EXPECT_NEAR(gap / prev_gap, ratio, 2.0 * prev_gap + 1e-6);
                    checked = true;
                }
                eta = next;
                prev_gap = gap;
                if (gap < 1e-9) break;
            }
            EXPECT_TRUE(checked);
            EXPECT_GT(eta, 1.0 - 1e-8);
        }
    }
}

TEST(AnalyticProperty, GainProductIdentity) {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> eta_d(0.01, 1.0), t_d(0.01, 0.99);
    std::uniform_int_distribution<int> n_d(1, 12);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> ts(static_cast<std::size_t>(n_d(rng)));
        for (auto& t : ts) t = t_d(rng);
        const auto tr = cascade(trial % 2 ? Flavor::kSpe : Flavor::kSps, eta_d(rng), ts);
        const double g = total_gain(tr);
        EXPECT_NEAR(gain_product(tr), g, 1e-12 * std::max(1.0, g));
    }
}

TEST(AnalyticProperty, SpsAndSpeShareFidelities) {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> ts(6);
        for (auto& t : ts) t = u(rng);
        const double eta = u(rng);
        const auto a = cascade_sps(eta, ts), b = cascade_spe(eta, ts);
        for (std::size_t n = 0; n < ts.size(); ++n) EXPECT_EQ(a.stages[n].eta, b.stages[n].eta);
    }
}

TEST(AnalyticProperty, CumulativeProbabilityDecreases) {
    for (Flavor f : {Flavor::kSps, Flavor::kSpe}) {
        for (double eta : {0.05, 0.5, 0.95}) {
            const auto tr = cascade(f, eta, repeat(0.2, 10));
            double prev = 1.0;
            for (const auto& s : tr.stages) {
                ASSERT_LT(s.stage_probability, 1.0);
                EXPECT_LT(s.cumulative_probability, prev);
                EXPECT_DOUBLE_EQ(s.cumulative_probability, prev * s.stage_probability);
                prev = s.cumulative_probability;
            }
        }
    }
}
