#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stateproj/simulate.hpp"

namespace stateproj {
namespace {

TEST(ReferenceLabels, Layout) {
    const LabelTrack base = reference_labels();
    EXPECT_EQ(base.horizon(), 60.0);
    EXPECT_EQ(base.sequence().state_at(0.0), 1);
    EXPECT_EQ(base.sequence().state_at(10.0), 2);
    EXPECT_EQ(base.sequence().state_at(20.0), 3);
    EXPECT_EQ(base.sequence().state_at(35.0), 2);
    EXPECT_EQ(base.sequence().state_at(50.0), 3);
    EXPECT_EQ(base.sequence().state_at(59.9), 1);
}

TEST(NoisyLabels, SameSeedSameOutput) {
    NoiseModel m;
    m.seed = 42;
    const LabelTrack a = generate_noisy_labels(reference_labels(), m, 3);
    const LabelTrack b = generate_noisy_labels(reference_labels(), m, 3);
    EXPECT_EQ(a.sequence(), b.sequence());
    m.seed = 43;
    EXPECT_FALSE(generate_noisy_labels(reference_labels(), m, 3).sequence() == a.sequence());
}

TEST(NoisyLabels, WellFormed) {
    NoiseModel m;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        m.seed = seed;
        const LabelTrack t = generate_noisy_labels(reference_labels(), m, 3);
        EXPECT_EQ(t.horizon(), 60.0);
        EXPECT_EQ(t.sequence().initial_state(), 1);
        State prev = t.sequence().initial_state();
        for (const Jump& j : t.sequence().jumps()) {
            EXPECT_GT(j.time, 0.0);
            EXPECT_LT(j.time, 60.0);
            EXPECT_GE(j.state, 1);
            EXPECT_LE(j.state, 3);
            EXPECT_NE(j.state, prev);
            prev = j.state;
        }
    }
}

TEST(NoisyLabels, VanishingCorruptionReturnsBase) {
    NoiseModel m;
    m.mu1 = 10.0;
    m.mu2 = 1e-12;
    m.seed = 5;
    const LabelTrack t = generate_noisy_labels(reference_labels(), m, 3);
    EXPECT_EQ(t.sequence(), reference_labels().sequence());
}

TEST(NoisyLabels, TwoStatesFlipToTheOtherState) {
    const LabelTrack base(10.0, StateSequence(1, {{5.0, 2}}));
    NoiseModel m;
    m.seed = 3;
    const LabelTrack t = generate_noisy_labels(base, m, 2);
    for (const Jump& j : t.sequence().jumps()) {
        EXPECT_TRUE(j.state == 1 || j.state == 2);
    }
    EXPECT_GT(t.sequence().jump_count(), 10u);
}

TEST(NoisyLabels, RejectsBadModel) {
    NoiseModel m;
    m.mu2 = 0.0;
    EXPECT_THROW(generate_noisy_labels(reference_labels(), m, 3), std::invalid_argument);
    EXPECT_THROW(generate_noisy_labels(reference_labels(), NoiseModel{}, 1), std::invalid_argument);
}

TEST(Exponential, MeanMatches) {
    std::mt19937_64 rng(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        sum += detail::exponential(rng, 0.3);
    }
    // Standard error 0.3 / sqrt(n).
    EXPECT_NEAR(sum / n, 0.3, 4 * 0.3 / std::sqrt(n));
}

SweepConfig small_config(SweepParameter p, std::vector<double> values) {
    SweepConfig cfg;
    cfg.replications = 40;
    cfg.parameter = p;
    cfg.values = std::move(values);
    cfg.noise.seed = 7;
    return cfg;
}

TEST(Sweep, Reproducible) {
    SweepConfig cfg = small_config(SweepParameter::mu2, {0.02, 0.08});
    cfg.replications = 10;
    const auto a = run_sweep(cfg);
    const auto b = run_sweep(cfg);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].mean_accuracy_noisy, b[i].mean_accuracy_noisy);
        EXPECT_EQ(a[i].mean_lts_noisy, b[i].mean_lts_noisy);
        EXPECT_EQ(a[i].mean_lts_pp, b[i].mean_lts_pp);
        EXPECT_EQ(a[i].se_lts_pp, b[i].se_lts_pp);
    }
}

// Long-run agreement mu1 / (mu1 + mu2), plus two finite-window effects: the
// labels start in a correct stretch, and a wrong stretch running across a
// reference jump matches the new state with probability 1 / (states - 1).
double expected_accuracy(double mu1, double mu2, double horizon, int base_jumps, int states) {
    const double p = mu1 / (mu1 + mu2);
    const double start = (1.0 - p) / (1.0 / mu1 + 1.0 / mu2);
    const double crossings = base_jumps * (1.0 - p) * mu2 / (states - 1);
    return p + (start + crossings) / horizon;
}

TEST(Sweep, AccuracyMatchesRenewalModel) {
    for (double mu2 : {0.02, 0.05, 0.08}) {
        SweepConfig cfg = small_config(SweepParameter::mu2, {mu2});
        cfg.replications = 1000;
        cfg.score_projection = false;
        const SweepRow row = run_sweep(cfg).front();
        EXPECT_NEAR(row.mean_accuracy_noisy, expected_accuracy(0.1, mu2, 60.0, 5, 3), 3 * row.se_accuracy)
            << mu2;
    }
    SweepConfig cfg = small_config(SweepParameter::mu2, {0.8});
    cfg.noise.mu1 = 1.0;
    cfg.replications = 1000;
    cfg.score_projection = false;
    const SweepRow row = run_sweep(cfg).front();
    EXPECT_NEAR(row.mean_accuracy_noisy, expected_accuracy(1.0, 0.8, 60.0, 5, 3), 3 * row.se_accuracy);
}

TEST(Sweep, AccuracyDropsWithLongerCorruption) {
    SweepConfig cfg = small_config(SweepParameter::mu2, {0.01, 0.03, 0.05, 0.07, 0.09});
    cfg.replications = 200;
    cfg.score_projection = false;
    const auto rows = run_sweep(cfg);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(rows[i].mean_accuracy_noisy, rows[i - 1].mean_accuracy_noisy);
    }
}

TEST(Sweep, ScoringParametersShareDraws) {
    // Sweeping w leaves the noisy labels alone, so accuracy is identical.
    const auto rows = run_sweep(small_config(SweepParameter::w, {0.2, 0.6, 1.0}));
    EXPECT_EQ(rows[0].mean_accuracy_noisy, rows[2].mean_accuracy_noisy);
    EXPECT_GT(rows[0].mean_lts_noisy, rows[2].mean_lts_noisy);
    // With w = 1 no mismatch is forgiven.
    EXPECT_LT(rows[2].mean_lts_pp, rows[0].mean_lts_pp);
}

TEST(Sweep, ProjectionBeatsNoise) {
    const auto rows = run_sweep(small_config(SweepParameter::mu2, {0.04, 0.08}));
    for (const SweepRow& r : rows) {
        EXPECT_GT(r.mean_lts_pp, r.mean_lts_noisy);
        EXPECT_GT(r.se_lts_pp, 0.0);
    }
}

TEST(Sweep, ValidatesConfig) {
    SweepConfig cfg = small_config(SweepParameter::gamma, {});
    EXPECT_THROW(run_sweep(cfg), std::invalid_argument);
    cfg.values = {0.5};
    cfg.replications = 0;
    EXPECT_THROW(run_sweep(cfg), std::invalid_argument);
    cfg.replications = 1;
    cfg.values = {-0.5};
    EXPECT_THROW(run_sweep(cfg), std::invalid_argument);
    cfg = small_config(SweepParameter::mu1, {0.0});
    EXPECT_THROW(run_sweep(cfg), std::invalid_argument);
}

TEST(Sweep, DefaultValues) {
    EXPECT_EQ(default_sweep_values(SweepParameter::mu2, 0.1).size(), 9u);
    EXPECT_DOUBLE_EQ(default_sweep_values(SweepParameter::mu2, 0.1)[2], 0.03);
    EXPECT_DOUBLE_EQ(default_sweep_values(SweepParameter::mu2, 1.0)[7], 0.8);
    EXPECT_EQ(default_sweep_values(SweepParameter::gamma).size(), 8u);
    EXPECT_EQ(default_sweep_values(SweepParameter::w).size(), 13u);
    EXPECT_EQ(default_sweep_values(SweepParameter::lambda).front(), 0.0);
    EXPECT_DOUBLE_EQ(default_sweep_values(SweepParameter::lambda).back(), 0.1);
}

TEST(Sweep, ParameterNames) {
    for (SweepParameter p : {SweepParameter::mu1, SweepParameter::mu2, SweepParameter::gamma, SweepParameter::w,
                             SweepParameter::lambda}) {
        EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
    }
    EXPECT_THROW(parse_sweep_parameter("sigma"), std::invalid_argument);
}

}  // namespace
}  // namespace stateproj
