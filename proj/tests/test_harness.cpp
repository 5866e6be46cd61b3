#include "sparsevss/harness.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace sparsevss;

namespace {

ExperimentConfig small_mse_config()
{
    ExperimentConfig c;
    c.sparsity = {1};
    c.snr_db = {10.0};
    c.algorithms = {Variant::IssNlms, Variant::VssRzaNlms};
    c.max_iterations = 400;
    c.stop_epsilon = 0.0;
    c.num_trials = 5;
    c.rng_seed = 42;
    return c;
}

ExperimentConfig small_ber_config()
{
    ExperimentConfig c;
    c.n_t = 2;
    c.n_r = 2;
    c.tap_length = 4;
    c.subcarriers = 16;
    c.cp_length = 3;
    c.algorithms = {Variant::IssNlms, Variant::VssRzaNlms};
    c.max_iterations = 1000;
    c.stop_epsilon = 0.0;
    c.qam_orders = {16};
    c.esn0_range_db = {6.0, 18.0, 30.0};
    c.ber_min_frames = 20;
    c.ber_max_frames = 40;
    c.ber_frames_per_channel = 5;
    c.ber_min_errors = 50;
    c.rng_seed = 3;
    return c;
}

TrialSpec spec_for(Variant v, int sparsity = 1, double snr = 10.0)
{
    ExperimentConfig c;
    c.stop_epsilon = 0.0;
    c.max_iterations = 1000;
    return make_trial_spec(c, v, sparsity, snr);
}

}  // namespace

TEST(ReceiveAntenna, RoundRobinSchedule)
{
    EXPECT_EQ(select_receive_antenna(1, 4), 1);
    EXPECT_EQ(select_receive_antenna(4, 4), 4);
    EXPECT_EQ(select_receive_antenna(5, 4), 1);
    EXPECT_EQ(select_receive_antenna(7, 1), 1);
    EXPECT_THROW(select_receive_antenna(0, 4), ContractViolation);
}

TEST(StopCriterion, SmallChangeStops)
{
    const CMatrix a = CMatrix::Ones(4, 64);
    EXPECT_TRUE(check_stop(a, a, 10, 1e-5, 5000));
}

TEST(StopCriterion, LargeChangeContinues)
{
    const CMatrix a = CMatrix::Zero(2, 2);
    CMatrix b = a;
    b(0, 0) = 0.1;
    EXPECT_FALSE(check_stop(a, b, 10, 1e-5, 5000));
}

TEST(StopCriterion, CapStopsAfterMaxIterations)
{
    const CMatrix a = CMatrix::Zero(2, 2);
    const CMatrix b = CMatrix::Ones(2, 2);
    EXPECT_FALSE(check_stop(a, b, 5000, 1e-5, 5000));
    EXPECT_TRUE(check_stop(a, b, 5001, 1e-5, 5000));
}

TEST(StopCriterion, ShapeMismatchIsRejected)
{
    EXPECT_THROW(check_stop(CMatrix::Zero(2, 2), CMatrix::Zero(2, 3), 1, 0.0, 1), ContractViolation);
}

TEST(SquaredError, ZeroEstimatorEqualsReceiveCount)
{
    Rng rng(1);
    for (int t : {1, 4}) {
        const ChannelMatrix ch = generate_sparse_channel(rng, 4, 4, 16, t);
        EXPECT_NEAR(squared_error(ch.entries, CMatrix::Zero(4, 64)), 4.0, 1e-12);
        EXPECT_EQ(squared_error(ch.entries, ch.entries), 0.0);
    }
}

TEST(Resolution, DefaultPenaltiesScaleWithNoise)
{
    ExperimentConfig c;
    const double sigma2 = std::pow(10.0, -1.0) / 64.0;
    EXPECT_NEAR(received_power(c), 1.0 / 64.0, 0.0);
    EXPECT_NEAR(noise_for(c, 10.0).variance, sigma2, 1e-18);
    const AlgorithmConfig t1 = resolve_algorithm(c, Variant::VssZaNlms, 1, 10.0);
    EXPECT_NEAR(t1.gamma_za, 0.006 * sigma2, 1e-20);
    EXPECT_NEAR(t1.gamma_rza, 0.0006 * 20.0 * sigma2, 1e-20);
    const AlgorithmConfig t4 = resolve_algorithm(c, Variant::VssZaNlms, 4, 10.0);
    EXPECT_NEAR(t4.gamma_za, 0.002 * sigma2, 1e-20);
    EXPECT_NEAR(t4.gamma_rza, 0.0002 * 20.0 * sigma2, 1e-20);
}

TEST(Resolution, ExplicitPenaltiesOverrideDefaults)
{
    ExperimentConfig c;
    c.gamma_za = 0.01;
    c.gamma_rza = 0.0;
    const AlgorithmConfig a = resolve_algorithm(c, Variant::IssZaNlms, 4, 20.0);
    EXPECT_NEAR(a.gamma_za, 0.01 * 0.01 / 64.0, 1e-20);
    EXPECT_EQ(a.gamma_rza, 0.0);
}

TEST(Resolution, ThresholdFromNearestTableEntry)
{
    ExperimentConfig c;
    EXPECT_EQ(c_threshold_for(c, 4.0), 1e-4);
    EXPECT_EQ(c_threshold_for(c, 11.0), 1e-5);
    EXPECT_EQ(c_threshold_for(c, 30.0), 1e-5);
    c.c_threshold = 3e-3;
    EXPECT_EQ(c_threshold_for(c, 4.0), 3e-3);
}

TEST(ExperimentConfig, ValidationNamesField)
{
    ExperimentConfig c;
    c.beta = 1.5;
    try {
        c.validate();
        FAIL() << "expected a ContractViolation";
    } catch (const ContractViolation& e) {
        EXPECT_NE(std::string(e.what()).find("'beta'"), std::string::npos);
    }
    c = ExperimentConfig{};
    c.qam_orders = {32};
    EXPECT_THROW(c.validate(), ContractViolation);
    c = ExperimentConfig{};
    c.cp_length = 4;
    EXPECT_THROW(c.validate(), ContractViolation);
}

TEST(EstimationTrial, EveryAntennaGetsItsShare)
{
    TrialSpec spec = spec_for(Variant::IssNlms);
    spec.max_iterations = 1000;
    const TrialResult r = run_estimation_trial(spec, 7);
    EXPECT_EQ(r.updates_per_antenna, (std::vector<int>{250, 250, 250, 250}));
    EXPECT_EQ(r.squared_error.size(), 1000U);
    EXPECT_EQ(r.step_sizes.size(), 1000U);
    EXPECT_FALSE(r.stopped_early);

    spec.max_iterations = 1002;
    EXPECT_EQ(run_estimation_trial(spec, 7).updates_per_antenna, (std::vector<int>{251, 251, 250, 250}));
}

TEST(EstimationTrial, ChangeCriterionCanStopEarly)
{
    TrialSpec spec = spec_for(Variant::IssNlms);
    spec.stop_epsilon = 1.0;
    const TrialResult r = run_estimation_trial(spec, 7);
    EXPECT_TRUE(r.stopped_early);
    EXPECT_EQ(r.squared_error.size(), 1U);
}

TEST(EstimationTrial, DeterministicForSeed)
{
    const TrialSpec spec = spec_for(Variant::VssRzaNlms);
    const TrialResult a = run_estimation_trial(spec, 99);
    const TrialResult b = run_estimation_trial(spec, 99);
    EXPECT_EQ(a.squared_error, b.squared_error);
    EXPECT_TRUE(a.estimate == b.estimate);
    EXPECT_NE(run_estimation_trial(spec, 100).squared_error, a.squared_error);
}

TEST(EstimationTrial, VariantsShareChannelForSeed)
{
    const TrialResult a = run_estimation_trial(spec_for(Variant::IssNlms), 5);
    const TrialResult b = run_estimation_trial(spec_for(Variant::VssZaNlms), 5);
    EXPECT_TRUE(a.channel.entries == b.channel.entries);
}

TEST(EstimationTrial, AllVariantsRunAndImprove)
{
    for (Variant v : all_variants()) {
        const TrialResult r = run_estimation_trial(spec_for(v), 11);
        ASSERT_EQ(r.squared_error.size(), 1000U) << to_string(v);
        for (double e : r.squared_error) {
            ASSERT_TRUE(std::isfinite(e)) << to_string(v);
        }
        EXPECT_LT(r.squared_error.back(), 0.5 * r.squared_error.front()) << to_string(v);
    }
}

TEST(EstimationTrial, FirstUpdateStartsFromZeroEstimate)
{
    const TrialResult r = run_estimation_trial(spec_for(Variant::IssNlms), 13);
    // Only row 1 has moved after one update, so the error is at least that of three zero rows.
    EXPECT_GE(r.squared_error.front(), 3.0 - 1e-12);
    EXPECT_LE(r.squared_error.front(), 4.0 + 1e-12);
}

TEST(Series, AveragePadsShortSeries)
{
    EXPECT_EQ(average_series({{1.0, 3.0, 5.0}, {3.0}}), (std::vector<double>{2.0, 3.0, 4.0}));
    EXPECT_TRUE(average_series({}).empty());
}

TEST(Series, TailMean)
{
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    EXPECT_EQ(tail_mean(v, 0.2), 9.5);
    EXPECT_EQ(tail_mean(v, 0.01), 10.0);
    EXPECT_EQ(tail_mean(v, 1.0), 5.5);
}

TEST(MonteCarlo, SingleTrialMatchesDirectRun)
{
    ExperimentConfig c = small_mse_config();
    c.num_trials = 1;
    const auto curves = run_monte_carlo_mse(c);
    ASSERT_EQ(curves.size(), 2U);
    const TrialSpec spec = make_trial_spec(c, Variant::IssNlms, 1, 10.0);
    EXPECT_EQ(curves[0].mse, run_estimation_trial(spec, trial_seed(c.rng_seed, 0)).squared_error);
}

TEST(MonteCarlo, IndependentOfThreadCount)
{
    ExperimentConfig c = small_mse_config();
    c.threads = 1;
    const auto serial = run_monte_carlo_mse(c);
    c.threads = 3;
    const auto parallel = run_monte_carlo_mse(c);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].mse, parallel[i].mse);
        EXPECT_EQ(serial[i].mean_step_size, parallel[i].mean_step_size);
    }
}

TEST(MonteCarlo, CurveOrderAndMetadata)
{
    ExperimentConfig c = small_mse_config();
    c.sparsity = {1, 4};
    c.snr_db = {10.0, 20.0};
    c.num_trials = 2;
    c.max_iterations = 50;
    const auto curves = run_monte_carlo_mse(c);
    ASSERT_EQ(curves.size(), 8U);
    EXPECT_EQ(curves[0].sparsity, 1);
    EXPECT_EQ(curves[0].snr_db, 10.0);
    EXPECT_EQ(curves[1].algorithm, Variant::VssRzaNlms);
    EXPECT_EQ(curves[2].snr_db, 20.0);
    EXPECT_EQ(curves[4].sparsity, 4);
    for (const auto& curve : curves) {
        EXPECT_EQ(curve.mse.size(), 50U);
        EXPECT_EQ(curve.trial_tail_mse.size(), 2U);
    }
}

TEST(BerSweep, CurvesAndCounts)
{
    const ExperimentConfig c = small_ber_config();
    const auto curves = run_ber_sweep(c);
    ASSERT_EQ(curves.size(), 3U);
    EXPECT_EQ(curves[0].label, kTrueChannelLabel);
    EXPECT_FALSE(curves[0].algorithm.has_value());
    EXPECT_EQ(curves[1].label, "ISS_NLMS");
    EXPECT_EQ(curves[2].label, "VSS_RZA_NLMS");
    const std::uint64_t bits_per_frame = 2 * 16 * 4;
    for (const auto& curve : curves) {
        ASSERT_EQ(curve.points.size(), 3U);
        for (const auto& p : curve.points) {
            EXPECT_GE(p.frames, c.ber_min_frames);
            EXPECT_LE(p.frames, c.ber_max_frames);
            EXPECT_EQ(p.bits_total, bits_per_frame * static_cast<std::uint64_t>(p.frames));
            EXPECT_EQ(p.frames, curves[0].points[static_cast<std::size_t>(&p - curve.points.data())].frames);
        }
    }
}

TEST(BerSweep, GenieErrorRateFallsWithSnr)
{
    const auto curves = run_ber_sweep(small_ber_config());
    const auto& genie = curves[0].points;
    EXPECT_GT(genie[0].ber(), genie[1].ber());
    EXPECT_GE(genie[1].ber(), genie[2].ber());
    EXPECT_GT(genie[0].ber(), 0.01);
}

TEST(BerSweep, IndependentOfThreadCount)
{
    ExperimentConfig c = small_ber_config();
    c.threads = 1;
    const auto serial = run_ber_sweep(c);
    c.threads = 4;
    const auto parallel = run_ber_sweep(c);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        for (std::size_t p = 0; p < serial[i].points.size(); ++p) {
            EXPECT_EQ(serial[i].points[p].bit_errors, parallel[i].points[p].bit_errors);
            EXPECT_EQ(serial[i].points[p].bits_total, parallel[i].points[p].bits_total);
        }
    }
}

TEST(BerSweep, RejectsTooFewReceiveAntennas)
{
    ExperimentConfig c = small_ber_config();
    c.n_r = 1;
    EXPECT_THROW(run_ber_sweep(c), ContractViolation);
}
