#pragma once

// Monte Carlo driver: round-robin adaptive estimation of a sparse MIMO channel,
// averaged MSE curves, and a QAM-OFDM bit-error-rate sweep over frozen
// channel estimates.

#include "sparsevss/channel.hpp"
#include "sparsevss/filter.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparsevss {

struct CTableEntry {
    double snr_db;
    double c;
};

struct ExperimentConfig {
    int n_t{4};
    int n_r{4};
    int tap_length{16};
    std::vector<int> sparsity{1, 4};
    std::vector<double> snr_db{10.0, 20.0};
    std::vector<Variant> algorithms{all_variants()};

    double mu{0.2};
    double mu_max{2.0};
    /// Fixed C for every SNR; when unset, C comes from c_table.
    std::optional<double> c_threshold;
    /// Nearest-SNR lookup for C.
    std::vector<CTableEntry> c_table{{5.0, 1e-4}, {10.0, 1e-5}, {20.0, 1e-5}};
    double beta{0.997};
    /// Zero-attraction strength in units of sigma_n^2. Unset: 0.006 for T = 1,
    /// 0.002 otherwise.
    std::optional<double> gamma_za;
    /// Reweighted strength in units of sigma_n^2 (multiplied by epsilon_rza).
    /// Unset: 0.0006 for T = 1, 0.0002 otherwise.
    std::optional<double> gamma_rza;
    double epsilon_rza{20.0};

    int max_iterations{5000};
    double stop_epsilon{1e-5};
    int num_trials{200};
    std::uint64_t rng_seed{1};

    std::vector<int> qam_orders{16, 64, 256};
    std::vector<double> esn0_range_db{12.0, 15.0, 18.0, 21.0, 24.0, 27.0, 30.0};
    int subcarriers{64};
    int cp_length{16};
    int ber_sparsity{1};
    double ber_training_snr_db{20.0};
    int ber_min_errors{100};
    int ber_min_frames{100};
    int ber_max_frames{1000};
    int ber_frames_per_channel{10};

    /// Worker threads for trial-level parallelism; 0 picks the hardware count.
    /// Results do not depend on it.
    int threads{0};

    /// Throws ContractViolation naming the offending field.
    void validate() const;
};

/// Everything one estimation trial needs, with all table lookups resolved.
struct TrialSpec {
    int n_t{4};
    int n_r{4};
    int tap_length{16};
    int sparsity{1};
    AlgorithmConfig algorithm;
    NoiseModel noise;
    int max_iterations{5000};
    double stop_epsilon{1e-5};
};

/// E|h_r^T x|^2 for unit-norm rows and unit-power regressors: 1 / (n_t L).
double received_power(const ExperimentConfig& config);
NoiseModel noise_for(const ExperimentConfig& config, double snr_db);
double c_threshold_for(const ExperimentConfig& config, double snr_db);
double default_rho_za(int sparsity);
double default_rho_rza(int sparsity);
AlgorithmConfig resolve_algorithm(const ExperimentConfig& config, Variant variant, int sparsity, double snr_db);
TrialSpec make_trial_spec(const ExperimentConfig& config, Variant variant, int sparsity, double snr_db);

/// Receive antenna updated at iteration n >= 1: mod(n - 1, n_r) + 1 (1-based).
int select_receive_antenna(long long n, int n_r_count);

/// True iff ||next - prev||_F^2 <= stop_epsilon or n > max_iterations.
bool check_stop(const CMatrix& prev, const CMatrix& next, long long n, double stop_epsilon, long long max_iterations);
bool stop_criterion_met(double change_norm2, long long n, double stop_epsilon, long long max_iterations);

/// ||truth - estimate||_F^2.
double squared_error(const CMatrix& truth, const CMatrix& estimate);

struct TrialResult {
    ChannelMatrix channel;
    CMatrix estimate;
    /// ||H - H~(n)||_F^2 after update n = 1, 2, ...
    std::vector<double> squared_error;
    /// Step size used by the antenna updated at n = 1, 2, ...
    std::vector<double> step_sizes;
    std::vector<int> updates_per_antenna;
    bool stopped_early{false};
};

/// Seed of trial `index` under a base seed.
std::uint64_t trial_seed(std::uint64_t base, int index);

/**
 * One pass of the round-robin estimation loop on a freshly drawn channel.
 *
 * The channel, the training regressors and the receiver noise come from
 * three streams derived from `seed`, so every variant sees the same
 * channel and data for a given seed.
 */
TrialResult run_estimation_trial(const TrialSpec& spec, std::uint64_t seed);

struct MseCurve {
    Variant algorithm{Variant::IssNlms};
    int sparsity{1};
    double snr_db{0.0};
    std::uint64_t seed{0};
    int num_trials{0};
    AlgorithmConfig resolved;
    double noise_variance{0.0};
    std::vector<double> mse;
    std::vector<double> mean_step_size;
    /// Per-trial mean of the final 10% of that trial's (padded) series.
    std::vector<double> trial_tail_mse;

    /// Mean of the last ceil(fraction * size) values of `mse`.
    double tail_mean(double fraction) const;
};

/// Element-wise mean over trials, summed in the given order. Shorter series
/// (early stops) are extended with their final value.
std::vector<double> average_series(const std::vector<std::vector<double>>& series);
double tail_mean(const std::vector<double>& values, double fraction);

/// One curve per (sparsity, snr, algorithm), in that nesting order.
std::vector<MseCurve> run_monte_carlo_mse(const ExperimentConfig& config);

struct BerPoint {
    double esn0_db{0.0};
    std::uint64_t bit_errors{0};
    std::uint64_t bits_total{0};
    int frames{0};

    double ber() const { return bits_total == 0 ? 0.0 : static_cast<double>(bit_errors) / bits_total; }
};

struct BerCurve {
    /// Algorithm name, or "TRUE_CHANNEL" for the genie detector.
    std::string label;
    std::optional<Variant> algorithm;
    int qam_order{16};
    int sparsity{1};
    double training_snr_db{0.0};
    std::uint64_t seed{0};
    std::vector<BerPoint> points;
};

inline constexpr const char* kTrueChannelLabel = "TRUE_CHANNEL";

/**
 * Train every configured algorithm, freeze the estimates, and count bit
 * errors of ZF-detected QAM-OFDM frames sent through the true channel.
 *
 * Returns, per QAM order, the genie curve followed by one curve per algorithm.
 * All curves at a point share channels, data and noise.
 */
std::vector<BerCurve> run_ber_sweep(const ExperimentConfig& config);

}  // namespace sparsevss
