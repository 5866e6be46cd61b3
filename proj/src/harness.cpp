#include "sparsevss/harness.hpp"

#include "sparsevss/modem.hpp"
#include "sparsevss/signal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace sparsevss {

namespace {

constexpr std::uint64_t kChannelStream = 0;
constexpr std::uint64_t kRegressorStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kBerSalt = 0xBE5;
constexpr std::uint64_t kFrameStreamBase = 16;

unsigned worker_count(int threads, std::size_t tasks)
{
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(tasks, 1)));
}

/// Runs body(i) for i in [0, count). Each index writes only its own slot, so
/// results are independent of scheduling.
template <class Body>
void parallel_for(std::size_t count, int threads, Body&& body)
{
    const unsigned workers = worker_count(threads, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) {
        throw ContractViolation("config field '" + field + "': " + what);
    }
}

}  // namespace

void ExperimentConfig::validate() const
{
    require(n_t >= 1, "n_t", "must be >= 1");
    require(n_r >= 1, "n_r", "must be >= 1");
    require(tap_length >= 1, "tap_length", "must be >= 1");
    require(!sparsity.empty(), "sparsity", "must not be empty");
    for (int t : sparsity) {
        require(t >= 1 && t <= tap_length, "sparsity", "each value must lie in [1, tap_length]");
    }
    require(!snr_db.empty(), "snr_db", "must not be empty");
    for (double s : snr_db) {
        require(std::isfinite(s), "snr_db", "values must be finite");
    }
    require(!algorithms.empty(), "algorithms", "must not be empty");
    require(mu > 0.0 && std::isfinite(mu), "mu", "must be > 0");
    require(mu_max > 0.0 && mu_max <= 2.0, "mu_max", "must lie in (0, 2]");
    require(!c_threshold || *c_threshold > 0.0, "c_threshold", "must be > 0");
    require(!c_table.empty(), "c_table", "must not be empty");
    for (const auto& e : c_table) {
        require(e.c > 0.0 && std::isfinite(e.snr_db), "c_table", "entries need finite snr_db and c > 0");
    }
    require(beta >= 0.0 && beta < 1.0, "beta", "must lie in [0, 1)");
    require(!gamma_za || *gamma_za >= 0.0, "gamma_za", "must be >= 0");
    require(!gamma_rza || *gamma_rza >= 0.0, "gamma_rza", "must be >= 0");
    require(epsilon_rza > 0.0, "epsilon_rza", "must be > 0");
    require(max_iterations >= 1, "max_iterations", "must be >= 1");
    require(stop_epsilon >= 0.0, "stop_epsilon", "must be >= 0");
    require(num_trials >= 1, "num_trials", "must be >= 1");
    require(!qam_orders.empty(), "qam_orders", "must not be empty");
    for (int q : qam_orders) {
        require(is_supported_qam_order(q), "qam_orders", "supported orders are 16, 64, 256");
    }
    require(!esn0_range_db.empty(), "esn0_range_db", "must not be empty");
    require(subcarriers >= tap_length, "subcarriers", "must be >= tap_length");
    require(cp_length >= tap_length - 1, "cp_length", "must be >= tap_length - 1");
    require(cp_length < subcarriers, "cp_length", "must be < subcarriers");
    require(ber_sparsity >= 1 && ber_sparsity <= tap_length, "ber_sparsity", "must lie in [1, tap_length]");
    require(std::isfinite(ber_training_snr_db), "ber_training_snr_db", "must be finite");
    require(ber_min_errors >= 0, "ber_min_errors", "must be >= 0");
    require(ber_min_frames >= 1, "ber_min_frames", "must be >= 1");
    require(ber_max_frames >= ber_min_frames, "ber_max_frames", "must be >= ber_min_frames");
    require(ber_frames_per_channel >= 1, "ber_frames_per_channel", "must be >= 1");
    require(threads >= 0, "threads", "must be >= 0");
}

double received_power(const ExperimentConfig& config)
{
    return 1.0 / (static_cast<double>(config.n_t) * config.tap_length);
}

NoiseModel noise_for(const ExperimentConfig& config, double snr_db)
{
    return NoiseModel::from_snr(snr_db, received_power(config));
}

double c_threshold_for(const ExperimentConfig& config, double snr_db)
{
    if (config.c_threshold) {
        return *config.c_threshold;
    }
    const auto nearest = std::min_element(config.c_table.begin(), config.c_table.end(),
                                          [snr_db](const CTableEntry& a, const CTableEntry& b) {
                                              return std::abs(a.snr_db - snr_db) < std::abs(b.snr_db - snr_db);
                                          });
    return nearest->c;
}

double default_rho_za(int sparsity)
{
    return sparsity <= 1 ? 0.006 : 0.002;
}

double default_rho_rza(int sparsity)
{
    return sparsity <= 1 ? 0.0006 : 0.0002;
}

AlgorithmConfig resolve_algorithm(const ExperimentConfig& config, Variant variant, int sparsity, double snr_db)
{
    const double sigma2 = noise_for(config, snr_db).variance;
    AlgorithmConfig a;
    a.variant = variant;
    a.mu = config.mu;
    a.mu_max = config.mu_max;
    a.c_threshold = c_threshold_for(config, snr_db);
    a.beta = config.beta;
    a.epsilon_rza = config.epsilon_rza;
    a.gamma_za = config.gamma_za.value_or(default_rho_za(sparsity)) * sigma2;
    a.gamma_rza = config.gamma_rza.value_or(default_rho_rza(sparsity)) * config.epsilon_rza * sigma2;
    return a;
}

TrialSpec make_trial_spec(const ExperimentConfig& config, Variant variant, int sparsity, double snr_db)
{
    TrialSpec spec;
    spec.n_t = config.n_t;
    spec.n_r = config.n_r;
    spec.tap_length = config.tap_length;
    spec.sparsity = sparsity;
    spec.algorithm = resolve_algorithm(config, variant, sparsity, snr_db);
    spec.noise = noise_for(config, snr_db);
    spec.max_iterations = config.max_iterations;
    spec.stop_epsilon = config.stop_epsilon;
    return spec;
}

int select_receive_antenna(long long n, int n_r_count)
{
    if (n < 1 || n_r_count < 1) {
        throw ContractViolation("select_receive_antenna: need n >= 1 and n_r >= 1");
    }
    return static_cast<int>((n - 1) % n_r_count) + 1;
}

bool stop_criterion_met(double change_norm2, long long n, double stop_epsilon, long long max_iterations)
{
    return change_norm2 <= stop_epsilon || n > max_iterations;
}

bool check_stop(const CMatrix& prev, const CMatrix& next, long long n, double stop_epsilon, long long max_iterations)
{
    if (prev.rows() != next.rows() || prev.cols() != next.cols()) {
        throw ContractViolation("check_stop: estimate shapes differ");
    }
    return stop_criterion_met((next - prev).squaredNorm(), n, stop_epsilon, max_iterations);
}

double squared_error(const CMatrix& truth, const CMatrix& estimate)
{
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
        throw ContractViolation("squared_error: shapes differ");
    }
    return (truth - estimate).squaredNorm();
}

std::uint64_t trial_seed(std::uint64_t base, int index)
{
    return derive_seed(base, static_cast<std::uint64_t>(index));
}

TrialResult run_estimation_trial(const TrialSpec& spec, std::uint64_t seed)
{
    spec.algorithm.validate();
    if (spec.max_iterations < 1) {
        throw ContractViolation("run_estimation_trial: max_iterations must be >= 1");
    }

    Rng channel_rng(derive_seed(seed, kChannelStream));
    Rng regressor_rng(derive_seed(seed, kRegressorStream));
    Rng noise_rng(derive_seed(seed, kNoiseStream));

    TrialResult result;
    result.channel = generate_sparse_channel(channel_rng, spec.n_t, spec.n_r, spec.tap_length, spec.sparsity);
    const Eigen::Index width = static_cast<Eigen::Index>(spec.n_t) * spec.tap_length;
    result.estimate = CMatrix::Zero(spec.n_r, width);
    result.updates_per_antenna.assign(static_cast<std::size_t>(spec.n_r), 0);
    result.squared_error.reserve(static_cast<std::size_t>(spec.max_iterations));
    result.step_sizes.reserve(static_cast<std::size_t>(spec.max_iterations));

    std::vector<FilterState> filters(static_cast<std::size_t>(spec.n_r), FilterState::zeros(width));

    for (long long n = 1;; ++n) {
        const int rx = select_receive_antenna(n, spec.n_r) - 1;
        FilterState& filter = filters[static_cast<std::size_t>(rx)];

        const Regressor x = generate_training_regressor(regressor_rng, spec.n_t, spec.tap_length);
        const cdouble y = apply_channel(result.channel.row(rx), x.samples(), spec.noise, noise_rng);

        const CVector before = filter.weights;
        step(filter, x.samples(), y, spec.algorithm);
        const double change = (filter.weights - before).squaredNorm();

        result.estimate.row(rx) = filter.weights.transpose();
        ++result.updates_per_antenna[static_cast<std::size_t>(rx)];
        result.squared_error.push_back(squared_error(result.channel.entries, result.estimate));
        result.step_sizes.push_back(filter.step_size);

        // The cap is tested against the index of the next update, so exactly
        // max_iterations updates run when the change criterion never fires.
        if (stop_criterion_met(change, n + 1, spec.stop_epsilon, spec.max_iterations)) {
            result.stopped_early = change <= spec.stop_epsilon && n < spec.max_iterations;
            break;
        }
    }
    return result;
}

double tail_mean(const std::vector<double>& values, double fraction)
{
    if (values.empty()) {
        return 0.0;
    }
    const auto count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size()))), 1, values.size());
    double sum = 0.0;
    for (auto it = values.end() - static_cast<std::ptrdiff_t>(count); it != values.end(); ++it) {
        sum += *it;
    }
    return sum / static_cast<double>(count);
}

double MseCurve::tail_mean(double fraction) const
{
    return sparsevss::tail_mean(mse, fraction);
}

std::vector<double> average_series(const std::vector<std::vector<double>>& series)
{
    std::size_t length = 0;
    for (const auto& s : series) {
        length = std::max(length, s.size());
    }
    std::vector<double> mean(length, 0.0);
    if (series.empty()) {
        return mean;
    }
    for (const auto& s : series) {
        if (s.empty()) {
            continue;
        }
        for (std::size_t i = 0; i < length; ++i) {
            mean[i] += i < s.size() ? s[i] : s.back();
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(series.size());
    }
    return mean;
}

std::vector<MseCurve> run_monte_carlo_mse(const ExperimentConfig& config)
{
    config.validate();
    std::vector<MseCurve> curves;
    for (int sparsity : config.sparsity) {
        for (double snr : config.snr_db) {
            for (Variant variant : config.algorithms) {
                const TrialSpec spec = make_trial_spec(config, variant, sparsity, snr);
                const auto trials = static_cast<std::size_t>(config.num_trials);
                std::vector<std::vector<double>> errors(trials);
                std::vector<std::vector<double>> steps(trials);
                parallel_for(trials, config.threads, [&](std::size_t t) {
                    TrialResult r = run_estimation_trial(spec, trial_seed(config.rng_seed, static_cast<int>(t)));
                    errors[t] = std::move(r.squared_error);
                    steps[t] = std::move(r.step_sizes);
                });

                MseCurve curve;
                curve.algorithm = variant;
                curve.sparsity = sparsity;
                curve.snr_db = snr;
                curve.seed = config.rng_seed;
                curve.num_trials = config.num_trials;
                curve.resolved = spec.algorithm;
                curve.noise_variance = spec.noise.variance;
                curve.mse = average_series(errors);
                curve.mean_step_size = average_series(steps);
                curve.trial_tail_mse.reserve(trials);
                for (auto& e : errors) {
                    // Pad to the common length so every trial's window covers the same iterations.
                    e.resize(curve.mse.size(), e.empty() ? 0.0 : e.back());
                    curve.trial_tail_mse.push_back(tail_mean(e, 0.1));
                }
                curves.push_back(std::move(curve));
            }
        }
    }
    return curves;
}

namespace {

struct BlockCounts {
    // [point][curve]
    std::vector<std::vector<std::uint64_t>> errors;
    std::uint64_t bits_per_curve{0};
};

void random_bits(Rng& rng, Bits& bits)
{
    std::uint64_t word = 0;
    int left = 0;
    for (auto& b : bits) {
        if (left == 0) {
            word = rng();
            left = 64;
        }
        b = static_cast<std::uint8_t>(word & 1U);
        word >>= 1;
        --left;
    }
}

/// Transmits `frames` frames at one Es/N0 through `channel` and counts bit
/// errors for every detector. Unusable subcarriers count all their bits.
std::vector<std::uint64_t> count_frame_errors(const ChannelMatrix& channel,
                                              const std::vector<ZeroForcingDetector>& detectors,
                                              const QamConstellation& qam, const CMatrix& dft, int cp_length,
                                              double noise_variance, int frames, Rng& rng)
{
    const int k_sub = static_cast<int>(dft.rows());
    const int bps = qam.bits_per_symbol();
    const auto bits_per_stream = static_cast<std::size_t>(k_sub) * static_cast<std::size_t>(bps);
    std::vector<std::uint64_t> errors(detectors.size(), 0);

    Bits bits(bits_per_stream * static_cast<std::size_t>(channel.n_t));
    std::vector<CVector> tx_time(static_cast<std::size_t>(channel.n_t));
    CMatrix y_freq(channel.n_r, k_sub);

    for (int f = 0; f < frames; ++f) {
        random_bits(rng, bits);
        for (int t = 0; t < channel.n_t; ++t) {
            const std::span<const std::uint8_t> stream(bits.data() + static_cast<std::size_t>(t) * bits_per_stream,
                                                       bits_per_stream);
            tx_time[static_cast<std::size_t>(t)] = make_ofdm_frame(qam_modulate(stream, qam), cp_length, dft).time_samples;
        }
        for (int r = 0; r < channel.n_r; ++r) {
            CVector rx = CVector::Zero(k_sub + cp_length);
            for (int t = 0; t < channel.n_t; ++t) {
                rx += convolve(channel.link(r, t), tx_time[static_cast<std::size_t>(t)]);
            }
            if (noise_variance > 0.0) {
                for (Eigen::Index i = 0; i < rx.size(); ++i) {
                    rx[i] += complex_gaussian(rng, noise_variance);
                }
            }
            y_freq.row(r) = ofdm_demodulate(rx, cp_length, dft).transpose();
        }

        for (std::size_t d = 0; d < detectors.size(); ++d) {
            const CMatrix detected = detectors[d].detect(y_freq);
            for (int t = 0; t < channel.n_t; ++t) {
                const Bits decided = qam_demodulate(detected.row(t).transpose(), qam);
                const std::uint8_t* sent = bits.data() + static_cast<std::size_t>(t) * bits_per_stream;
                for (int k = 0; k < k_sub; ++k) {
                    for (int b = 0; b < bps; ++b) {
                        const auto i = static_cast<std::size_t>(k) * bps + b;
                        if (detectors[d].failed(k) || decided[i] != sent[i]) {
                            ++errors[d];
                        }
                    }
                }
            }
        }
    }
    return errors;
}

}  // namespace

std::vector<BerCurve> run_ber_sweep(const ExperimentConfig& config)
{
    config.validate();
    if (config.n_r < config.n_t) {
        throw ContractViolation("config field 'n_r': zero-forcing detection needs n_r >= n_t");
    }

    const CMatrix dft = dft_matrix(config.subcarriers);
    const std::uint64_t ber_seed = derive_seed(config.rng_seed, kBerSalt);
    const std::size_t n_points = config.esn0_range_db.size();
    const std::size_t n_curves = config.algorithms.size() + 1;

    std::vector<TrialSpec> specs;
    for (Variant v : config.algorithms) {
        specs.push_back(make_trial_spec(config, v, config.ber_sparsity, config.ber_training_snr_db));
    }

    std::vector<BerCurve> all_curves;
    for (int order : config.qam_orders) {
        const QamConstellation qam(order);
        const std::uint64_t bits_per_frame = static_cast<std::uint64_t>(config.n_t) * config.subcarriers *
                                             static_cast<std::uint64_t>(qam.bits_per_symbol());

        std::vector<BerCurve> curves(n_curves);
        for (std::size_t c = 0; c < n_curves; ++c) {
            BerCurve& curve = curves[c];
            curve.label = c == 0 ? std::string(kTrueChannelLabel) : std::string(to_string(config.algorithms[c - 1]));
            if (c > 0) {
                curve.algorithm = config.algorithms[c - 1];
            }
            curve.qam_order = order;
            curve.sparsity = config.ber_sparsity;
            curve.training_snr_db = config.ber_training_snr_db;
            curve.seed = config.rng_seed;
            for (double esn0 : config.esn0_range_db) {
                curve.points.push_back({esn0, 0, 0, 0});
            }
        }

        std::vector<bool> done(n_points, false);
        auto point_done = [&](std::size_t p) {
            const int frames = curves[0].points[p].frames;
            if (frames < config.ber_min_frames) {
                return false;
            }
            if (frames >= config.ber_max_frames) {
                return true;
            }
            return std::all_of(curves.begin(), curves.end(), [&](const BerCurve& c) {
                return c.points[p].bit_errors >= static_cast<std::uint64_t>(config.ber_min_errors);
            });
        };

        const std::size_t wave = worker_count(config.threads, n_points * 4);
        std::uint64_t next_block = 0;
        while (!std::all_of(done.begin(), done.end(), [](bool d) { return d; })) {
            std::vector<BlockCounts> results(wave);
            const std::vector<bool> finished_before = done;
            parallel_for(wave, config.threads, [&](std::size_t w) {
                const std::uint64_t block_seed = derive_seed(ber_seed, next_block + w);
                std::vector<ZeroForcingDetector> detectors;
                ChannelMatrix channel;
                for (std::size_t a = 0; a < specs.size(); ++a) {
                    TrialResult trained = run_estimation_trial(specs[a], block_seed);
                    if (a == 0) {
                        channel = trained.channel;
                        detectors.emplace_back(channel_frequency_response(channel.entries, config.n_t,
                                                                          config.tap_length, config.subcarriers));
                    }
                    detectors.emplace_back(channel_frequency_response(trained.estimate, config.n_t,
                                                                      config.tap_length, config.subcarriers));
                }
                BlockCounts& out = results[w];
                out.errors.assign(n_points, std::vector<std::uint64_t>(n_curves, 0));
                out.bits_per_curve = bits_per_frame * static_cast<std::uint64_t>(config.ber_frames_per_channel);
                for (std::size_t p = 0; p < n_points; ++p) {
                    if (finished_before[p]) {
                        continue;
                    }
                    Rng frame_rng(derive_seed(block_seed, kFrameStreamBase + p));
                    const double n0 = std::pow(10.0, -config.esn0_range_db[p] / 10.0);
                    out.errors[p] = count_frame_errors(channel, detectors, qam, dft, config.cp_length, n0,
                                                       config.ber_frames_per_channel, frame_rng);
                }
            });

            // Fold blocks in order; a point stops taking blocks once it is done.
            for (std::size_t w = 0; w < wave; ++w) {
                for (std::size_t p = 0; p < n_points; ++p) {
                    if (done[p]) {
                        continue;
                    }
                    for (std::size_t c = 0; c < n_curves; ++c) {
                        BerPoint& pt = curves[c].points[p];
                        pt.bit_errors += results[w].errors[p][c];
                        pt.bits_total += results[w].bits_per_curve;
                        pt.frames += config.ber_frames_per_channel;
                    }
                    done[p] = point_done(p);
                }
            }
            next_block += wave;
        }

        for (auto& c : curves) {
            all_curves.push_back(std::move(c));
        }
    }
    return all_curves;
}

}  // namespace sparsevss
