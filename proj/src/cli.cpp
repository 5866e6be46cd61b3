#include "sparsevss/cli.hpp"

#include "sparsevss/config.hpp"
#include "sparsevss/harness.hpp"
#include "sparsevss/results_io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

namespace sparsevss::cli {

namespace {

namespace fs = std::filesystem;

struct Artifact {
    std::string name;
    std::string content;
};

/// Collects output files in memory so the manifest can checksum exactly
/// what was written.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void add(std::string name, std::string content) { files_.push_back({std::move(name), std::move(content)}); }

    void write(const std::string& subcommand, const ExperimentConfig& config) const
    {
        nlohmann::json artifacts = nlohmann::json::array();
        for (const auto& f : files_) {
            write_file(f.name, f.content);
            artifacts.push_back({{"file", f.name}, {"sha256", sha256_hex(f.content)}});
        }
        const nlohmann::json manifest{
            {"subcommand", subcommand},
            {"seed", config.rng_seed},
            {"config", nlohmann::json::parse(config_to_json(config))},
            {"artifacts", artifacts},
        };
        write_file("manifest_" + subcommand + ".json", manifest.dump(2) + "\n");
    }

    std::size_t size() const { return files_.size(); }

private:
    void write_file(const std::string& name, const std::string& content) const
    {
        const fs::path path = dir_ / name;
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        file << content;
        file.close();
        if (!file) {
            throw std::runtime_error("cannot write output file '" + path.string() + "'");
        }
    }

    fs::path dir_;
    std::vector<Artifact> files_;
};

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string db(double v)
{
    return fixed(10.0 * std::log10(v), 2);
}

std::string mse_text(const MseCurve& curve)
{
    std::ostringstream s;
    write_mse_csv(s, curve);
    return s.str();
}

void run_mse_convergence(const ExperimentConfig& config, OutputSet& output, std::ostream& out)
{
    for (const MseCurve& curve : run_monte_carlo_mse(config)) {
        const std::string label(to_string(curve.algorithm));
        output.add(result_filename("mse-convergence", label, curve.sparsity, curve.snr_db), mse_text(curve));
        out << "mse-convergence " << label << " T=" << curve.sparsity << " SNR=" << format_number(curve.snr_db)
            << "dB: final-1% mean MSE " << db(curve.tail_mean(0.01)) << " dB (" << curve.num_trials << " trials)\n";
    }
}

void run_single(const ExperimentConfig& config, OutputSet& output, std::ostream& out)
{
    const std::uint64_t seed = trial_seed(config.rng_seed, 0);
    for (int sparsity : config.sparsity) {
        bool channel_written = false;
        for (double snr : config.snr_db) {
            for (Variant variant : config.algorithms) {
                const TrialSpec spec = make_trial_spec(config, variant, sparsity, snr);
                TrialResult trial = run_estimation_trial(spec, seed);
                if (!channel_written) {
                    std::ostringstream s;
                    write_channel_csv(s, trial.channel);
                    output.add("single-run_channel_T" + std::to_string(sparsity) + ".csv", s.str());
                    channel_written = true;
                }
                MseCurve curve;
                curve.algorithm = variant;
                curve.sparsity = sparsity;
                curve.snr_db = snr;
                curve.seed = config.rng_seed;
                curve.num_trials = 1;
                curve.resolved = spec.algorithm;
                curve.noise_variance = spec.noise.variance;
                curve.mse = std::move(trial.squared_error);
                curve.mean_step_size = std::move(trial.step_sizes);
                const std::string label(to_string(variant));
                output.add(result_filename("single-run", label, sparsity, snr), mse_text(curve));
                out << "single-run " << label << " T=" << sparsity << " SNR=" << format_number(snr)
                    << "dB: final-1% mean MSE " << db(curve.tail_mean(0.01)) << " dB after " << curve.mse.size()
                    << " iterations" << (trial.stopped_early ? " (stopped early)" : "") << "\n";
            }
        }
    }
}

void run_trace(const ExperimentConfig& config, OutputSet& output, std::ostream& out)
{
    const std::uint64_t seed = trial_seed(config.rng_seed, 0);
    for (int sparsity : config.sparsity) {
        for (double snr : config.snr_db) {
            for (Variant variant : config.algorithms) {
                const TrialSpec spec = make_trial_spec(config, variant, sparsity, snr);
                const TrialResult trial = run_estimation_trial(spec, seed);
                const std::string label(to_string(variant));
                std::ostringstream s;
                write_trace_csv(s,
                                {{"algorithm", label},
                                 {"sparsity", std::to_string(sparsity)},
                                 {"snr_db", format_number(snr)},
                                 {"seed", std::to_string(config.rng_seed)},
                                 {"mu", format_number(spec.algorithm.mu)},
                                 {"mu_max", format_number(spec.algorithm.mu_max)},
                                 {"c_threshold", format_number(spec.algorithm.c_threshold)},
                                 {"beta", format_number(spec.algorithm.beta)}},
                                trial.step_sizes);
                output.add(result_filename("trace-stepsize", label, sparsity, snr), s.str());

                const auto& steps = trial.step_sizes;
                const std::vector<double> head(steps.begin(),
                                               steps.begin() + static_cast<std::ptrdiff_t>(
                                                                   std::max<std::size_t>(1, steps.size() / 10)));
                out << "trace-stepsize " << label << " T=" << sparsity << " SNR=" << format_number(snr)
                    << "dB: mean step first 10% " << fixed(tail_mean(head, 1.0), 4) << ", last 10% "
                    << fixed(tail_mean(steps, 0.1), 4) << "\n";
            }
        }
    }
}

void run_ber(const ExperimentConfig& config, OutputSet& output, std::ostream& out)
{
    for (const BerCurve& curve : run_ber_sweep(config)) {
        std::ostringstream s;
        write_ber_csv(s, curve);
        output.add(result_filename("ber-sweep", curve.label, curve.sparsity, curve.training_snr_db, curve.qam_order),
                   s.str());
        const BerPoint& last = curve.points.back();
        out << "ber-sweep " << curve.label << " QAM" << curve.qam_order << ": BER " << format_number(last.ber())
            << " at Es/N0=" << format_number(last.esn0_db) << "dB (" << last.bits_total << " bits)\n";
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Sparse ISS/VSS-NLMS MIMO channel estimation experiments", "sparsevss_cli"};
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    bool dump_config = false;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--override", overrides, "key=value applied after the config file (repeatable)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Base RNG seed");
    app.add_option("--trials", trials, "Monte Carlo trials");
    app.add_flag("--dump-config", dump_config, "Print the effective configuration as JSON and exit");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"mse-convergence", "Average MSE versus iteration over Monte Carlo trials"},
        {"ber-sweep", "BER versus Es/N0 with frozen channel estimates"},
        {"single-run", "One estimation trial per algorithm, plus the channel realization"},
        {"trace-stepsize", "Step size versus iteration for one trial"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help);
    }
    app.require_subcommand(0, 1);

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) {
        args.emplace_back(argv[i]);
    }
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    ExperimentConfig config;
    try {
        if (!config_path.empty()) {
            config = config_from_json(read_file(config_path), config);
        }
        for (const auto& o : overrides) {
            apply_override(config, o);
        }
        if (seed) {
            config.rng_seed = *seed;
        }
        if (trials) {
            config.num_trials = *trials;
        }
        config.validate();
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (dump_config) {
        out << config_to_json(config);
        return 0;
    }

    const auto chosen = app.get_subcommands();
    if (chosen.empty()) {
        err << "error: a subcommand is required (mse-convergence, ber-sweep, single-run, trace-stepsize)\n";
        return 2;
    }
    const std::string subcommand = chosen.front()->get_name();

    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec || !fs::is_directory(out_dir)) {
            err << "error: cannot create output directory '" << out_dir << "'"
                << (ec ? ": " + ec.message() : std::string()) << "\n";
            return 3;
        }
        OutputSet output(out_dir);
        if (subcommand == "mse-convergence") {
            run_mse_convergence(config, output, out);
        } else if (subcommand == "ber-sweep") {
            run_ber(config, output, out);
        } else if (subcommand == "single-run") {
            run_single(config, output, out);
        } else {
            run_trace(config, output, out);
        }
        output.write(subcommand, config);
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace sparsevss::cli
