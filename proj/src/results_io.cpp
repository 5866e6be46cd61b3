#include "sparsevss/results_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace sparsevss {

std::string format_number(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::array<char, 40> buf{};
    // Shortest %g precision that reads back to the same double.
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf.data(), buf.size(), "%.*g", precision, v);
        if (std::strtod(buf.data(), nullptr) == v) {
            break;
        }
    }
    return buf.data();
}

std::string result_filename(std::string_view subcommand, std::string_view label, int sparsity, double snr_db,
                            std::optional<int> qam_order)
{
    std::string name = std::string(subcommand) + "_" + std::string(label) + "_T" + std::to_string(sparsity) + "_SNR" +
                       format_number(snr_db);
    if (qam_order) {
        name += "_QAM" + std::to_string(*qam_order);
    }
    return name + ".csv";
}

namespace {

void meta(std::ostream& out, std::string_view key, const std::string& value)
{
    out << "# " << key << '=' << value << '\n';
}

double to_db(double v)
{
    return 10.0 * std::log10(v);
}

}  // namespace

void write_mse_csv(std::ostream& out, const MseCurve& curve)
{
    meta(out, "algorithm", std::string(to_string(curve.algorithm)));
    meta(out, "sparsity", std::to_string(curve.sparsity));
    meta(out, "snr_db", format_number(curve.snr_db));
    meta(out, "seed", std::to_string(curve.seed));
    meta(out, "trials", std::to_string(curve.num_trials));
    meta(out, "noise_variance", format_number(curve.noise_variance));
    meta(out, "mu", format_number(curve.resolved.mu));
    meta(out, "mu_max", format_number(curve.resolved.mu_max));
    meta(out, "c_threshold", format_number(curve.resolved.c_threshold));
    meta(out, "beta", format_number(curve.resolved.beta));
    meta(out, "gamma_za", format_number(curve.resolved.gamma_za));
    meta(out, "gamma_rza", format_number(curve.resolved.gamma_rza));
    meta(out, "epsilon_rza", format_number(curve.resolved.epsilon_rza));
    out << "iteration,mse_linear,mse_db\n";
    for (std::size_t i = 0; i < curve.mse.size(); ++i) {
        out << (i + 1) << ',' << format_number(curve.mse[i]) << ',' << format_number(to_db(curve.mse[i])) << '\n';
    }
}

void write_ber_csv(std::ostream& out, const BerCurve& curve)
{
    meta(out, "detector", curve.label);
    meta(out, "qam_order", std::to_string(curve.qam_order));
    meta(out, "sparsity", std::to_string(curve.sparsity));
    meta(out, "training_snr_db", format_number(curve.training_snr_db));
    meta(out, "seed", std::to_string(curve.seed));
    out << "esn0_db,ber,bit_errors,bits_total\n";
    for (const auto& p : curve.points) {
        out << format_number(p.esn0_db) << ',' << format_number(p.ber()) << ',' << p.bit_errors << ','
            << p.bits_total << '\n';
    }
}

void write_trace_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& metadata,
                     const std::vector<double>& step_sizes)
{
    for (const auto& [key, value] : metadata) {
        meta(out, key, value);
    }
    out << "iteration,step_size\n";
    for (std::size_t i = 0; i < step_sizes.size(); ++i) {
        out << (i + 1) << ',' << format_number(step_sizes[i]) << '\n';
    }
}

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
        throw std::runtime_error("sha256: OpenSSL digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0xF]);
    }
    return hex;
}

}  // namespace sparsevss
