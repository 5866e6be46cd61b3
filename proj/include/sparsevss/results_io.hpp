#pragma once

#include "sparsevss/harness.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsevss {

/// `{subcommand}_{label}_T{T}_SNR{snr}.csv`, with `_QAM{order}` before the
/// extension when a QAM order is given.
std::string result_filename(std::string_view subcommand, std::string_view label, int sparsity, double snr_db,
                            std::optional<int> qam_order = std::nullopt);

/// `# key=value` metadata, then `iteration,mse_linear,mse_db`.
void write_mse_csv(std::ostream& out, const MseCurve& curve);
/// `# key=value` metadata, then `esn0_db,ber,bit_errors,bits_total`.
void write_ber_csv(std::ostream& out, const BerCurve& curve);
/// `# key=value` metadata, then `iteration,step_size`.
void write_trace_csv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& metadata,
                     const std::vector<double>& step_sizes);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Shortest round-trip decimal form of a double ("%.17g"-style).
std::string format_number(double v);

}  // namespace sparsevss
