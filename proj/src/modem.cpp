#include "sparsevss/modem.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace sparsevss {

bool is_supported_qam_order(int order)
{
    return order == 16 || order == 64 || order == 256;
}

QamConstellation::QamConstellation(int order) : order_(order)
{
    if (!is_supported_qam_order(order)) {
        throw ContractViolation("QAM order " + std::to_string(order) + " not supported (use 16, 64 or 256)");
    }
    bits_per_symbol_ = std::countr_zero(static_cast<unsigned>(order));
    levels_ = 1 << (bits_per_symbol_ / 2);
    // Mean energy of the odd-integer lattice {+-1, +-3, ...}^2 is 2 (M - 1) / 3.
    scale_ = std::sqrt(3.0 / (2.0 * (order - 1)));

    label_to_pos_.resize(static_cast<std::size_t>(levels_));
    for (int pos = 0; pos < levels_; ++pos) {
        label_to_pos_[static_cast<std::size_t>(gray(pos))] = pos;
    }

    const int half = bits_per_symbol_ / 2;
    points_.resize(static_cast<std::size_t>(order));
    for (int index = 0; index < order; ++index) {
        const int i_label = index >> half;
        const int q_label = index & (levels_ - 1);
        points_[static_cast<std::size_t>(index)] = {level_amplitude(position_of_label(i_label)),
                                                    level_amplitude(position_of_label(q_label))};
    }
}

double QamConstellation::level_amplitude(int pos) const
{
    return (2.0 * pos - levels_ + 1.0) * scale_;
}

int QamConstellation::slice_axis(double value) const
{
    // Work in units of the half-spacing so the level grid is the odd integers.
    const double u = value / scale_;
    const double pos_f = (u + levels_ - 1.0) / 2.0;
    int lo = static_cast<int>(std::floor(pos_f));
    if (lo < 0) {
        return gray(0);
    }
    if (lo >= levels_ - 1) {
        return gray(levels_ - 1);
    }
    const int hi = lo + 1;
    const double d_lo = std::abs(u - (2.0 * lo - levels_ + 1.0));
    const double d_hi = std::abs(u - (2.0 * hi - levels_ + 1.0));
    if (d_lo < d_hi) {
        return gray(lo);
    }
    if (d_hi < d_lo) {
        return gray(hi);
    }
    return std::min(gray(lo), gray(hi));
}

CVector qam_modulate(std::span<const std::uint8_t> bits, const QamConstellation& qam)
{
    const auto k = static_cast<std::size_t>(qam.bits_per_symbol());
    if (bits.size() % k != 0) {
        throw ContractViolation("qam_modulate: bit count " + std::to_string(bits.size()) +
                                " not divisible by " + std::to_string(k));
    }
    CVector symbols(static_cast<Eigen::Index>(bits.size() / k));
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        int index = 0;
        for (std::size_t b = 0; b < k; ++b) {
            index = (index << 1) | (bits[static_cast<std::size_t>(s) * k + b] & 1);
        }
        symbols[s] = qam.point(index);
    }
    return symbols;
}

CVector qam_modulate(std::span<const std::uint8_t> bits, int order)
{
    return qam_modulate(bits, QamConstellation(order));
}

Bits qam_demodulate(const CVector& symbols, const QamConstellation& qam)
{
    const int k = qam.bits_per_symbol();
    const int half = k / 2;
    Bits bits(static_cast<std::size_t>(symbols.size()) * static_cast<std::size_t>(k));
    std::size_t out = 0;
    for (Eigen::Index s = 0; s < symbols.size(); ++s) {
        // The lattice is separable, so per-axis nearest level is the
        // minimum-distance point.
        const int index = (qam.slice_axis(symbols[s].real()) << half) | qam.slice_axis(symbols[s].imag());
        for (int b = k - 1; b >= 0; --b) {
            bits[out++] = static_cast<std::uint8_t>((index >> b) & 1);
        }
    }
    return bits;
}

Bits qam_demodulate(const CVector& symbols, int order)
{
    return qam_demodulate(symbols, QamConstellation(order));
}

CVector detect_mimo_subcarrier(const CMatrix& h_freq, const CVector& y_freq)
{
    if (h_freq.rows() < h_freq.cols()) {
        throw ContractViolation("detect_mimo_subcarrier: need N_r >= N_t");
    }
    if (h_freq.rows() != y_freq.size()) {
        throw ContractViolation("detect_mimo_subcarrier: observation length does not match N_r");
    }
    Eigen::ColPivHouseholderQR<CMatrix> qr(h_freq);
    if (qr.rank() < h_freq.cols()) {
        throw DetectionFailure("detect_mimo_subcarrier: channel matrix is rank deficient");
    }
    return qr.solve(y_freq);
}

std::vector<CMatrix> channel_frequency_response(const CMatrix& cir, int n_t, int tap_length, int subcarriers)
{
    if (cir.cols() != static_cast<Eigen::Index>(n_t) * tap_length) {
        throw ContractViolation("channel_frequency_response: CIR width does not match n_t * tap_length");
    }
    if (subcarriers < tap_length) {
        throw ContractViolation("channel_frequency_response: fewer subcarriers than taps");
    }
    const auto n_r = cir.rows();
    std::vector<CMatrix> response(static_cast<std::size_t>(subcarriers), CMatrix::Zero(n_r, n_t));
    for (int k = 0; k < subcarriers; ++k) {
        CMatrix& hk = response[static_cast<std::size_t>(k)];
        for (int l = 0; l < tap_length; ++l) {
            const auto idx = static_cast<long long>(k) * l % subcarriers;
            const cdouble twiddle = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(idx) / subcarriers);
            for (Eigen::Index r = 0; r < n_r; ++r) {
                for (int t = 0; t < n_t; ++t) {
                    hk(r, t) += cir(r, static_cast<Eigen::Index>(t) * tap_length + l) * twiddle;
                }
            }
        }
    }
    return response;
}

ZeroForcingDetector::ZeroForcingDetector(const std::vector<CMatrix>& per_subcarrier)
{
    qr_.reserve(per_subcarrier.size());
    usable_.reserve(per_subcarrier.size());
    for (const auto& h : per_subcarrier) {
        if (h.rows() < h.cols()) {
            throw ContractViolation("ZeroForcingDetector: need N_r >= N_t");
        }
        n_t_ = h.cols();
        qr_.emplace_back(h);
        usable_.push_back(qr_.back().rank() == h.cols());
    }
}

CMatrix ZeroForcingDetector::detect(const CMatrix& y) const
{
    if (y.cols() != static_cast<Eigen::Index>(qr_.size())) {
        throw ContractViolation("ZeroForcingDetector: subcarrier count mismatch");
    }
    CMatrix out = CMatrix::Zero(n_t_, y.cols());
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
        if (usable_[static_cast<std::size_t>(k)]) {
            out.col(k) = qr_[static_cast<std::size_t>(k)].solve(y.col(k));
        }
    }
    return out;
}

}  // namespace sparsevss
