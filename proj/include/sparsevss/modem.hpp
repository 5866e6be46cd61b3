#pragma once

#include "sparsevss/common.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sparsevss {

using Bits = std::vector<std::uint8_t>;

/**
 * Square Gray-coded QAM with unit average symbol energy.
 *
 * A symbol index packs the in-phase label in its high bits and the
 * quadrature label in its low bits; each label is the Gray code of the
 * level position along that axis, so axis neighbours differ in one bit.
 */
class QamConstellation {
public:
    /// order must be 16, 64 or 256.
    explicit QamConstellation(int order);

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_per_symbol_; }
    int levels_per_axis() const { return levels_; }
    /// Half the spacing between adjacent levels.
    double level_scale() const { return scale_; }

    cdouble point(int symbol_index) const { return points_[static_cast<std::size_t>(symbol_index)]; }
    const std::vector<cdouble>& points() const { return points_; }

    /// Amplitude of level position `pos` in [0, levels): (2 pos - levels + 1) * scale.
    double level_amplitude(int pos) const;
    /// Gray label of a level position, and its inverse.
    static int gray(int pos) { return pos ^ (pos >> 1); }
    int position_of_label(int label) const { return label_to_pos_[static_cast<std::size_t>(label)]; }

    /// Nearest level label along one axis; exact ties go to the smaller label.
    int slice_axis(double value) const;

private:
    int order_;
    int bits_per_symbol_;
    int levels_;
    double scale_;
    std::vector<cdouble> points_;
    std::vector<int> label_to_pos_;
};

bool is_supported_qam_order(int order);

/// Bits are 0/1 values, most significant bit of each symbol first.
CVector qam_modulate(std::span<const std::uint8_t> bits, const QamConstellation& qam);
CVector qam_modulate(std::span<const std::uint8_t> bits, int order);

/// Minimum-distance hard decisions followed by the inverse Gray map.
Bits qam_demodulate(const CVector& symbols, const QamConstellation& qam);
Bits qam_demodulate(const CVector& symbols, int order);

/// Zero-forcing estimate of the N_t transmitted symbols from one subcarrier
/// observation, via least squares. Throws ContractViolation if N_r < N_t and
/// DetectionFailure when h_freq is rank deficient.
CVector detect_mimo_subcarrier(const CMatrix& h_freq, const CVector& y_freq);

/**
 * Per-subcarrier MIMO response H_k[r][t] = sum_l h_{r,t,l} exp(-j 2 pi k l / K)
 * of the stacked CIR matrix `cir` (n_r x n_t * tap_length).
 */
std::vector<CMatrix> channel_frequency_response(const CMatrix& cir, int n_t, int tap_length, int subcarriers);

/// Per-subcarrier ZF detector with the factorizations computed once.
class ZeroForcingDetector {
public:
    explicit ZeroForcingDetector(const std::vector<CMatrix>& per_subcarrier);

    /// `y` is N_r x K (received symbols per antenna and subcarrier). Returns
    /// N_t x K. Columns whose subcarrier failed are left as zero.
    CMatrix detect(const CMatrix& y) const;
    bool failed(int subcarrier) const { return !usable_[static_cast<std::size_t>(subcarrier)]; }
    int subcarriers() const { return static_cast<int>(qr_.size()); }

private:
    std::vector<Eigen::ColPivHouseholderQR<CMatrix>> qr_;
    std::vector<bool> usable_;
    Eigen::Index n_t_{0};
};

}  // namespace sparsevss
