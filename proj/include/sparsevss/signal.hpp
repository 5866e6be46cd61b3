#pragma once

#include "sparsevss/common.hpp"

namespace sparsevss {

/// Stacked training input x = [x_1^T, ..., x_Nt^T]^T. Always finite with
/// nonzero energy.
class Regressor {
public:
    /// Throws ContractViolation for non-finite entries and DegenerateInput
    /// for an all-zero vector.
    explicit Regressor(CVector samples);

    const CVector& samples() const { return samples_; }
    Eigen::Index size() const { return samples_.size(); }

private:
    CVector samples_;
};

/// i.i.d. CN(0, 1/(n_t * tap_length)) entries, so E||x||^2 = 1.
Regressor generate_training_regressor(Rng& rng, int n_t, int tap_length);

/// Unitary K-point DFT: F[k][q] = exp(-j 2 pi k q / K) / sqrt(K).
CMatrix dft_matrix(int k);

CVector add_cyclic_prefix(const CVector& time, int cp_length);
CVector remove_cyclic_prefix(const CVector& rx, int cp_length);

/// Linear convolution of `input` with `taps`, truncated to input length
/// (the channel starts from rest).
CVector convolve(const CVector& taps, const CVector& input);

struct OfdmFrame {
    CVector freq_symbols;  ///< K subcarrier symbols
    CVector time_samples;  ///< K + cp_length samples, prefix first
    int subcarrier_count{0};
    int cp_length{0};
};

/// time_samples = add_cyclic_prefix(F^H freq_symbols). `dft` must be the
/// matrix returned by dft_matrix(freq_symbols.size()).
OfdmFrame make_ofdm_frame(const CVector& freq_symbols, int cp_length, const CMatrix& dft);

/// F * remove_cyclic_prefix(rx).
CVector ofdm_demodulate(const CVector& rx, int cp_length, const CMatrix& dft);

}  // namespace sparsevss
