#include "sparsevss/signal.hpp"

#include <cmath>
#include <numbers>

namespace sparsevss {

Regressor::Regressor(CVector samples) : samples_(std::move(samples))
{
    if (!all_finite(samples_)) {
        throw ContractViolation("Regressor: non-finite sample");
    }
    if (!(samples_.squaredNorm() > 0.0)) {
        throw DegenerateInput("Regressor: zero energy");
    }
}

Regressor generate_training_regressor(Rng& rng, int n_t, int tap_length)
{
    if (n_t < 1 || tap_length < 1) {
        throw ContractViolation("generate_training_regressor: n_t and tap_length must be >= 1");
    }
    const int n = n_t * tap_length;
    const double variance = 1.0 / n;
    CVector x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = complex_gaussian(rng, variance);
    }
    return Regressor(std::move(x));
}

CMatrix dft_matrix(int k)
{
    if (k < 1) {
        throw ContractViolation("dft_matrix: size must be >= 1");
    }
    CMatrix f(k, k);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    for (int row = 0; row < k; ++row) {
        for (int col = 0; col < k; ++col) {
            // Reduce the exponent modulo k first to keep the phase argument small.
            const auto idx = static_cast<long long>(row) * col % k;
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(idx) / k;
            f(row, col) = std::polar(scale, phase);
        }
    }
    return f;
}

CVector add_cyclic_prefix(const CVector& time, int cp_length)
{
    if (cp_length < 0 || cp_length >= time.size()) {
        throw ContractViolation("add_cyclic_prefix: cp_length must lie in [0, block length)");
    }
    CVector out(time.size() + cp_length);
    out.head(cp_length) = time.tail(cp_length);
    out.tail(time.size()) = time;
    return out;
}

CVector remove_cyclic_prefix(const CVector& rx, int cp_length)
{
    if (cp_length < 0 || cp_length > rx.size()) {
        throw ContractViolation("remove_cyclic_prefix: cp_length exceeds block length");
    }
    return rx.tail(rx.size() - cp_length);
}

CVector convolve(const CVector& taps, const CVector& input)
{
    CVector out = CVector::Zero(input.size());
    for (Eigen::Index n = 0; n < input.size(); ++n) {
        const Eigen::Index last = std::min<Eigen::Index>(taps.size() - 1, n);
        cdouble acc{0.0, 0.0};
        for (Eigen::Index l = 0; l <= last; ++l) {
            acc += taps[l] * input[n - l];
        }
        out[n] = acc;
    }
    return out;
}

OfdmFrame make_ofdm_frame(const CVector& freq_symbols, int cp_length, const CMatrix& dft)
{
    if (dft.rows() != freq_symbols.size() || dft.cols() != freq_symbols.size()) {
        throw ContractViolation("make_ofdm_frame: DFT size does not match subcarrier count");
    }
    OfdmFrame frame;
    frame.freq_symbols = freq_symbols;
    frame.subcarrier_count = static_cast<int>(freq_symbols.size());
    frame.cp_length = cp_length;
    frame.time_samples = add_cyclic_prefix(dft.adjoint() * freq_symbols, cp_length);
    return frame;
}

CVector ofdm_demodulate(const CVector& rx, int cp_length, const CMatrix& dft)
{
    CVector body = remove_cyclic_prefix(rx, cp_length);
    if (body.size() != dft.cols()) {
        throw ContractViolation("ofdm_demodulate: block length does not match DFT size");
    }
    return dft * body;
}

}  // namespace sparsevss
