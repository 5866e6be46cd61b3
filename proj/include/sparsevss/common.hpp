#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace sparsevss {

using cdouble = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Raised when a caller breaks a documented precondition (bad dimensions,
/// out-of-range parameters, non-finite input).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an input is well-formed but numerically degenerate, e.g. an
/// all-zero regressor in a normalized update.
class DegenerateInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when zero-forcing detection cannot invert a subcarrier channel.
class DetectionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the `index`-th child stream of `base`. Distinct indices give
/// statistically independent streams; the mapping is stable across runs.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept
{
    return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Circularly-symmetric complex Gaussian draw with E|z|^2 = variance.
inline cdouble complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {scale * re, scale * im};
}

inline bool all_finite(const CVector& v)
{
    return v.allFinite();
}

inline bool is_finite(cdouble z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace sparsevss
