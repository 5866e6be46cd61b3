#pragma once

// Sparse invariant/variable step-size NLMS channel estimators.
//
// Model: y = h^T x + z with plain transpose. For complex data the gradient
// direction is conj(x) / (x^H x); on real data this is exactly x / (x^T x).

#include "sparsevss/common.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparsevss {

enum class Variant {
    IssNlms,
    VssNlms,
    IssZaNlms,
    IssRzaNlms,
    VssZaNlms,
    VssRzaNlms,
};

enum class Penalty { None, ZeroAttract, ReweightedZeroAttract };

/// Canonical names: ISS_NLMS, VSS_NLMS, ISS_ZA_NLMS, ISS_RZA_NLMS,
/// VSS_ZA_NLMS, VSS_RZA_NLMS.
std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();

bool uses_variable_step(Variant v);
Penalty penalty_of(Variant v);

struct AlgorithmConfig {
    Variant variant{Variant::IssNlms};
    double mu{0.2};           ///< invariant step size
    double mu_max{2.0};       ///< upper bound of the variable step size, in (0, 2]
    double c_threshold{1e-5}; ///< C in mu_max * |p|^2 / (|p|^2 + C)
    double beta{0.997};       ///< smoothing of the gradient average, in [0, 1)
    double gamma_za{0.0};
    double gamma_rza{0.0};
    double epsilon_rza{20.0};

    /// Throws ContractViolation on any out-of-range field.
    void validate() const;
};

struct FilterState {
    CVector weights;
    CVector grad_avg;
    double step_size{0.0};
    std::uint64_t iteration{0};

    /// Zero estimator and zero gradient history of the given length.
    static FilterState zeros(Eigen::Index length);

    Eigen::Index size() const { return weights.size(); }
};

/// e = y - w^T x.
cdouble prediction_error(const FilterState& state, const CVector& x, cdouble y);

/// sgn(Re v) + j sgn(Im v) per entry, with sgn(0) = 0.
CVector componentwise_sign(const CVector& v);

/// mu_max * |p|^2 / (|p|^2 + C), |p|^2 = p^H p.
double compute_vss(const CVector& grad_avg, double mu_max, double c_threshold);

/// beta * p + (1 - beta) * conj(x) e / (x^H x).
CVector update_grad_avg(const CVector& grad_avg, const CVector& x, cdouble e, double beta);

/// gamma_za * sgn(w). The caller subtracts it.
CVector zero_attract_term(const CVector& weights, double gamma_za);

/// gamma_rza * sgn(w_l) / (1 + epsilon_rza |w_l|). The caller subtracts it.
CVector reweighted_zero_attract_term(const CVector& weights, double gamma_rza, double epsilon_rza);

/**
 * One adaptive update of `state` with regressor `x` and desired sample `y`.
 *
 * Order: the a-priori error is formed with the current weights; VSS variants
 * then refresh the gradient average and derive the step size from it; the
 * weights take the normalized gradient step and subtract the sparsity
 * penalty evaluated at the pre-update weights.
 *
 * Returns the a-priori error. Throws DegenerateInput for an all-zero
 * regressor and ContractViolation for mismatched or non-finite input.
 */
cdouble step(FilterState& state, const CVector& x, cdouble y, const AlgorithmConfig& config);

}  // namespace sparsevss
