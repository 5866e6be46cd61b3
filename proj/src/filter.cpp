#include "sparsevss/filter.hpp"

#include <array>
#include <cmath>
#include <string>

namespace sparsevss {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 6> kVariantNames{{
    {Variant::IssNlms, "ISS_NLMS"},
    {Variant::VssNlms, "VSS_NLMS"},
    {Variant::IssZaNlms, "ISS_ZA_NLMS"},
    {Variant::IssRzaNlms, "ISS_RZA_NLMS"},
    {Variant::VssZaNlms, "VSS_ZA_NLMS"},
    {Variant::VssRzaNlms, "VSS_RZA_NLMS"},
}};

double sign_of(double v)
{
    return static_cast<double>((0.0 < v) - (v < 0.0));
}

void require_same_length(const CVector& a, const CVector& b, const char* what)
{
    if (a.size() != b.size()) {
        throw ContractViolation(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
    }
}

double regressor_energy(const CVector& x)
{
    const double energy = x.squaredNorm();
    if (!(energy > 0.0)) {
        throw DegenerateInput("regressor has zero energy; normalized update undefined");
    }
    return energy;
}

}  // namespace

std::string_view to_string(Variant v)
{
    for (const auto& [variant, name] : kVariantNames) {
        if (variant == v) {
            return name;
        }
    }
    return "UNKNOWN";
}

std::optional<Variant> parse_variant(std::string_view name)
{
    for (const auto& [variant, n] : kVariantNames) {
        if (n == name) {
            return variant;
        }
    }
    return std::nullopt;
}

const std::vector<Variant>& all_variants()
{
    static const std::vector<Variant> variants{
        Variant::IssNlms,   Variant::VssNlms,   Variant::IssZaNlms,
        Variant::IssRzaNlms, Variant::VssZaNlms, Variant::VssRzaNlms,
    };
    return variants;
}

bool uses_variable_step(Variant v)
{
    return v == Variant::VssNlms || v == Variant::VssZaNlms || v == Variant::VssRzaNlms;
}

Penalty penalty_of(Variant v)
{
    switch (v) {
    case Variant::IssZaNlms:
    case Variant::VssZaNlms:
        return Penalty::ZeroAttract;
    case Variant::IssRzaNlms:
    case Variant::VssRzaNlms:
        return Penalty::ReweightedZeroAttract;
    default:
        return Penalty::None;
    }
}

void AlgorithmConfig::validate() const
{
    auto fail = [](const std::string& msg) { throw ContractViolation("AlgorithmConfig: " + msg); };
    if (!(mu > 0.0) || !std::isfinite(mu)) fail("mu must be > 0");
    if (!(mu_max > 0.0 && mu_max <= 2.0)) fail("mu_max must lie in (0, 2]");
    if (!(c_threshold > 0.0) || !std::isfinite(c_threshold)) fail("c_threshold must be > 0");
    if (!(beta >= 0.0 && beta < 1.0)) fail("beta must lie in [0, 1)");
    if (!(gamma_za >= 0.0) || !std::isfinite(gamma_za)) fail("gamma_za must be >= 0");
    if (!(gamma_rza >= 0.0) || !std::isfinite(gamma_rza)) fail("gamma_rza must be >= 0");
    if (!(epsilon_rza > 0.0) || !std::isfinite(epsilon_rza)) fail("epsilon_rza must be > 0");
}

FilterState FilterState::zeros(Eigen::Index length)
{
    FilterState s;
    s.weights = CVector::Zero(length);
    s.grad_avg = CVector::Zero(length);
    return s;
}

cdouble prediction_error(const FilterState& state, const CVector& x, cdouble y)
{
    require_same_length(state.weights, x, "prediction_error");
    // Plain transpose: no conjugation on either side.
    return y - (state.weights.transpose() * x).value();
}

CVector componentwise_sign(const CVector& v)
{
    return v.unaryExpr([](const cdouble& z) { return cdouble{sign_of(z.real()), sign_of(z.imag())}; });
}

double compute_vss(const CVector& grad_avg, double mu_max, double c_threshold)
{
    if (!(c_threshold > 0.0)) {
        throw ContractViolation("compute_vss: c_threshold must be > 0");
    }
    const double p2 = grad_avg.squaredNorm();
    return mu_max * p2 / (p2 + c_threshold);
}

CVector update_grad_avg(const CVector& grad_avg, const CVector& x, cdouble e, double beta)
{
    require_same_length(grad_avg, x, "update_grad_avg");
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw ContractViolation("update_grad_avg: beta must lie in [0, 1)");
    }
    const double energy = regressor_energy(x);
    return beta * grad_avg + ((1.0 - beta) * e / energy) * x.conjugate();
}

CVector zero_attract_term(const CVector& weights, double gamma_za)
{
    return gamma_za * componentwise_sign(weights);
}

CVector reweighted_zero_attract_term(const CVector& weights, double gamma_rza, double epsilon_rza)
{
    const CVector sign = componentwise_sign(weights);
    CVector term(weights.size());
    for (Eigen::Index l = 0; l < weights.size(); ++l) {
        term[l] = gamma_rza * sign[l] / (1.0 + epsilon_rza * std::abs(weights[l]));
    }
    return term;
}

cdouble step(FilterState& state, const CVector& x, cdouble y, const AlgorithmConfig& config)
{
    require_same_length(state.weights, x, "step");
    require_same_length(state.weights, state.grad_avg, "step (state)");
    if (!all_finite(x) || !is_finite(y)) {
        throw ContractViolation("step: non-finite regressor or desired sample");
    }
    const double energy = regressor_energy(x);

    const cdouble e = prediction_error(state, x, y);

    if (uses_variable_step(config.variant)) {
        state.grad_avg = update_grad_avg(state.grad_avg, x, e, config.beta);
        state.step_size = compute_vss(state.grad_avg, config.mu_max, config.c_threshold);
    } else {
        state.step_size = config.mu;
    }

    // Penalty uses the pre-update weights; a zero strength leaves the plain update untouched.
    CVector penalty;
    switch (penalty_of(config.variant)) {
    case Penalty::ZeroAttract:
        if (config.gamma_za > 0.0) {
            penalty = zero_attract_term(state.weights, config.gamma_za);
        }
        break;
    case Penalty::ReweightedZeroAttract:
        if (config.gamma_rza > 0.0) {
            penalty = reweighted_zero_attract_term(state.weights, config.gamma_rza, config.epsilon_rza);
        }
        break;
    case Penalty::None:
        break;
    }

    state.weights += (state.step_size * e / energy) * x.conjugate();
    if (penalty.size() != 0) {
        state.weights -= penalty;
    }
    ++state.iteration;
    return e;
}

}  // namespace sparsevss
