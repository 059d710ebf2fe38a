#pragma once

// Executable check of the constructive surrogate used to show that a
// bounded surrogate with a strictly positive-definite parameter Hessian
// exists.
//
// Base function (quantile of a linear model on Gaussian random features):
//   r(w) = w' m + (gamma / 2) * sqrt(w' A w),    A = diag(a), 0 < a_i < 1
// Reference point w+ = (1/dim) * (1, ..., 1). The surrogate g(w) is the
// second-order expansion of r around w+, using the closed-form Hessian
// diagonal
//   H_ii = (gamma / 2) * (sum(a) / dim^2)^(-3/2) * a_i * B_ii,
//   B_ii = (sum(a) - a_i) / dim^2.
// g is quadratic in w with the constant Hessian diag(H).

#include <cstdint>
#include <string>

#include "ignite/linalg.hpp"
#include "ignite/random.hpp"

namespace ignite {

struct QuadraticSurrogate {
    std::size_t dim = 0;
    ParamVector omega_plus;
    double gamma = 0.0;
    Vector a_diag;
    Vector mean_vec;
    double tau = 1.0;

    /// Validates 0 < a_i < 1, gamma >= 0, tau > 0 and matching lengths.
    static QuadraticSurrogate make(Vector a_diag, Vector mean_vec, double gamma, double tau);
};

struct BaseDerivatives {
    double value = 0.0;
    ParamVector gradient;
    Vector hessian_diag;  // closed form at w+, independent of the query point
};

/// Value and gradient of r at `omega`. Throws SingularityError when
/// w' A w <= 0.
BaseDerivatives base_value_and_derivs(const QuadraticSurrogate& q, const ParamVector& omega);
double base_value(const QuadraticSurrogate& q, const ParamVector& omega);

struct HessianDiagonal {
    Vector entries;
    bool degenerate = false;  // dim == 1 makes B vanish
};

HessianDiagonal reference_hessian_diagonal(const QuadraticSurrogate& q);

/// g(w) = constant + linear' w + 0.5 * w' diag(hessian_diag) w.
struct QuadraticExpansion {
    double constant = 0.0;
    Vector linear;
    Vector hessian_diag;

    double value(const ParamVector& omega) const;
    ParamVector gradient(const ParamVector& omega) const;
};

QuadraticExpansion expand_at_reference(const QuadraticSurrogate& q);

struct ConstructionReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    bool hessian_degenerate = false;
    double linear_norm = 0.0;     // ||grad r(w+) - H w+||
    double constant_abs = 0.0;    // |g(0)|
    double bound = 0.0;           // tau * linear_norm + 0.5 * lambda_max * tau^2 + constant_abs
    double max_abs_value = 0.0;   // max |g(w)| over the sampled w
    std::size_t samples = 0;
    std::size_t violations = 0;

    bool positive_definite() const { return !hessian_degenerate && lambda_min > 0.0; }
    bool bounded() const { return violations == 0; }
    bool passed() const { return positive_definite() && bounded(); }
};

/// Checks positivity of the Hessian diagonal and samples `samples` points
/// with ||w|| <= tau against the explicit bound.
ConstructionReport verify_construction(const QuadraticSurrogate& q, std::size_t samples,
                                       std::uint64_t seed);

std::string format_report(const ConstructionReport& report);

/// d^2 r / dw_i^2 at omega by second central differences with step h.
Vector second_difference_diagonal(const QuadraticSurrogate& q, const ParamVector& omega, double h);

/// Random instance: 0 < a < b < 1, A entries uniform in (a, b), dim in
/// [2, 16], gamma in (0, 4], mean entries in [-1, 1], tau in [0.5, 2.5).
QuadraticSurrogate random_quadratic_surrogate(Rng& rng);

}  // namespace ignite
