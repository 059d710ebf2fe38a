#pragma once

// Surrogate sharpness: how far the mean prediction h(w) = mean_x g(x; w) can
// move under a parameter perturbation of norm rho.

#include <cstdint>
#include <functional>

#include "ignite/linalg.hpp"
#include "ignite/mlp.hpp"

namespace ignite {

/// estimate == rho * grad_norm, where grad_norm = ||grad_w h(w)||.
struct SharpnessEstimate {
    double rho = 0.0;
    double grad_norm = 0.0;
    double estimate = 0.0;
};

SharpnessEstimate first_order_sharpness(const Surrogate& s, const Matrix& X, double rho);

struct BallOracleConfig {
    std::size_t num_random_directions = 256;
    bool include_gradient_directions = true;
    std::uint64_t seed = 0;
};

/// max over sampled |delta| = rho of |h(w + delta) - h(w)|. Random directions
/// are uniform on the sphere; with include_gradient_directions the two
/// first-order maximisers +-rho * grad h / ||grad h|| are always tried.
/// Always a lower bound on the true maximum over the ball.
double sampled_sharpness(const Surrogate& s, const Matrix& X, double rho,
                         const BallOracleConfig& cfg = {});

/// Gradient norms below this are treated as a critical point of h.
inline constexpr double kDegenerateGradNorm = 1e-12;

/// w -> grad_w h(w) for some scalar parameter function h.
using GradientField = std::function<ParamVector(const ParamVector&)>;

struct GradNormGradient {
    ParamVector value;        // approximates grad_w ||grad_w h(w)||
    double grad_norm = 0.0;   // ||grad_w h(w)|| at the unperturbed point
    bool degenerate = false;  // grad_norm < kDegenerateGradNorm; value is zero
};

/// Finite-difference Hessian-vector product along v = grad h / ||grad h||:
///   (grad h(w + r v) - grad h(w)) / r.
/// The perturbed gradient is a plain re-evaluation at w + r v. `grad_at_omega`
/// must be grad h(w); callers that already hold it avoid a second evaluation.
GradNormGradient grad_of_grad_norm(const GradientField& grad_h, const ParamVector& omega,
                                   const ParamVector& grad_at_omega, double r);
GradNormGradient grad_of_grad_norm(const GradientField& grad_h, const ParamVector& omega, double r);

/// Surrogate form with h the mean prediction over the rows of X.
GradNormGradient grad_of_grad_norm(const Surrogate& s, const Matrix& X, double r);

}  // namespace ignite
