#include "ignite/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ignite/errors.hpp"
#include "ignite/random.hpp"

namespace ignite {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be positive and finite, got " +
                             std::to_string(v));
    }
}

void require_rows(const Matrix& X, const char* what) {
    if (X.rows() == 0) throw EmptyInputError(std::string(what) + ": no inputs");
}

}  // namespace

SharpnessEstimate first_order_sharpness(const Surrogate& s, const Matrix& X, double rho) {
    require_positive(rho, "rho");
    require_rows(X, "first_order_sharpness");
    const double g = norm2(mean_output_grad(s, X));
    return {rho, g, rho * g};
}

double sampled_sharpness(const Surrogate& s, const Matrix& X, double rho,
                         const BallOracleConfig& cfg) {
    require_positive(rho, "rho");
    require_rows(X, "sampled_sharpness");
    if (cfg.num_random_directions == 0) {
        throw ParameterError("sampled_sharpness: num_random_directions must be >= 1");
    }
    const MlpSpec& spec = s.spec();
    const ParamVector& w = s.params();
    const double h0 = predict_batch(spec, w, X).mean();
    auto shift = [&](const ParamVector& delta) {
        return std::abs(predict_batch(spec, axpy(w, delta, 1.0), X).mean() - h0);
    };

    double best = 0.0;
    Rng rng(cfg.seed);
    std::normal_distribution<double> normal;
    ParamVector delta(w.size());
    for (std::size_t k = 0; k < cfg.num_random_directions; ++k) {
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = normal(rng);
        const double n = norm2(delta);
        if (n == 0.0) continue;
        delta.vec() *= rho / n;
        best = std::max(best, shift(delta));
    }
    if (cfg.include_gradient_directions) {
        const ParamVector g = mean_output_grad(s, X);
        const double n = norm2(g);
        if (n > 0.0) {
            const ParamVector step(Vector(g.vec() * (rho / n)));
            best = std::max(best, shift(step));
            best = std::max(best, shift(ParamVector(Vector(-step.vec()))));
        }
    }
    return best;
}

GradNormGradient grad_of_grad_norm(const GradientField& grad_h, const ParamVector& omega,
                                   const ParamVector& grad_at_omega, double r) {
    require_positive(r, "r");
    if (grad_at_omega.size() != omega.size()) {
        throw ShapeError("grad_of_grad_norm: gradient and parameter lengths differ");
    }
    GradNormGradient out;
    out.grad_norm = norm2(grad_at_omega);
    if (out.grad_norm < kDegenerateGradNorm) {
        out.value = ParamVector(omega.size());
        out.degenerate = true;
        return out;
    }
    const ParamVector perturbed = axpy(omega, grad_at_omega, r / out.grad_norm);
    const ParamVector shifted = grad_h(perturbed);
    if (shifted.size() != omega.size()) {
        throw ShapeError("grad_of_grad_norm: gradient field returned the wrong length");
    }
    out.value = ParamVector(Vector((shifted.vec() - grad_at_omega.vec()) / r));
    return out;
}

GradNormGradient grad_of_grad_norm(const GradientField& grad_h, const ParamVector& omega, double r) {
    return grad_of_grad_norm(grad_h, omega, grad_h(omega), r);
}

GradNormGradient grad_of_grad_norm(const Surrogate& s, const Matrix& X, double r) {
    require_rows(X, "grad_of_grad_norm");
    const MlpSpec& spec = s.spec();
    GradientField field = [&](const ParamVector& w) { return mean_output_grad(spec, w, X); };
    return grad_of_grad_norm(field, s.params(), r);
}

}  // namespace ignite
