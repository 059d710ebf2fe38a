#pragma once

// Dense feed-forward surrogate g(x; w) with exact reverse-mode gradients.
//
// Parameter layout: for every layer (hidden layers first, then the scalar
// output layer) the weight matrix is stored row-major as (fan_out x fan_in),
// followed by its bias vector. A spec with no hidden layers is an affine model
// whose parameters are (w_0, ..., w_{d-1}, b).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ignite/linalg.hpp"

namespace ignite {

enum class HiddenActivation { relu, tanh };
enum class OutputActivation { identity, unit_sigmoid };

std::string_view to_string(HiddenActivation a) noexcept;
std::string_view to_string(OutputActivation a) noexcept;
HiddenActivation parse_hidden_activation(std::string_view name);
OutputActivation parse_output_activation(std::string_view name);

struct MlpSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_widths;
    HiddenActivation hidden_activation = HiddenActivation::relu;
    OutputActivation output_activation = OutputActivation::identity;

    /// Two hidden layers of 64 relu units, identity output.
    static MlpSpec standard(std::size_t input_dim);
    static MlpSpec affine(std::size_t input_dim);

    std::size_t parameter_count() const noexcept;
    std::size_t layer_count() const noexcept { return hidden_widths.size() + 1; }

    /// Throws ParameterError for zero input_dim or zero-width layers.
    void validate() const;

    bool operator==(const MlpSpec&) const = default;
};

class Surrogate {
public:
    /// Validates the spec and that params has exactly spec.parameter_count()
    /// finite entries.
    Surrogate(MlpSpec spec, ParamVector params);

    const MlpSpec& spec() const noexcept { return spec_; }
    const ParamVector& params() const noexcept { return params_; }
    std::size_t input_dim() const noexcept { return spec_.input_dim; }

    void set_params(ParamVector params);

private:
    MlpSpec spec_;
    ParamVector params_;
};

double predict(const Surrogate& s, std::span<const double> x);
Vector predict_batch(const Surrogate& s, const Matrix& X);
Vector predict_batch(const MlpSpec& spec, const ParamVector& params, const Matrix& X);

struct LossAndGrad {
    double loss = 0.0;
    ParamVector grad;
};

/// Mean squared error over the batch and its exact parameter gradient.
LossAndGrad loss_and_grad(const Surrogate& s, const Matrix& X, std::span<const double> z);
LossAndGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params, const Matrix& X,
                          std::span<const double> z);

/// Gradient w.r.t. all parameters of the batch-mean prediction.
ParamVector mean_output_grad(const Surrogate& s, const Matrix& X);
ParamVector mean_output_grad(const MlpSpec& spec, const ParamVector& params, const Matrix& X);

/// Loss value, loss gradient and mean-prediction gradient from a single
/// forward pass. The trainers use this so every regime computes g1 and g2
/// through the same arithmetic.
struct BatchGradients {
    Vector predictions;
    double loss = 0.0;
    ParamVector loss_grad;
    ParamVector mean_output_grad;
};
BatchGradients loss_and_mean_output_grads(const MlpSpec& spec, const ParamVector& params,
                                          const Matrix& X, std::span<const double> z);

/// Exact gradient of g(x; w) with respect to x.
Vector input_grad(const Surrogate& s, std::span<const double> x);
/// Row i holds the input gradient at row i of X.
Matrix input_grad_batch(const Surrogate& s, const Matrix& X);

/// Uniform in +-init_bound(fan_in, fan_out) for every weight and bias of each
/// layer. Deterministic for a fixed seed.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed);
double init_bound(std::size_t fan_in, std::size_t fan_out) noexcept;

}  // namespace ignite
