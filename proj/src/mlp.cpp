#include "ignite/mlp.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ignite/errors.hpp"
#include "ignite/random.hpp"

namespace ignite {

std::string_view to_string(HiddenActivation a) noexcept {
    return a == HiddenActivation::relu ? "relu" : "tanh";
}

std::string_view to_string(OutputActivation a) noexcept {
    return a == OutputActivation::identity ? "identity" : "unit_sigmoid";
}

HiddenActivation parse_hidden_activation(std::string_view name) {
    if (name == "relu") return HiddenActivation::relu;
    if (name == "tanh") return HiddenActivation::tanh;
    throw ParameterError("unknown hidden activation '" + std::string(name) + "'");
}

OutputActivation parse_output_activation(std::string_view name) {
    if (name == "identity") return OutputActivation::identity;
    if (name == "unit_sigmoid") return OutputActivation::unit_sigmoid;
    throw ParameterError("unknown output activation '" + std::string(name) + "'");
}

MlpSpec MlpSpec::standard(std::size_t input_dim) {
    return MlpSpec{input_dim, {64, 64}, HiddenActivation::relu, OutputActivation::identity};
}

MlpSpec MlpSpec::affine(std::size_t input_dim) {
    return MlpSpec{input_dim, {}, HiddenActivation::relu, OutputActivation::identity};
}

std::size_t MlpSpec::parameter_count() const noexcept {
    std::size_t count = 0;
    std::size_t fan_in = input_dim;
    for (std::size_t w : hidden_widths) {
        count += (fan_in + 1) * w;
        fan_in = w;
    }
    return count + fan_in + 1;
}

void MlpSpec::validate() const {
    if (input_dim == 0) throw ParameterError("MlpSpec: input_dim must be positive");
    for (std::size_t w : hidden_widths) {
        if (w == 0) throw ParameterError("MlpSpec: hidden widths must be positive");
    }
}

Surrogate::Surrogate(MlpSpec spec, ParamVector params) : spec_(std::move(spec)) {
    spec_.validate();
    set_params(std::move(params));
}

void Surrogate::set_params(ParamVector params) {
    if (params.size() != spec_.parameter_count()) {
        throw ShapeError("Surrogate: expected " + std::to_string(spec_.parameter_count()) +
                         " parameters, got " + std::to_string(params.size()));
    }
    if (!params.all_finite()) throw ParameterError("Surrogate: non-finite parameter");
    params_ = std::move(params);
}

namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using MatrixMap = Eigen::Map<Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;
using VectorMap = Eigen::Map<Vector>;

struct Layer {
    Eigen::Index fan_in;
    Eigen::Index fan_out;
    std::size_t weight_offset;
    std::size_t bias_offset;
};

std::vector<Layer> layout(const MlpSpec& spec) {
    std::vector<Layer> layers;
    layers.reserve(spec.layer_count());
    std::size_t offset = 0;
    auto fan_in = static_cast<Eigen::Index>(spec.input_dim);
    auto push = [&](Eigen::Index fan_out) {
        const auto weights = static_cast<std::size_t>(fan_in * fan_out);
        layers.push_back({fan_in, fan_out, offset, offset + weights});
        offset += weights + static_cast<std::size_t>(fan_out);
        fan_in = fan_out;
    };
    for (std::size_t w : spec.hidden_widths) push(static_cast<Eigen::Index>(w));
    push(1);
    return layers;
}

void check_params(const MlpSpec& spec, const ParamVector& params) {
    if (params.size() != spec.parameter_count()) {
        throw ShapeError("expected " + std::to_string(spec.parameter_count()) +
                         " parameters, got " + std::to_string(params.size()));
    }
}

void check_inputs(const MlpSpec& spec, const Matrix& X) {
    if (static_cast<std::size_t>(X.cols()) != spec.input_dim) {
        throw ShapeError("input has " + std::to_string(X.cols()) + " columns, spec expects " +
                         std::to_string(spec.input_dim));
    }
}

Matrix row_matrix(const MlpSpec& spec, std::span<const double> x) {
    if (x.size() != spec.input_dim) {
        throw ShapeError("input has dimension " + std::to_string(x.size()) + ", spec expects " +
                         std::to_string(spec.input_dim));
    }
    Matrix X(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t j = 0; j < x.size(); ++j) X(0, static_cast<Eigen::Index>(j)) = x[j];
    return X;
}

// Post-activation values of every layer; activations[0] is the input batch
// and activations.back() is the (n x 1) prediction column.
struct ForwardPass {
    std::vector<Layer> layers;
    std::vector<Matrix> activations;
};

ForwardPass forward(const MlpSpec& spec, const ParamVector& params, const Matrix& X) {
    ForwardPass fp{layout(spec), {}};
    fp.activations.reserve(fp.layers.size() + 1);
    fp.activations.push_back(X);
    const double* p = params.vec().data();
    for (std::size_t l = 0; l < fp.layers.size(); ++l) {
        const Layer& layer = fp.layers[l];
        ConstMatrixMap W(p + layer.weight_offset, layer.fan_out, layer.fan_in);
        ConstVectorMap b(p + layer.bias_offset, layer.fan_out);
        Matrix Z = fp.activations.back() * W.transpose();
        Z.rowwise() += b.transpose();
        const bool output = l + 1 == fp.layers.size();
        if (!output) {
            if (spec.hidden_activation == HiddenActivation::relu) {
                Z = Z.cwiseMax(0.0);
            } else {
                Z = Z.array().tanh().matrix();
            }
        } else if (spec.output_activation == OutputActivation::unit_sigmoid) {
            Z = (1.0 / (1.0 + (-Z.array()).exp())).matrix();
        }
        fp.activations.push_back(std::move(Z));
    }
    return fp;
}

// Multiplies `J` elementwise by the activation derivative, expressed through
// the post-activation values `A`.
void apply_hidden_derivative(HiddenActivation act, const Matrix& A, Matrix& J) {
    if (act == HiddenActivation::relu) {
        J = (A.array() > 0.0).select(J, 0.0);
    } else {
        J.array() *= 1.0 - A.array().square();
    }
}

// sensitivities[l](i, k) = d prediction_i / d pre-activation of unit k in
// layer l. Backprop of any per-sample output seed is a row scaling of these.
struct Sensitivities {
    std::vector<Matrix> per_layer;
    Matrix input;  // filled only on request
};

Sensitivities backward(const MlpSpec& spec, const ParamVector& params, const ForwardPass& fp,
                       bool want_input) {
    const std::size_t L = fp.layers.size();
    Sensitivities out;
    out.per_layer.resize(L);
    const Matrix& y = fp.activations.back();
    Matrix J(y.rows(), 1);
    if (spec.output_activation == OutputActivation::unit_sigmoid) {
        J = (y.array() * (1.0 - y.array())).matrix();
    } else {
        J.setOnes();
    }
    const double* p = params.vec().data();
    for (std::size_t l = L; l-- > 0;) {
        const Layer& layer = fp.layers[l];
        ConstMatrixMap W(p + layer.weight_offset, layer.fan_out, layer.fan_in);
        if (l > 0 || want_input) {
            Matrix prev = J * W;
            if (l > 0) apply_hidden_derivative(spec.hidden_activation, fp.activations[l], prev);
            out.per_layer[l] = std::move(J);
            J = std::move(prev);
        } else {
            out.per_layer[l] = std::move(J);
        }
    }
    if (want_input) out.input = std::move(J);
    return out;
}

// Parameter gradient of (1/divisor) * sum_i seed_i * prediction_i. A null
// seed means all ones; summing before dividing keeps the affine mean-gradient
// bias entry at exactly 1.
ParamVector seeded_param_grad(const MlpSpec& spec, const ForwardPass& fp,
                              const Sensitivities& sens, const Vector* seed, double divisor) {
    ParamVector grad(spec.parameter_count());
    double* g = grad.vec().data();
    Matrix scaled;
    for (std::size_t l = 0; l < fp.layers.size(); ++l) {
        const Layer& layer = fp.layers[l];
        const Matrix* S = &sens.per_layer[l];
        if (seed) {
            scaled = (S->array().colwise() * seed->array()).matrix();
            S = &scaled;
        }
        MatrixMap Wg(g + layer.weight_offset, layer.fan_out, layer.fan_in);
        Wg.noalias() = S->transpose() * fp.activations[l];
        Wg /= divisor;
        VectorMap bg(g + layer.bias_offset, layer.fan_out);
        bg = S->colwise().sum().transpose() / divisor;
    }
    return grad;
}

void require_rows(const Matrix& X, const char* what) {
    if (X.rows() == 0) throw EmptyInputError(std::string(what) + ": empty batch");
}

}  // namespace

Vector predict_batch(const MlpSpec& spec, const ParamVector& params, const Matrix& X) {
    check_params(spec, params);
    check_inputs(spec, X);
    if (X.rows() == 0) return Vector(0);
    ForwardPass fp = forward(spec, params, X);
    return fp.activations.back().col(0);
}

Vector predict_batch(const Surrogate& s, const Matrix& X) {
    return predict_batch(s.spec(), s.params(), X);
}

double predict(const Surrogate& s, std::span<const double> x) {
    return predict_batch(s, row_matrix(s.spec(), x))[0];
}

LossAndGrad loss_and_grad(const MlpSpec& spec, const ParamVector& params, const Matrix& X,
                          std::span<const double> z) {
    BatchGradients bg = loss_and_mean_output_grads(spec, params, X, z);
    return {bg.loss, std::move(bg.loss_grad)};
}

LossAndGrad loss_and_grad(const Surrogate& s, const Matrix& X, std::span<const double> z) {
    return loss_and_grad(s.spec(), s.params(), X, z);
}

ParamVector mean_output_grad(const MlpSpec& spec, const ParamVector& params, const Matrix& X) {
    check_params(spec, params);
    check_inputs(spec, X);
    require_rows(X, "mean_output_grad");
    ForwardPass fp = forward(spec, params, X);
    Sensitivities sens = backward(spec, params, fp, false);
    return seeded_param_grad(spec, fp, sens, nullptr, static_cast<double>(X.rows()));
}

ParamVector mean_output_grad(const Surrogate& s, const Matrix& X) {
    return mean_output_grad(s.spec(), s.params(), X);
}

BatchGradients loss_and_mean_output_grads(const MlpSpec& spec, const ParamVector& params,
                                          const Matrix& X, std::span<const double> z) {
    check_params(spec, params);
    check_inputs(spec, X);
    require_rows(X, "loss_and_grad");
    if (z.size() != static_cast<std::size_t>(X.rows())) {
        throw ShapeError("targets have length " + std::to_string(z.size()) + ", batch has " +
                         std::to_string(X.rows()) + " rows");
    }
    ForwardPass fp = forward(spec, params, X);
    Sensitivities sens = backward(spec, params, fp, false);

    const auto n = X.rows();
    const auto count = static_cast<double>(n);
    BatchGradients out;
    out.predictions = fp.activations.back().col(0);
    Vector residual(n);
    for (Eigen::Index i = 0; i < n; ++i) residual[i] = out.predictions[i] - z[static_cast<std::size_t>(i)];
    out.loss = residual.squaredNorm() / count;
    const Vector seed = 2.0 * residual;
    out.loss_grad = seeded_param_grad(spec, fp, sens, &seed, count);
    out.mean_output_grad = seeded_param_grad(spec, fp, sens, nullptr, count);
    return out;
}

Matrix input_grad_batch(const Surrogate& s, const Matrix& X) {
    check_inputs(s.spec(), X);
    if (X.rows() == 0) return Matrix(0, X.cols());
    ForwardPass fp = forward(s.spec(), s.params(), X);
    return backward(s.spec(), s.params(), fp, true).input;
}

Vector input_grad(const Surrogate& s, std::span<const double> x) {
    return input_grad_batch(s, row_matrix(s.spec(), x)).row(0).transpose();
}

double init_bound(std::size_t fan_in, std::size_t fan_out) noexcept {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
    spec.validate();
    ParamVector params(spec.parameter_count());
    Rng rng(seed);
    for (const Layer& layer : layout(spec)) {
        const double bound = init_bound(static_cast<std::size_t>(layer.fan_in),
                                        static_cast<std::size_t>(layer.fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        const std::size_t end = layer.bias_offset + static_cast<std::size_t>(layer.fan_out);
        for (std::size_t i = layer.weight_offset; i < end; ++i) params[i] = dist(rng);
    }
    return params;
}

}  // namespace ignite
