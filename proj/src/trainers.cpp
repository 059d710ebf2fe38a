#include "ignite/trainers.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <cmath>
#include <random>
#include <string>

#include "ignite/errors.hpp"
#include "ignite/random.hpp"
#include "ignite/sharpness.hpp"

namespace ignite {

namespace {

struct StepInput {
    const MlpSpec& spec;
    const ParamVector& omega;
    const Matrix& X;
    std::span<const double> z;
    const BatchGradients& base;  // g1, g2 and loss at omega
    double lambda;
};

// Returns the step direction g; omega moves by -eta_w * g.
using DirectionFn = std::function<ParamVector(const StepInput&)>;

void check_data(const OfflineDataset& data, const MlpSpec& spec) {
    if (data.X.rows() == 0) throw EmptyInputError("training: empty dataset");
    if (data.z_norm.size() != data.X.rows()) throw ShapeError("training: score count differs from row count");
    if (data.dim() != spec.input_dim) {
        throw ShapeError("training: dataset dimension " + std::to_string(data.dim()) +
                         " does not match surrogate input_dim " + std::to_string(spec.input_dim));
    }
}

TrainResult run_loop(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                     std::optional<ParamVector> init, bool learn_lambda, const DirectionFn& direction) {
    cfg.validate();
    spec.validate();
    check_data(data, spec);

    ParamVector omega = init ? std::move(*init) : init_params(spec, derive_seed(cfg.seed, 0, stream::init));
    if (omega.size() != spec.parameter_count()) throw ShapeError("training: initial parameter length mismatch");

    Rng rng(derive_seed(cfg.seed, 0, stream::batches));
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    std::vector<std::size_t> rows(cfg.batch_size);
    Vector zb(static_cast<Eigen::Index>(cfg.batch_size));

    TrainTrace trace;
    trace.records.reserve(cfg.iterations);
    double lambda = cfg.lambda0;
    const auto start = std::chrono::steady_clock::now();

    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        for (auto& i : rows) i = pick(rng);
        const Matrix Xb = gather_rows(data.X, rows);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            zb[static_cast<Eigen::Index>(k)] = data.z_norm[static_cast<Eigen::Index>(rows[k])];
        }
        const std::span<const double> z(zb.data(), rows.size());

        const BatchGradients base = loss_and_mean_output_grads(spec, omega, Xb, z);
        const double gn = norm2(base.mean_output_grad);
        const double effective_gn = gn < kDegenerateGradNorm ? 0.0 : gn;

        const ParamVector g = direction(StepInput{spec, omega, Xb, z, base, lambda});

        TraceRecord rec;
        rec.iter = t;
        rec.loss = base.loss;
        rec.grad_norm = gn;
        rec.constraint = cfg.rho * effective_gn - cfg.epsilon;
        rec.lambda = lambda;
        rec.update_norm = norm2(g);

        omega = axpy(omega, g, -cfg.eta_w);

        if (learn_lambda) {
            rec.lambda_next_unclamped = lambda + cfg.eta_lambda * rec.constraint;
            lambda = std::max(cfg.lambda_floor, rec.lambda_next_unclamped);
        } else {
            rec.lambda_next_unclamped = lambda;
        }

        if (!std::isfinite(rec.loss) || !std::isfinite(rec.update_norm) || !omega.all_finite()) {
            throw DivergenceError("training diverged at iteration " + std::to_string(t));
        }
        trace.records.push_back(rec);
    }
    trace.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return TrainResult{Surrogate(spec, std::move(omega)), std::move(trace)};
}

ParamVector plain_direction(const StepInput& in) { return in.base.loss_grad; }

TrainResult ignite_impl(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                        std::optional<ParamVector> init) {
    const double rho = cfg.rho, r = cfg.r;
    return run_loop(data, spec, cfg, std::move(init), true, [rho, r](const StepInput& in) {
        const ParamVector& g2 = in.base.mean_output_grad;
        const double gn = norm2(g2);
        if (in.lambda == 0.0 || gn < kDegenerateGradNorm) return in.base.loss_grad;
        const ParamVector omega_hat = axpy(in.omega, g2, r / gn);
        const ParamVector g3 = mean_output_grad(in.spec, omega_hat, in.X);
        return ParamVector(Vector(in.base.loss_grad.vec() + (in.lambda * rho / r) * (g3.vec() - g2.vec())));
    });
}

}  // namespace

IgniteConfig IgniteConfig::ignite2_defaults() {
    IgniteConfig c;
    c.lambda0 = 0.01;
    c.rho = 0.2;
    c.r = 0.2;
    c.eta_lambda = 0.0;
    return c;
}

void IgniteConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be positive and finite");
    };
    positive(rho, "rho");
    positive(r, "r");
    positive(eta_w, "eta_w");
    positive(epsilon, "epsilon");
    if (!(eta_lambda >= 0.0) || !std::isfinite(eta_lambda)) throw ParameterError("eta_lambda must be >= 0");
    if (iterations == 0) throw ParameterError("iterations must be positive");
    if (batch_size == 0) throw ParameterError("batch_size must be positive");
    if (!std::isfinite(lambda0)) throw ParameterError("lambda0 must be finite");
    if (std::isnan(lambda_floor) || lambda_floor == std::numeric_limits<double>::infinity()) {
        throw ParameterError("lambda_floor must be a real or -infinity");
    }
    if (lambda0 < lambda_floor) throw ParameterError("lambda0 must be >= lambda_floor");
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::erm: return "erm";
        case Regime::ignite: return "ignite";
        case Regime::ignite2: return "ignite2";
        case Regime::sam: return "sam";
        case Regime::l1: return "l1";
        case Regime::l2: return "l2";
    }
    return "unknown";
}

Regime parse_regime(std::string_view name) {
    for (Regime r : {Regime::erm, Regime::ignite, Regime::ignite2, Regime::sam, Regime::l1, Regime::l2}) {
        if (name == to_string(r)) return r;
    }
    throw ParameterError("unknown training regime '" + std::string(name) + "'");
}

double lambda_update(double lambda, double eta_lambda, double rho, double grad_norm, double epsilon,
                     double floor) noexcept {
    return std::max(floor, lambda + eta_lambda * (rho * grad_norm - epsilon));
}

TrainResult train_erm(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                      std::optional<ParamVector> init) {
    return run_loop(data, spec, cfg, std::move(init), false, plain_direction);
}

TrainResult train_ignite(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                         std::optional<ParamVector> init) {
    return ignite_impl(data, spec, cfg, std::move(init));
}

TrainResult train_ignite2(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                          std::optional<ParamVector> init) {
    IgniteConfig fixed = cfg;
    fixed.eta_lambda = 0.0;
    return ignite_impl(data, spec, fixed, std::move(init));
}

TrainResult train_sam(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                      std::optional<ParamVector> init) {
    const double rho = cfg.rho;
    return run_loop(data, spec, cfg, std::move(init), false, [rho](const StepInput& in) {
        const ParamVector& gl = in.base.loss_grad;
        const double n = norm2(gl);
        if (n < kDegenerateGradNorm) return gl;
        const ParamVector adv = axpy(in.omega, gl, rho / n);
        return loss_and_grad(in.spec, adv, in.X, in.z).grad;
    });
}

TrainResult train_penalized(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                            Penalty penalty, double weight, std::optional<ParamVector> init) {
    if (!(weight >= 0.0) || !std::isfinite(weight)) throw ParameterError("penalty weight must be >= 0");
    if (weight == 0.0) return run_loop(data, spec, cfg, std::move(init), false, plain_direction);
    return run_loop(data, spec, cfg, std::move(init), false, [penalty, weight](const StepInput& in) {
        const Vector& w = in.omega.vec();
        Vector pen = penalty == Penalty::l2
                         ? Vector(2.0 * w)
                         : Vector(w.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }));
        return ParamVector(Vector(in.base.loss_grad.vec() + weight * pen));
    });
}

TrainResult train(Regime regime, const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                  double penalty_weight, std::optional<ParamVector> init) {
    switch (regime) {
        case Regime::erm: return train_erm(data, spec, cfg, std::move(init));
        case Regime::ignite: return train_ignite(data, spec, cfg, std::move(init));
        case Regime::ignite2: return train_ignite2(data, spec, cfg, std::move(init));
        case Regime::sam: return train_sam(data, spec, cfg, std::move(init));
        case Regime::l1: return train_penalized(data, spec, cfg, Penalty::l1, penalty_weight, std::move(init));
        case Regime::l2: return train_penalized(data, spec, cfg, Penalty::l2, penalty_weight, std::move(init));
    }
    throw ParameterError("unknown regime");
}

}  // namespace ignite
