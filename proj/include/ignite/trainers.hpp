#pragma once

// Surrogate training regimes sharing one mini-batch SGD loop: plain ERM,
// IGNITE (sharpness constraint with a learned multiplier), IGNITE-2 (fixed
// multiplier), a SAM-style loss-sharpness baseline and L1/L2 penalties.

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "ignite/linalg.hpp"
#include "ignite/mlp.hpp"
#include "ignite/tasks.hpp"

namespace ignite {

struct IgniteConfig {
    double lambda0 = 0.01;
    double rho = 0.05;
    double r = 0.05;
    double eta_w = 0.01;
    double eta_lambda = 1e-3;
    double epsilon = 0.1;
    std::size_t iterations = 2000;
    std::size_t batch_size = 128;
    std::uint64_t seed = 0;
    /// Lower clamp on the multiplier; -infinity disables clamping.
    double lambda_floor = 0.0;

    /// Fixed-multiplier defaults: lambda 0.01, rho 0.2, r 0.2, eta_lambda 0.
    static IgniteConfig ignite2_defaults();

    /// Throws ParameterError naming the offending field.
    void validate() const;
};

struct TraceRecord {
    std::size_t iter = 0;
    double loss = 0.0;          // batch MSE before the update
    double grad_norm = 0.0;     // ||g2||, mean-prediction parameter gradient
    double constraint = 0.0;    // rho * ||g2|| - epsilon
    double lambda = 0.0;        // multiplier used in this iteration
    double lambda_next_unclamped = 0.0;
    double update_norm = 0.0;   // ||g||, the full step direction
};

struct TrainTrace {
    std::vector<TraceRecord> records;
    double seconds = 0.0;

    std::size_t size() const noexcept { return records.size(); }
};

struct TrainResult {
    Surrogate surrogate;
    TrainTrace trace;
};

enum class Regime { erm, ignite, ignite2, sam, l1, l2 };
std::string_view to_string(Regime r) noexcept;
Regime parse_regime(std::string_view name);

enum class Penalty { l1, l2 };

/// All trainers fit data.X against data.z_norm. `init` overrides the seeded
/// initialization (it must have spec.parameter_count() entries).
TrainResult train_erm(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                      std::optional<ParamVector> init = std::nullopt);
TrainResult train_ignite(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                         std::optional<ParamVector> init = std::nullopt);
/// train_ignite with eta_lambda forced to 0.
TrainResult train_ignite2(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                          std::optional<ParamVector> init = std::nullopt);
TrainResult train_sam(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                      std::optional<ParamVector> init = std::nullopt);
TrainResult train_penalized(const OfflineDataset& data, const MlpSpec& spec, const IgniteConfig& cfg,
                            Penalty penalty, double weight,
                            std::optional<ParamVector> init = std::nullopt);

/// Dispatch by regime; penalty_weight is used only by l1/l2.
TrainResult train(Regime regime, const OfflineDataset& data, const MlpSpec& spec,
                  const IgniteConfig& cfg, double penalty_weight = 0.0,
                  std::optional<ParamVector> init = std::nullopt);

/// One multiplier step: max(floor, lambda + eta_lambda * (rho * grad_norm - epsilon)).
double lambda_update(double lambda, double eta_lambda, double rho, double grad_norm, double epsilon,
                     double floor = 0.0) noexcept;

}  // namespace ignite
