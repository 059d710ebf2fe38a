#pragma once

// Synthetic analytic-oracle tasks and offline dataset generation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ignite/linalg.hpp"

namespace ignite {

enum class OracleKind { quad_bowl, neg_ackley, neg_rastrigin, neg_branin };

std::string_view to_string(OracleKind kind) noexcept;
OracleKind parse_oracle_kind(std::string_view name);

/// Axis-aligned box with lo[i] < hi[i].
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    static Box uniform(std::size_t dim, double lo, double hi);

    std::size_t dim() const noexcept { return lo.size(); }
    double diagonal() const;
    bool contains(std::span<const double> x) const;
    /// Clips every row of X into the box.
    void project(Matrix& X) const;
    void validate() const;
};

struct SyntheticTask {
    std::string name;
    OracleKind oracle = OracleKind::quad_bowl;
    std::size_t dim = 0;
    Box bounds;
    double y_min_box = 0.0;
    double y_max_box = 0.0;
    std::optional<std::vector<double>> known_argmax;
};

/// Builds a task with its box and oracle range metadata. dim is ignored for
/// neg_branin (always 2). Default dims: quad_bowl 16, neg_ackley 8,
/// neg_rastrigin 8.
SyntheticTask make_task(OracleKind kind, std::optional<std::size_t> dim = std::nullopt);
SyntheticTask make_task(std::string_view name, std::optional<std::size_t> dim = std::nullopt);

/// quad_bowl-16, neg_ackley-8, neg_rastrigin-8, neg_branin-2.
std::vector<SyntheticTask> standard_suite();

/// Throws DomainError outside the box and ShapeError on dimension mismatch.
double oracle_eval(const SyntheticTask& t, std::span<const double> x);
Vector oracle_eval_batch(const SyntheticTask& t, const Matrix& X);

/// (y - y_min_box) / (y_max_box - y_min_box).
double normalize_score(const SyntheticTask& t, double y_raw) noexcept;

struct MetadataCheck {
    double observed_min = 0.0;
    double observed_max = 0.0;
    std::size_t escapes = 0;  // samples outside [y_min - tol, y_max + tol]
};

/// Dense uniform sampling of the box against the recorded oracle range, with
/// tol = 1e-6 * (y_max_box - y_min_box).
MetadataCheck check_task_metadata(const SyntheticTask& t, std::size_t samples, std::uint64_t seed);

struct GenerationParams {
    std::size_t n_pool = 5000;
    double keep_quantile = 0.4;
    std::uint64_t seed = 0;
};

struct OfflineDataset {
    std::string task_name;
    Matrix X;
    Vector z_raw;
    Vector z_norm;
    double y_min_box = 0.0;
    double y_max_box = 0.0;
    GenerationParams gen;
    double pool_quantile = 0.0;  // retained points satisfy z_raw <= pool_quantile

    std::size_t size() const noexcept { return static_cast<std::size_t>(X.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }
    /// Throws on any broken invariant (shapes, normalization, truncation).
    void validate() const;
};

/// Samples n_pool designs uniformly in the box and keeps the points whose
/// oracle value is at or below the nearest-rank q-quantile of the pool.
OfflineDataset generate_offline_dataset(const SyntheticTask& t, std::size_t n_pool, double q,
                                        std::uint64_t seed);

/// Affine map of designs between the task box and [0, 1]^dim.
Matrix to_unit_box(const SyntheticTask& t, const Matrix& X);
Matrix from_unit_box(const SyntheticTask& t, const Matrix& U);
/// Same dataset with X expressed in unit-box coordinates.
OfflineDataset in_unit_box(const SyntheticTask& t, const OfflineDataset& data);

}  // namespace ignite
