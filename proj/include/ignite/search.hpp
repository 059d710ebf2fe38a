#pragma once

// Candidate generation from trained surrogates and percentile evaluation.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ignite/linalg.hpp"
#include "ignite/mlp.hpp"
#include "ignite/sharpness.hpp"
#include "ignite/tasks.hpp"

namespace ignite {

enum class SearchMethod { ga, ens_mean, ens_min, reinforce };
enum class SearchInit { top_k_dataset, random_box };

std::string_view to_string(SearchMethod m) noexcept;
std::string_view to_string(SearchInit i) noexcept;
SearchMethod parse_search_method(std::string_view name);
SearchInit parse_search_init(std::string_view name);

struct ReinforceParams {
    std::size_t population_size = 64;
    double sigma_init = 0.1;
    double sigma_decay = 0.98;
};

inline constexpr double kSigmaFloor = 1e-3;

struct SearchConfig {
    SearchMethod method = SearchMethod::ga;
    std::size_t steps = 100;
    /// Unset means 0.01 times the diagonal of the search box.
    std::optional<double> step_size;
    std::size_t num_candidates = 128;
    SearchInit init = SearchInit::top_k_dataset;
    std::size_t ensemble_size = 5;
    ReinforceParams reinforce;
    std::uint64_t seed = 0;

    double resolved_step_size(const Box& bounds) const;
    /// Throws ConfigError with a "search.<field>" path.
    void validate() const;
};

struct CandidateSet {
    Matrix designs;
    Vector surrogate_scores;
    std::optional<Vector> oracle_scores;

    std::size_t size() const noexcept { return static_cast<std::size_t>(designs.rows()); }
};

/// Aggregate prediction of an ensemble: the single model for ga, the mean for
/// ens_mean, the pointwise minimum for ens_min.
Vector aggregate_predict(std::span<const Surrogate> models, SearchMethod method, const Matrix& X);

/// Row i is the gradient of the aggregate at row i of X. For ens_min this is
/// the gradient of the minimizing member (lowest index on ties).
Matrix aggregate_input_grad(std::span<const Surrogate> models, SearchMethod method, const Matrix& X);

/// Starting designs: the num_candidates best dataset rows by z_norm (cycling
/// when the dataset is smaller; ties broken by row order) or uniform draws.
Matrix initial_designs(const OfflineDataset& data, const SearchConfig& cfg, const Box& bounds);

/// Projected gradient ascent on the aggregate of `models` (ga, ens_mean,
/// ens_min). data.X and bounds must be in the surrogates' input coordinates.
CandidateSet grad_ascent_search(std::span<const Surrogate> models, const OfflineDataset& data,
                                const SearchConfig& cfg, const Box& bounds);

struct ReinforceResult {
    CandidateSet candidates;
    Vector initial_mean;
    Vector final_mean;
    double final_sigma = 0.0;
};

/// Diagonal Gaussian search with a mean-score baseline; only the mean is
/// learned, sigma follows sigma_init * sigma_decay^t floored at kSigmaFloor.
ReinforceResult reinforce_search_detailed(const Surrogate& model, const OfflineDataset& data,
                                          const SearchConfig& cfg, const Box& bounds);
CandidateSet reinforce_search(const Surrogate& model, const OfflineDataset& data, const SearchConfig& cfg,
                              const Box& bounds);

/// Dispatches on cfg.method; reinforce uses models[0].
CandidateSet run_search(std::span<const Surrogate> models, const OfflineDataset& data, const SearchConfig& cfg,
                        const Box& bounds);

inline const std::vector<double> kDefaultLevels{50.0, 80.0, 100.0};

struct PercentileReport {
    std::vector<double> levels;
    std::vector<double> normalized;
    std::vector<double> raw;
    std::uint64_t seed = 0;
};

/// Nearest-rank percentile: the ceil(level/100 * n)-th smallest value.
/// level must lie in (0, 100].
double nearest_rank_percentile(std::span<const double> values, double level);

/// Evaluates every design with the task oracle (designs in task coordinates),
/// fills c.oracle_scores and reports percentiles of raw and normalized scores.
PercentileReport evaluate_candidates(CandidateSet& c, const SyntheticTask& task,
                                     const std::vector<double>& levels = kDefaultLevels,
                                     std::uint64_t seed = 0);

/// First-order sharpness of model with the mean taken over the candidates.
SharpnessEstimate candidate_sharpness(const Surrogate& model, const CandidateSet& c, double rho);

}  // namespace ignite
