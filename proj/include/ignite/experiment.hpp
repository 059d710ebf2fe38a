#pragma once

// Configuration-driven experiment runner: multi-seed generate / train /
// search / evaluate pipelines, gain tables, parameter sweeps, traces, the
// training overhead measurement and the construction report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ignite/mlp.hpp"
#include "ignite/search.hpp"
#include "ignite/tasks.hpp"
#include "ignite/trainers.hpp"

namespace ignite {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct TaskConfig {
    std::string name = "neg_ackley";
    std::optional<std::size_t> dim;
    std::size_t n_pool = 5000;
    double keep_quantile = 0.4;
};

struct SurrogateConfig {
    std::vector<std::size_t> hidden_widths{64, 64};
    HiddenActivation hidden_activation = HiddenActivation::relu;
    OutputActivation output_activation = OutputActivation::identity;
};

struct ExperimentConfig {
    std::string name = "experiment";
    TaskConfig task;
    SurrogateConfig surrogate;
    Regime regime = Regime::ignite;
    IgniteConfig trainer;
    double penalty_weight = 0.0;
    SearchConfig search;
    std::vector<std::uint64_t> seeds;  // default 0..15
    std::uint64_t master_seed = 0;
    std::vector<double> levels = kDefaultLevels;
    std::filesystem::path output_dir = "out";
    /// Train and search in [0, 1]^dim coordinates; candidates are mapped
    /// back to the task box before oracle evaluation.
    bool unit_box = true;

    ExperimentConfig();

    SyntheticTask make_task() const;
    MlpSpec spec_for(const SyntheticTask& t) const;
    /// Number of surrogates trained per seed (ensemble_size for ens_*).
    std::size_t members() const;
    /// Throws ConfigError with a dotted field path.
    void validate() const;
};

/// Strict mapping: unknown keys and wrong types are ConfigErrors naming the
/// field path. Missing keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// "16" means seeds 0..15; "3,7,9" is an explicit list; "4-6" is the
/// inclusive range 4,5,6 and may appear as a list item.
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Per-seed RNG streams derived from the master seed.
std::uint64_t data_seed(std::uint64_t master, std::uint64_t seed);
std::uint64_t train_seed(std::uint64_t master, std::uint64_t seed, std::size_t member);
std::uint64_t search_seed(std::uint64_t master, std::uint64_t seed);

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    PercentileReport report;
    double candidate_sharpness = 0.0;
    double train_sharpness = 0.0;     // rho * ||grad h|| over the full training set
    double dataset_best = 0.0;        // best normalized score in the offline data
    double train_seconds = 0.0;
    std::size_t train_iterations = 0;  // summed over members
    std::vector<TrainTrace> traces;    // one per member, kept in memory only
};

struct LevelAggregate {
    double level = 0.0;
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;     // sample standard deviation, 0 for n < 2
    double median = 0.0;
};

struct RunReport {
    ExperimentConfig config;
    std::string task_name;
    std::vector<SeedResult> seeds;
    std::vector<LevelAggregate> aggregate;

    bool complete() const;
    std::vector<const SeedResult*> succeeded() const;
};

/// Aggregates normalized scores of the successful seeds per level.
std::vector<LevelAggregate> aggregate_levels(const std::vector<SeedResult>& seeds,
                                             const std::vector<double>& levels);

/// Generate, train, search, evaluate and measure every seed. Failures in one
/// seed are recorded in its row and the remaining seeds still run. With
/// write_artifacts the report is written under cfg.output_dir.
RunReport run_experiment(const ExperimentConfig& cfg, bool write_artifacts = true);

/// Writes run.json, per_seed.csv, aggregate.csv, timing.csv, traces/ and a
/// FAILED marker when any seed failed. Everything except timing.csv is a
/// pure function of (config, seeds).
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// Reads a report directory and verifies that aggregate.csv is recomputable
/// from per_seed.csv (IoError otherwise).
RunReport load_report(const std::filesystem::path& dir);

/// Writes one trace CSV per (seed, member); returns the paths.
std::vector<std::filesystem::path> emit_traces(const RunReport& report, const std::filesystem::path& dir);

struct GainRow {
    double level = 0.0;
    double base_mean = 0.0;
    double treated_mean = 0.0;
    double gain_pp = 0.0;  // 100 * (treated_mean - base_mean)
    double base_median = 0.0;
    double treated_median = 0.0;
    double median_gain_pp = 0.0;
};

/// Requires the same task, levels and number of successful seeds.
std::vector<GainRow> compare(const RunReport& base, const RunReport& treated);
void write_gain_csv(const std::filesystem::path& path, const std::vector<GainRow>& rows);

enum class SweepParam { epsilon, eta_lambda, rho, r };
std::string_view to_string(SweepParam p) noexcept;
SweepParam parse_sweep_param(std::string_view name);

struct SweepResult {
    SweepParam parameter = SweepParam::epsilon;
    std::vector<double> values;
    RunReport baseline;                      // same config trained with erm
    std::vector<RunReport> runs;             // one per value
    std::vector<std::vector<GainRow>> gains;  // one table per value
};

/// One experiment per value (at least two values) plus the ERM baseline.
/// Artifacts go to <output_dir>/baseline and <output_dir>/<param>_<value>,
/// and the gain table to <output_dir>/sweep.csv.
SweepResult sweep(const ExperimentConfig& cfg, SweepParam parameter, const std::vector<double>& values,
                  bool write_artifacts = true);

struct OverheadReport {
    std::size_t iterations = 0;
    std::size_t repeats = 0;
    double erm_seconds_per_iter = 0.0;
    double ignite_seconds_per_iter = 0.0;
    double ratio() const { return ignite_seconds_per_iter / erm_seconds_per_iter; }
};

/// Times ERM and IGNITE training on the first seed's dataset, alternating
/// the two regimes `repeats` times.
OverheadReport measure_overhead(const ExperimentConfig& cfg, std::size_t repeats = 3);

struct TheoryReport {
    std::string text;
    bool passed = false;
};

/// Checks a fixed default construction, a degenerate gamma = 0 instance
/// (expected to be flagged) and `randomized` random instances.
TheoryReport theory_report(std::size_t randomized = 100, std::uint64_t seed = 0);

}  // namespace ignite
