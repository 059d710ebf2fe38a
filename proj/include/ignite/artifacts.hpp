#pragma once

// On-disk formats for trained surrogates (JSON), candidate sets (CSV) and
// training traces (CSV). Numbers use shortest round-trip formatting so every
// file is reproducible bitwise.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ignite/mlp.hpp"
#include "ignite/search.hpp"
#include "ignite/trainers.hpp"

namespace ignite {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double_field(std::string_view text, const std::string& where);

/// Minimal CSV helpers (no quoting; fields never contain commas).
std::vector<std::string> split_csv_line(const std::string& line);
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name` in the header; IoError if absent.
    std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

nlohmann::json spec_to_json(const MlpSpec& spec);
MlpSpec spec_from_json(const nlohmann::json& j);

void save_surrogate(const std::filesystem::path& path, const Surrogate& s);
Surrogate load_surrogate(const std::filesystem::path& path);

/// Columns x_0..x_{d-1}, surrogate_score and, when present, oracle_score.
void save_candidates(const std::filesystem::path& path, const CandidateSet& c);
CandidateSet load_candidates(const std::filesystem::path& path);

inline constexpr const char* kTraceHeader = "iter,loss,grad_norm,rho_times_grad_norm,lambda,constraint";

/// One row per iteration under kTraceHeader.
void write_trace_csv(const std::filesystem::path& path, const TrainTrace& trace, double rho);

}  // namespace ignite
