#pragma once

// CSV export/import of offline datasets. The CSV holds one row per design
// (x_0..x_{d-1}, z_raw, z_norm); a JSON sidecar next to it (same path with a
// ".json" suffix appended) carries the task name, bounds, normalization
// constants and generation parameters.

#include <filesystem>

#include "ignite/tasks.hpp"

namespace ignite {

struct StoredDataset {
    OfflineDataset data;
    Box bounds;
};

std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes csv and its sidecar. Values are written with round-trip precision.
void save_dataset(const std::filesystem::path& csv, const OfflineDataset& data, const Box& bounds);

/// Reads csv and its sidecar back and validates the result. Throws IoError on
/// missing or malformed files.
StoredDataset load_dataset(const std::filesystem::path& csv);

}  // namespace ignite
