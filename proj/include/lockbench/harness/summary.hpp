#pragma once

#include <filesystem>
#include <string>

namespace lockbench::harness {

struct Summary {
    /// Rows of kind "cell" (as recorded), "palette" (mean per palette and
    /// defense over completed cells), "delta" (UNSAIL minus no defense per
    /// circuit, scheme, palette and K) and "palette_delta" (mean delta per
    /// palette). Deltas of fractions are in percentage points.
    std::string csv;
    /// Human-readable per-palette table.
    std::string table;
};

inline constexpr const char* kAggregateHeaderPrefix = "kind,circuit,scheme,palette,K,defense,cells";

/// Aggregates a complete or partial run directory and writes
/// <run_dir>/aggregate.csv. Throws std::runtime_error when it holds no rows.
Summary summarize(const std::filesystem::path& run_dir);

}  // namespace lockbench::harness
