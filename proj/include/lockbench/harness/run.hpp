#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lockbench/harness/plan.hpp"

namespace lockbench::harness {

/// Metric columns of a summary row, in order. Accuracies and rates are
/// fractions in [0, 1]; f1 is Fisher's ratio; matched, u_targeted and fill_up
/// are second-phase placement counts of the attacked UNSAIL instance.
inline constexpr std::array<const char*, 16> kMetricColumns = {
    "sail", "ml1",  "ml2", "decode",    "baseline", "sweep",   "redundancy", "changed",
    "f1",   "hd",   "oer", "fault_cov", "test_cov", "matched", "u_targeted", "fill_up"};

std::string summary_header();

struct CellResult {
    CellSpec cell;
    bool ok = false;
    std::string error;
    std::map<std::string, double> metrics;  ///< absent columns are written empty
};

/// Fixed-precision CSV row matching summary_header().
std::string summary_row(const CellResult& r);

/// Generates the cell's instances, attacks the held-out one and evaluates
/// it. Instance netlists, key files and attack reports go to `cell_dir`.
/// Throws on any failure.
CellResult run_cell(const ExperimentPlan& plan, const CellSpec& cell, const std::filesystem::path& cell_dir);

struct RunOptions {
    std::filesystem::path out;
    std::size_t workers = 1;
    std::ostream* log = nullptr;
    /// Only cells with these ids (all when empty).
    std::vector<std::string> only;
};

struct RunStats {
    std::size_t completed = 0;
    std::size_t skipped = 0;  ///< already complete on disk
    std::size_t failed = 0;
};

/// Writes <out>/manifest.json, runs every cell not yet marked complete
/// (cells/<id>/done), records failures in cells/<id>/error.txt and keeps
/// going, then writes <out>/summary.csv in cell order.
RunStats run_plan(const ExperimentPlan& plan, const RunOptions& opt);

/// Reruns the cells recorded in a manifest (all, or those in opt.only) into
/// opt.out using the recorded seeds.
RunStats replay(const std::filesystem::path& manifest, const RunOptions& opt);

/// Rows of a run directory (cells/*/row.csv), in cell order, keyed by
/// column name. Throws std::runtime_error when there are none.
std::vector<std::map<std::string, std::string>> load_rows(const std::filesystem::path& run_dir);

}  // namespace lockbench::harness
