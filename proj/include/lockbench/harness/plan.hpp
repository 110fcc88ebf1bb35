#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lockbench/locker/locker.hpp"

namespace lockbench::harness {

enum class Defense : std::uint8_t { None, Unsail };
std::string_view to_string(Defense d) noexcept;
Defense defense_from_string(std::string_view s);

enum class Attack : std::uint8_t { Sail, Sweep, Redundancy };
std::string_view to_string(Attack a) noexcept;
Attack attack_from_string(std::string_view s);

class PlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentPlan {
    std::vector<std::filesystem::path> circuits;
    std::vector<locker::Scheme> schemes = {locker::Scheme::Rll};
    std::vector<std::string> palettes = {"xnor"};
    std::vector<std::size_t> key_sizes = {64};
    std::vector<Defense> defenses = {Defense::None, Defense::Unsail};
    std::size_t seeds = 20;  ///< locked instances per cell
    std::size_t effort = 2;
    std::uint64_t seed = 0;  ///< plan seed; cell seeds derive from it
    std::filesystem::path out;

    std::vector<Attack> attacks = {Attack::Sail, Attack::Sweep, Attack::Redundancy};
    std::vector<std::size_t> sub_sizes = {3, 5, 6};
    std::size_t rf_sub = 6;   ///< change classifier of the combined attack
    std::size_t ml1_sub = 3;  ///< classifier scored in the ml1 column
    std::size_t trees = 50;
    std::size_t sweep_effort = 1;
    double margin = 0.0;
    std::size_t cone_limit = 12;

    std::size_t hd_keys = 100;  ///< 0 skips HD/OER
    std::size_t hd_patterns = 10000;
    std::size_t fault_patterns = 1024;  ///< 0 skips fault coverage
    std::size_t fault_exhaustive_limit = 16;

    bool has(Attack a) const;
};

/// Parses the plan grammar (see README). Relative circuit paths resolve
/// against `base_dir`. Throws PlanError with the offending line.
ExperimentPlan parse_plan(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentPlan read_plan_file(const std::filesystem::path& path);

/// Canonical plan text: parse_plan(plan_text(p)) reproduces p.
std::string plan_text(const ExperimentPlan& p);

/// One (circuit, scheme, palette, K, defense) combination.
struct CellSpec {
    std::size_t index = 0;
    std::string id;  ///< "<index>_<circuit>_<scheme>_<palette>_k<K>_<defense>"
    std::filesystem::path circuit;
    std::string circuit_name;  ///< file stem
    locker::Scheme scheme = locker::Scheme::Rll;
    std::string palette;
    std::size_t K = 0;
    Defense defense = Defense::None;
    std::uint64_t seed = 0;  ///< derive_seed(plan seed, index)
    std::vector<std::uint64_t> instance_seeds;
    std::size_t holdout = 0;  ///< index of the attacked instance
};

/// Cells in plan order: circuits outermost, then schemes, palettes, K and
/// defenses, so appending circuits never renumbers existing cells.
std::vector<CellSpec> expand(const ExperimentPlan& p);

}  // namespace lockbench::harness
