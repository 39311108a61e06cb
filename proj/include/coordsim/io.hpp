#pragma once

// Config ingestion (strict JSON: unknown keys rejected, errors carry dotted
// field paths), shipped presets, job dispatch, and result persistence
// (summary.json + points.csv, written atomically via temp file + rename).

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "coordsim/experiments.hpp"
#include "coordsim/scenario.hpp"
#include "coordsim/stats.hpp"
#include "coordsim/unbundling.hpp"

namespace coordsim {

inline constexpr const char* kToolName = "coordsim";
inline constexpr const char* kToolVersion = "1.0.0";

// Serialization. to_json emits every field (defaults resolved), so
// from_json(to_json(x)) == x field-for-field for any valid value.
nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const SectorConfig& sector);
nlohmann::json to_json(const ScalingThresholds& thresholds);
ScenarioConfig scenario_from_json(const nlohmann::json& doc, const std::string& prefix = "");
SectorConfig sector_from_json(const nlohmann::json& doc, const std::string& prefix);
ScalingThresholds thresholds_from_json(const nlohmann::json& doc, const std::string& prefix);

/// Built-in scenarios: "low-sor" (hourglass, zero coupling, cheap governance),
/// "sor-dominant" (hourglass, sparse coupling, expensive policy-gated
/// governance, mild drift), "invariant-dominant" (coupling grows with n).
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Canonical two-sector unbundling setup (fast lambda = 2 vs slow 0.05).
void canonical_sectors(SectorConfig& low, SectorConfig& high);

struct RunJob {
    ScenarioConfig scenario;
};
struct SweepJob {
    ScenarioConfig scenario;
    std::vector<std::uint64_t> seeds;
};
struct ExperimentJob { // predict1 / predict2 / instability / sublinearity
    ScenarioConfig base;
    std::vector<int> n_grid;
    std::vector<std::uint64_t> seeds;
    ScalingThresholds thresholds;
    bool include_lazy = false;          // predict1 only
    std::optional<std::string> expect;  // kind default when absent; "none" disables
};
struct UnbundleJob {
    SectorConfig low, high;
    std::vector<std::uint64_t> seeds;
    double x_min_fit = 1.0;
    std::optional<std::string> expect;
};
struct FitJob {
    std::string data_path;           // one-column headerless CSV of positive numbers
    std::optional<double> x_min;     // absent = KS-minimizing selection
};

struct Job {
    std::string kind; // run | sweep | predict1 | predict2 | instability |
                      // sublinearity | unbundle | fit
    std::variant<RunJob, SweepJob, ExperimentJob, UnbundleJob, FitJob> payload;
};

/// Parses a job document (strict keys, "kind" discriminator mandatory).
Job job_from_json(const nlohmann::json& doc);

/// Loads a job from a JSON file, or resolves a preset name: scenario presets
/// load as run jobs, "canonical" as the canonical unbundle job.
Job load_job(const std::string& path_or_preset);

/// Same, but shaped for a specific CLI subcommand: a preset name becomes that
/// kind's job with default grid/seeds; a file must carry a matching "kind".
Job load_job_for_kind(const std::string& path_or_preset, const std::string& kind);

/// Exit statuses (documented contract): 0 success, 1 runtime/IO error,
/// 2 usage or config validation error, 3 expected verdict not reproduced.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerdict = 3;

struct ExecOutcome {
    int exit_code = kExitSuccess;
    std::vector<std::string> written; ///< files persisted, in write order
    std::string verdict_line;         ///< empty for verdict-free kinds
};

/// Runs the job, writes summary.json + points.csv (+ tasks.csv for detailed
/// runs) into out_dir. Overrides the job's seed(s) when seed_override is set.
ExecOutcome execute_job(const Job& job, const std::string& out_dir, bool detail = false,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

/// Writes content to path via a temp file and rename; never leaves a partial
/// file at path. Creates parent directories as needed.
void write_file_atomic(const std::string& path, const std::string& content);

/// Shortest round-trip decimal for CSV cells; non-finite values become the
/// empty cell (CSV columns carry only finite numbers).
std::string format_double(double value);

} // namespace coordsim
