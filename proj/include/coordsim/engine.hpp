#pragma once

// Discrete-period simulation loop. Each period, in order: add scheduled
// providers (recording each marginal integration delta), apply drift, sample
// tasks (materializing lazy-mesh edges as tasks touch provider pairs), charge
// verification per task, charge governance, assemble the period breakdown.
//
// Randomness: one stream per (period, purpose) pair derived from the config
// seed (see rng.hpp). Purposes: 0 drift, 1 task sampling, 2 check sampling.
// Because task draws never share a stream with drift or checks, the task
// workload is identical across regimes and verification modes for a given
// seed, which is what makes regime contrasts same-workload comparisons.

#include <cstdint>
#include <optional>
#include <vector>

#include "coordsim/cost.hpp"
#include "coordsim/ecosystem.hpp"
#include "coordsim/harness.hpp"
#include "coordsim/scenario.hpp"

namespace coordsim {

/// One provider addition and the integration cost it incurred.
struct GrowthEvent {
    std::uint32_t provider_id = 0;
    double delta_cost = 0.0;
};

struct PeriodRecord {
    int period = 0;          ///< 0-based
    int providers_end = 0;   ///< n at end of period
    std::int64_t edges_end = 0;
    int tasks = 0;
    CostBreakdown costs;
    double cost_per_task = 0.0; ///< NaN when tasks == 0
    std::vector<GrowthEvent> growth_events;
    int broken_count = 0;
    double repair_cost = 0.0;
    double touch_creation = 0.0; ///< lazy-mesh edge creation charged this period
};

/// Per-task detail row (recorded only when detail logging is on). Carries
/// everything the recomputation oracle needs to re-derive costs from scratch.
struct TaskRecord {
    int period = 0;
    TaskSample task;
    double coupling_charge = 0.0; ///< intensity actually charged (see scenario.hpp)
    std::vector<std::uint32_t> providers; ///< identities, ascending
    std::vector<int> checks;              ///< mechanistic mode only
    double verification_local = 0.0;
    double verification_coupling = 0.0;
    double touch_delta = 0.0; ///< lazy-mesh creation cost this task triggered
};

struct RunTrace {
    ScenarioConfig config; ///< echoed, fully resolved
    bool detail = false;
    std::vector<PeriodRecord> periods;
    std::vector<TaskRecord> tasks; ///< empty unless detail
    CostBreakdown totals;
    int final_providers = 0;
    std::int64_t final_edges = 0;
};

/// Draws one task at ecosystem size n (>= 1): width per config (capped at n),
/// coupled = round(q * width) clamped to [0, width]. Provider identities are
/// drawn separately (uniform k-subsets) by the engine so this stays a pure
/// workload sample. width_table, when given, must be the truncated-Zipf width
/// table for the current n (the engine caches it; passing it avoids a rebuild
/// per task).
TaskSample sample_task(int n, const ScenarioConfig& config, SplitMix64& rng,
                       const ZipfTable* width_table = nullptr);

/// Runs the scenario. Validates config first (throws ValidationError naming
/// the field). With detail = true every task is logged for the oracle.
RunTrace run(const ScenarioConfig& config, bool detail = false);

/// Incremental form of the same loop, for tests that inspect mid-run state.
class Engine {
public:
    explicit Engine(const ScenarioConfig& config, bool detail = false);

    PeriodRecord step_period();
    RunTrace finish(); ///< assemble the trace after stepping all periods

    const EcosystemState& ecosystem() const { return eco_; }
    const HarnessLibrary* library() const { return library_ ? &*library_ : nullptr; }
    int periods_done() const { return period_; }

private:
    ScenarioConfig config_;
    bool detail_;
    EcosystemState eco_;
    std::optional<HarnessLibrary> library_;  // mechanistic mode only
    std::optional<ZipfTable> check_table_;   // mechanistic mode only
    std::optional<ZipfTable> width_table_;   // truncated-Zipf widths, cached per n
    int width_table_n_ = 0;
    int period_ = 0;
    std::uint64_t next_task_id_ = 0;
    std::vector<PeriodRecord> records_;
    std::vector<TaskRecord> task_records_;
    CostBreakdown totals_;
};

/// Brute-force recomputation of the run totals from logged records only:
/// growth deltas from regime mechanics, lazy edges by replaying logged
/// provider sets, mechanistic costs by replaying logged checks against a
/// fresh library, coupling charges from the model and the period's n.
/// Throws std::invalid_argument when the trace lacks per-task detail.
CostBreakdown oracle_total_cost(const RunTrace& trace);

} // namespace coordsim
