#pragma once

// Seeded sweep experiments over the engine: marginal integration cost of a
// new provider, per-task cost stability at steady state, coupling-share
// instability, and total-cost sublinearity in ecosystem size. Each experiment
// runs (n, seed) cells independently (in parallel) and reduces in (n, seed)
// order, so results are independent of scheduling.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coordsim/scenario.hpp"
#include "coordsim/stats.hpp"

namespace coordsim {

/// Warm-up periods discarded for steady-state measures: 10% of P, rounded up.
int warmup_periods(int periods);

/// One (arm, n, seed) observation; `arm` distinguishes regimes/variants.
struct SweepPoint {
    const char* arm = "";
    int n = 0;
    std::uint64_t seed = 0;
    double value = 0.0;
};

/// Marginal integration cost of one added provider at size n, per regime.
/// The hourglass pays one waist contract; the eager mesh pays n new edges.
/// The optional lazy-mesh arm reports the creation cost of edges incident to
/// the new provider materialized over one post-add period of tasks (lazy
/// deltas are workload-dependent, so this arm is reported, not gated).
struct Prediction1Result {
    std::vector<int> n_grid;
    std::vector<double> hourglass_mean, mesh_mean;
    ScalingDecision hourglass_fit, mesh_fit;
    std::optional<std::vector<double>> lazy_mean;
    std::optional<ScalingDecision> lazy_fit;
    ScalingThresholds thresholds;
    std::vector<SweepPoint> points;
};

Prediction1Result prediction1_experiment(const ScenarioConfig& base, std::span<const int> n_grid,
                                         std::span<const std::uint64_t> seeds,
                                         bool include_lazy = false,
                                         const ScalingThresholds& thresholds = {});

/// Steady-state C/T versus n for the base config's regime. Stable verdict:
/// flat, or log-log slope under thresholds.stable_slope. Collapse verdict:
/// log-log slope at or above thresholds.collapse_slope.
struct Prediction2Result {
    std::vector<int> n_grid;
    std::vector<double> mean_cost_per_task;
    ScalingDecision fit;
    bool stable = false;
    bool collapse = false;
    ScalingThresholds thresholds;
    std::vector<SweepPoint> points;
};

Prediction2Result prediction2_experiment(const ScenarioConfig& base, std::span<const int> n_grid,
                                         std::span<const std::uint64_t> seeds,
                                         const ScalingThresholds& thresholds = {});

/// Coupling share of verification cost, v_coupling / (v_local + v_coupling),
/// versus n. Requires a ScalingLinear coupling model (the probe exists to
/// watch size-proportional coupling overwhelm verification). The flag is
/// raised when the share crosses 0.5 while nondecreasing across the grid.
struct InstabilityResult {
    std::vector<int> n_grid;
    std::vector<double> coupling_share;
    int crossover_n = -1; ///< first grid n with share > 0.5, -1 if none
    bool collapse_flag = false;
    std::vector<SweepPoint> points;
};

InstabilityResult instability_probe(const ScenarioConfig& base, std::span<const int> n_grid,
                                    std::span<const std::uint64_t> seeds);

/// Fits log mean period cost against log n separately per regime, at fixed
/// task distribution, and tests whether cost grows sublinearly in n
/// (exponent < 1 with the bootstrap CI's upper bound also < 1).
struct SublinearityArm {
    std::vector<double> mean_period_cost; ///< per grid n, averaged over seeds
    ScalingDecision fit;                  ///< classification of the mean curve
    std::vector<double> seed_exponents;   ///< one log-log slope per seed
    BootstrapCi exponent_ci;
    bool sublinear = false;
};

struct SublinearityResult {
    std::vector<int> n_grid;
    SublinearityArm hourglass, mesh;
    ScalingThresholds thresholds;
    std::vector<SweepPoint> points;
};

SublinearityResult sublinearity_check(const ScenarioConfig& base, std::span<const int> n_grid,
                                      std::span<const std::uint64_t> seeds,
                                      const ScalingThresholds& thresholds = {});

} // namespace coordsim
