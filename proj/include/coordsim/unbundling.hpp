#pragma once

// Firm-boundary dynamics: each firm holds S capability units, pays an
// internal maintenance cost kappa * lambda * S^phi that rises superlinearly
// (phi > 1) with the domain's knowledge velocity lambda, and can instead
// delegate a unit at the flat external price c_del. Firms adjust one unit per
// period toward whichever side is cheaper at the margin. Fast domains shed
// units toward micro-specialists (the fitted size exponent steepens); slow
// domains absorb and consolidate.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "coordsim/powerlaw.hpp"
#include "coordsim/rng.hpp"
#include "coordsim/scenario.hpp"
#include "coordsim/stats.hpp"

namespace coordsim {

struct Firm {
    std::uint64_t id = 0;
    std::int64_t size = 0;   ///< capability units held; the firm exits at 0
    double velocity = 0.0;   ///< lambda, per-period knowledge decay rate
};

/// Velocity of each firm's domain: one shared constant, or a two-point
/// mixture (each firm iid high with probability high_fraction, else low).
struct VelocityAssignment {
    enum class Kind { Constant, TwoPoint };
    Kind kind = Kind::Constant;
    double value = 1.0;
    double low = 0.05;
    double high = 2.0;
    double high_fraction = 0.5;
};

void validate(const VelocityAssignment& velocity, const char* prefix = "velocity");

struct SectorConfig {
    int initial_firms = 2000;  ///< sizes drawn from a power law with exponent alpha0
    double alpha0 = 2.0;       ///< initial size-distribution exponent (> 1)
    VelocityAssignment velocity;
    double kappa = 1.0;        ///< internal cost scale (> 0)
    double phi = 1.3;          ///< internal cost superlinearity (> 1)
    double c_del = 2.5;        ///< delegation price per unit per period
    int entry_rate = 5;        ///< size-1 specialist entrants per period
    int periods = 200;
};

void validate(const SectorConfig& sector, const char* prefix = "sector");

/// kappa * lambda * S^phi (0 for an empty firm).
double internal_cost(std::int64_t size, double velocity, const SectorConfig& sector);

/// Cost of the size-th unit: internal_cost(size) - internal_cost(size - 1).
/// Requires size >= 1.
double marginal_internal_cost(std::int64_t size, double velocity, const SectorConfig& sector);

/// One make-or-buy adjustment: shed a unit when keeping the marginal unit
/// costs more than delegating it, absorb one when the next unit would cost
/// less than delegation, otherwise hold. Ties hold. Depends only on the
/// firm's own pre-period state, so stepping firms in sequence is the
/// synchronous update.
Firm firm_step(const Firm& firm, const SectorConfig& sector);

struct SectorRun {
    /// snapshots[0] is the initial size distribution; snapshots[p] the sizes
    /// after period p (entrants added, exited firms removed).
    std::vector<std::vector<std::int64_t>> snapshots;
};

SectorRun sector_run(const SectorConfig& sector, SplitMix64& rng);

/// Steady-state per-task coordination cost of a reference scenario times a
/// units-per-task factor: the external price a sector's firms delegate at.
double delegation_price_from_reference(const ScenarioConfig& reference, double units_per_task);

struct SectorOutcome {
    std::vector<double> alpha_initial; ///< per seed
    std::vector<double> alpha_final;   ///< per seed
    std::vector<double> delta;         ///< per seed, final - initial
    BootstrapCi delta_ci;              ///< 95% percentile bootstrap over seeds
    std::map<std::int64_t, std::int64_t> final_histogram; ///< pooled over seeds
};

struct UnbundlePoint {
    const char* sector = "";
    std::uint64_t seed = 0;
    double alpha_initial = 0.0;
    double alpha_final = 0.0;
    double delta = 0.0;
};

struct UnbundlingResult {
    SectorOutcome low, high;
    double x_min_fit = 1.0; ///< cutoff used for every exponent fit
    bool bifurcation = false;
    std::vector<UnbundlePoint> points;
};

/// Runs both sectors over the seeds and tests for exponent steepening in the
/// fast sector: bifurcation iff the high-velocity delta's CI lies above 0 and
/// the low-velocity mean delta does not exceed the high-velocity one.
/// The sectors must be identical apart from their velocity assignment.
UnbundlingResult unbundling_experiment(const SectorConfig& low_velocity,
                                       const SectorConfig& high_velocity,
                                       std::span<const std::uint64_t> seeds,
                                       double x_min_fit = 1.0);

} // namespace coordsim
