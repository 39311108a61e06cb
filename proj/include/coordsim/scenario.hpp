#pragma once

// Full description of one simulation run: topology regime, growth schedule,
// task workload distributions, verification mode, and cost parameters. The
// engine consumes a validated ScenarioConfig and nothing else, so a config
// (plus its seed) pins the run bit for bit.

#include <cstdint>
#include <vector>

#include "coordsim/cost.hpp"
#include "coordsim/ecosystem.hpp"
#include "coordsim/harness.hpp"

namespace coordsim {

/// Providers added at the start of each period: either a constant, or an
/// explicit per-period sequence (padded with 0 past its end).
struct GrowthSchedule {
    int constant = 1;
    std::vector<int> sequence; ///< takes precedence when non-empty

    int at(int period) const {
        if (sequence.empty())
            return constant;
        return period < static_cast<int>(sequence.size()) ? sequence[period] : 0;
    }
};

void validate(const GrowthSchedule& growth, const char* prefix = "growth");

/// Task width (providers touched per task), always capped at current n.
struct WidthDist {
    enum class Kind { Constant, PoissonPlusOne, TruncatedZipf };
    Kind kind = Kind::Constant;
    int k = 4;           ///< Constant: width before the n cap
    double lambda = 2.0; ///< PoissonPlusOne: width = 1 + Poisson(lambda)
    double s = 1.1;      ///< TruncatedZipf: width ~ rank^(-s) over {1..n}
};

void validate(const WidthDist& dist, const char* prefix = "width_dist");

/// Fraction of a task's providers bound by cross-provider invariants.
/// ScalingLinear ties the fraction to ecosystem size: q(n) = c_q * n / n_ref.
/// The realized coupled-count is clamped to the task width, but the coupling
/// charge keeps growing with n past that point (that unbounded growth is the
/// destabilizing mechanism the instability experiment probes).
struct CouplingModel {
    enum class Kind { Constant, Beta, ScalingLinear };
    Kind kind = Kind::Constant;
    double q = 0.0;      ///< Constant
    double alpha = 2.0;  ///< Beta(alpha, beta)
    double beta = 2.0;
    double c_q = 1.0;    ///< ScalingLinear coefficient
    int n_ref = 100;     ///< ScalingLinear reference ecosystem size (>= 1)
};

void validate(const CouplingModel& model, const char* prefix = "coupling_model");

/// Parametric charges b*k^gamma per task; Mechanistic runs the check library
/// and charges what verification actually cost.
enum class VerificationMode { Parametric, Mechanistic };

struct ScenarioConfig {
    Regime regime = Regime::Hourglass;
    Activation activation = Activation::Eager;
    int periods = 10;
    GrowthSchedule growth;
    int tasks_per_period = 100;
    WidthDist width_dist;
    CouplingModel coupling_model;
    VerificationMode verification_mode = VerificationMode::Parametric;
    CostParams cost_params;
    DriftParams drift;
    CheckVocabulary vocab;     ///< Mechanistic only
    HarnessParams harness;     ///< Mechanistic only
    CouplingForm coupling_form = CouplingForm::Default;
    std::uint64_t seed = 0;
};

/// Throws ValidationError naming the offending field (dotted path).
void validate(const ScenarioConfig& config);

} // namespace coordsim
