#pragma once

// Pure cost laws. Everything here is a stateless function of its arguments;
// the simulation engine and experiment harnesses are the only stateful layers.
//
// Cost model, per period with edge count E and tasks t = 1..T:
//     C = a*E  +  sum_t( b*k_t^gamma + coupling(k_t, m_t) )  +  g*T
// where k_t is the task's width (providers touched) and m_t the providers
// bound by cross-provider invariants. The coupling term has two forms:
//     Default        d * q * k^2   with q = m/k   (== d*m*k)
//     StrictPairwise d * m^2
// Default is the headline form; StrictPairwise exposes the pairwise
// reconciliation count it simplifies away.

#include <cstdint>
#include <span>

namespace coordsim {

/// Cost-law coefficients. All costs are dimensionless "cost units".
struct CostParams {
    double a = 1.0;     ///< integration cost per maintained edge per period
    double b = 1.0;     ///< local-verification coefficient
    double gamma = 0.5; ///< local-verification width exponent (>1 models reuse failure)
    double d = 1.0;     ///< coupling-verification coefficient
    double g = 1.0;     ///< governance cost per task
};

/// Throws ValidationError naming the bad field; prefix is prepended to the path.
void validate(const CostParams& params, const char* prefix = "cost_params");

/// One sampled task: width k providers touched, m of them under cross-provider
/// invariants (0 <= coupled <= width).
struct TaskSample {
    std::uint64_t id = 0;
    int width = 0;
    int coupled = 0;

    /// m/k; defined as 0 for empty tasks.
    double coupling_intensity() const {
        return width > 0 ? static_cast<double>(coupled) / width : 0.0;
    }
};

enum class CouplingForm { Default, StrictPairwise };

struct CostBreakdown {
    double integration = 0.0;
    double verification_local = 0.0;
    double verification_coupling = 0.0;
    double governance = 0.0;
    double total = 0.0;
};

CostBreakdown& operator+=(CostBreakdown& lhs, const CostBreakdown& rhs);

/// a * edge_count. edge_count must be >= 0.
double integration_cost(std::int64_t edge_count, const CostParams& params);

/// b * width^gamma, with 0^gamma defined as 0 so empty tasks cost nothing.
double local_verification_cost(int width, const CostParams& params);

/// Coupling term of the task, in the requested form (see file header).
double coupling_verification_cost(const TaskSample& task, const CostParams& params,
                                  CouplingForm form = CouplingForm::Default);

/// Same, from a raw intensity q instead of a realized task. Used by the engine
/// for coupling models whose intensity is not derived from the clamped
/// coupled-count (growing-coupling scenarios exceed q = 1 by construction).
double coupling_verification_cost(double intensity, int width, const CostParams& params,
                                  CouplingForm form = CouplingForm::Default);

/// Assemble the full period breakdown over a task batch.
CostBreakdown total_cost(std::int64_t edge_count, std::span<const TaskSample> tasks,
                         const CostParams& params, CouplingForm form = CouplingForm::Default);

/// total / task_count. Throws std::domain_error("undefined ratio for empty period")
/// when task_count is 0.
double cost_per_task(const CostBreakdown& breakdown, std::int64_t task_count);

/// Marginal cost of one delegated action: compute plus expected liability.
struct LiabilityParams {
    double c_compute = 0.0; ///< compute cost of one action
    double r = 0.0;         ///< cost of an error
    double p = 0.0;         ///< probability of incorrect execution, in [0, 1]
};

/// c_compute + r*p. The r*p term is the floor that survives c_compute -> 0.
double marginal_cost_of_action(const LiabilityParams& liab);

} // namespace coordsim
