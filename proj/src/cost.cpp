#include "coordsim/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coordsim/errors.hpp"

namespace coordsim {

namespace {

std::string field(const char* prefix, const char* name) {
    return std::string(prefix) + "." + name;
}

} // namespace

void validate(const CostParams& params, const char* prefix) {
    auto nonneg = [&](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(field(prefix, name), "must be a finite value >= 0");
    };
    nonneg(params.a, "a");
    nonneg(params.b, "b");
    nonneg(params.d, "d");
    nonneg(params.g, "g");
    if (!(params.gamma >= 0.0 && params.gamma <= 2.0) || !std::isfinite(params.gamma))
        throw ValidationError(field(prefix, "gamma"), "must lie in [0, 2]");
}

CostBreakdown& operator+=(CostBreakdown& lhs, const CostBreakdown& rhs) {
    lhs.integration += rhs.integration;
    lhs.verification_local += rhs.verification_local;
    lhs.verification_coupling += rhs.verification_coupling;
    lhs.governance += rhs.governance;
    lhs.total += rhs.total;
    return lhs;
}

double integration_cost(std::int64_t edge_count, const CostParams& params) {
    if (edge_count < 0)
        throw std::invalid_argument("edge_count must be >= 0");
    return params.a * static_cast<double>(edge_count);
}

double local_verification_cost(int width, const CostParams& params) {
    if (width < 0)
        throw std::invalid_argument("width must be >= 0");
    if (width == 0)
        return 0.0; // 0^gamma := 0, even at gamma = 0
    return params.b * std::pow(static_cast<double>(width), params.gamma);
}

double coupling_verification_cost(const TaskSample& task, const CostParams& params,
                                  CouplingForm form) {
    if (task.width < 0 || task.coupled < 0 || task.coupled > task.width)
        throw std::invalid_argument("task requires 0 <= coupled <= width");
    switch (form) {
    case CouplingForm::Default:
        // d * (m/k) * k^2 == d*m*k, written in the q*k^2 shape for clarity.
        return params.d * task.coupling_intensity() * static_cast<double>(task.width) *
               static_cast<double>(task.width);
    case CouplingForm::StrictPairwise:
        return params.d * static_cast<double>(task.coupled) * static_cast<double>(task.coupled);
    }
    throw std::logic_error("unknown coupling form");
}

double coupling_verification_cost(double intensity, int width, const CostParams& params,
                                  CouplingForm form) {
    if (width < 0)
        throw std::invalid_argument("width must be >= 0");
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw std::invalid_argument("intensity must be a finite value >= 0");
    const double k = static_cast<double>(width);
    switch (form) {
    case CouplingForm::Default:
        return params.d * intensity * k * k;
    case CouplingForm::StrictPairwise: {
        const double m = intensity * k;
        return params.d * m * m;
    }
    }
    throw std::logic_error("unknown coupling form");
}

CostBreakdown total_cost(std::int64_t edge_count, std::span<const TaskSample> tasks,
                         const CostParams& params, CouplingForm form) {
    CostBreakdown out;
    out.integration = integration_cost(edge_count, params);
    for (const TaskSample& task : tasks) {
        out.verification_local += local_verification_cost(task.width, params);
        out.verification_coupling += coupling_verification_cost(task, params, form);
    }
    out.governance = params.g * static_cast<double>(tasks.size());
    out.total = out.integration + out.verification_local + out.verification_coupling +
                out.governance;
    return out;
}

double cost_per_task(const CostBreakdown& breakdown, std::int64_t task_count) {
    if (task_count == 0)
        throw std::domain_error("undefined ratio for empty period");
    if (task_count < 0)
        throw std::invalid_argument("task_count must be >= 0");
    return breakdown.total / static_cast<double>(task_count);
}

double marginal_cost_of_action(const LiabilityParams& liab) {
    if (!(liab.p >= 0.0 && liab.p <= 1.0))
        throw ValidationError("liability.p", "must lie in [0, 1]");
    if (!(liab.c_compute >= 0.0) || !(liab.r >= 0.0))
        throw ValidationError("liability", "c_compute and r must be >= 0");
    return liab.c_compute + liab.r * liab.p;
}

} // namespace coordsim
