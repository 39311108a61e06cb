#include "coordsim/scenario.hpp"

#include <cmath>
#include <string>

#include "coordsim/errors.hpp"

namespace coordsim {

void validate(const GrowthSchedule& growth, const char* prefix) {
    const std::string p(prefix);
    if (growth.sequence.empty()) {
        if (growth.constant < 0)
            throw ValidationError(p + ".constant", "must be an integer >= 0");
        return;
    }
    for (std::size_t i = 0; i < growth.sequence.size(); ++i)
        if (growth.sequence[i] < 0)
            throw ValidationError(p + ".sequence[" + std::to_string(i) + "]",
                                  "must be an integer >= 0");
}

void validate(const WidthDist& dist, const char* prefix) {
    const std::string p(prefix);
    switch (dist.kind) {
    case WidthDist::Kind::Constant:
        if (dist.k < 1)
            throw ValidationError(p + ".k", "must be an integer >= 1");
        return;
    case WidthDist::Kind::PoissonPlusOne:
        if (!(dist.lambda > 0.0) || !std::isfinite(dist.lambda))
            throw ValidationError(p + ".lambda", "must be a finite value > 0");
        return;
    case WidthDist::Kind::TruncatedZipf:
        if (!(dist.s > 0.0) || !std::isfinite(dist.s))
            throw ValidationError(p + ".s", "must be a finite value > 0");
        return;
    }
    throw ValidationError(p + ".kind", "unknown width distribution");
}

void validate(const CouplingModel& model, const char* prefix) {
    const std::string p(prefix);
    switch (model.kind) {
    case CouplingModel::Kind::Constant:
        if (!(model.q >= 0.0 && model.q <= 1.0))
            throw ValidationError(p + ".q", "must lie in [0, 1]");
        return;
    case CouplingModel::Kind::Beta:
        if (!(model.alpha > 0.0) || !std::isfinite(model.alpha))
            throw ValidationError(p + ".alpha", "must be a finite value > 0");
        if (!(model.beta > 0.0) || !std::isfinite(model.beta))
            throw ValidationError(p + ".beta", "must be a finite value > 0");
        return;
    case CouplingModel::Kind::ScalingLinear:
        if (!(model.c_q > 0.0) || !std::isfinite(model.c_q))
            throw ValidationError(p + ".c_q", "must be a finite value > 0");
        if (model.n_ref < 1)
            throw ValidationError(p + ".n_ref", "must be an integer >= 1");
        return;
    }
    throw ValidationError(p + ".kind", "unknown coupling model");
}

void validate(const ScenarioConfig& config) {
    if (config.periods < 1)
        throw ValidationError("periods", "must be an integer >= 1");
    if (config.tasks_per_period < 0)
        throw ValidationError("tasks_per_period", "must be an integer >= 0");
    validate(config.growth);
    validate(config.width_dist);
    validate(config.coupling_model);
    validate(config.cost_params, "cost_params");
    validate(config.drift, "drift");
    if (config.verification_mode == VerificationMode::Mechanistic) {
        validate(config.vocab, "vocab");
        validate(config.harness, "harness");
    }
}

} // namespace coordsim
