#include "coordsim/ecosystem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coordsim/errors.hpp"

namespace coordsim {

void validate(const DriftParams& params, const char* prefix) {
    const std::string p(prefix);
    if (!(params.break_prob >= 0.0 && params.break_prob <= 1.0))
        throw ValidationError(p + ".break_prob", "must lie in [0, 1]");
    if (!(params.repair_cost >= 0.0) || !std::isfinite(params.repair_cost))
        throw ValidationError(p + ".repair_cost", "must be a finite value >= 0");
    if (!(params.create_cost >= 0.0) || !std::isfinite(params.create_cost))
        throw ValidationError(p + ".create_cost", "must be a finite value >= 0");
}

EcosystemState::EcosystemState(Regime regime, Activation activation)
    : regime_(regime), activation_(activation) {}

std::int64_t EcosystemState::edge_count() const {
    if (regime_ == Regime::Hourglass)
        return static_cast<std::int64_t>(providers_.size());
    if (activation_ == Activation::Lazy)
        return static_cast<std::int64_t>(edges_.size());
    const std::int64_t n = static_cast<std::int64_t>(providers_.size());
    return n * (n - 1) / 2;
}

double EcosystemState::add_provider(double create_cost) {
    const std::uint32_t id = next_id_++;
    const std::int64_t n_prev = static_cast<std::int64_t>(providers_.size());
    providers_.push_back(id);
    if (regime_ == Regime::Hourglass)
        return create_cost; // one new waist contract
    if (activation_ == Activation::Lazy)
        return 0.0; // edges appear on first touch
    for (std::uint32_t other : providers_)
        if (other != id)
            edges_.emplace(std::min(other, id), std::max(other, id));
    return create_cost * static_cast<double>(n_prev);
}

double EcosystemState::touch_pair(std::uint32_t a, std::uint32_t b, double create_cost) {
    if (a == b)
        throw std::invalid_argument("touch_pair requires two distinct providers");
    auto known = [&](std::uint32_t id) {
        return std::binary_search(providers_.begin(), providers_.end(), id);
    };
    if (!known(a) || !known(b))
        throw std::invalid_argument("touch_pair: unknown provider id");
    if (regime_ != Regime::Mesh || activation_ != Activation::Lazy)
        return 0.0;
    auto [it, inserted] = edges_.emplace(std::min(a, b), std::max(a, b));
    (void)it;
    return inserted ? create_cost : 0.0;
}

DriftOutcome EcosystemState::apply_drift(const DriftParams& params, SplitMix64& rng) {
    validate(params);
    DriftOutcome out;
    if (params.break_prob == 0.0)
        return out;
    auto roll = [&] {
        if (rng.next_double() < params.break_prob) {
            ++out.breaks;
            out.repair_cost += params.repair_cost;
        }
    };
    if (regime_ == Regime::Hourglass) {
        for (std::size_t i = 0; i < providers_.size(); ++i)
            roll(); // one waist contract per provider, in id order
        return out;
    }
    if (activation_ == Activation::Lazy) {
        for (const auto& edge : edges_) {
            (void)edge;
            roll();
        }
        return out;
    }
    // Eager mesh: full clique, iterate sorted (lo, hi) pairs.
    for (std::size_t i = 0; i < providers_.size(); ++i)
        for (std::size_t j = i + 1; j < providers_.size(); ++j)
            roll();
    return out;
}

} // namespace coordsim
