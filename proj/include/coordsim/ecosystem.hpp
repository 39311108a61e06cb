#pragma once

// Ecosystem topology: the set of providers and the integration surface
// (pairwise contracts for a mesh, one waist contract per provider for an
// hourglass). Drift breaks live contracts at random; repairs happen in place
// within the period and are charged to integration.

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "coordsim/rng.hpp"

namespace coordsim {

enum class Regime { Mesh, Hourglass };

/// How mesh edges come into being. Eager closes the full clique as providers
/// arrive; Lazy materializes an edge the first time a task touches the pair.
/// Hourglass ecosystems ignore this (the waist contract always exists).
enum class Activation { Eager, Lazy };

/// Contract-lifecycle parameters: what an edge/contract costs to create, the
/// per-period probability it breaks, and what each repair costs.
struct DriftParams {
    double break_prob = 0.0;  ///< per contract per period, in [0, 1]
    double repair_cost = 1.0; ///< charged per break, to integration
    double create_cost = 1.0; ///< per new edge/contract, to integration
};

void validate(const DriftParams& params, const char* prefix = "drift");

/// Result of one drift pass.
struct DriftOutcome {
    int breaks = 0;
    double repair_cost = 0.0;
};

class EcosystemState {
public:
    EcosystemState(Regime regime, Activation activation);

    Regime regime() const { return regime_; }
    Activation activation() const { return activation_; }

    int provider_count() const { return static_cast<int>(providers_.size()); }
    const std::vector<std::uint32_t>& providers() const { return providers_; }

    /// Live contracts: n for an hourglass, |edges| for a mesh (n(n-1)/2 once
    /// an eager mesh has closed, anything up to that for a lazy one).
    std::int64_t edge_count() const;

    /// Adds one provider and returns the integration cost of wiring it in:
    /// one waist contract (hourglass), n_prev new edges (eager mesh), or 0
    /// (lazy mesh; edges are paid for on first touch). Returns the cost in
    /// units of create_cost per contract.
    double add_provider(double create_cost);

    /// Ensures the mesh edge {a, b} exists; returns create_cost if this call
    /// materialized it, 0 if it already existed. No-op (returns 0) outside
    /// lazy meshes. Throws std::invalid_argument on unknown ids or a == b.
    double touch_pair(std::uint32_t a, std::uint32_t b, double create_cost);

    /// Breaks each live contract independently with break_probability and
    /// repairs it in place. Iterates contracts in canonical order (sorted
    /// (lo, hi) pairs; providers by id for an hourglass) so the draw sequence
    /// is reproducible.
    DriftOutcome apply_drift(const DriftParams& params, SplitMix64& rng);

    const std::set<std::pair<std::uint32_t, std::uint32_t>>& mesh_edges() const {
        return edges_;
    }

private:
    Regime regime_;
    Activation activation_;
    std::vector<std::uint32_t> providers_; // ids, ascending (assigned 1, 2, ...)
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges_; // mesh only, lo < hi
    std::uint32_t next_id_ = 1;
};

} // namespace coordsim
