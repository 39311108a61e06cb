#include "coordsim/unbundling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "coordsim/engine.hpp"
#include "coordsim/errors.hpp"
#include "coordsim/experiments.hpp"

namespace coordsim {

void validate(const VelocityAssignment& velocity, const char* prefix) {
    const std::string p(prefix);
    auto nonneg = [&](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError(p + "." + name, "must be a finite value >= 0");
    };
    switch (velocity.kind) {
    case VelocityAssignment::Kind::Constant:
        nonneg(velocity.value, "value");
        return;
    case VelocityAssignment::Kind::TwoPoint:
        nonneg(velocity.low, "low");
        nonneg(velocity.high, "high");
        if (!(velocity.high_fraction >= 0.0 && velocity.high_fraction <= 1.0))
            throw ValidationError(p + ".high_fraction", "must lie in [0, 1]");
        return;
    }
    throw ValidationError(p + ".kind", "unknown velocity assignment");
}

void validate(const SectorConfig& sector, const char* prefix) {
    const std::string p(prefix);
    if (sector.initial_firms < 0)
        throw ValidationError(p + ".initial_firms", "must be an integer >= 0");
    if (!(sector.alpha0 > 1.0) || !std::isfinite(sector.alpha0))
        throw ValidationError(p + ".alpha0", "must be a finite value > 1");
    validate(sector.velocity, (p + ".velocity").c_str());
    if (!(sector.kappa > 0.0) || !std::isfinite(sector.kappa))
        throw ValidationError(p + ".kappa", "must be a finite value > 0");
    if (!(sector.phi > 1.0) || !std::isfinite(sector.phi))
        throw ValidationError(p + ".phi", "must be a finite value > 1");
    if (!(sector.c_del >= 0.0) || !std::isfinite(sector.c_del))
        throw ValidationError(p + ".c_del", "must be a finite value >= 0");
    if (sector.entry_rate < 0)
        throw ValidationError(p + ".entry_rate", "must be an integer >= 0");
    if (sector.periods < 1)
        throw ValidationError(p + ".periods", "must be an integer >= 1");
}

double internal_cost(std::int64_t size, double velocity, const SectorConfig& sector) {
    if (size < 0)
        throw std::invalid_argument("internal_cost: size must be >= 0");
    if (size == 0)
        return 0.0;
    return sector.kappa * velocity * std::pow(static_cast<double>(size), sector.phi);
}

double marginal_internal_cost(std::int64_t size, double velocity, const SectorConfig& sector) {
    if (size < 1)
        throw std::invalid_argument("marginal_internal_cost: size must be >= 1");
    return internal_cost(size, velocity, sector) - internal_cost(size - 1, velocity, sector);
}

Firm firm_step(const Firm& firm, const SectorConfig& sector) {
    Firm out = firm;
    if (firm.size <= 0)
        return out; // already exited; caller removes
    if (marginal_internal_cost(firm.size, firm.velocity, sector) > sector.c_del) {
        --out.size;
        return out;
    }
    if (marginal_internal_cost(firm.size + 1, firm.velocity, sector) < sector.c_del) {
        ++out.size;
        return out;
    }
    return out;
}

namespace {

double draw_velocity(const VelocityAssignment& velocity, SplitMix64& rng) {
    if (velocity.kind == VelocityAssignment::Kind::Constant)
        return velocity.value;
    return rng.next_double() < velocity.high_fraction ? velocity.high : velocity.low;
}

std::vector<std::int64_t> sizes_of(const std::vector<Firm>& firms) {
    std::vector<std::int64_t> sizes;
    sizes.reserve(firms.size());
    for (const Firm& f : firms)
        sizes.push_back(f.size);
    return sizes;
}

std::vector<double> as_doubles(const std::vector<std::int64_t>& sizes) {
    return {sizes.begin(), sizes.end()};
}

void check_sectors_comparable(const SectorConfig& a, const SectorConfig& b) {
    const bool same = a.initial_firms == b.initial_firms && a.alpha0 == b.alpha0 &&
                      a.kappa == b.kappa && a.phi == b.phi && a.c_del == b.c_del &&
                      a.entry_rate == b.entry_rate && a.periods == b.periods;
    if (!same)
        throw std::invalid_argument("sectors must differ only in velocity");
}

} // namespace

SectorRun sector_run(const SectorConfig& sector, SplitMix64& rng) {
    validate(sector);
    std::vector<Firm> firms;
    firms.reserve(static_cast<std::size_t>(sector.initial_firms));
    std::uint64_t next_id = 1;
    for (int i = 0; i < sector.initial_firms; ++i) {
        Firm f;
        f.id = next_id++;
        f.size = static_cast<std::int64_t>(std::floor(sample_power_law(rng, sector.alpha0, 1.0)));
        f.velocity = draw_velocity(sector.velocity, rng);
        firms.push_back(f);
    }

    SectorRun out;
    out.snapshots.reserve(static_cast<std::size_t>(sector.periods) + 1);
    out.snapshots.push_back(sizes_of(firms));
    for (int p = 0; p < sector.periods; ++p) {
        for (Firm& f : firms)
            f = firm_step(f, sector);
        for (int e = 0; e < sector.entry_rate; ++e) {
            Firm f;
            f.id = next_id++;
            f.size = 1;
            f.velocity = draw_velocity(sector.velocity, rng);
            firms.push_back(f);
        }
        std::erase_if(firms, [](const Firm& f) { return f.size <= 0; });
        out.snapshots.push_back(sizes_of(firms));
    }
    return out;
}

double delegation_price_from_reference(const ScenarioConfig& reference, double units_per_task) {
    if (!(units_per_task > 0.0) || !std::isfinite(units_per_task))
        throw std::invalid_argument("delegation_price_from_reference: units_per_task must be > 0");
    const RunTrace trace = run(reference);
    const int warm = warmup_periods(trace.config.periods);
    double acc = 0.0;
    int kept = 0;
    for (const PeriodRecord& rec : trace.periods)
        if (rec.period >= warm) {
            acc += cost_per_task(rec.costs, rec.tasks);
            ++kept;
        }
    return acc / kept * units_per_task;
}

UnbundlingResult unbundling_experiment(const SectorConfig& low_velocity,
                                       const SectorConfig& high_velocity,
                                       std::span<const std::uint64_t> seeds, double x_min_fit) {
    validate(low_velocity, "low_velocity");
    validate(high_velocity, "high_velocity");
    check_sectors_comparable(low_velocity, high_velocity);
    if (seeds.empty())
        throw std::invalid_argument("unbundling_experiment: seeds list is empty");
    if (!(x_min_fit > 0.0))
        throw std::invalid_argument("unbundling_experiment: x_min_fit must be > 0");

    UnbundlingResult out;
    out.x_min_fit = x_min_fit;
    const SectorConfig* sectors[2] = {&low_velocity, &high_velocity};
    SectorOutcome* outcomes[2] = {&out.low, &out.high};
    const char* names[2] = {"low", "high"};
    for (std::uint64_t seed : seeds) {
        for (int s = 0; s < 2; ++s) {
            SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(s)));
            const SectorRun run = sector_run(*sectors[s], rng);
            const double a0 =
                fit_power_law(as_doubles(run.snapshots.front()), x_min_fit).alpha_hat;
            const double a1 =
                fit_power_law(as_doubles(run.snapshots.back()), x_min_fit).alpha_hat;
            SectorOutcome& so = *outcomes[s];
            so.alpha_initial.push_back(a0);
            so.alpha_final.push_back(a1);
            so.delta.push_back(a1 - a0);
            for (std::int64_t size : run.snapshots.back())
                ++so.final_histogram[size];
            out.points.push_back({names[s], seed, a0, a1, a1 - a0});
        }
    }
    for (int s = 0; s < 2; ++s)
        outcomes[s]->delta_ci = bootstrap_mean_ci(
            outcomes[s]->delta, substream_seed(seeds[0], 200 + static_cast<std::uint64_t>(s)));
    out.bifurcation =
        out.high.delta_ci.lo > 0.0 && out.low.delta_ci.mean <= out.high.delta_ci.mean;
    return out;
}

} // namespace coordsim
