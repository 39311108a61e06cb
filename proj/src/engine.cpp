#include "coordsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace coordsim {

namespace {

// Floyd's k-subset sampling: exactly k next_below calls, uniform over subsets.
std::vector<std::uint32_t> sample_provider_subset(const std::vector<std::uint32_t>& ids,
                                                  int k, SplitMix64& rng) {
    const std::size_t n = ids.size();
    std::set<std::size_t> chosen;
    for (std::size_t j = n - static_cast<std::size_t>(k); j < n; ++j) {
        const std::size_t t = static_cast<std::size_t>(rng.next_below(j + 1));
        if (!chosen.insert(t).second)
            chosen.insert(j);
    }
    std::vector<std::uint32_t> out;
    out.reserve(chosen.size());
    for (std::size_t idx : chosen)
        out.push_back(ids[idx]); // ids ascending, set sorted -> out ascending
    return out;
}

double coupling_draw(int n, const CouplingModel& model, SplitMix64& rng) {
    switch (model.kind) {
    case CouplingModel::Kind::Constant:
        return model.q;
    case CouplingModel::Kind::Beta:
        return draw_beta(rng, model.alpha, model.beta);
    case CouplingModel::Kind::ScalingLinear:
        return std::min(1.0, model.c_q * static_cast<double>(n) / model.n_ref);
    }
    throw std::logic_error("unknown coupling model");
}

// Intensity the coupling term is charged at. Constant/Beta charge the realized
// fraction coupled/width (so parametric task totals are exactly reproducible
// from the logged TaskSample); ScalingLinear charges c_q*n/n_ref without the
// cap that bounds the coupled count, because the model's point is a coupling
// burden that keeps growing with ecosystem size.
double coupling_charge(const TaskSample& task, int n, const CouplingModel& model) {
    if (model.kind == CouplingModel::Kind::ScalingLinear)
        return model.c_q * static_cast<double>(n) / model.n_ref;
    return task.coupling_intensity();
}

} // namespace

TaskSample sample_task(int n, const ScenarioConfig& config, SplitMix64& rng,
                       const ZipfTable* width_table) {
    if (n < 1)
        throw std::invalid_argument("sample_task: n must be >= 1");
    TaskSample task;
    switch (config.width_dist.kind) {
    case WidthDist::Kind::Constant:
        task.width = std::min(config.width_dist.k, n);
        break;
    case WidthDist::Kind::PoissonPlusOne:
        task.width = std::min(1 + draw_poisson(rng, config.width_dist.lambda), n);
        break;
    case WidthDist::Kind::TruncatedZipf:
        if (width_table != nullptr && width_table->size() == n) {
            task.width = width_table->draw(rng);
        } else {
            const ZipfTable table(n, config.width_dist.s);
            task.width = table.draw(rng);
        }
        break;
    }
    const double q = coupling_draw(n, config.coupling_model, rng);
    const long coupled = std::lround(q * task.width);
    task.coupled = static_cast<int>(std::clamp(coupled, 0L, static_cast<long>(task.width)));
    return task;
}

Engine::Engine(const ScenarioConfig& config, bool detail)
    : config_(config), detail_(detail), eco_(config.regime, config.activation) {
    validate(config_);
    if (config_.verification_mode == VerificationMode::Mechanistic) {
        library_.emplace(config_.vocab, config_.harness);
        check_table_.emplace(config_.vocab.size, config_.vocab.popularity_exponent);
    }
}

PeriodRecord Engine::step_period() {
    if (period_ >= config_.periods)
        throw std::logic_error("step_period: all periods already executed");
    PeriodRecord rec;
    rec.period = period_;
    const std::uint64_t period_base = substream_seed(config_.seed, static_cast<std::uint64_t>(period_));
    SplitMix64 drift_rng(substream_seed(period_base, 0));
    SplitMix64 task_rng(substream_seed(period_base, 1));
    SplitMix64 check_rng(substream_seed(period_base, 2));

    double growth_cost = 0.0;
    for (int i = 0; i < config_.growth.at(period_); ++i) {
        const double delta = eco_.add_provider(config_.drift.create_cost);
        rec.growth_events.push_back({eco_.providers().back(), delta});
        growth_cost += delta;
    }

    const DriftOutcome drift = eco_.apply_drift(config_.drift, drift_rng);
    rec.broken_count = drift.breaks;
    rec.repair_cost = drift.repair_cost;

    const int n = eco_.provider_count();
    const int task_count = n >= 1 ? config_.tasks_per_period : 0;
    const ZipfTable* width_table = nullptr;
    if (config_.width_dist.kind == WidthDist::Kind::TruncatedZipf && task_count > 0) {
        if (!width_table_ || width_table_n_ != n) {
            width_table_.emplace(n, config_.width_dist.s);
            width_table_n_ = n;
        }
        width_table = &*width_table_;
    }

    const bool lazy_mesh =
        config_.regime == Regime::Mesh && config_.activation == Activation::Lazy;
    const CostParams& cp = config_.cost_params;
    double v_local_total = 0.0, v_coupling_total = 0.0, touch_total = 0.0;
    for (int t = 0; t < task_count; ++t) {
        TaskSample task = sample_task(n, config_, task_rng, width_table);
        task.id = next_task_id_++;
        const std::vector<std::uint32_t> providers =
            sample_provider_subset(eco_.providers(), task.width, task_rng);

        double touch_delta = 0.0;
        if (lazy_mesh) {
            for (std::size_t i = 0; i < providers.size(); ++i)
                for (std::size_t j = i + 1; j < providers.size(); ++j)
                    touch_delta +=
                        eco_.touch_pair(providers[i], providers[j], config_.drift.create_cost);
        }

        double v_local = 0.0;
        std::vector<int> checks;
        if (config_.verification_mode == VerificationMode::Mechanistic) {
            checks = required_checks(task.width, *check_table_, check_rng);
            v_local = library_->verify_task(checks).cost;
        } else {
            v_local = local_verification_cost(task.width, cp);
        }
        const double q_charge = coupling_charge(task, n, config_.coupling_model);
        const double v_coupling =
            coupling_verification_cost(q_charge, task.width, cp, config_.coupling_form);

        v_local_total += v_local;
        v_coupling_total += v_coupling;
        touch_total += touch_delta;
        if (detail_) {
            TaskRecord tr;
            tr.period = period_;
            tr.task = task;
            tr.coupling_charge = q_charge;
            tr.providers = providers;
            tr.checks = std::move(checks);
            tr.verification_local = v_local;
            tr.verification_coupling = v_coupling;
            tr.touch_delta = touch_delta;
            task_records_.push_back(std::move(tr));
        }
    }

    rec.tasks = task_count;
    rec.touch_creation = touch_total;
    rec.providers_end = eco_.provider_count();
    rec.edges_end = eco_.edge_count();
    rec.costs.integration =
        integration_cost(rec.edges_end, cp) + growth_cost + drift.repair_cost + touch_total;
    rec.costs.verification_local = v_local_total;
    rec.costs.verification_coupling = v_coupling_total;
    rec.costs.governance = cp.g * static_cast<double>(task_count);
    rec.costs.total = rec.costs.integration + rec.costs.verification_local +
                      rec.costs.verification_coupling + rec.costs.governance;
    rec.cost_per_task = task_count > 0 ? rec.costs.total / task_count
                                       : std::numeric_limits<double>::quiet_NaN();
    totals_ += rec.costs;
    records_.push_back(rec);
    ++period_;
    return rec;
}

RunTrace Engine::finish() {
    if (period_ < config_.periods)
        throw std::logic_error("finish: periods remain to be stepped");
    RunTrace trace;
    trace.config = config_;
    trace.detail = detail_;
    trace.periods = std::move(records_);
    trace.tasks = std::move(task_records_);
    trace.totals = totals_;
    trace.final_providers = eco_.provider_count();
    trace.final_edges = eco_.edge_count();
    return trace;
}

RunTrace run(const ScenarioConfig& config, bool detail) {
    Engine engine(config, detail);
    for (int p = 0; p < config.periods; ++p)
        engine.step_period();
    return engine.finish();
}

CostBreakdown oracle_total_cost(const RunTrace& trace) {
    if (!trace.detail)
        throw std::invalid_argument(
            "oracle_total_cost: trace was recorded without per-task detail logging");
    const ScenarioConfig& cfg = trace.config;
    const CostParams& cp = cfg.cost_params;
    const bool hourglass = cfg.regime == Regime::Hourglass;
    const bool lazy_mesh = !hourglass && cfg.activation == Activation::Lazy;
    const bool eager_mesh = !hourglass && cfg.activation == Activation::Eager;
    const bool mechanistic = cfg.verification_mode == VerificationMode::Mechanistic;

    CostBreakdown out;
    int n = 0;
    std::set<std::pair<std::uint32_t, std::uint32_t>> lazy_edges;
    std::optional<HarnessLibrary> library;
    if (mechanistic)
        library.emplace(cfg.vocab, cfg.harness);

    std::size_t task_idx = 0;
    for (const PeriodRecord& rec : trace.periods) {
        for (std::size_t e = 0; e < rec.growth_events.size(); ++e) {
            if (hourglass)
                out.integration += cfg.drift.create_cost;
            else if (eager_mesh)
                out.integration += cfg.drift.create_cost * static_cast<double>(n);
            ++n; // lazy mesh: creation deferred to touches
        }
        out.integration += static_cast<double>(rec.broken_count) * cfg.drift.repair_cost;

        std::int64_t period_tasks = 0;
        for (; task_idx < trace.tasks.size() && trace.tasks[task_idx].period == rec.period;
             ++task_idx) {
            const TaskRecord& tr = trace.tasks[task_idx];
            ++period_tasks;
            if (lazy_mesh) {
                for (std::size_t i = 0; i < tr.providers.size(); ++i)
                    for (std::size_t j = i + 1; j < tr.providers.size(); ++j) {
                        const auto lo = std::min(tr.providers[i], tr.providers[j]);
                        const auto hi = std::max(tr.providers[i], tr.providers[j]);
                        if (lazy_edges.emplace(lo, hi).second)
                            out.integration += cfg.drift.create_cost;
                    }
            }
            if (mechanistic)
                out.verification_local += library->verify_task(tr.checks).cost;
            else
                out.verification_local += local_verification_cost(tr.task.width, cp);
            const double q = cfg.coupling_model.kind == CouplingModel::Kind::ScalingLinear
                                 ? cfg.coupling_model.c_q * static_cast<double>(n) /
                                       cfg.coupling_model.n_ref
                                 : tr.task.coupling_intensity();
            out.verification_coupling +=
                coupling_verification_cost(q, tr.task.width, cp, cfg.coupling_form);
        }
        out.governance += cp.g * static_cast<double>(period_tasks);

        const std::int64_t edges = hourglass ? n
                                   : eager_mesh
                                       ? static_cast<std::int64_t>(n) * (n - 1) / 2
                                       : static_cast<std::int64_t>(lazy_edges.size());
        out.integration += cp.a * static_cast<double>(edges);
    }
    out.total =
        out.integration + out.verification_local + out.verification_coupling + out.governance;
    return out;
}

} // namespace coordsim
