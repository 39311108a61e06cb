#include "coordsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "coordsim/engine.hpp"
#include "coordsim/errors.hpp"

namespace coordsim {

int warmup_periods(int periods) {
    int w = (periods + 9) / 10;
    if (w >= periods)
        w = periods - 1; // always keep at least one measured period
    return w;
}

namespace {

// Runs fn(0..count-1) across hardware threads. Cells write disjoint slots, so
// results are independent of scheduling; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

ScenarioConfig steady_config(ScenarioConfig base, Regime regime, int n, std::uint64_t seed) {
    base.regime = regime;
    base.growth.sequence = {n};
    base.seed = seed;
    return base;
}

const char* regime_arm(Regime regime, Activation activation) {
    if (regime == Regime::Hourglass)
        return "hourglass";
    return activation == Activation::Eager ? "mesh_eager" : "mesh_lazy";
}

double mean_of(std::span<const double> values) {
    double acc = 0.0;
    for (double v : values)
        acc += v;
    return acc / static_cast<double>(values.size());
}

std::vector<double> grid_as_doubles(std::span<const int> n_grid) {
    std::vector<double> x(n_grid.begin(), n_grid.end());
    return x;
}

void check_grid_and_seeds(std::span<const int> n_grid, std::span<const std::uint64_t> seeds,
                          int min_n) {
    if (n_grid.empty())
        throw std::invalid_argument("experiment: n_grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < min_n)
            throw std::invalid_argument("experiment: n_grid values must be >= " +
                                        std::to_string(min_n));
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw std::invalid_argument("experiment: n_grid must be strictly increasing");
    }
    if (seeds.empty())
        throw std::invalid_argument("experiment: seeds list is empty");
}

// Marginal integration delta of the provider added in period 1 (after the
// ecosystem was built to n in period 0).
ScenarioConfig add_one_config(ScenarioConfig base, Regime regime, Activation activation, int n,
                              std::uint64_t seed, int tasks_per_period) {
    base.regime = regime;
    base.activation = activation;
    base.periods = 2;
    base.growth.sequence = {n, 1};
    base.tasks_per_period = tasks_per_period;
    base.seed = seed;
    return base;
}

// Lazy-mesh marginal delta: creation cost of edges incident to the new
// provider during its first period of service, replayed from the trace.
double lazy_marginal_delta(const RunTrace& trace) {
    const std::uint32_t new_id = trace.periods.at(1).growth_events.at(0).provider_id;
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    double delta = 0.0;
    for (const TaskRecord& tr : trace.tasks) {
        for (std::size_t i = 0; i < tr.providers.size(); ++i)
            for (std::size_t j = i + 1; j < tr.providers.size(); ++j) {
                const auto lo = std::min(tr.providers[i], tr.providers[j]);
                const auto hi = std::max(tr.providers[i], tr.providers[j]);
                if (edges.emplace(lo, hi).second && tr.period == 1 &&
                    (lo == new_id || hi == new_id))
                    delta += trace.config.drift.create_cost;
            }
    }
    return delta;
}

} // namespace

Prediction1Result prediction1_experiment(const ScenarioConfig& base, std::span<const int> n_grid,
                                         std::span<const std::uint64_t> seeds, bool include_lazy,
                                         const ScalingThresholds& thresholds) {
    validate(base);
    check_grid_and_seeds(n_grid, seeds, 2);

    const int arms = include_lazy ? 3 : 2;
    const std::size_t cells = static_cast<std::size_t>(arms) * n_grid.size() * seeds.size();
    std::vector<double> deltas(cells);
    parallel_for(cells, [&](std::size_t cell) {
        const std::size_t per_arm = n_grid.size() * seeds.size();
        const int arm = static_cast<int>(cell / per_arm);
        const std::size_t rest = cell % per_arm;
        const int n = n_grid[rest / seeds.size()];
        const std::uint64_t seed = seeds[rest % seeds.size()];
        if (arm == 0) {
            const RunTrace t =
                run(add_one_config(base, Regime::Hourglass, base.activation, n, seed, 0));
            deltas[cell] = t.periods[1].growth_events[0].delta_cost;
        } else if (arm == 1) {
            const RunTrace t =
                run(add_one_config(base, Regime::Mesh, Activation::Eager, n, seed, 0));
            deltas[cell] = t.periods[1].growth_events[0].delta_cost;
        } else {
            const int tasks = std::max(1, base.tasks_per_period);
            const RunTrace t = run(
                add_one_config(base, Regime::Mesh, Activation::Lazy, n, seed, tasks), true);
            deltas[cell] = lazy_marginal_delta(t);
        }
    });

    Prediction1Result out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    out.thresholds = thresholds;
    const char* arm_names[] = {"hourglass", "mesh_eager", "mesh_lazy"};
    std::vector<std::vector<double>> means(static_cast<std::size_t>(arms));
    for (int arm = 0; arm < arms; ++arm) {
        for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
            std::vector<double> vals;
            vals.reserve(seeds.size());
            for (std::size_t si = 0; si < seeds.size(); ++si) {
                const std::size_t cell =
                    (static_cast<std::size_t>(arm) * n_grid.size() + gi) * seeds.size() + si;
                vals.push_back(deltas[cell]);
                out.points.push_back({arm_names[arm], n_grid[gi], seeds[si], deltas[cell]});
            }
            means[static_cast<std::size_t>(arm)].push_back(mean_of(vals));
        }
    }
    const std::vector<double> x = grid_as_doubles(n_grid);
    out.hourglass_mean = means[0];
    out.mesh_mean = means[1];
    out.hourglass_fit = classify_scaling(x, means[0], thresholds);
    out.mesh_fit = classify_scaling(x, means[1], thresholds);
    if (include_lazy) {
        out.lazy_mean = means[2];
        out.lazy_fit = classify_scaling(x, means[2], thresholds);
    }
    return out;
}

Prediction2Result prediction2_experiment(const ScenarioConfig& base, std::span<const int> n_grid,
                                         std::span<const std::uint64_t> seeds,
                                         const ScalingThresholds& thresholds) {
    validate(base);
    check_grid_and_seeds(n_grid, seeds, 1);

    const std::size_t cells = n_grid.size() * seeds.size();
    std::vector<double> values(cells);
    parallel_for(cells, [&](std::size_t cell) {
        const int n = n_grid[cell / seeds.size()];
        const std::uint64_t seed = seeds[cell % seeds.size()];
        const RunTrace t = run(steady_config(base, base.regime, n, seed));
        const int warm = warmup_periods(t.config.periods);
        double acc = 0.0;
        int kept = 0;
        for (const PeriodRecord& rec : t.periods)
            if (rec.period >= warm) {
                acc += cost_per_task(rec.costs, rec.tasks);
                ++kept;
            }
        values[cell] = acc / kept;
    });

    Prediction2Result out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    out.thresholds = thresholds;
    const char* arm = regime_arm(base.regime, base.activation);
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        std::vector<double> vals;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            vals.push_back(values[gi * seeds.size() + si]);
            out.points.push_back({arm, n_grid[gi], seeds[si], vals.back()});
        }
        out.mean_cost_per_task.push_back(mean_of(vals));
    }
    out.fit = classify_scaling(grid_as_doubles(n_grid), out.mean_cost_per_task, thresholds);
    out.stable = out.fit.cls == ScalingClass::Constant ||
                 (std::isfinite(out.fit.loglog_slope) &&
                  out.fit.loglog_slope < thresholds.stable_slope);
    out.collapse = std::isfinite(out.fit.loglog_slope) &&
                   out.fit.loglog_slope >= thresholds.collapse_slope;
    return out;
}

InstabilityResult instability_probe(const ScenarioConfig& base, std::span<const int> n_grid,
                                    std::span<const std::uint64_t> seeds) {
    if (base.coupling_model.kind != CouplingModel::Kind::ScalingLinear)
        throw ValidationError("coupling_model.kind",
                              "instability probe requires the scaling_linear coupling model");
    validate(base);
    check_grid_and_seeds(n_grid, seeds, 1);

    const std::size_t cells = n_grid.size() * seeds.size();
    std::vector<double> shares(cells);
    parallel_for(cells, [&](std::size_t cell) {
        const int n = n_grid[cell / seeds.size()];
        const std::uint64_t seed = seeds[cell % seeds.size()];
        const RunTrace t = run(steady_config(base, base.regime, n, seed));
        const int warm = warmup_periods(t.config.periods);
        double local = 0.0, coupling = 0.0;
        for (const PeriodRecord& rec : t.periods)
            if (rec.period >= warm) {
                local += rec.costs.verification_local;
                coupling += rec.costs.verification_coupling;
            }
        const double denom = local + coupling;
        shares[cell] = denom > 0.0 ? coupling / denom : 0.0;
    });

    InstabilityResult out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        std::vector<double> vals;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            vals.push_back(shares[gi * seeds.size() + si]);
            out.points.push_back({"probe", n_grid[gi], seeds[si], vals.back()});
        }
        out.coupling_share.push_back(mean_of(vals));
    }
    bool nondecreasing = true;
    for (std::size_t gi = 0; gi + 1 < n_grid.size(); ++gi)
        if (out.coupling_share[gi + 1] < out.coupling_share[gi] - 1e-9)
            nondecreasing = false;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi)
        if (out.coupling_share[gi] > 0.5) {
            out.crossover_n = out.n_grid[gi];
            break;
        }
    out.collapse_flag = out.crossover_n >= 0 && nondecreasing;
    return out;
}

SublinearityResult sublinearity_check(const ScenarioConfig& base, std::span<const int> n_grid,
                                      std::span<const std::uint64_t> seeds,
                                      const ScalingThresholds& thresholds) {
    if (base.width_dist.kind == WidthDist::Kind::TruncatedZipf)
        throw ValidationError("width_dist.kind",
                              "sublinearity check requires a task distribution independent of n "
                              "(constant or poisson_plus_one)");
    validate(base);
    check_grid_and_seeds(n_grid, seeds, 1);

    const std::size_t per_arm = n_grid.size() * seeds.size();
    std::vector<double> values(2 * per_arm);
    parallel_for(2 * per_arm, [&](std::size_t cell) {
        const Regime regime = cell < per_arm ? Regime::Hourglass : Regime::Mesh;
        const std::size_t rest = cell % per_arm;
        const int n = n_grid[rest / seeds.size()];
        const std::uint64_t seed = seeds[rest % seeds.size()];
        ScenarioConfig cfg = steady_config(base, regime, n, seed);
        if (regime == Regime::Mesh)
            cfg.activation = Activation::Eager;
        const RunTrace t = run(cfg);
        const int warm = warmup_periods(t.config.periods);
        double acc = 0.0;
        int kept = 0;
        for (const PeriodRecord& rec : t.periods)
            if (rec.period >= warm) {
                acc += rec.costs.total;
                ++kept;
            }
        values[cell] = acc / kept;
    });

    SublinearityResult out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    out.thresholds = thresholds;
    const std::vector<double> x = grid_as_doubles(n_grid);
    const char* arm_names[] = {"hourglass", "mesh_eager"};
    for (int arm = 0; arm < 2; ++arm) {
        SublinearityArm& a = arm == 0 ? out.hourglass : out.mesh;
        for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
            std::vector<double> vals;
            for (std::size_t si = 0; si < seeds.size(); ++si) {
                const std::size_t cell =
                    static_cast<std::size_t>(arm) * per_arm + gi * seeds.size() + si;
                vals.push_back(values[cell]);
                out.points.push_back({arm_names[arm], n_grid[gi], seeds[si], vals.back()});
            }
            a.mean_period_cost.push_back(mean_of(vals));
        }
        a.fit = classify_scaling(x, a.mean_period_cost, thresholds);
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            std::vector<double> y;
            for (std::size_t gi = 0; gi < n_grid.size(); ++gi)
                y.push_back(values[static_cast<std::size_t>(arm) * per_arm + gi * seeds.size() + si]);
            a.seed_exponents.push_back(fit_loglog(x, y).slope);
        }
        a.exponent_ci = bootstrap_mean_ci(a.seed_exponents,
                                          substream_seed(base.seed, 100 + static_cast<std::uint64_t>(arm)));
        a.sublinear = a.exponent_ci.mean < 1.0 && a.exponent_ci.hi < 1.0;
    }
    return out;
}

} // namespace coordsim
