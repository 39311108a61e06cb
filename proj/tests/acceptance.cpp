// Acceptance gate: end-to-end checks of the tool's headline behaviors, each
// printed as one PASS/FAIL line with its runtime. Exits nonzero when any
// check fails. Tolerances and runtime budgets are pinned here as constants.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "coordsim/cost.hpp"
#include "coordsim/engine.hpp"
#include "coordsim/experiments.hpp"
#include "coordsim/harness.hpp"
#include "coordsim/io.hpp"
#include "coordsim/powerlaw.hpp"
#include "coordsim/rng.hpp"
#include "coordsim/stats.hpp"
#include "coordsim/unbundling.hpp"

using namespace coordsim;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kSlopeTol = 0.01;          // mesh marginal-cost log-log slope vs 1.0
constexpr double kCovLimit = 0.1;           // C/T coefficient of variation, stable arm
constexpr double kClosedFormRelTol = 0.02;  // C/T vs closed form, collapse arm
constexpr double kCollapseSlopeMin = 0.8;   // C/T log-log slope over the top of the grid
constexpr int kExpectedCrossover = 13;      // first unit-grid n with coupling share > 1/2
constexpr int kMinSublinearSeeds = 28;      // of 30, measured reuse exponent < 1
constexpr double kNoReuseGammaTol = 0.05;   // no-reuse exponent vs 1.0
constexpr double kMeshExponentMin = 1.5;    // mesh total-cost exponent floor
constexpr double kExactTol = 1e-12;         // liability identity
constexpr double kOracleRelTol = 1e-9;      // engine totals vs recomputation
constexpr double kAlphaBandLo = 2.45, kAlphaBandHi = 2.55;
constexpr double kClosedFormAlphaTol = 1e-9;

// Runtime budgets, seconds.
constexpr double kBudgetMarginal = 10.0;
constexpr double kBudgetStability = 60.0;
constexpr double kBudgetReuse = 30.0;
constexpr double kBudgetSublinearity = 30.0;
constexpr double kBudgetBifurcation = 120.0;

std::vector<std::uint64_t> seeds_from(std::uint64_t base, int count) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        seeds[static_cast<std::size_t>(i)] = substream_seed(base, static_cast<std::uint64_t>(i));
    return seeds;
}

struct CheckResult {
    bool ok = true;
    std::string detail;
};

void note(CheckResult& r, bool cond, const std::string& on_fail) {
    if (!cond) {
        r.ok = false;
        if (!r.detail.empty())
            r.detail += "; ";
        r.detail += on_fail;
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- 1: marginal integration cost per regime ------------------------------

CheckResult check_marginal_integration() {
    CheckResult r;
    ScenarioConfig base; // drift.create_cost defaults to 1
    const std::vector<int> grid{10, 20, 40, 80, 160};
    const Prediction1Result res =
        prediction1_experiment(base, grid, seeds_from(1001, 30));
    note(r, res.hourglass_fit.cls == ScalingClass::Constant,
         "hourglass deltas not classified constant");
    note(r, res.hourglass_fit.spread == 0.0,
         "hourglass delta spread " + fmt(res.hourglass_fit.spread) + " != 0");
    note(r, res.mesh_fit.cls == ScalingClass::Linear,
         "mesh deltas not classified linear");
    note(r, std::abs(res.mesh_fit.loglog_slope - 1.0) <= kSlopeTol,
         "mesh log-log slope " + fmt(res.mesh_fit.loglog_slope) + " not within " +
             fmt(kSlopeTol) + " of 1");
    if (r.ok)
        r.detail = "hourglass spread 0, mesh slope " + fmt(res.mesh_fit.loglog_slope);
    return r;
}

// --- 2: per-task cost stability and collapse ------------------------------

CheckResult check_cost_per_task_regimes() {
    CheckResult r;

    ScenarioConfig stable; // hourglass, q = 0, k = 4, gamma = 0.5, a=b=d=g=1
    stable.tasks_per_period = 1000;
    stable.drift.break_prob = 0.0;
    const std::vector<int> stable_grid{25, 50, 100, 200, 400};
    const Prediction2Result rs =
        prediction2_experiment(stable, stable_grid, seeds_from(2001, 10));
    double mean = 0.0;
    for (double v : rs.mean_cost_per_task)
        mean += v;
    mean /= static_cast<double>(rs.mean_cost_per_task.size());
    double var = 0.0;
    for (double v : rs.mean_cost_per_task)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(rs.mean_cost_per_task.size());
    const double cov = std::sqrt(var) / mean;
    note(r, cov < kCovLimit, "stable-arm C/T variation " + fmt(cov) + " >= " + fmt(kCovLimit));
    note(r, rs.stable, "stable arm not classified stable");

    ScenarioConfig collapse = stable;
    collapse.coupling_model.kind = CouplingModel::Kind::ScalingLinear;
    collapse.coupling_model.c_q = 1.0;
    collapse.coupling_model.n_ref = 100;
    collapse.cost_params.g = 0.0; // closed form below carries no per-task flat term
    const std::vector<int> collapse_grid{100, 200, 400, 800};
    const Prediction2Result rc =
        prediction2_experiment(collapse, collapse_grid, seeds_from(2002, 10));
    const double T = static_cast<double>(collapse.tasks_per_period);
    for (std::size_t i = 0; i < collapse_grid.size(); ++i) {
        const double n = collapse_grid[i];
        // b*k^gamma + d*(c_q*n/n_ref)*k^2 + a*n/T with k = 4, gamma = 0.5.
        const double closed = 2.0 + 16.0 * n / 100.0 + n / T;
        const double got = rc.mean_cost_per_task[i];
        note(r, std::abs(got - closed) <= kClosedFormRelTol * closed,
             "C/T at n=" + fmt(n) + " is " + fmt(got) + ", closed form " + fmt(closed));
    }
    const std::vector<double> top_x{200, 400, 800};
    const std::vector<double> top_y{rc.mean_cost_per_task[1], rc.mean_cost_per_task[2],
                                    rc.mean_cost_per_task[3]};
    const double top_slope = fit_loglog(top_x, top_y).slope;
    note(r, top_slope >= kCollapseSlopeMin,
         "collapse-arm slope " + fmt(top_slope) + " < " + fmt(kCollapseSlopeMin));
    note(r, rc.collapse, "collapse arm not flagged as collapsing");
    if (r.ok)
        r.detail = "stable CoV " + fmt(cov) + ", collapse slope " + fmt(top_slope);
    return r;
}

// --- 3: coupling-share crossover ------------------------------------------

CheckResult check_coupling_crossover() {
    CheckResult r;
    const ScenarioConfig base = preset("invariant-dominant");
    std::vector<int> grid(20);
    for (int i = 0; i < 20; ++i)
        grid[static_cast<std::size_t>(i)] = i + 1;
    const InstabilityResult res = instability_probe(base, grid, seeds_from(3001, 5));
    note(r, res.crossover_n == kExpectedCrossover,
         "crossover at n=" + std::to_string(res.crossover_n) + ", expected n=" +
             std::to_string(kExpectedCrossover));
    note(r, res.collapse_flag, "collapse flag not raised");
    const double below = res.coupling_share[11]; // n = 12
    const double above = res.coupling_share[12]; // n = 13
    note(r, below < 0.5 && above > 0.5,
         "shares around the crossover are " + fmt(below) + " / " + fmt(above));
    if (r.ok)
        r.detail = "share(12)=" + fmt(below) + ", share(13)=" + fmt(above);
    return r;
}

// --- 4: verification reuse exponent ---------------------------------------

double measured_width_exponent(const ScenarioConfig& cfg) {
    const RunTrace trace = run(cfg, true);
    std::vector<std::pair<int, double>> points;
    points.reserve(trace.tasks.size());
    for (const TaskRecord& t : trace.tasks)
        points.emplace_back(t.task.width, t.verification_local);
    return effective_gamma(points);
}

CheckResult check_reuse_exponent() {
    CheckResult r;
    ScenarioConfig cfg;
    cfg.verification_mode = VerificationMode::Mechanistic;
    cfg.vocab = CheckVocabulary{50, 1.2};
    cfg.harness = HarnessParams{1.0, 0.05, true};
    cfg.periods = 5;
    cfg.growth.sequence = {1, 1, 2, 4, 8}; // n = 1, 2, 4, 8, 16
    cfg.tasks_per_period = 2000;           // 10^4 tasks total
    cfg.width_dist.kind = WidthDist::Kind::Constant;
    cfg.width_dist.k = 16;                 // realized width = min(16, n)
    cfg.drift.break_prob = 0.0;

    int sublinear_seeds = 0;
    double worst_reuse = 0.0;
    double worst_noreuse_err = 0.0;
    const std::vector<std::uint64_t> seeds = seeds_from(4001, 30);
    for (std::uint64_t seed : seeds) {
        ScenarioConfig reuse = cfg;
        reuse.seed = seed;
        const double gamma_hat = measured_width_exponent(reuse);
        if (gamma_hat < 1.0)
            ++sublinear_seeds;
        worst_reuse = std::max(worst_reuse, gamma_hat);

        ScenarioConfig control = reuse;
        control.harness.reuse = false;
        const double gamma_flat = measured_width_exponent(control);
        worst_noreuse_err = std::max(worst_noreuse_err, std::abs(gamma_flat - 1.0));
    }
    note(r, sublinear_seeds >= kMinSublinearSeeds,
         "reuse exponent < 1 on only " + std::to_string(sublinear_seeds) + "/30 seeds");
    note(r, worst_noreuse_err <= kNoReuseGammaTol,
         "no-reuse exponent off by " + fmt(worst_noreuse_err));
    if (r.ok)
        r.detail = std::to_string(sublinear_seeds) + "/30 seeds sublinear (max " +
                   fmt(worst_reuse) + "), no-reuse max |err| " + fmt(worst_noreuse_err);
    return r;
}

// --- 5: total-cost sublinearity contrast ----------------------------------

CheckResult check_sublinearity_contrast() {
    CheckResult r;
    ScenarioConfig base;
    base.tasks_per_period = 100;
    base.cost_params.a = 1.0;
    base.width_dist.kind = WidthDist::Kind::PoissonPlusOne;
    base.width_dist.lambda = 2.0;
    base.drift.break_prob = 0.0;
    const std::vector<int> grid{50, 100, 200, 400};
    const SublinearityResult res = sublinearity_check(base, grid, seeds_from(5001, 10));
    note(r, res.hourglass.exponent_ci.mean < 1.0,
         "hourglass exponent " + fmt(res.hourglass.exponent_ci.mean) + " >= 1");
    note(r, res.hourglass.sublinear, "hourglass CI not below 1");
    note(r, res.mesh.exponent_ci.mean > kMeshExponentMin,
         "mesh exponent " + fmt(res.mesh.exponent_ci.mean) + " <= " + fmt(kMeshExponentMin));
    if (r.ok)
        r.detail = "hourglass " + fmt(res.hourglass.exponent_ci.mean) + ", mesh " +
                   fmt(res.mesh.exponent_ci.mean);
    return r;
}

// --- 6: liability identity --------------------------------------------------

CheckResult check_liability_identity() {
    CheckResult r;
    SplitMix64 rng(6001);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        LiabilityParams l;
        l.c_compute = rng.next_double() * 10.0;
        l.r = rng.next_double() * 1000.0;
        l.p = rng.next_double();
        const double err = std::abs(marginal_cost_of_action(l) - (l.c_compute + l.r * l.p));
        worst = std::max(worst, err);
        l.c_compute = 0.0;
        const double floor_err = std::abs(marginal_cost_of_action(l) - l.r * l.p);
        worst = std::max(worst, floor_err);
    }
    note(r, worst <= kExactTol, "worst identity error " + fmt(worst));
    if (r.ok)
        r.detail = "10^4 triples, worst error " + fmt(worst);
    return r;
}

// --- 7: oracle equivalence ---------------------------------------------------

CheckResult check_oracle_equivalence() {
    CheckResult r;
    SplitMix64 pick(7001);
    double worst_rel = 0.0;
    for (int i = 0; i < 100 && r.ok; ++i) {
        ScenarioConfig cfg;
        cfg.regime = (i % 2 == 0) ? Regime::Hourglass : Regime::Mesh;
        cfg.verification_mode =
            ((i / 2) % 2 == 0) ? VerificationMode::Parametric : VerificationMode::Mechanistic;
        cfg.activation = pick.next_below(2) ? Activation::Lazy : Activation::Eager;
        cfg.periods = 1 + static_cast<int>(pick.next_below(3));       // P <= 3
        cfg.tasks_per_period = static_cast<int>(pick.next_below(21)); // T <= 20
        cfg.growth.sequence = {1 + static_cast<int>(pick.next_below(3)), 0, 0};
        for (int p = 1; p < cfg.periods; ++p) {
            const int room = 5 - cfg.growth.sequence[0];
            cfg.growth.sequence[static_cast<std::size_t>(p)] =
                room > 0 ? static_cast<int>(pick.next_below(2)) : 0; // n <= 5
        }
        switch (pick.next_below(3)) {
        case 0:
            cfg.width_dist.kind = WidthDist::Kind::Constant;
            cfg.width_dist.k = 1 + static_cast<int>(pick.next_below(5));
            break;
        case 1:
            cfg.width_dist.kind = WidthDist::Kind::PoissonPlusOne;
            cfg.width_dist.lambda = 0.5 + pick.next_double() * 2.0;
            break;
        default:
            cfg.width_dist.kind = WidthDist::Kind::TruncatedZipf;
            cfg.width_dist.s = 0.5 + pick.next_double();
            break;
        }
        switch (pick.next_below(3)) {
        case 0:
            cfg.coupling_model.kind = CouplingModel::Kind::Constant;
            cfg.coupling_model.q = pick.next_double();
            break;
        case 1:
            cfg.coupling_model.kind = CouplingModel::Kind::Beta;
            break;
        default:
            cfg.coupling_model.kind = CouplingModel::Kind::ScalingLinear;
            cfg.coupling_model.c_q = 0.5;
            cfg.coupling_model.n_ref = 3;
            break;
        }
        cfg.coupling_form =
            pick.next_below(2) ? CouplingForm::StrictPairwise : CouplingForm::Default;
        cfg.cost_params.gamma = pick.next_double() * 2.0;
        cfg.drift.break_prob = pick.next_double();
        cfg.vocab = CheckVocabulary{5 + static_cast<int>(pick.next_below(10)), 1.0};
        cfg.seed = pick.next();

        const RunTrace trace = run(cfg, true);
        const CostBreakdown oracle = oracle_total_cost(trace);
        const double pairs[5][2] = {
            {trace.totals.integration, oracle.integration},
            {trace.totals.verification_local, oracle.verification_local},
            {trace.totals.verification_coupling, oracle.verification_coupling},
            {trace.totals.governance, oracle.governance},
            {trace.totals.total, oracle.total},
        };
        for (const auto& pr : pairs) {
            const double rel = std::abs(pr[0] - pr[1]) / std::max(1.0, std::abs(pr[1]));
            worst_rel = std::max(worst_rel, rel);
            note(r, rel <= kOracleRelTol,
                 "scenario " + std::to_string(i) + ": engine " + fmt(pr[0]) + " vs oracle " +
                     fmt(pr[1]));
        }
    }
    if (r.ok)
        r.detail = "100 scenarios, worst relative gap " + fmt(worst_rel);
    return r;
}

// --- 8: power-law estimator ---------------------------------------------------

CheckResult check_powerlaw_estimator() {
    CheckResult r;
    SplitMix64 rng(8001);
    const std::vector<double> sample = sample_power_law(rng, 2.5, 1.0, 100000);
    const double alpha_hat = fit_power_law(sample, 1.0).alpha_hat;
    note(r, alpha_hat >= kAlphaBandLo && alpha_hat <= kAlphaBandHi,
         "synthetic exponent " + fmt(alpha_hat) + " outside [" + fmt(kAlphaBandLo) + ", " +
             fmt(kAlphaBandHi) + "]");
    const double e = std::exp(1.0);
    const std::vector<double> closed{e, e, e};
    const double alpha_closed = fit_power_law(closed, 1.0).alpha_hat;
    note(r, std::abs(alpha_closed - 2.0) <= kClosedFormAlphaTol,
         "closed-form exponent " + fmt(alpha_closed) + " != 2");
    if (r.ok)
        r.detail = "synthetic " + fmt(alpha_hat) + ", closed form " + fmt(alpha_closed);
    return r;
}

// --- 9: two-sector bifurcation -------------------------------------------------

CheckResult check_bifurcation() {
    CheckResult r;
    SectorConfig low, high;
    canonical_sectors(low, high);
    const UnbundlingResult res =
        unbundling_experiment(low, high, seeds_from(0, 30), 1.0);
    note(r, res.high.delta_ci.lo > 0.0,
         "fast-sector delta CI low end " + fmt(res.high.delta_ci.lo) + " <= 0");
    note(r, res.low.delta_ci.mean <= res.high.delta_ci.mean,
         "slow-sector mean delta " + fmt(res.low.delta_ci.mean) + " exceeds fast-sector " +
             fmt(res.high.delta_ci.mean));
    note(r, res.bifurcation, "bifurcation flag not raised");
    if (r.ok)
        r.detail = "fast CI [" + fmt(res.high.delta_ci.lo) + ", " + fmt(res.high.delta_ci.hi) +
                   "], slow mean " + fmt(res.low.delta_ci.mean);
    return r;
}

// --- 10: preset determinism ----------------------------------------------------

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CheckResult check_preset_determinism() {
    CheckResult r;
    const fs::path root =
        fs::temp_directory_path() / ("coordsim_accept_" + std::to_string(::getpid()));
    for (const std::string& name : preset_names()) {
        const Job job{"run", RunJob{preset(name)}};
        const fs::path dir_a = root / (name + "_a");
        const fs::path dir_b = root / (name + "_b");
        execute_job(job, dir_a.string());
        execute_job(job, dir_b.string());
        const std::string a = slurp(dir_a / "points.csv");
        const std::string b = slurp(dir_b / "points.csv");
        note(r, !a.empty(), name + ": empty points table");
        note(r, a == b, name + ": reruns differ");
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    if (r.ok)
        r.detail = "3 presets, byte-identical reruns";
    return r;
}

// --- driver ---------------------------------------------------------------------

struct Criterion {
    const char* name;
    std::function<CheckResult()> fn;
    double budget_seconds; // 0 = unbudgeted
};

} // namespace

int main() {
    const Criterion criteria[] = {
        {"marginal integration cost: hourglass flat, eager mesh linear",
         check_marginal_integration, kBudgetMarginal},
        {"per-task cost stable at zero coupling, collapses under scaling coupling",
         check_cost_per_task_regimes, kBudgetStability},
        {"coupling share crosses one-half at the predicted grid point",
         check_coupling_crossover, 0.0},
        {"reusable checks bend the measured width exponent below one",
         check_reuse_exponent, kBudgetReuse},
        {"total cost sublinear in n for hourglass, superlinear for mesh",
         check_sublinearity_contrast, kBudgetSublinearity},
        {"delegated-action marginal cost equals compute plus expected liability",
         check_liability_identity, 0.0},
        {"engine totals match independent recomputation",
         check_oracle_equivalence, 0.0},
        {"power-law exponent estimator recovers synthetic and closed-form values",
         check_powerlaw_estimator, 0.0},
        {"fast-sector size exponent steepens, slow sector holds",
         check_bifurcation, kBudgetBifurcation},
        {"shipped presets rerun byte-identically",
         check_preset_determinism, 0.0},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult result;
        try {
            result = c.fn();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0 && seconds >= c.budget_seconds) {
            result.ok = false;
            if (!result.detail.empty())
                result.detail += "; ";
            result.detail += "runtime " + fmt(seconds) + "s over the " +
                             fmt(c.budget_seconds) + "s budget";
        }
        std::printf("%s - %s (%s) [%.2fs]\n", result.ok ? "PASS" : "FAIL", c.name,
                    result.detail.c_str(), seconds);
        if (!result.ok)
            ++failures;
    }
    if (failures > 0) {
        std::printf("%d of 10 checks failed\n", failures);
        return 1;
    }
    std::printf("all 10 checks passed\n");
    return 0;
}
