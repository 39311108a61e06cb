#pragma once

// Small statistics toolkit: OLS fits, scaling classification of a cost curve,
// and a percentile bootstrap for mean differences. Everything is deterministic
// given its inputs (the bootstrap takes an explicit seed).

#include <cstdint>
#include <span>

namespace coordsim {

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (x, y). Throws std::invalid_argument on size
/// mismatch, fewer than two points, or degenerate x (all equal). A perfectly
/// flat y (SS_tot == 0) fits exactly, so r_squared is reported as 1.
OlsFit fit_ols(std::span<const double> x, std::span<const double> y);

/// fit_ols on (log x, log y); all values must be > 0. The slope is the
/// power-law exponent of y ~ x^slope.
OlsFit fit_loglog(std::span<const double> x, std::span<const double> y);

enum class ScalingClass { Constant, Linear, Superlinear, Indeterminate };

const char* to_string(ScalingClass cls);

/// Decision thresholds for classify_scaling and the regime verdicts built on
/// it. Defaults are the published reference values; overrides are echoed into
/// experiment output so a result can always be traced to its thresholds.
struct ScalingThresholds {
    double constant_spread = 0.1;  ///< (max-min)/median below this is flat
    double linear_r2 = 0.9;        ///< min r^2 (raw fit) to call it a line
    double linear_slope_low = 0.8; ///< log-log slope window for Linear
    double linear_slope_high = 1.2;
    double superlinear_r2 = 0.9;   ///< min r^2 (log-log fit) for Superlinear
    double stable_slope = 0.2;     ///< log-log slope below this: cost stays stable
    double collapse_slope = 0.8;   ///< log-log slope at/above this: cost collapses
};

void validate(const ScalingThresholds& thresholds, const char* prefix = "thresholds");

struct ScalingDecision {
    ScalingClass cls = ScalingClass::Indeterminate;
    double spread = 0.0;        ///< (max-min)/median of y
    double raw_slope = 0.0;     ///< OLS on raw values
    double raw_r_squared = 0.0;
    double loglog_slope = 0.0;  ///< OLS on logs; NaN when a value is <= 0
    double loglog_r_squared = 0.0;
};

/// Classifies how y grows with x. Order of tests: flat spread wins, then a
/// good raw line with log-log slope near 1, then a clean superlinear log-log
/// fit; anything else is Indeterminate. Needs at least 3 distinct x values.
ScalingDecision classify_scaling(std::span<const double> x, std::span<const double> y,
                                 const ScalingThresholds& thresholds = {});

struct BootstrapCi {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Percentile bootstrap CI for the mean of samples. Deterministic in seed.
BootstrapCi bootstrap_mean_ci(std::span<const double> samples, std::uint64_t seed,
                              double level = 0.95, int replicates = 2000);

} // namespace coordsim
