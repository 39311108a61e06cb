#include "coordsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "coordsim/errors.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {

OlsFit fit_ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_ols: x and y must have equal length");
    const std::size_t n = x.size();
    if (n < 2)
        throw std::invalid_argument("fit_ols: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_ols: x values are all equal");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r_squared = 1.0; // flat data, fit is exact
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

OlsFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog: x and y must have equal length");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog: values must be > 0");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_ols(lx, ly);
}

const char* to_string(ScalingClass cls) {
    switch (cls) {
    case ScalingClass::Constant: return "constant";
    case ScalingClass::Linear: return "linear";
    case ScalingClass::Superlinear: return "superlinear";
    case ScalingClass::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

void validate(const ScalingThresholds& t, const char* prefix) {
    const std::string p(prefix);
    auto in01 = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError(p + "." + name, "must lie in [0, 1]");
    };
    in01(t.linear_r2, "linear_r2");
    in01(t.superlinear_r2, "superlinear_r2");
    if (!(t.constant_spread >= 0.0))
        throw ValidationError(p + ".constant_spread", "must be >= 0");
    if (!(t.linear_slope_low >= 0.0) || !(t.linear_slope_high >= t.linear_slope_low))
        throw ValidationError(p + ".linear_slope_high",
                              "slope window must satisfy 0 <= low <= high");
    if (!(t.stable_slope >= 0.0) || !(t.collapse_slope >= t.stable_slope))
        throw ValidationError(p + ".collapse_slope",
                              "verdict slopes must satisfy 0 <= stable <= collapse");
}

ScalingDecision classify_scaling(std::span<const double> x, std::span<const double> y,
                                 const ScalingThresholds& thresholds) {
    validate(thresholds);
    if (x.size() != y.size())
        throw std::invalid_argument("classify_scaling: x and y must have equal length");
    std::vector<double> distinct(x.begin(), x.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
        throw std::invalid_argument("classify_scaling: need at least 3 distinct x values");

    ScalingDecision out;
    std::vector<double> sorted_y(y.begin(), y.end());
    std::sort(sorted_y.begin(), sorted_y.end());
    const double lo = sorted_y.front(), hi = sorted_y.back();
    const std::size_t n = sorted_y.size();
    const double median = (n % 2 == 1) ? sorted_y[n / 2]
                                       : 0.5 * (sorted_y[n / 2 - 1] + sorted_y[n / 2]);
    if (hi == lo)
        out.spread = 0.0;
    else if (median == 0.0)
        out.spread = std::numeric_limits<double>::infinity();
    else
        out.spread = (hi - lo) / std::abs(median);

    const OlsFit raw = fit_ols(x, y);
    out.raw_slope = raw.slope;
    out.raw_r_squared = raw.r_squared;

    bool have_loglog = std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; }) &&
                       std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; });
    if (have_loglog) {
        const OlsFit ll = fit_loglog(x, y);
        out.loglog_slope = ll.slope;
        out.loglog_r_squared = ll.r_squared;
    } else {
        out.loglog_slope = std::numeric_limits<double>::quiet_NaN();
        out.loglog_r_squared = std::numeric_limits<double>::quiet_NaN();
    }

    if (out.spread < thresholds.constant_spread) {
        out.cls = ScalingClass::Constant;
    } else if (have_loglog && raw.r_squared >= thresholds.linear_r2 &&
               out.loglog_slope >= thresholds.linear_slope_low &&
               out.loglog_slope <= thresholds.linear_slope_high) {
        out.cls = ScalingClass::Linear;
    } else if (have_loglog && out.loglog_slope > thresholds.linear_slope_high &&
               out.loglog_r_squared >= thresholds.superlinear_r2) {
        out.cls = ScalingClass::Superlinear;
    } else {
        out.cls = ScalingClass::Indeterminate;
    }
    return out;
}

BootstrapCi bootstrap_mean_ci(std::span<const double> samples, std::uint64_t seed,
                              double level, int replicates) {
    if (samples.empty())
        throw std::invalid_argument("bootstrap_mean_ci: no samples");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_mean_ci: level must lie in (0, 1)");
    if (replicates < 1)
        throw std::invalid_argument("bootstrap_mean_ci: replicates must be >= 1");

    BootstrapCi out;
    for (double v : samples)
        out.mean += v;
    out.mean /= static_cast<double>(samples.size());

    SplitMix64 rng(seed);
    const std::uint64_t n = samples.size();
    std::vector<double> means(static_cast<std::size_t>(replicates));
    for (double& m : means) {
        double acc = 0.0;
        for (std::uint64_t i = 0; i < n; ++i)
            acc += samples[static_cast<std::size_t>(rng.next_below(n))];
        m = acc / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(means.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= means.size())
            return means.back();
        const double frac = pos - static_cast<double>(i);
        return means[i] * (1.0 - frac) + means[i + 1] * frac;
    };
    const double alpha = 1.0 - level;
    out.lo = quantile(alpha / 2.0);
    out.hi = quantile(1.0 - alpha / 2.0);
    return out;
}

} // namespace coordsim
