#include "coordsim/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coordsim {

namespace {

// KS distance between the empirical CDF of a sorted tail and the fitted
// continuous power-law CDF F(x) = 1 - (x/x_min)^(1-alpha).
double ks_distance_sorted(std::span<const double> tail, double x_min, double alpha) {
    const double n = static_cast<double>(tail.size());
    double d = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i) {
        const double f = 1.0 - std::pow(tail[i] / x_min, 1.0 - alpha);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

PowerLawFit fit_sorted_tail(std::span<const double> tail, double x_min) {
    PowerLawFit fit;
    fit.x_min = x_min;
    fit.n_tail = static_cast<std::int64_t>(tail.size());
    if (fit.n_tail < 2)
        throw std::invalid_argument("fit_power_law: need at least 2 values >= x_min");
    double log_sum = 0.0;
    for (double v : tail)
        log_sum += std::log(v / x_min);
    if (log_sum <= 0.0)
        throw std::domain_error("degenerate tail");
    fit.alpha_hat = 1.0 + static_cast<double>(fit.n_tail) / log_sum;
    fit.ks_distance = ks_distance_sorted(tail, x_min, fit.alpha_hat);
    return fit;
}

} // namespace

PowerLawFit fit_power_law(std::span<const double> values, double x_min) {
    if (!(x_min > 0.0))
        throw std::invalid_argument("fit_power_law: x_min must be > 0");
    std::vector<double> tail;
    tail.reserve(values.size());
    for (double v : values)
        if (v >= x_min)
            tail.push_back(v);
    std::sort(tail.begin(), tail.end());
    return fit_sorted_tail(tail, x_min);
}

double select_xmin(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct(sorted);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 10)
        throw std::invalid_argument("select_xmin: need at least 10 distinct values");

    double best_xmin = 0.0;
    double best_ks = std::numeric_limits<double>::infinity();
    for (double candidate : distinct) {
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), candidate);
        const std::size_t tail_size = static_cast<std::size_t>(sorted.end() - first);
        if (tail_size < 10)
            break; // candidates only grow from here, tails only shrink
        const std::span<const double> tail(&*first, tail_size);
        if (tail.back() == candidate)
            continue; // degenerate tail, no exponent to fit
        const PowerLawFit fit = fit_sorted_tail(tail, candidate);
        if (fit.ks_distance < best_ks) {
            best_ks = fit.ks_distance;
            best_xmin = candidate;
        }
    }
    if (!(best_ks < std::numeric_limits<double>::infinity()))
        throw std::domain_error("select_xmin: no cutoff keeps a tail of at least 10 values");
    return best_xmin;
}

double sample_power_law(SplitMix64& rng, double alpha, double x_min) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("sample_power_law: alpha must be > 1");
    if (!(x_min > 0.0))
        throw std::invalid_argument("sample_power_law: x_min must be > 0");
    const double u = rng.next_open_double();
    return x_min * std::pow(u, -1.0 / (alpha - 1.0));
}

std::vector<double> sample_power_law(SplitMix64& rng, double alpha, double x_min,
                                     std::size_t count) {
    std::vector<double> out(count);
    for (double& v : out)
        v = sample_power_law(rng, alpha, x_min);
    return out;
}

} // namespace coordsim
