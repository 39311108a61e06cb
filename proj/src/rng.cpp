#include "coordsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace coordsim {

std::uint64_t SplitMix64::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be >= 1");
    // Rejection below the largest multiple of n, so every residue is equally likely.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        const std::uint64_t v = next();
        if (v < limit) return v % n;
    }
}

int draw_poisson(SplitMix64& rng, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("draw_poisson: lambda must be >= 0");
    // Knuth's method is exact but multiplies uniforms against exp(-lambda);
    // chunking keeps the threshold away from underflow for large means.
    int total = 0;
    double remaining = lambda;
    while (remaining > 0.0) {
        const double step = remaining > 500.0 ? 500.0 : remaining;
        remaining -= step;
        const double threshold = std::exp(-step);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= rng.next_open_double();
        } while (p > threshold);
        total += k - 1;
    }
    return total;
}

namespace {

double draw_normal(SplitMix64& rng) {
    // Box-Muller, cosine branch only: two uniforms per normal, fixed consumption.
    const double u1 = rng.next_open_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double draw_gamma(SplitMix64& rng, double shape) {
    // Marsaglia & Tsang (2000); shapes below 1 boosted through G(a+1) * U^(1/a).
    if (shape < 1.0) {
        const double g = draw_gamma(rng, shape + 1.0);
        const double u = rng.next_open_double();
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = draw_normal(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.next_open_double();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

} // namespace

double draw_beta(SplitMix64& rng, double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("draw_beta: shape parameters must be > 0");
    const double x = draw_gamma(rng, alpha);
    const double y = draw_gamma(rng, beta);
    return x / (x + y);
}

ZipfTable::ZipfTable(int n, double s) {
    if (n < 1) throw std::invalid_argument("ZipfTable: n must be >= 1");
    if (!(s >= 0.0)) throw std::invalid_argument("ZipfTable: s must be >= 0");
    cdf_.resize(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (int r = 1; r <= n; ++r) {
        acc += std::pow(static_cast<double>(r), -s);
        cdf_[static_cast<std::size_t>(r) - 1] = acc;
    }
    for (double& c : cdf_) c /= acc;
    cdf_.back() = 1.0; // guard against rounding leaving the last bucket short
}

int ZipfTable::draw(SplitMix64& rng) const {
    const double u = rng.next_double();
    // first index with cdf >= u
    int lo = 0;
    int hi = static_cast<int>(cdf_.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cdf_[static_cast<std::size_t>(mid)] < u)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo + 1;
}

double ZipfTable::probability(int rank) const {
    if (rank < 1 || rank > size()) throw std::out_of_range("ZipfTable::probability: rank out of range");
    const std::size_t i = static_cast<std::size_t>(rank) - 1;
    return rank == 1 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

} // namespace coordsim
