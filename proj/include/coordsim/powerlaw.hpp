#pragma once

// Power-law tail fitting for firm-size distributions: continuous maximum-
// likelihood exponent estimate, Kolmogorov-Smirnov distance against the
// fitted tail, KS-minimizing cutoff selection, and the inverse-CDF sampler
// used as the synthetic oracle for all of the above.

#include <cstdint>
#include <span>
#include <vector>

#include "coordsim/rng.hpp"

namespace coordsim {

struct PowerLawFit {
    double alpha_hat = 0.0;  ///< fitted tail exponent (> 1)
    double x_min = 0.0;      ///< tail cutoff the fit was taken at
    std::int64_t n_tail = 0; ///< sample count at or above x_min
    double ks_distance = 0.0;
};

/// Continuous MLE on the tail x >= x_min:
///     alpha_hat = 1 + n_tail / sum(ln(x_i / x_min))
/// Applied to integer sizes this carries known bias at small x_min; reports
/// should say which x_min they used. Throws std::invalid_argument when fewer
/// than 2 tail values exist and std::domain_error("degenerate tail") when
/// every tail value equals x_min.
PowerLawFit fit_power_law(std::span<const double> values, double x_min);

/// Picks the cutoff among observed distinct values that minimizes the KS
/// distance of its fit, considering only cutoffs keeping a tail of >= 10.
/// Requires >= 10 distinct values; throws std::domain_error when no cutoff
/// leaves a big enough tail. Ties break toward the smaller cutoff.
double select_xmin(std::span<const double> values);

/// Inverse-CDF sample of a pure continuous power law with the given exponent
/// (> 1) and cutoff (> 0): x = x_min * u^(-1/(alpha-1)), u uniform in (0, 1].
double sample_power_law(SplitMix64& rng, double alpha, double x_min);

std::vector<double> sample_power_law(SplitMix64& rng, double alpha, double x_min,
                                     std::size_t count);

} // namespace coordsim
