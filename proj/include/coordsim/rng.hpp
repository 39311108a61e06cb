#pragma once

// Deterministic random generation.
//
// Single generator throughout: splitmix64 (Steele, Lea & Flood's SplittableRandom
// core, fixed golden-gamma increment as published by Vigna). Chosen because the
// whole state is one 64-bit word, the output function is a pure bijection, and
// derived streams are cheap.
//
// Substream rule (documented contract, relied on for reproducibility):
//     substream_seed(base, i) = mix64(base + (i + 1) * 0x9E3779B97F4A7C15)
// i.e. one splitmix64 state advance of (i + 1) steps followed by the output
// finalizer. The engine derives one stream per (period, purpose) pair:
//     period_base = substream_seed(config.seed, period_index)
//     drift  stream = substream_seed(period_base, 0)
//     task   stream = substream_seed(period_base, 1)
//     check  stream = substream_seed(period_base, 2)
// so task samples are identical across regimes and verification modes for a
// given config + seed. Experiment harnesses derive per-run seeds the same way.
//
// All samplers below consume their stream sequentially with explicit,
// implementation-pinned algorithms (no std::<distribution>, whose outputs are
// implementation-defined and would break byte-identical reruns across
// toolchains).

#include <cstdint>
#include <vector>

namespace coordsim {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 output finalizer (a bijection on 64-bit words).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive an independent child stream seed; see the split rule above.
constexpr std::uint64_t substream_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base + (index + 1) * kGoldenGamma);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1], safe as a log() argument.
    double next_open_double() { return 1.0 - next_double(); }

    /// Unbiased uniform integer in [0, n); n must be >= 1.
    std::uint64_t next_below(std::uint64_t n);

    /// Child stream at the given index (same rule as substream_seed).
    SplitMix64 split(std::uint64_t index) const {
        return SplitMix64(substream_seed(state_, index));
    }

private:
    std::uint64_t state_;
};

/// Poisson draw via Knuth's product method, chunked so large means stay exact.
int draw_poisson(SplitMix64& rng, double lambda);

/// Beta(alpha, beta) via Marsaglia-Tsang gamma draws (Box-Muller normals).
double draw_beta(SplitMix64& rng, double alpha, double beta);

/// Categorical over ranks {1..n} with weight rank^-s, sampled by CDF inversion.
class ZipfTable {
public:
    ZipfTable(int n, double s);

    int draw(SplitMix64& rng) const; // rank in [1, n]
    double probability(int rank) const;
    int size() const { return static_cast<int>(cdf_.size()); }

private:
    std::vector<double> cdf_;
};

} // namespace coordsim
