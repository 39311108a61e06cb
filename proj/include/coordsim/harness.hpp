#pragma once

// Mechanistic verification: tasks demand outcome checks drawn from a fixed
// vocabulary, a per-run library keeps every check harness ever built, and the
// realized cost curve tells us how verification scales with task width
// (effective_gamma). Reuse is the whole point: a finite vocabulary caps total
// construction cost, so wide tasks ride on harnesses paid for by narrow ones.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "coordsim/rng.hpp"

namespace coordsim {

/// Fixed set of check types, rank-ordered by popularity ~ rank^(-s).
/// s = 0 makes popularity uniform (the weakest-reuse stress case).
struct CheckVocabulary {
    int size = 50;                  ///< V, number of distinct check types
    double popularity_exponent = 1.2; ///< s >= 0
};

void validate(const CheckVocabulary& vocab, const char* prefix = "vocab");

/// Cost knobs for the check library. With reuse disabled the library is reset
/// before every task, so each check pays the full build price every time.
struct HarnessParams {
    double create_cost = 1.0;  ///< c_h, building a harness for a new check
    double apply_cost = 0.05;  ///< per application of an existing harness
    bool reuse = true;
};

void validate(const HarnessParams& params, const char* prefix = "harness");

/// Draws the checks one task needs: width distinct check ids from {1..V},
/// popularity-weighted without replacement. A task wider than the vocabulary
/// needs all V checks (no rng consumed in that case, nor for width 0).
/// The popularity table must cover the same vocabulary it was built from.
/// Returns ids in ascending order.
std::vector<int> required_checks(int width, const ZipfTable& popularity, SplitMix64& rng);

/// Convenience overload that builds the popularity table on the fly.
std::vector<int> required_checks(int width, const CheckVocabulary& vocab, SplitMix64& rng);

struct VerifyOutcome {
    int new_checks = 0;     ///< harnesses built by this task
    int applied_checks = 0; ///< always |checks|
    double cost = 0.0;      ///< new_checks*c_h + applied_checks*eps
};

/// Per-run library of built check harnesses. Belongs to exactly one run;
/// the built set only grows (except via reset, used between runs and by the
/// no-reuse mode before each task).
class HarnessLibrary {
public:
    HarnessLibrary(const CheckVocabulary& vocab, const HarnessParams& params);

    /// Charges c_h + eps for each check missing a harness, eps for the rest,
    /// and marks the missing ones built. Honors the no-reuse mode by clearing
    /// the library first. Check ids must lie in [1, V].
    VerifyOutcome verify_task(std::span<const int> checks);

    void reset();
    int built_count() const { return built_count_; }
    bool is_built(int check) const;
    double cumulative_create_cost() const { return cumulative_create_cost_; }
    const HarnessParams& params() const { return params_; }

private:
    HarnessParams params_;
    std::vector<char> built_; // index 0 unused; ids are 1-based ranks
    int built_count_ = 0;
    double cumulative_create_cost_ = 0.0;
};

/// Measured width exponent: slope of log(mean cost per width) on log(width)
/// over the trace's width >= 1 rows. Throws std::domain_error("exponent
/// unidentifiable") with fewer than 2 distinct widths or a nonpositive group
/// mean (logs need positive costs).
double effective_gamma(std::span<const std::pair<int, double>> trace);

} // namespace coordsim
