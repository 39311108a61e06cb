#include "coordsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "coordsim/errors.hpp"
#include "coordsim/stats.hpp"

namespace coordsim {

void validate(const CheckVocabulary& vocab, const char* prefix) {
    const std::string p(prefix);
    if (vocab.size < 1)
        throw ValidationError(p + ".size", "must be an integer >= 1");
    if (!(vocab.popularity_exponent >= 0.0) || !std::isfinite(vocab.popularity_exponent))
        throw ValidationError(p + ".popularity_exponent", "must be a finite value >= 0");
}

void validate(const HarnessParams& params, const char* prefix) {
    const std::string p(prefix);
    if (!(params.create_cost >= 0.0) || !std::isfinite(params.create_cost))
        throw ValidationError(p + ".create_cost", "must be a finite value >= 0");
    if (!(params.apply_cost >= 0.0) || !std::isfinite(params.apply_cost))
        throw ValidationError(p + ".apply_cost", "must be a finite value >= 0");
}

std::vector<int> required_checks(int width, const ZipfTable& popularity, SplitMix64& rng) {
    if (width < 0)
        throw std::invalid_argument("required_checks: width must be >= 0");
    const int v = popularity.size();
    std::vector<int> out;
    if (width == 0)
        return out;
    if (width >= v) {
        out.resize(static_cast<std::size_t>(v));
        std::iota(out.begin(), out.end(), 1);
        return out;
    }
    std::vector<char> taken(static_cast<std::size_t>(v) + 1, 0);
    out.reserve(static_cast<std::size_t>(width));
    while (static_cast<int>(out.size()) < width) {
        const int id = popularity.draw(rng);
        if (!taken[static_cast<std::size_t>(id)]) {
            taken[static_cast<std::size_t>(id)] = 1;
            out.push_back(id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> required_checks(int width, const CheckVocabulary& vocab, SplitMix64& rng) {
    validate(vocab);
    const ZipfTable table(vocab.size, vocab.popularity_exponent);
    return required_checks(width, table, rng);
}

HarnessLibrary::HarnessLibrary(const CheckVocabulary& vocab, const HarnessParams& params)
    : params_(params), built_(static_cast<std::size_t>(vocab.size) + 1, 0) {
    validate(vocab);
    validate(params);
}

VerifyOutcome HarnessLibrary::verify_task(std::span<const int> checks) {
    if (!params_.reuse) {
        std::fill(built_.begin(), built_.end(), 0);
        built_count_ = 0;
    }
    VerifyOutcome out;
    out.applied_checks = static_cast<int>(checks.size());
    for (int id : checks) {
        if (id < 1 || id >= static_cast<int>(built_.size()))
            throw std::invalid_argument("verify_task: check id outside vocabulary");
        if (!built_[static_cast<std::size_t>(id)]) {
            built_[static_cast<std::size_t>(id)] = 1;
            ++built_count_;
            ++out.new_checks;
        }
    }
    out.cost = params_.create_cost * out.new_checks + params_.apply_cost * out.applied_checks;
    cumulative_create_cost_ += params_.create_cost * out.new_checks;
    return out;
}

void HarnessLibrary::reset() {
    std::fill(built_.begin(), built_.end(), 0);
    built_count_ = 0;
    cumulative_create_cost_ = 0.0;
}

bool HarnessLibrary::is_built(int check) const {
    if (check < 1 || check >= static_cast<int>(built_.size()))
        return false;
    return built_[static_cast<std::size_t>(check)] != 0;
}

double effective_gamma(std::span<const std::pair<int, double>> trace) {
    std::map<int, std::pair<double, std::int64_t>> groups; // width -> (sum, count)
    for (const auto& [width, cost] : trace) {
        if (width < 1)
            continue;
        auto& g = groups[width];
        g.first += cost;
        g.second += 1;
    }
    if (groups.size() < 2)
        throw std::domain_error("exponent unidentifiable");
    std::vector<double> widths, means;
    widths.reserve(groups.size());
    means.reserve(groups.size());
    for (const auto& [width, g] : groups) {
        const double mean = g.first / static_cast<double>(g.second);
        if (!(mean > 0.0))
            throw std::domain_error("exponent unidentifiable");
        widths.push_back(static_cast<double>(width));
        means.push_back(mean);
    }
    return fit_loglog(widths, means).slope;
}

} // namespace coordsim
