#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "vkin/errors.hpp"

namespace vkin {

/// Agreement metrics between an estimated channel and its reference:
/// mean error mu, population standard deviation sigma of the error, and the
/// scale m minimizing sum((m*reference - estimate)^2).  m is absent when the
/// reference carries no energy (all zeros), where the scale is undefined.
struct ChannelComparison {
    double mu = 0.0;
    double sigma = 0.0;
    std::optional<double> m;
    std::size_t count = 0;
};

/// Compares two series sampled on a common time grid.
///   mu    = mean(estimate - reference)
///   sigma = sqrt(mean((estimate - reference - mu)^2))   (1/N normalization)
///   m     = sum(reference*estimate) / sum(reference^2)
inline ChannelComparison compare_channels(std::span<const double> reference,
                                          std::span<const double> estimate) {
    if (reference.size() != estimate.size())
        throw std::invalid_argument("compare_channels: series lengths differ (" +
                                    std::to_string(reference.size()) + " vs " +
                                    std::to_string(estimate.size()) + ")");
    const std::size_t n = reference.size();
    if (n < 2) throw TooFewSamples("compare_channels: need at least 2 samples");

    double sum_err = 0.0;
    double sum_re = 0.0;
    double sum_rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum_err += estimate[i] - reference[i];
        sum_re += reference[i] * estimate[i];
        sum_rr += reference[i] * reference[i];
    }
    ChannelComparison out;
    out.count = n;
    out.mu = sum_err / static_cast<double>(n);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = estimate[i] - reference[i] - out.mu;
        sum_sq += d * d;
    }
    out.sigma = std::sqrt(sum_sq / static_cast<double>(n));
    if (sum_rr > 0.0) out.m = sum_re / sum_rr;
    return out;
}

}  // namespace vkin
