#pragma once

// Shapley decomposition of Gaussian differential entropy over answer
// dimensions. phi_i averages the entropy gained by adding dimension i to a
// coalition over all orderings; the per-element values sum to the full entropy.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shapunc/gaussian_entropy.hpp"
#include "shapunc/kernel_correlation.hpp"

namespace shapunc {

enum class ShapleyMethod { exact, monte_carlo };

struct ShapleyReport {
    std::string id;
    std::vector<double> per_element;  // nats
    double total = 0.0;               // sum of per_element
    ShapleyMethod method = ShapleyMethod::exact;
    std::optional<std::vector<double>> mc_stderr;

    friend bool operator==(const ShapleyReport&, const ShapleyReport&) = default;
};

inline constexpr int kDefaultExactLimit = 12;

/// Full subset enumeration. Throws ValidationError when n > max_exact_n.
ShapleyReport exact_shapley(const KernelMatrix& k, int max_exact_n = kDefaultExactLimit);

/// Shapley values of an already-built subset cache.
std::vector<double> shapley_from_cache(const SubsetEntropyCache& cache);

/// Permutation-sampling estimate. Marginals along each sampled ordering come
/// from an incrementally extended Cholesky factor, so one permutation costs
/// O(n^3). Deterministic for a given seed.
ShapleyReport mc_shapley(const KernelMatrix& k, int permutations, std::uint64_t seed);

/// Experimental: n * sum_i p_i phi_i with p normalized to sum to 1. Uniform
/// probabilities give back report.total.
double likelihood_weighted_total(const ShapleyReport& report, std::span<const double> probs);

}  // namespace shapunc
