#include "shapunc/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

namespace shapunc {

std::vector<double> shapley_from_cache(const SubsetEntropyCache& cache) {
    const int n = cache.dimension();
    // weight[s] = s! (n - s - 1)! / n! = (1/n) * prod_{t=1..s} t / (n - t)
    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
        double w = 1.0 / n;
        for (int t = 1; t <= s; ++t) w *= static_cast<double>(t) / static_cast<double>(n - t);
        weight[static_cast<std::size_t>(s)] = w;
    }

    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    const SubsetMask full = (SubsetMask{1} << n) - 1;
    for (SubsetMask s = 0; s < full; ++s) {
        const double hs = cache[s];
        const double w = weight[static_cast<std::size_t>(std::popcount(s))];
        for (int i = 0; i < n; ++i) {
            const SubsetMask bit = SubsetMask{1} << i;
            if (s & bit) continue;
            phi[static_cast<std::size_t>(i)] += w * (cache[s | bit] - hs);
        }
    }
    return phi;
}

ShapleyReport exact_shapley(const KernelMatrix& k, int max_exact_n) {
    const SubsetEntropyCache cache = build_cache(k, max_exact_n);
    ShapleyReport report;
    report.method = ShapleyMethod::exact;
    report.per_element = shapley_from_cache(cache);
    report.total = std::accumulate(report.per_element.begin(), report.per_element.end(), 0.0);
    return report;
}

ShapleyReport mc_shapley(const KernelMatrix& k, int permutations, std::uint64_t seed) {
    if (!k.psd_certified) throw ContractViolation("kernel matrix is not PSD-certified");
    if (permutations < 1) throw ValidationError("permutations must be >= 1");
    const Eigen::Index n = k.size();
    const auto un = static_cast<std::size_t>(n);

    std::vector<double> sum(un, 0.0);
    std::vector<double> sum_sq(un, 0.0);
    std::vector<Eigen::Index> order(un);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);

    Eigen::MatrixXd chol(n, n);  // lower factor of the current prefix, in permutation order
    const double half_log_2pie = 0.5 * kLog2PiE;

    for (int p = 0; p < permutations; ++p) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index m = 0; m < n; ++m) {
            const Eigen::Index dim = order[static_cast<std::size_t>(m)];
            // Row m of the factor: solve L y = k(prefix, dim), then the Schur
            // complement d = k(dim, dim) - |y|^2 is the conditional variance.
            double d = k.k(dim, dim);
            for (Eigen::Index a = 0; a < m; ++a) {
                double v = k.k(order[static_cast<std::size_t>(a)], dim);
                for (Eigen::Index b = 0; b < a; ++b) v -= chol(a, b) * chol(m, b);
                v /= chol(a, a);
                chol(m, a) = v;
                d -= v * v;
            }
            if (!(d > 0.0)) {
                throw ContractViolation("conditional variance is not positive; kernel is singular");
            }
            chol(m, m) = std::sqrt(d);
            const double gain = half_log_2pie + 0.5 * std::log(d);
            sum[static_cast<std::size_t>(dim)] += gain;
            sum_sq[static_cast<std::size_t>(dim)] += gain * gain;
        }
    }

    ShapleyReport report;
    report.method = ShapleyMethod::monte_carlo;
    report.per_element.resize(un);
    std::vector<double> stderr_(un, 0.0);
    const double count = static_cast<double>(permutations);
    for (std::size_t i = 0; i < un; ++i) {
        const double mean = sum[i] / count;
        report.per_element[i] = mean;
        if (permutations > 1) {
            const double var = std::max(0.0, (sum_sq[i] - count * mean * mean) / (count - 1.0));
            stderr_[i] = std::sqrt(var / count);
        }
    }
    report.mc_stderr = std::move(stderr_);
    report.total = std::accumulate(report.per_element.begin(), report.per_element.end(), 0.0);
    return report;
}

double likelihood_weighted_total(const ShapleyReport& report, std::span<const double> probs) {
    if (probs.size() != report.per_element.size()) {
        throw ValidationError("likelihood vector length does not match the report");
    }
    double mass = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("likelihoods must be >= 0");
        mass += p;
    }
    if (!(mass > 0.0)) throw ValidationError("likelihoods sum to zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) acc += probs[i] / mass * report.per_element[i];
    return static_cast<double>(probs.size()) * acc;
}

}  // namespace shapunc
