#pragma once

// Differential entropy of a zero-mean Gaussian whose covariance is a kernel
// matrix, restricted to subsets of its dimensions. This is the coalition
// value function used by the Shapley engine.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shapunc/kernel_correlation.hpp"

namespace shapunc {

/// Bit i set means dimension i is in the subset.
using SubsetMask = std::uint64_t;

/// ln(2 pi e): twice the entropy of a standard univariate Gaussian.
inline const double kLog2PiE = std::log(2.0 * 3.14159265358979323846) + 1.0;

/// Upper bound on dimensions for exhaustive subset enumeration.
inline constexpr int kMaxCacheDimension = 24;

/// 0.5 * (d ln(2 pi e) + ln det cov) via Cholesky. Throws ContractViolation if
/// the matrix is not positive definite. Returns 0 for an empty matrix.
double gaussian_entropy(const Eigen::MatrixXd& cov);

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, SubsetMask subset);

/// Throws ContractViolation when k is not PSD-certified.
double subset_entropy(const KernelMatrix& k, SubsetMask subset);
double subset_entropy(const KernelMatrix& k, std::span<const int> dims);

double full_entropy(const KernelMatrix& k);

/// Entropy of an arbitrary symmetric matrix computed from its eigenvalues.
/// Returns -inf when the matrix is singular (smallest eigenvalue within
/// 1e-12 of zero, relative to the largest) and NaN when it is indefinite.
/// Diagnostic only; the scoring path never calls this.
double raw_differential_entropy(const Eigen::MatrixXd& m);

/// h(S) for every S in {0..n-1}, indexed by mask. h(empty) = 0.
class SubsetEntropyCache {
public:
    int dimension() const noexcept { return n_; }
    std::size_t size() const noexcept { return table_.size(); }
    double operator[](SubsetMask subset) const { return table_[subset]; }
    const std::vector<double>& table() const noexcept { return table_; }

private:
    friend SubsetEntropyCache build_cache(const KernelMatrix& k, int max_dimension);
    int n_ = 0;
    std::vector<double> table_;
};

/// Computes all 2^n subset entropies. Throws ValidationError if n > max_dimension.
SubsetEntropyCache build_cache(const KernelMatrix& k, int max_dimension = kMaxCacheDimension);

}  // namespace shapunc
