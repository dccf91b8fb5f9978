#include "shapunc/gaussian_entropy.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace shapunc {

double gaussian_entropy(const Eigen::MatrixXd& cov) {
    const Eigen::Index d = cov.rows();
    if (d == 0) return 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw ContractViolation("Cholesky factorization failed: covariance is not positive definite");
    }
    const auto& l = llt.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double pivot = l(i, i);
        if (!(pivot > 0.0)) throw ContractViolation("Cholesky pivot is not positive");
        log_det += 2.0 * std::log(pivot);
    }
    return 0.5 * (static_cast<double>(d) * kLog2PiE + log_det);
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, SubsetMask subset) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (subset >> i & 1U) idx.push_back(i);
    }
    Eigen::MatrixXd out(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
    }
    return out;
}

namespace {

void require_certified(const KernelMatrix& k) {
    if (!k.psd_certified) {
        throw ContractViolation("kernel matrix is not PSD-certified (min eigenvalue " +
                                std::to_string(k.min_eigenvalue) + ")");
    }
}

}  // namespace

double subset_entropy(const KernelMatrix& k, SubsetMask subset) {
    require_certified(k);
    const auto n = k.size();
    if (n < 64 && (subset >> n) != 0) {
        throw ValidationError("subset refers to a dimension outside the kernel");
    }
    if (subset == 0) return 0.0;
    return gaussian_entropy(principal_submatrix(k.k, subset));
}

double subset_entropy(const KernelMatrix& k, std::span<const int> dims) {
    SubsetMask mask = 0;
    for (int d : dims) {
        if (d < 0 || d >= k.size() || d >= 64) {
            throw ValidationError("dimension index " + std::to_string(d) + " out of range");
        }
        mask |= SubsetMask{1} << d;
    }
    return subset_entropy(k, mask);
}

double full_entropy(const KernelMatrix& k) {
    require_certified(k);
    return gaussian_entropy(k.k);
}

double raw_differential_entropy(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) <= 1e-12 * scale) return -std::numeric_limits<double>::infinity();
        if (ev(i) < 0.0) return std::numeric_limits<double>::quiet_NaN();
        log_det += std::log(ev(i));
    }
    return 0.5 * (static_cast<double>(m.rows()) * kLog2PiE + log_det);
}

SubsetEntropyCache build_cache(const KernelMatrix& k, int max_dimension) {
    require_certified(k);
    const int n = static_cast<int>(k.size());
    if (n > max_dimension || n > kMaxCacheDimension) {
        throw ValidationError("n = " + std::to_string(n) + " exceeds the exact-enumeration bound " +
                              std::to_string(std::min(max_dimension, kMaxCacheDimension)));
    }
    SubsetEntropyCache cache;
    cache.n_ = n;
    const SubsetMask count = SubsetMask{1} << n;
    cache.table_.resize(count);
    cache.table_[0] = 0.0;
    for (SubsetMask s = 1; s < count; ++s) {
        cache.table_[s] = gaussian_entropy(principal_submatrix(k.k, s));
    }
#ifndef NDEBUG
    // Conditioning cannot increase entropy: each marginal gain is at most that
    // of an independent standard dimension.
    for (SubsetMask s = 0; s < count; s += 1 + count / 64) {
        for (int i = 0; i < n; ++i) {
            if (s >> i & 1U) continue;
            const double gain = cache.table_[s | SubsetMask{1} << i] - cache.table_[s];
            if (gain > 0.5 * kLog2PiE + 1e-9) {
                throw ContractViolation("subset entropy gain exceeds the independent bound");
            }
        }
    }
#endif
    return cache;
}

}  // namespace shapunc
