#pragma once

// Symmetric correlation from directed entailment probabilities, and the
// beta-scaled kernel transform that makes it a valid (PSD) correlation matrix.

#include <Eigen/Dense>

#include "shapunc/core_data.hpp"

namespace shapunc {

/// c(i, j) = (P(i => j) + P(j => i)) / 2, unit diagonal, exactly symmetric.
struct CorrelationMatrix {
    Eigen::MatrixXd c;

    Eigen::Index size() const noexcept { return c.rows(); }
};

struct KernelMatrix {
    Eigen::MatrixXd k;
    double beta = 0.0;
    bool psd_certified = false;
    double min_eigenvalue = 0.0;

    Eigen::Index size() const noexcept { return k.rows(); }
};

struct PsdCheck {
    bool psd = false;
    double min_eigenvalue = 0.0;
};

inline constexpr double kDefaultPsdTolerance = 1e-10;

CorrelationMatrix symmetrize(const EntailmentMatrix& e);

/// Wraps an already symmetric matrix with unit diagonal and entries in [0, 1].
/// Throws ValidationError otherwise.
CorrelationMatrix make_correlation(Eigen::MatrixXd c);

/// Gaussian kappa applied to the distance 1 - c.
double kernel_value(KernelKind kind, double correlation);

/// Unit diagonal, beta * kappa(1 - c(i, j)) off the diagonal. The smallest
/// eigenvalue is always computed; psd_certified compares it against tol.
KernelMatrix kernelize(const CorrelationMatrix& c, double beta,
                       KernelKind kind = KernelKind::gaussian,
                       double tol = kDefaultPsdTolerance);

/// Smallest eigenvalue via a symmetric eigen-solve. Throws ValidationError if
/// the input is not symmetric within 1e-12.
PsdCheck is_psd(const Eigen::MatrixXd& m, double tol = kDefaultPsdTolerance);

/// Largest beta in {requested, requested/2, requested/4, ...} whose kernel is
/// PSD within tol, floored at 1/(n+1). Gershgorin bounds every eigenvalue of the
/// beta = 1 kernel by n, so the floor is always PSD.
double safe_beta(const CorrelationMatrix& c, double requested_beta,
                 KernelKind kind = KernelKind::gaussian, double tol = kDefaultPsdTolerance);

/// safe_beta followed by kernelize. Throws ContractViolation if the chosen
/// kernel is not certified, which would indicate a numerical fault.
KernelMatrix certified_kernel(const CorrelationMatrix& c, double requested_beta,
                              KernelKind kind = KernelKind::gaussian,
                              double tol = kDefaultPsdTolerance);

}  // namespace shapunc
