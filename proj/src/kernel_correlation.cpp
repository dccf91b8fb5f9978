#include "shapunc/kernel_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace shapunc {

CorrelationMatrix symmetrize(const EntailmentMatrix& e) {
    Eigen::MatrixXd c = 0.5 * e.p + 0.5 * e.p.transpose();
    c = 0.5 * (c + c.transpose()).eval();  // exact symmetry
    c.diagonal().setOnes();
    return CorrelationMatrix{std::move(c)};
}

CorrelationMatrix make_correlation(Eigen::MatrixXd c) {
    if (c.rows() != c.cols() || c.rows() == 0) {
        throw ValidationError("correlation matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        if (c(i, i) != 1.0) throw ValidationError("correlation diagonal must be 1");
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            if (!(c(i, j) >= 0.0 && c(i, j) <= 1.0)) {
                throw ValidationError("correlation entries must lie in [0, 1]");
            }
            if (c(i, j) != c(j, i)) throw ValidationError("correlation matrix must be symmetric");
        }
    }
    return CorrelationMatrix{std::move(c)};
}

double kernel_value(KernelKind kind, double correlation) {
    switch (kind) {
        case KernelKind::gaussian: {
            const double d = 1.0 - correlation;
            return std::exp(-0.5 * d * d);
        }
    }
    throw ValidationError("unknown kernel");
}

KernelMatrix kernelize(const CorrelationMatrix& c, double beta, KernelKind kind, double tol) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw ValidationError("beta must lie in (0, 1], got " + std::to_string(beta));
    }
    const Eigen::Index n = c.size();
    KernelMatrix out;
    out.beta = beta;
    out.k.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = beta * kernel_value(kind, c.c(i, j));
            out.k(i, j) = v;
            out.k(j, i) = v;
        }
    }
    const PsdCheck check = is_psd(out.k, tol);
    out.psd_certified = check.psd;
    out.min_eigenvalue = check.min_eigenvalue;
    return out;
}

PsdCheck is_psd(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw ValidationError("is_psd: matrix is not square");
    if (m.size() == 0) return {true, 0.0};
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("is_psd: matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ContractViolation("eigen-solve did not converge");
    const double min_eig = solver.eigenvalues().minCoeff();
    return {min_eig >= -tol, min_eig};
}

double safe_beta(const CorrelationMatrix& c, double requested_beta, KernelKind kind, double tol) {
    if (!(requested_beta > 0.0 && requested_beta <= 1.0)) {
        throw ValidationError("beta must lie in (0, 1], got " + std::to_string(requested_beta));
    }
    const double floor_beta = 1.0 / static_cast<double>(c.size() + 1);
    for (double beta = requested_beta; beta > floor_beta; beta *= 0.5) {
        if (kernelize(c, beta, kind, tol).psd_certified) return beta;
    }
    return std::min(requested_beta, floor_beta);
}

KernelMatrix certified_kernel(const CorrelationMatrix& c, double requested_beta, KernelKind kind,
                              double tol) {
    KernelMatrix k = kernelize(c, safe_beta(c, requested_beta, kind, tol), kind, tol);
    if (!k.psd_certified) {
        throw ContractViolation("kernel at beta = " + std::to_string(k.beta) +
                                " has eigenvalue " + std::to_string(k.min_eigenvalue));
    }
    return k;
}

}  // namespace shapunc
