#ifndef CVQT_DETAIL_QUADRATURE_HPP
#define CVQT_DETAIL_QUADRATURE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace cvqt::detail {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Golub-Welsch nodes (eigenvalues of the Jacobi matrix) with weights from the
// Christoffel function, w_i = mu0 / sum_k p_k(x_i)^2 over the orthonormal
// polynomials. Eigenvector-based weights lose all accuracy once they drop
// below the eigensolver noise floor (~1e-32), which poisons integrands whose
// polynomial factors grow as fast as the weights decay; the recurrence keeps
// full relative accuracy at any magnitude.
inline QuadratureRule golub_welsch(const Eigen::VectorXd& diag,
                                   const Eigen::VectorXd& offdiag, double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = diag(i);
        if (i + 1 < n) {
            jacobi(i, i + 1) = offdiag(i);
            jacobi(i + 1, i) = offdiag(i);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quadrature: Jacobi eigensolve failed");
    QuadratureRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = rule.nodes(i);
        double prev = 0.0, cur = 1.0;   // p_0 = 1 for the unit-mass measure
        double sum = 1.0, scale = 1.0;  // sum of squares, with overflow rescaling
        for (int k = 0; k + 1 < n; ++k) {
            const double next =
                ((x - diag(k)) * cur - (k > 0 ? offdiag(k - 1) : 0.0) * prev) /
                offdiag(k);
            prev = cur;
            cur = next;
            sum += cur * cur;
            if (sum > 1e280) {
                const double shrink = 1e-140;
                sum *= shrink * shrink;
                cur *= shrink;
                prev *= shrink;
                scale *= shrink;
            }
        }
        rule.weights(i) = mu0 * (scale * scale) / sum;
    }
    return rule;
}

// Weight exp(-x^2) on (-inf, inf); exact for polynomials up to degree 2n-1.
inline QuadratureRule gauss_hermite(int n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(n - 1);
    for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
    return golub_welsch(diag, off, std::sqrt(M_PI));
}

// Weight x^alpha exp(-x) on (0, inf), normalized so that sum(weights) = 1
// (i.e. the Gamma(alpha+1) mass is divided out).
inline QuadratureRule gauss_laguerre_unit(int n, double alpha) {
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(n - 1);
    for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k * (k + alpha));
    return golub_welsch(diag, off, 1.0);
}

} // namespace cvqt::detail

#endif
