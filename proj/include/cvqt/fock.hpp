#ifndef CVQT_FOCK_HPP
#define CVQT_FOCK_HPP

#include "cvqt/gaussian.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

// Truncated number-basis engine for non-Gaussian states and operators.
// `cutoff` is the maximum retained photon number, so each mode carries
// cutoff+1 levels; multi-mode indices are row-major with mode 0 most
// significant. Truncation leakage of state builders is tracked as the norm
// deficit relative to the untruncated state.

namespace cvqt {

struct FockVector {
    int n_modes = 0;
    int cutoff = 0;
    Eigen::VectorXcd amps;
    double leakage = 0.0;

    int levels() const { return cutoff + 1; }
    Eigen::Index dim() const { return amps.size(); }
    double norm() const { return amps.norm(); }
    FockVector normalized() const;
};

struct FockOperator {
    int n_modes = 0;
    int cutoff = 0;
    Eigen::MatrixXcd mat;

    int levels() const { return cutoff + 1; }
    bool is_hermitian(double tol = 1e-12) const;
};

FockVector vacuum_fock(int n_modes, int cutoff);
FockVector basis_fock(std::span<const int> occupation, int cutoff);

// Single-mode ladder and quadrature matrices; x = (a + a^dag)/sqrt(2).
// [x, p] = i holds on the truncated space except in the top level.
Eigen::MatrixXcd annihilation_matrix(int cutoff);
Eigen::MatrixXcd creation_matrix(int cutoff);
Eigen::MatrixXcd quadrature_matrix(int cutoff, Axis which);

// Tensor `single` (acting on one mode) with identities on the others.
FockOperator embed(const Eigen::MatrixXcd& single, int mode, int n_modes, int cutoff);

// Applies a one- or two-mode matrix to a multi-mode vector without forming
// the embedded operator.
FockVector apply_single_mode(const FockVector& v, const Eigen::MatrixXcd& op, int mode);
FockVector apply_two_mode(const FockVector& v, const Eigen::MatrixXcd& op, int mode_a,
                          int mode_b);

// Unitaries of Gaussian operations on the truncated space, returned as one-
// or two-mode matrices for use with apply_single_mode / apply_two_mode / embed.
// Conventions match the symplectic builders: BS(T) sends a -> sqrt(T) a +
// sqrt(1-T) b, the two-mode squeezer a -> cosh(r) a + sinh(r) b^dag, and the
// squeezer x -> e^{-s} x. Squeezing kinds raise photon number; the builders
// estimate the ideal vacuum-output weight beyond the cutoff and reject
// parameters whose leakage exceeds `leakage_tol`.
FockOperator beamsplitter_fock(double transmittance, int cutoff,
                               double leakage_tol = 1e-6);
FockOperator two_mode_squeezer_fock(double r, int cutoff, double leakage_tol = 1e-6);
FockOperator squeezer_fock(double s, int cutoff, double leakage_tol = 1e-6);

// Two-mode squeezed vacuum with amplitudes tanh^n(r)/cosh(r) on |n,n>;
// leakage = tanh^{2(cutoff+1)}(r) is reported on the (unnormalized) result.
FockVector tmsv_fock(double r, int cutoff);

enum class Jump { Subtract, Add };

struct JumpResult {
    FockVector state;    // renormalized
    double weight = 0.0; // heralding weight ||O psi||^2 / ||psi||^2
};

JumpResult photon_jump(const FockVector& state, int mode, Jump kind);

// Reduced density matrix on the modes in `keep`, in the order listed.
Eigen::MatrixXcd partial_trace_fock(const FockVector& state, std::span<const int> keep);
Eigen::MatrixXcd partial_trace_fock(const Eigen::MatrixXcd& rho, int n_modes, int cutoff,
                                    std::span<const int> keep);

// Tr[rho sigma]; for pure-state density matrices this is |<psi|phi>|^2.
double overlap(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

// <m|D(alpha)|n> through the associated-Laguerre closed form. Throws if the
// Poisson tail of D(alpha)|0> beyond the cutoff exceeds leakage_tol.
Eigen::MatrixXcd displacement_matrix(std::complex<double> alpha, int cutoff,
                                     double leakage_tol = 1e-8);

// First and second quadrature moments of a Fock-represented state, in the
// same ordering and units as GaussianState. The cross-representation oracle.
struct FockMoments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cm;
};
FockMoments fock_moments(const FockVector& state);
FockMoments fock_moments(const Eigen::MatrixXcd& rho, int n_modes, int cutoff);

// Debug dump: magic "CVQTMAT1", int64 rows, int64 cols, then row-major
// (re, im) double pairs.
void dump_matrix(const std::string& path, const Eigen::MatrixXcd& mat);
Eigen::MatrixXcd load_matrix(const std::string& path);

} // namespace cvqt

#endif
