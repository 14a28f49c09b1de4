#ifndef CVQT_CLONING_HPP
#define CVQT_CLONING_HPP

#include "cvqt/fock.hpp"
#include "cvqt/gaussian.hpp"

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

// Optimal symmetric 1->N cloning of coherent states: the fidelity objective
// and its maximization, the Heisenberg-picture cloner, the teleportation-
// based cloner that reproduces it exactly, and the Gaussian resource state
// of the teleporter circuit.

namespace cvqt {

// Linear map on mode operators: out_i = sum_k u(i,k) a_k + v(i,k) a_k^dag.
// Canonical commutators of the outputs are validated on demand.
struct BogoliubovMap {
    std::vector<std::string> basis;  // labels of the underlying modes a_k
    Eigen::MatrixXcd u;              // outputs x basis
    Eigen::MatrixXcd v;

    Eigen::Index outputs() const { return u.rows(); }
    Eigen::Index basis_size() const { return u.cols(); }

    // Max deviation of [out_i, out_j^dag] from delta_ij and [out_i, out_j]
    // from zero, evaluated from the coefficients.
    double commutator_defect() const;
    void validate(double tol = 1e-12) const;

    // Rewrites the outputs of `outer` (whose basis ops are the outputs of
    // `inner`) over the basis of `inner`.
    static BogoliubovMap compose(const BogoliubovMap& outer, const BogoliubovMap& inner);

    // Quadrature-space matrix of a complete map (outputs == basis size).
    SymplecticTransform to_symplectic() const;
};

// Matrix elements <m|exp(-c x^2)|n> in the number basis, via Gauss-Hermite
// quadrature with oscillator wavefunctions (vacuum variance 1/2). Exact for
// the truncated space up to roundoff; vanishes for odd m+n by parity.
Eigen::MatrixXd expquad_single(double c, int cutoff);

struct CloneObjective {
    int clones = 0;
    int cutoff = 0;
    Eigen::MatrixXd op;  // real symmetric, eigenvalues in (0, 1)
};

// Single fidelity term exp(-(P_j^2 + (sum_{k != j} Q_k)^2)/2) on the N-mode
// space; j is zero-based. The quadrature sum is rotated onto one mode by a
// balanced splitter cascade, so the factor reduces to exp(-(N-1)/2 x^2).
Eigen::MatrixXd clone_term(int clones, int cutoff, int j);

// The averaged objective (1/N) sum_j of the terms above. Its top eigenvalue
// over N-mode states is the optimal symmetric cloning fidelity.
CloneObjective clone_objective(int clones, int cutoff);

struct CloneConvergence {
    int clones = 0;
    std::vector<int> cutoffs;
    std::vector<double> fidelities;
    double gaussian_value = 2.0 / 3.0;
    double reference = 0.6826;
};

struct CloneOptimum {
    double fidelity = 0.0;        // at the requested cutoff
    Eigen::VectorXd rho_t;        // top eigenvector (real)
    CloneConvergence report;      // fidelities along the cutoff ladder
};

// Top eigenvalue of the objective, with the convergence ladder over
// {16, 24, 32, 40} capped at `cutoff`. Monotone nondecreasing in cutoff.
CloneOptimum optimal_clone_fidelity(int clones, int cutoff);

// Top eigenvalue alone (dense solve at moderate dimension, power iteration
// beyond).
double clone_optimum_value(int clones, int cutoff);

// Per-output fidelities F_j = <term_j> for an N-mode resource state; the
// mean equals the objective expectation.
std::vector<double> clone_fidelity_for(const FockVector& rho_t, int clones);
std::vector<double> clone_fidelity_for(const Eigen::MatrixXcd& rho_t, int clones,
                                       int cutoff);

// Heisenberg-picture cloner outputs over the basis {a_in, a_0, b_1..b_N}
// (the ancilla column is identically zero). Verified against the simplified
// form a_in - P_j/sqrt(2) + i/sqrt(2) sum_{k != j} Q_k.
BogoliubovMap bogoliubov_cloner(int clones);

// Teleportation-based outputs c_j + a_in - c_0^dag over the same basis;
// equals bogoliubov_cloner coefficient-exactly, with zero ancilla columns.
BogoliubovMap bogoliubov_teleporter(int clones);

// Resource map of the teleporter circuit: modes c_0..c_N over {a_0, b_1..b_N}.
BogoliubovMap teleporter_resource_map(int clones);

// Gaussian (N+1)-mode resource state of the teleporter circuit with vacuum
// inputs; mode 0 is the sender. Pure, receiver-permutation symmetric.
GaussianState phi_resource_gaussian(int clones);

// Output fidelity evaluated through the Heisenberg output mode: the vacuum
// projector of the Bogoliubov combination, integrated over its characteristic
// function. `row` selects the output of `map`; modes of `rho_t` line up with
// the trailing basis columns, all other basis modes are vacuum. Test oracle
// for the direct objective expectation.
double clone_fidelity_char(const BogoliubovMap& map, int row, const FockVector& rho_t,
                           int nodes = 48);

void to_json(nlohmann::json& j, const CloneConvergence& report);

} // namespace cvqt

#endif
