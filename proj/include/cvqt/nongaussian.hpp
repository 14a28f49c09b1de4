#ifndef CVQT_NONGAUSSIAN_HPP
#define CVQT_NONGAUSSIAN_HPP

#include "cvqt/fock.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Photon subtraction/addition on the three-mode Gaussian resource and the
// resulting teleportation fidelities. The receiver modes B and C always share
// the same operation; fidelities are heralded (per accepted event).

namespace cvqt {

enum class ModeOp { None, Subtract, Add };

struct OperationPattern {
    ModeOp alice = ModeOp::None;
    ModeOp receivers = ModeOp::None;  // applied to both B and C

    std::string name() const;
    static OperationPattern parse(const std::string& name);
};

// The eight nontrivial patterns plus the all-none Gaussian reference.
std::vector<OperationPattern> fig5_patterns();

// TMSV(r) on (A, aux) with aux split on a 50:50 beam splitter into (B, C).
// Modes ordered (A, B, C); unnormalized with the truncation tail reported as
// leakage. Throws when the tail exceeds leakage_tol.
FockVector build_three_mode_fock(double r, int cutoff, double leakage_tol = 1e-6);

// Smallest cutoff whose TMSV truncation tail stays below leakage_tol.
int required_cutoff(double r, double leakage_tol = 1e-6);

struct PatternResult {
    FockVector state;        // renormalized
    double herald_weight = 0.0;
};

PatternResult apply_pattern(const FockVector& state, const OperationPattern& pattern);

// Mixed two-mode state as a weighted pure ensemble (weights sum to 1).
struct PureEnsemble {
    int cutoff = 0;
    std::vector<double> weights;
    std::vector<Eigen::VectorXcd> vectors;  // dim (cutoff+1)^2, mode A major
};

// Schmidt decomposition of the reduction of `state` onto the two modes in
// `pair` (in order), discarding weights below `weight_floor`.
PureEnsemble pair_ensemble(const FockVector& state, std::span<const int> pair,
                           double weight_floor = 1e-14);

// Unit-gain teleportation fidelity for coherent inputs with an arbitrary
// two-mode resource (sender = first mode):
//   F = (1/pi) Int d^2 l e^{-|l|^2} chi_E(conj(l), l),
// evaluated through a precomputed operator kernel whose matrix elements are
// radial Gauss-Laguerre integrals, exact for truncated states. Results are
// clamped to [0, 1].
double teleport_fidelity_fock(const PureEnsemble& resource);
double teleport_fidelity_fock(const FockVector& two_mode);
double teleport_fidelity_fock(const Eigen::MatrixXcd& rho_two_mode, int cutoff);

// Direct Gauss-Hermite grid evaluation of the same integral; the slow
// independent reference used to pin the kernel and argument convention.
double teleport_fidelity_grid(const PureEnsemble& resource, int nodes = 0);

struct Fig5Row {
    std::string pattern;
    double r = 0.0;
    double fidelity = 0.0;     // NaN when the pattern annihilates the state
    double herald_weight = 0.0;
    int cutoff = 0;
    double leakage = 0.0;
};

struct Fig5Options {
    int cutoff = 24;              // raised per point when leakage demands it
    double leakage_tol = 1e-6;
    unsigned threads = 0;
};

// Fidelity of the (A, B) pair per (pattern, r); deterministic row order.
std::vector<Fig5Row> fig5_scan(std::span<const OperationPattern> patterns,
                               std::span<const double> r_grid,
                               const Fig5Options& opts = {});

// CSV columns: pattern,r,F,herald_weight,cutoff,leakage.
void write_fig5_csv(std::ostream& out, const std::vector<Fig5Row>& rows);

} // namespace cvqt

#endif
