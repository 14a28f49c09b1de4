#ifndef CVQT_NETWORK_HPP
#define CVQT_NETWORK_HPP

#include "cvqt/gaussian.hpp"

#include <iosfwd>
#include <span>
#include <vector>

// Teleportation-network fidelities and capabilities for (N+1)-mode symmetric
// states, and the capability monogamy-inequality analysis.

namespace cvqt {

struct NetworkParams {
    int receivers = 1;     // N
    double n1 = 1.0;       // thermal parameter of the momentum-squeezed mode
    double n2 = 1.0;       // thermal parameter of the position-squeezed modes
    double r1 = 0.0;
    double r2 = 0.0;
    double gain = 1.0;     // feedforward gain g for the assisting receivers

    double rbar() const { return 0.5 * (r1 + r2); }
    double dshift() const { return 0.5 * (r2 - r1); }
};

// Least symplectic eigenvalue of the partially transposed effective
// sender-receiver pair in the assisted protocol (the conditional two-mode
// state left after the other receivers measure their momenta); the optimal
// assisted fidelity is 1/(1 + 2 nu).
double nu_assisted(int receivers, double n1, double n2, double rbar);
// Same for the plain reduced sender-receiver pair under standard two-mode
// teleportation.
double nu_pair(int receivers, double n1, double n2, double rbar);

// The conditional (sender, receiver-1) covariance realized by the assists:
// ideal momentum homodyne on receivers 2..N. Its PT least eigenvalue equals
// nu_assisted; for N = 1 this is the plain two-mode state.
GaussianState assisted_pair_cm(const GaussianState& network_state);

inline double fidelity_from_nu(double nu) { return 1.0 / (1.0 + 2.0 * nu); }

// Quantum advantage over the classical bound: C = max{0, 2F - 1}.
double capability(double fidelity);

struct PureCapabilities {
    double collective = 0.0;
    double pair = 0.0;
};

// Closed forms for pure symmetric states (n1 = n2 = 1).
PureCapabilities capabilities_pure(int receivers, double rbar);

struct MonogamyGap {
    double gap = 0.0;  // C_collective^alpha - N * C_pair^alpha
    bool violated = false;
};

MonogamyGap monogamy_gap(int receivers, double rbar, double alpha);

// Max over the r-list of |C - quadratic expansion| / r^3, per capability;
// returns the larger of the collective/pair constants. Inputs must satisfy
// rbar <= 0.2.
double asymptotic_check(int receivers, std::span<const double> rbars);

// Output-noise fidelity of the assisted protocol at the given gain and
// squeezing split: x_out = x_1 + x_in - x_0, p_out = p_in + p_0 + p_1
// + g sum_{j>=2} p_j, evaluated from the network CM.
double protocol_fidelity(const NetworkParams& params);

struct ProtocolOptimum {
    double fidelity = 0.0;
    double gain = 0.0;
    double dshift = 0.0;
    bool converged = true;
};

// Numeric optimum of protocol_fidelity over g in [0, 3] and d in [-2, 2]
// at fixed (N, n1, n2, rbar); matches fidelity_from_nu(nu_assisted(...)).
ProtocolOptimum optimize_protocol(int receivers, double n1, double n2, double rbar);

struct CapabilityReport {
    int receivers = 0;
    double rbar = 0.0;
    double alpha = 1.0;
    double f_collective = 0.0;
    double f_pair = 0.0;
    double c_collective = 0.0;
    double c_pair = 0.0;
    double gap = 0.0;
    double ratio = 0.0;  // C_pair / C_collective, 0 when undefined
};

CapabilityReport capability_report(int receivers, double rbar, double alpha);

// CSV columns: N,rbar,alpha,C_collective,C_pair,gap,ratio.
void write_network_csv(std::ostream& out, const std::vector<CapabilityReport>& rows);

// Log-spaced grid, endpoints included.
std::vector<double> log_grid(double lo, double hi, int points);

std::vector<CapabilityReport> ratio_limit_scan(int receivers,
                                               std::span<const double> rbars,
                                               double alpha = 1.0);

} // namespace cvqt

#endif
