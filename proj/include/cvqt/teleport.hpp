#ifndef CVQT_TELEPORT_HPP
#define CVQT_TELEPORT_HPP

#include "cvqt/gaussian.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

// Braunstein-Kimble coherent-state teleportation from two-mode Gaussian
// resources: fidelity, threshold criteria, counter-rotation, local-squeezing
// optimization and the two-receiver region scan. Mode 0 of a two-mode state
// is always the sender.

namespace cvqt {

// Second moments of the correlated quadratures x_- = (x1 - x2)/sqrt(2) and
// p_+ = (p1 + p2)/sqrt(2).
struct EprMoments {
    double vxm = 0.0;  // <x_-^2>
    double vpp = 0.0;  // <p_+^2>
    double cxp = 0.0;  // <x_- p_+> (symmetrized)
};

struct FidelityThresholds {
    static constexpr double classical = 0.5;
    static constexpr double no_cloning_gaussian = 2.0 / 3.0;
    static constexpr double no_cloning = 0.6826;  // unrestricted-operations reference
};
static_assert(FidelityThresholds::classical < FidelityThresholds::no_cloning_gaussian &&
              FidelityThresholds::no_cloning_gaussian < FidelityThresholds::no_cloning &&
              FidelityThresholds::no_cloning < 1.0);

EprMoments epr_moments(const GaussianState& two_mode);

// Unit-gain teleportation fidelity for coherent inputs, F = 1/sqrt(det Gamma)
// with Gamma = 2 sigma_in + Z A Z + B - Z C - C^T Z^T. Requires a physical
// two-mode resource.
double fidelity_cm(const GaussianState& two_mode);

// Same fidelity expressed through the correlated-quadrature moments.
double fidelity_from_moments(const EprMoments& m);

// Necessary condition for F > f at zero cross term: vxm * vpp < ((1-f)/2f)^2.
// Throws if the cross term is nonzero; apply counter_rotation first.
bool beats_threshold(const EprMoments& m, double f);

struct CounterRotation {
    double theta = 0.0;
    GaussianState state;
};

// Counter-rotates modes by (theta, -theta) so the output cross moment
// <x_- p_+> vanishes; the fidelity is invariant. When vxm == vpp the
// quarter-wave branch theta = pi/4 applies.
CounterRotation counter_rotation(const GaussianState& two_mode);

struct SqueezeOptions {
    double max_abs_squeeze = 3.0;
    int restarts = 8;
    double f_tol = 1e-8;
    std::uint64_t seed = 0x5eed5eedULL;
};

struct SqueezeOptimum {
    double fidelity = 0.0;
    double s_sender = 0.0;
    double s_receiver = 0.0;
    bool converged = true;
};

// Maximizes the pair fidelity over independent x/p-axis squeezings on the
// sender and receiver modes of the reduced two-mode state.
SqueezeOptimum optimize_local_squeezing(const GaussianState& state, int sender,
                                        int receiver, const SqueezeOptions& opts = {});

// Product of the four correlated-quadrature variances of two optimized pair
// states sharing the same sender. For pairs reduced from a common three-mode
// pure state under independent local x/p squeezings this is >= (1/16)^2.
double monogamy_product(const GaussianState& pair_ab, const GaussianState& pair_ac);

struct RegionCell {
    double c2 = 0.0;
    double c3 = 0.0;
    double f_ab = 0.0;
    double f_ac = 0.0;
    bool feasible = false;
};

struct RegionScanOptions {
    int grid_points = 201;
    double c_max = 2.5;
    bool optimize = true;
    unsigned threads = 0;  // 0 = hardware concurrency
    std::uint64_t seed = 1;
};

// Fidelity map over the (c2, c3) parameter plane of three-mode pure states
// with fixed a1, where a_j = 1/2 + c_j (a1 - 1/2). Cells outside the purity
// triangle are marked infeasible. Row-major in c2 then c3, deterministic.
std::vector<RegionCell> region_scan(double a1, const RegionScanOptions& opts = {});

// CSV columns: c2,c3,F_AB,F_AC,feasible; floats with 9 significant digits.
void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells);

} // namespace cvqt

#endif
