#ifndef CVQT_GAUSSIAN_HPP
#define CVQT_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <span>
#include <vector>

// Covariance-matrix representation of Gaussian states and the symplectic
// machinery acting on them. Conventions, fixed project-wide:
//   [x, p] = i, vacuum variance 1/2, quadrature ordering (x1, p1, x2, p2, ...).

namespace cvqt {

enum class Axis { X, P };

inline constexpr double kVacuumVariance = 0.5;
// A state is physical iff every symplectic eigenvalue >= 1/2 - kPhysicalTol.
inline constexpr double kPhysicalTol = 1e-9;

struct GaussianState {
    int n_modes = 0;
    Eigen::MatrixXd cm;    // 2N x 2N, symmetrized on construction
    Eigen::VectorXd mean;  // 2N, defaults to zero

    GaussianState() = default;
    GaussianState(int modes, const Eigen::MatrixXd& covariance);
    GaussianState(int modes, const Eigen::MatrixXd& covariance,
                  const Eigen::VectorXd& first_moments);

    int dim() const { return 2 * n_modes; }
    // Block of the covariance matrix between modes i and j (2x2).
    Eigen::Matrix2d block(int i, int j) const { return cm.block<2, 2>(2 * i, 2 * j); }
};

GaussianState vacuum_state(int n_modes);
GaussianState thermal_state(double mean_photons);

struct SymplecticTransform {
    int n_modes = 0;
    Eigen::MatrixXd mat;  // 2N x 2N with S Omega S^T = Omega

    SymplecticTransform() = default;
    SymplecticTransform(int modes, const Eigen::MatrixXd& matrix);
};

// The symplectic form, block-diagonal in (0 1; -1 0).
Eigen::MatrixXd symplectic_form(int n_modes);

// Passive beam splitter with transmittance T in [0, 1] on (mode_a, mode_b):
// x_a' = sqrt(T) x_a + sqrt(1-T) x_b, x_b' = -sqrt(1-T) x_a + sqrt(T) x_b,
// identically on p. T = 1 is the identity.
SymplecticTransform make_beamsplitter(double transmittance, int mode_a, int mode_b,
                                      int n_modes);
// Two-mode squeezer with intensity gain G >= 1 (a -> sqrt(G) a + sqrt(G-1) b^dag).
SymplecticTransform make_two_mode_squeezer(double gain, int mode_a, int mode_b,
                                           int n_modes);
// Single-mode squeezer; axis X means x -> e^{-s} x, p -> e^{s} p.
SymplecticTransform make_squeezer(double s, Axis axis, int mode, int n_modes);
// Phase rotation: x' = x cos(t) + p sin(t), p' = p cos(t) - x sin(t).
SymplecticTransform make_rotation(double theta, int mode, int n_modes);

// rhs acts first: (compose(a, b)).mat == a.mat * b.mat.
SymplecticTransform compose(const SymplecticTransform& outer,
                            const SymplecticTransform& inner);

GaussianState apply_symplectic(const SymplecticTransform& s, const GaussianState& state);

struct PhysicalityReport {
    bool physical = false;
    double least_symplectic_eigenvalue = 0.0;
};

PhysicalityReport check_physical(const GaussianState& state);

// Symplectic eigenvalues of the covariance matrix, ascending, one per mode.
std::vector<double> symplectic_spectrum(const GaussianState& state);
std::vector<double> symplectic_spectrum_of(const Eigen::MatrixXd& cm);

// Reduced state on the given modes, in the order listed.
GaussianState partial_trace(const GaussianState& state, std::span<const int> keep);

// Least symplectic eigenvalue after partial transposition (p -> -p) on the
// modes in `partition` (a nonempty proper subset).
double pt_least_eigenvalue(const GaussianState& state, std::span<const int> partition);

// Conditional state after an ideal homodyne measurement of one quadrature.
// The conditional CM is outcome-independent; the conditional mean is evaluated
// at the given outcome (default 0). The measured mode is removed.
GaussianState homodyne_condition(const GaussianState& state, int mode, Axis quadrature,
                                 double outcome = 0.0);

// Phase-insensitive Gaussian channel on one mode: blocks scale by eta with
// (1-eta)(n_thermal + 1/2) I noise added; cross blocks scale by sqrt(eta).
GaussianState phase_insensitive_channel(const GaussianState& state, int mode,
                                        double eta, double n_thermal);

// Two-mode squeezed vacuum: A = B = cosh(2r)/2 I, C = sinh(2r)/2 diag(1,-1).
GaussianState tmsv_cm(double r);

// Pure three-mode state in standard form: diagonal 2x2 blocks a_i I and
// correlation blocks diag(e_ij+, e_ij-); all x-p cross entries vanish.
struct ThreeModeStandardForm {
    double a1 = 0.5, a2 = 0.5, a3 = 0.5;
    double e12p = 0, e12m = 0;
    double e13p = 0, e13m = 0;
    double e23p = 0, e23m = 0;

    GaussianState to_state() const;
};

// Local diagonals must satisfy the purity triangle: with q_i = a_i - 1/2,
// |q2 - q3| <= q1 <= q2 + q3 (equivalently |c2-c3| <= 1 <= c2+c3 for
// c_j = q_j/q_1). Correlations are recovered numerically from the six
// pure-state constraints; throws std::invalid_argument on infeasible input
// and std::runtime_error (with residual) if the solve fails.
ThreeModeStandardForm three_mode_standard_cm(double a1, double a2, double a3);

// (N+1)-mode symmetric entangled state: one momentum-squeezed mode (r1, n1)
// distributed over N position-squeezed modes (r2, n2) by a beam-splitter
// cascade. Mode 0 is the sender; modes 1..N are permutation symmetric.
// Thermal inputs have <x^2> = <p^2> = n/2, so n = 1 is vacuum.
GaussianState network_symmetric_cm(int receivers, double r1, double r2,
                                   double n1, double n2);

void to_json(nlohmann::json& j, const GaussianState& state);
void from_json(const nlohmann::json& j, GaussianState& state);

} // namespace cvqt

#endif
