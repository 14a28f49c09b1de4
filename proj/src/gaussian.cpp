#include "cvqt/gaussian.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cvqt {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_mode_index(int mode, int n_modes) {
    if (mode < 0 || mode >= n_modes)
        throw std::out_of_range("mode index out of range");
}

void check_mode_pair(int a, int b, int n_modes) {
    check_mode_index(a, n_modes);
    check_mode_index(b, n_modes);
    if (a == b) throw std::out_of_range("mode indices must be distinct");
}

} // namespace

GaussianState::GaussianState(int modes, const Eigen::MatrixXd& covariance)
    : GaussianState(modes, covariance, Eigen::VectorXd::Zero(2 * modes)) {}

GaussianState::GaussianState(int modes, const Eigen::MatrixXd& covariance,
                             const Eigen::VectorXd& first_moments)
    : n_modes(modes) {
    require(modes > 0, "GaussianState: need at least one mode");
    require(covariance.rows() == 2 * modes && covariance.cols() == 2 * modes,
            "GaussianState: covariance must be 2N x 2N");
    require(first_moments.size() == 2 * modes, "GaussianState: mean must have length 2N");
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("GaussianState: covariance not symmetric");
    cm = 0.5 * (covariance + covariance.transpose());
    mean = first_moments;
}

GaussianState vacuum_state(int n_modes) {
    require(n_modes > 0, "vacuum_state: need at least one mode");
    return GaussianState(n_modes,
                         kVacuumVariance * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState thermal_state(double mean_photons) {
    require(mean_photons >= 0.0, "thermal_state: mean photon number must be >= 0");
    return GaussianState(1, (mean_photons + kVacuumVariance) * Eigen::Matrix2d::Identity());
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

SymplecticTransform::SymplecticTransform(int modes, const Eigen::MatrixXd& matrix)
    : n_modes(modes), mat(matrix) {
    require(modes > 0, "SymplecticTransform: need at least one mode");
    require(matrix.rows() == 2 * modes && matrix.cols() == 2 * modes,
            "SymplecticTransform: matrix must be 2N x 2N");
    const Eigen::MatrixXd omega = symplectic_form(modes);
    const double defect = (mat * omega * mat.transpose() - omega).cwiseAbs().maxCoeff();
    if (defect > 1e-10)
        throw std::invalid_argument("SymplecticTransform: S Omega S^T != Omega");
}

SymplecticTransform make_beamsplitter(double transmittance, int mode_a, int mode_b,
                                      int n_modes) {
    require(transmittance >= 0.0 && transmittance <= 1.0,
            "beamsplitter: transmittance must lie in [0, 1]");
    check_mode_pair(mode_a, mode_b, n_modes);
    const double c = std::sqrt(transmittance);
    const double s = std::sqrt(1.0 - transmittance);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    for (int q = 0; q < 2; ++q) {  // same mixing on x and p
        const int ia = 2 * mode_a + q, ib = 2 * mode_b + q;
        m(ia, ia) = c;
        m(ia, ib) = s;
        m(ib, ia) = -s;
        m(ib, ib) = c;
    }
    return SymplecticTransform(n_modes, m);
}

SymplecticTransform make_two_mode_squeezer(double gain, int mode_a, int mode_b,
                                           int n_modes) {
    require(gain >= 1.0, "two_mode_squeezer: intensity gain must be >= 1");
    check_mode_pair(mode_a, mode_b, n_modes);
    const double ch = std::sqrt(gain);        // cosh r
    const double sh = std::sqrt(gain - 1.0);  // sinh r
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const int xa = 2 * mode_a, pa = 2 * mode_a + 1;
    const int xb = 2 * mode_b, pb = 2 * mode_b + 1;
    m(xa, xa) = ch; m(xa, xb) = sh;
    m(pa, pa) = ch; m(pa, pb) = -sh;
    m(xb, xb) = ch; m(xb, xa) = sh;
    m(pb, pb) = ch; m(pb, pa) = -sh;
    return SymplecticTransform(n_modes, m);
}

SymplecticTransform make_squeezer(double s, Axis axis, int mode, int n_modes) {
    check_mode_index(mode, n_modes);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const double ex = std::exp(axis == Axis::X ? -s : s);
    m(2 * mode, 2 * mode) = ex;
    m(2 * mode + 1, 2 * mode + 1) = 1.0 / ex;
    return SymplecticTransform(n_modes, m);
}

SymplecticTransform make_rotation(double theta, int mode, int n_modes) {
    check_mode_index(mode, n_modes);
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    const double c = std::cos(theta), s = std::sin(theta);
    m(2 * mode, 2 * mode) = c;
    m(2 * mode, 2 * mode + 1) = s;
    m(2 * mode + 1, 2 * mode) = -s;
    m(2 * mode + 1, 2 * mode + 1) = c;
    return SymplecticTransform(n_modes, m);
}

SymplecticTransform compose(const SymplecticTransform& outer,
                            const SymplecticTransform& inner) {
    require(outer.n_modes == inner.n_modes, "compose: mode count mismatch");
    return SymplecticTransform(outer.n_modes, outer.mat * inner.mat);
}

GaussianState apply_symplectic(const SymplecticTransform& s, const GaussianState& state) {
    require(s.n_modes == state.n_modes, "apply_symplectic: mode count mismatch");
    return GaussianState(state.n_modes, s.mat * state.cm * s.mat.transpose(),
                         s.mat * state.mean);
}

std::vector<double> symplectic_spectrum_of(const Eigen::MatrixXd& cm) {
    if (cm.rows() != cm.cols() || cm.rows() % 2 != 0)
        throw std::invalid_argument("symplectic_spectrum: matrix must be square 2N x 2N");
    const int n = static_cast<int>(cm.rows()) / 2;
    const Eigen::MatrixXd omega = symplectic_form(n);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cm);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("symplectic_spectrum: eigensolve failed");
    std::vector<double> nus;
    nus.reserve(n);
    if (es.eigenvalues().minCoeff() > 0.0) {
        // Balanced route: i sqrt(cm) Omega sqrt(cm) is Hermitian with
        // eigenvalues +/- nu_k.
        const Eigen::MatrixXd sqrt_cm =
            es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
            es.eigenvectors().transpose();
        const Eigen::MatrixXd k = sqrt_cm * omega * sqrt_cm;  // antisymmetric
        Eigen::MatrixXcd herm = std::complex<double>(0.0, 1.0) * k;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(herm);
        if (hs.info() != Eigen::Success)
            throw std::runtime_error("symplectic_spectrum: Hermitian eigensolve failed");
        for (int i = n; i < 2 * n; ++i) nus.push_back(hs.eigenvalues()(i));
    } else {
        // Indefinite input (unphysical covariance): fall back to the
        // non-symmetric pencil Omega * cm, whose eigenvalues are +/- i nu_k.
        Eigen::EigenSolver<Eigen::MatrixXd> gs(omega * cm);
        if (gs.info() != Eigen::Success)
            throw std::runtime_error("symplectic_spectrum: eigensolve failed");
        std::vector<double> mags;
        for (int i = 0; i < 2 * n; ++i) mags.push_back(std::abs(gs.eigenvalues()(i).imag()));
        std::sort(mags.begin(), mags.end());
        for (int i = 0; i < n; ++i) {
            const double lo = mags[2 * i], hi = mags[2 * i + 1];
            if (hi - lo > 1e-9 * std::max(1.0, hi))
                throw std::runtime_error("symplectic_spectrum: eigenvalue pairing failed");
            nus.push_back(0.5 * (lo + hi));
        }
    }
    std::sort(nus.begin(), nus.end());
    return nus;
}

std::vector<double> symplectic_spectrum(const GaussianState& state) {
    return symplectic_spectrum_of(state.cm);
}

PhysicalityReport check_physical(const GaussianState& state) {
    const auto nus = symplectic_spectrum(state);
    PhysicalityReport report;
    report.least_symplectic_eigenvalue = nus.front();
    report.physical = nus.front() >= kVacuumVariance - kPhysicalTol;
    return report;
}

GaussianState partial_trace(const GaussianState& state, std::span<const int> keep) {
    require(!keep.empty(), "partial_trace: keep list must be nonempty");
    for (int m : keep) check_mode_index(m, state.n_modes);
    const int n = static_cast<int>(keep.size());
    Eigen::MatrixXd cm(2 * n, 2 * n);
    Eigen::VectorXd mean(2 * n);
    for (int i = 0; i < n; ++i) {
        mean.segment<2>(2 * i) = state.mean.segment<2>(2 * keep[i]);
        for (int j = 0; j < n; ++j)
            cm.block<2, 2>(2 * i, 2 * j) = state.cm.block<2, 2>(2 * keep[i], 2 * keep[j]);
    }
    return GaussianState(n, cm, mean);
}

double pt_least_eigenvalue(const GaussianState& state, std::span<const int> partition) {
    require(!partition.empty(), "pt_least_eigenvalue: partition must be nonempty");
    require(static_cast<int>(partition.size()) < state.n_modes,
            "pt_least_eigenvalue: partition must be a proper subset");
    for (int m : partition) check_mode_index(m, state.n_modes);
    Eigen::VectorXd flip = Eigen::VectorXd::Ones(state.dim());
    for (int m : partition) flip(2 * m + 1) = -1.0;
    const Eigen::MatrixXd pt_cm = flip.asDiagonal() * state.cm * flip.asDiagonal();
    return symplectic_spectrum_of(pt_cm).front();
}

GaussianState homodyne_condition(const GaussianState& state, int mode, Axis quadrature,
                                 double outcome) {
    require(state.n_modes >= 2, "homodyne_condition: need at least two modes");
    check_mode_index(mode, state.n_modes);
    const int nk = state.n_modes - 1;
    std::vector<int> keep;
    keep.reserve(nk);
    for (int m = 0; m < state.n_modes; ++m)
        if (m != mode) keep.push_back(m);

    const int q = 2 * mode + (quadrature == Axis::X ? 0 : 1);
    const double var_q = state.cm(q, q);
    if (var_q <= 0.0)
        throw std::runtime_error("homodyne_condition: measured quadrature has no variance");

    Eigen::MatrixXd cm(2 * nk, 2 * nk);
    Eigen::VectorXd cross(2 * nk);
    Eigen::VectorXd mean(2 * nk);
    for (int i = 0; i < nk; ++i) {
        mean.segment<2>(2 * i) = state.mean.segment<2>(2 * keep[i]);
        cross.segment<2>(2 * i) = state.cm.block<2, 1>(2 * keep[i], q);
        for (int j = 0; j < nk; ++j)
            cm.block<2, 2>(2 * i, 2 * j) = state.cm.block<2, 2>(2 * keep[i], 2 * keep[j]);
    }
    // Schur complement in the projection limit of an ideal quadrature
    // measurement: only the measured row/column survives the inverse.
    cm -= (cross * cross.transpose()) / var_q;
    mean += cross * ((outcome - state.mean(q)) / var_q);
    return GaussianState(nk, cm, mean);
}

GaussianState phase_insensitive_channel(const GaussianState& state, int mode,
                                        double eta, double n_thermal) {
    require(eta >= 0.0 && eta <= 1.0, "phase_insensitive_channel: eta must lie in [0, 1]");
    require(n_thermal >= 0.0, "phase_insensitive_channel: n_thermal must be >= 0");
    check_mode_index(mode, state.n_modes);
    Eigen::MatrixXd cm = state.cm;
    Eigen::VectorXd mean = state.mean;
    const double root_eta = std::sqrt(eta);
    for (int m = 0; m < state.n_modes; ++m) {
        if (m == mode) continue;
        cm.block<2, 2>(2 * mode, 2 * m) *= root_eta;
        cm.block<2, 2>(2 * m, 2 * mode) *= root_eta;
    }
    cm.block<2, 2>(2 * mode, 2 * mode) =
        eta * cm.block<2, 2>(2 * mode, 2 * mode) +
        (1.0 - eta) * (n_thermal + kVacuumVariance) * Eigen::Matrix2d::Identity();
    mean.segment<2>(2 * mode) *= root_eta;
    return GaussianState(state.n_modes, cm, mean);
}

GaussianState tmsv_cm(double r) {
    require(r >= 0.0, "tmsv_cm: squeezing parameter must be >= 0");
    const double a = 0.5 * std::cosh(2.0 * r);
    const double c = 0.5 * std::sinh(2.0 * r);
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(4, 4);
    cm.diagonal() << a, a, a, a;
    cm(0, 2) = cm(2, 0) = c;
    cm(1, 3) = cm(3, 1) = -c;
    return GaussianState(2, cm);
}

// -------------------------------------------------------------------------
// Three-mode standard form

GaussianState ThreeModeStandardForm::to_state() const {
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(6, 6);
    cm.diagonal() << a1, a1, a2, a2, a3, a3;
    const auto set_pair = [&cm](int i, int j, double ep, double em) {
        cm(2 * i, 2 * j) = cm(2 * j, 2 * i) = ep;
        cm(2 * i + 1, 2 * j + 1) = cm(2 * j + 1, 2 * i + 1) = em;
    };
    set_pair(0, 1, e12p, e12m);
    set_pair(0, 2, e13p, e13m);
    set_pair(1, 2, e23p, e23m);
    return GaussianState(3, cm);
}

namespace {

// x-sector and p-sector 3x3 matrices of a standard-form CM. Purity of the
// full state is equivalent to X * P = (1/4) I.
Eigen::Matrix3d sector_x(const ThreeModeStandardForm& f) {
    Eigen::Matrix3d x;
    x << f.a1, f.e12p, f.e13p,
         f.e12p, f.a2, f.e23p,
         f.e13p, f.e23p, f.a3;
    return x;
}

Eigen::Matrix3d sector_p(const ThreeModeStandardForm& f) {
    Eigen::Matrix3d p;
    p << f.a1, f.e12m, f.e13m,
         f.e12m, f.a2, f.e23m,
         f.e13m, f.e23m, f.a3;
    return p;
}

double purity_residual(const ThreeModeStandardForm& f) {
    return (sector_x(f) * sector_p(f) - 0.25 * Eigen::Matrix3d::Identity())
        .cwiseAbs()
        .maxCoeff();
}

// For the pair (j, k) with complementary local diagonal a_i, purity forces the
// two-mode reduction to have symplectic spectrum {a_i, 1/2}:
//   e+ e- = p  with  p = (a_i^2 + 1/4 - a_j^2 - a_k^2) / 2
//   e+^2 + e-^2 = s  with  s = ((a_j a_k)^2 + p^2 - a_i^2/4) / (a_j a_k).
// e+^2 and e-^2 are then roots of t^2 - s t + p^2 = 0; the sign pattern is a
// discrete branch choice resolved against global purity.
struct PairConstraint {
    double p = 0.0;
    double s = 0.0;
};

PairConstraint pair_constraint(double ai, double aj, double ak) {
    PairConstraint c;
    c.p = 0.5 * (ai * ai + 0.25 - aj * aj - ak * ak);
    c.s = ((aj * ak) * (aj * ak) + c.p * c.p - 0.25 * ai * ai) / (aj * ak);
    return c;
}

std::vector<std::pair<double, double>> pair_branches(const PairConstraint& c) {
    const double disc = std::max(0.0, c.s * c.s - 4.0 * c.p * c.p);
    const double root = std::sqrt(disc);
    const double t1 = std::max(0.0, 0.5 * (c.s + root));
    const double t2 = std::max(0.0, 0.5 * (c.s - root));
    std::vector<std::pair<double, double>> branches;
    for (double t_plus : {t1, t2}) {
        const double ep = std::sqrt(t_plus);
        if (ep < 1e-14) {
            const double other = std::sqrt(std::max(t1, t2));
            branches.emplace_back(0.0, other);
            branches.emplace_back(0.0, -other);
            continue;
        }
        const double em = c.p / ep;
        branches.emplace_back(ep, em);
        branches.emplace_back(-ep, -em);
    }
    return branches;
}

// Gauss-Newton polish of the six correlations against X P = I/4.
bool polish_standard_form(ThreeModeStandardForm& f, double tol) {
    const auto residual_vec = [](const ThreeModeStandardForm& g) {
        Eigen::Matrix3d r = sector_x(g) * sector_p(g) - 0.25 * Eigen::Matrix3d::Identity();
        return Eigen::Map<Eigen::VectorXd>(r.data(), 9).eval();
    };
    double* slots[6] = {&f.e12p, &f.e12m, &f.e13p, &f.e13m, &f.e23p, &f.e23m};
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::VectorXd r = residual_vec(f);
        if (r.cwiseAbs().maxCoeff() < tol) return true;
        Eigen::MatrixXd jac(9, 6);
        const double h = 1e-7;
        for (int c = 0; c < 6; ++c) {
            const double saved = *slots[c];
            *slots[c] = saved + h;
            jac.col(c) = (residual_vec(f) - r) / h;
            *slots[c] = saved;
        }
        const Eigen::VectorXd step =
            jac.colPivHouseholderQr().solve(-r);
        for (int c = 0; c < 6; ++c) *slots[c] += step(c);
        if (step.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    return residual_vec(f).cwiseAbs().maxCoeff() < tol;
}

} // namespace

ThreeModeStandardForm three_mode_standard_cm(double a1, double a2, double a3) {
    require(a1 >= kVacuumVariance && a2 >= kVacuumVariance && a3 >= kVacuumVariance,
            "three_mode_standard_cm: local diagonals must be >= 1/2");
    const double q1 = a1 - 0.5, q2 = a2 - 0.5, q3 = a3 - 0.5;
    const double slack = 1e-12 * std::max({1.0, q1, q2, q3});
    if (q1 > q2 + q3 + slack || q2 > q1 + q3 + slack || q3 > q1 + q2 + slack)
        throw std::invalid_argument(
            "three_mode_standard_cm: diagonals violate the purity triangle inequality");

    const PairConstraint c12 = pair_constraint(a3, a1, a2);
    const PairConstraint c13 = pair_constraint(a2, a1, a3);
    const PairConstraint c23 = pair_constraint(a1, a2, a3);

    ThreeModeStandardForm best;
    double best_residual = std::numeric_limits<double>::infinity();
    for (const auto& [e12p, e12m] : pair_branches(c12)) {
        if (e12p < 0.0) continue;  // canonical: x-correlations with mode 1 >= 0
        for (const auto& [e13p, e13m] : pair_branches(c13)) {
            if (e13p < 0.0) continue;
            for (const auto& [e23p, e23m] : pair_branches(c23)) {
                ThreeModeStandardForm f;
                f.a1 = a1; f.a2 = a2; f.a3 = a3;
                f.e12p = e12p; f.e12m = e12m;
                f.e13p = e13p; f.e13m = e13m;
                f.e23p = e23p; f.e23m = e23m;
                const double res = purity_residual(f);
                if (res < best_residual) {
                    best_residual = res;
                    best = f;
                }
            }
        }
    }

    if (!polish_standard_form(best, 1e-10)) {
        std::ostringstream msg;
        msg << "three_mode_standard_cm: purity solve did not converge, residual "
            << purity_residual(best);
        throw std::runtime_error(msg.str());
    }
    return best;
}

// -------------------------------------------------------------------------
// Teleportation-network resource state

GaussianState network_symmetric_cm(int receivers, double r1, double r2,
                                   double n1, double n2) {
    require(receivers >= 1, "network_symmetric_cm: need at least one receiver");
    require(n1 >= 1.0 && n2 >= 1.0, "network_symmetric_cm: thermal parameters must be >= 1");
    const int n = receivers + 1;

    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    cm(0, 0) = std::exp(2.0 * r1) * n1 / 2.0;   // momentum-squeezed sender input
    cm(1, 1) = std::exp(-2.0 * r1) * n1 / 2.0;
    for (int m = 1; m < n; ++m) {
        cm(2 * m, 2 * m) = std::exp(-2.0 * r2) * n2 / 2.0;  // position-squeezed
        cm(2 * m + 1, 2 * m + 1) = std::exp(2.0 * r2) * n2 / 2.0;
    }
    GaussianState state(n, cm);

    // Beam-splitter cascade distributing mode 0 evenly over all outputs:
    // B_{N-1,N}(acos 1/sqrt(2)) ... B_{0,1}(acos 1/sqrt(N+1)), rightmost first.
    for (int k = 0; k < receivers; ++k) {
        const double t = 1.0 / static_cast<double>(n - k);  // cos^2 theta
        state = apply_symplectic(make_beamsplitter(t, k, k + 1, n), state);
    }

    // The cascade leaves alternating signs on some outputs; flip those modes
    // (a pi rotation, local) so all x-correlations with the sender are >= 0
    // and modes 1..N become exactly permutation symmetric.
    Eigen::VectorXd flip = Eigen::VectorXd::Ones(2 * n);
    for (int m = 1; m < n; ++m) {
        if (state.cm(0, 2 * m) < 0.0) {
            flip(2 * m) = -1.0;
            flip(2 * m + 1) = -1.0;
        }
    }
    const Eigen::MatrixXd flipped = flip.asDiagonal() * state.cm * flip.asDiagonal();
    return GaussianState(n, flipped);
}

void to_json(nlohmann::json& j, const GaussianState& state) {
    std::vector<double> cm_flat(state.cm.size());
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cm_flat.data(), state.dim(), state.dim()) = state.cm;
    j = nlohmann::json{
        {"n_modes", state.n_modes},
        {"cm", cm_flat},
        {"mean", std::vector<double>(state.mean.data(), state.mean.data() + state.dim())},
    };
}

void from_json(const nlohmann::json& j, GaussianState& state) {
    const int n = j.at("n_modes").get<int>();
    const auto cm_flat = j.at("cm").get<std::vector<double>>();
    const auto mean_flat = j.at("mean").get<std::vector<double>>();
    if (static_cast<int>(cm_flat.size()) != 4 * n * n ||
        static_cast<int>(mean_flat.size()) != 2 * n)
        throw std::invalid_argument("GaussianState json: inconsistent dimensions");
    Eigen::MatrixXd cm =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>(cm_flat.data(), 2 * n, 2 * n);
    Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_flat.data(), 2 * n);
    state = GaussianState(n, cm, mean);
}

} // namespace cvqt
