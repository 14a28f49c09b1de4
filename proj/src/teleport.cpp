#include "cvqt/teleport.hpp"

#include "cvqt/detail/optimize.hpp"
#include "cvqt/detail/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cvqt {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void require_two_modes(const GaussianState& state, const char* who) {
    if (state.n_modes != 2) throw std::invalid_argument(std::string(who) + ": need exactly 2 modes");
}

} // namespace

EprMoments epr_moments(const GaussianState& two_mode) {
    require_two_modes(two_mode, "epr_moments");
    const Eigen::MatrixXd& s = two_mode.cm;
    EprMoments m;
    m.vxm = 0.5 * (s(0, 0) - 2.0 * s(0, 2) + s(2, 2));
    m.vpp = 0.5 * (s(1, 1) + 2.0 * s(1, 3) + s(3, 3));
    m.cxp = 0.5 * (s(0, 1) + s(0, 3) - s(2, 1) - s(2, 3));
    if (m.vxm <= 0.0 || m.vpp <= 0.0 ||
        m.vxm * m.vpp - m.cxp * m.cxp < -1e-12)
        throw std::runtime_error("epr_moments: moments violate Cauchy-Schwarz");
    return m;
}

double fidelity_from_moments(const EprMoments& m) {
    const double det = 1.0 + 2.0 * (m.vxm + m.vpp) +
                       4.0 * (m.vxm * m.vpp - m.cxp * m.cxp);
    return 1.0 / std::sqrt(det);
}

double fidelity_cm(const GaussianState& two_mode) {
    require_two_modes(two_mode, "fidelity_cm");
    if (!check_physical(two_mode).physical)
        throw std::invalid_argument("fidelity_cm: resource state is unphysical");
    const Eigen::Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    const Eigen::Matrix2d a = two_mode.block(0, 0);
    const Eigen::Matrix2d b = two_mode.block(1, 1);
    const Eigen::Matrix2d c = two_mode.block(0, 1);
    const Eigen::Matrix2d gamma = Eigen::Matrix2d::Identity() + z * a * z + b -
                                  z * c - c.transpose() * z.transpose();
    return 1.0 / std::sqrt(gamma.determinant());
}

bool beats_threshold(const EprMoments& m, double f) {
    require(f > 0.0 && f < 1.0, "beats_threshold: f must lie in (0, 1)");
    if (std::abs(m.cxp) > 1e-10)
        throw std::invalid_argument(
            "beats_threshold: cross moment nonzero; apply counter_rotation first");
    const double bound = (1.0 - f) / (2.0 * f);
    return m.vxm * m.vpp < bound * bound;
}

CounterRotation counter_rotation(const GaussianState& two_mode) {
    const EprMoments m = epr_moments(two_mode);
    CounterRotation out;
    if (std::abs(m.cxp) < 1e-15) {
        out.theta = 0.0;
        out.state = two_mode;
        return out;
    }
    // (x_-, p_+) rotates as a plane vector under (theta, -theta); the cross
    // moment vanishes at 2 theta = atan2(2 cxp, vxm - vpp).
    out.theta = 0.5 * std::atan2(2.0 * m.cxp, m.vxm - m.vpp);
    const auto rot = compose(make_rotation(out.theta, 0, 2),
                             make_rotation(-out.theta, 1, 2));
    out.state = apply_symplectic(rot, two_mode);
    return out;
}

namespace {

// Moments of the squeezed pair as closed forms; valid for any two-mode CM.
EprMoments squeezed_moments(const Eigen::Matrix4d& cm, double sa, double sb) {
    const double exa = std::exp(-sa), epa = std::exp(sa);
    const double exb = std::exp(-sb), epb = std::exp(sb);
    EprMoments m;
    m.vxm = 0.5 * (cm(0, 0) * exa * exa - 2.0 * cm(0, 2) * exa * exb +
                   cm(2, 2) * exb * exb);
    m.vpp = 0.5 * (cm(1, 1) * epa * epa + 2.0 * cm(1, 3) * epa * epb +
                   cm(3, 3) * epb * epb);
    m.cxp = 0.5 * (cm(0, 1) + cm(0, 3) * exa * epb - cm(2, 1) * exb * epa -
                   cm(2, 3));
    return m;
}

double squeezed_fidelity(const Eigen::Matrix4d& cm, double sa, double sb) {
    return fidelity_from_moments(squeezed_moments(cm, sa, sb));
}

} // namespace

SqueezeOptimum optimize_local_squeezing(const GaussianState& state, int sender,
                                        int receiver, const SqueezeOptions& opts) {
    require(sender != receiver, "optimize_local_squeezing: need distinct modes");
    const std::array<int, 2> pair{sender, receiver};
    const GaussianState reduced = partial_trace(state, pair);
    const Eigen::Matrix4d cm = reduced.cm;
    const double lim = opts.max_abs_squeeze;

    SqueezeOptimum best;
    best.fidelity = squeezed_fidelity(cm, 0.0, 0.0);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> start_dist(-0.5 * lim, 0.5 * lim);
    for (int restart = 0; restart <= opts.restarts; ++restart) {
        double sa = restart == 0 ? 0.0 : start_dist(rng);
        double sb = restart == 0 ? 0.0 : start_dist(rng);
        double f = squeezed_fidelity(cm, sa, sb);
        bool converged = false;
        for (int sweep = 0; sweep < 80; ++sweep) {
            auto [sa_new, neg_fa] = detail::golden_minimize(
                [&](double s) { return -squeezed_fidelity(cm, s, sb); }, -lim, lim, 1e-9);
            sa = sa_new;
            auto [sb_new, neg_fb] = detail::golden_minimize(
                [&](double s) { return -squeezed_fidelity(cm, sa, s); }, -lim, lim, 1e-9);
            sb = sb_new;
            const double f_new = -neg_fb;
            if (f_new - f < opts.f_tol) {
                f = std::max(f, f_new);
                converged = true;
                break;
            }
            f = f_new;
        }
        if (f > best.fidelity) {
            best.fidelity = f;
            best.s_sender = sa;
            best.s_receiver = sb;
            best.converged = converged;
        }
    }
    return best;
}

double monogamy_product(const GaussianState& pair_ab, const GaussianState& pair_ac) {
    const EprMoments mab = epr_moments(pair_ab);
    const EprMoments mac = epr_moments(pair_ac);
    if (std::abs(mab.cxp) > 1e-8 || std::abs(mac.cxp) > 1e-8)
        throw std::invalid_argument("monogamy_product: cross moments must vanish");
    return mab.vxm * mab.vpp * mac.vxm * mac.vpp;
}

std::vector<RegionCell> region_scan(double a1, const RegionScanOptions& opts) {
    require(a1 > kVacuumVariance, "region_scan: a1 must exceed 1/2");
    require(opts.grid_points >= 2, "region_scan: need at least a 2x2 grid");
    const int n = opts.grid_points;
    const double step = opts.c_max / (n - 1);
    const double q1 = a1 - 0.5;

    std::vector<RegionCell> cells(static_cast<std::size_t>(n) * n);
    detail::parallel_for(
        cells.size(),
        [&](std::size_t idx) {
            const int i = static_cast<int>(idx) / n;
            const int j = static_cast<int>(idx) % n;
            RegionCell& cell = cells[idx];
            cell.c2 = i * step;
            cell.c3 = j * step;
            const bool feasible = std::abs(cell.c2 - cell.c3) <= 1.0 + 1e-12 &&
                                  cell.c2 + cell.c3 >= 1.0 - 1e-12;
            cell.feasible = feasible;
            if (!feasible) return;
            const double a2 = 0.5 + cell.c2 * q1;
            const double a3 = 0.5 + cell.c3 * q1;
            const GaussianState state = three_mode_standard_cm(a1, a2, a3).to_state();
            if (opts.optimize) {
                SqueezeOptions sq;
                sq.seed = opts.seed * 0x9e3779b97f4a7c15ULL + idx;
                cell.f_ab = optimize_local_squeezing(state, 0, 1, sq).fidelity;
                cell.f_ac = optimize_local_squeezing(state, 0, 2, sq).fidelity;
            } else {
                const std::array<int, 2> ab{0, 1}, ac{0, 2};
                cell.f_ab = fidelity_cm(partial_trace(state, ab));
                cell.f_ac = fidelity_cm(partial_trace(state, ac));
            }
        },
        opts.threads);
    return cells;
}

void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells) {
    out << "c2,c3,F_AB,F_AC,feasible\n";
    char buf[128];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%d\n", c.c2, c.c3,
                      c.f_ab, c.f_ac, c.feasible ? 1 : 0);
        out << buf;
    }
}

} // namespace cvqt
