#include "cvqt/network.hpp"

#include "cvqt/detail/optimize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace cvqt {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_params(int receivers, double n1, double n2) {
    require(receivers >= 1, "network: need at least one receiver");
    require(n1 >= 1.0 && n2 >= 1.0, "network: thermal parameters must be >= 1");
}

} // namespace

double nu_assisted(int receivers, double n1, double n2, double rbar) {
    check_params(receivers, n1, n2);
    const double num = (receivers + 1.0) * n1 * n2;
    const double den = 2.0 * std::exp(4.0 * rbar) + (receivers - 1.0) * n1 / n2;
    return 0.5 * std::sqrt(num / den);
}

double nu_pair(int receivers, double n1, double n2, double rbar) {
    check_params(receivers, n1, n2);
    const double inner =
        n2 / (receivers + 1.0) *
        (2.0 * n1 * std::exp(-4.0 * rbar) + (receivers - 1.0) * n2);
    return 0.5 * std::sqrt(inner);
}

GaussianState assisted_pair_cm(const GaussianState& network_state) {
    require(network_state.n_modes >= 2, "assisted_pair_cm: need sender and a receiver");
    GaussianState state = network_state;
    while (state.n_modes > 2) state = homodyne_condition(state, 2, Axis::P);
    return state;
}

double capability(double fidelity) {
    require(fidelity >= 0.0 && fidelity <= 1.0, "capability: fidelity must lie in [0, 1]");
    return std::max(0.0, 2.0 * fidelity - 1.0);
}

PureCapabilities capabilities_pure(int receivers, double rbar) {
    check_params(receivers, 1.0, 1.0);
    const double n = receivers;
    PureCapabilities c;
    c.collective =
        2.0 / (1.0 + std::sqrt((n + 1.0) / (2.0 * std::exp(4.0 * rbar) + n - 1.0))) - 1.0;
    c.pair =
        2.0 / (1.0 + std::sqrt((2.0 * std::exp(-4.0 * rbar) + n - 1.0) / (n + 1.0))) - 1.0;
    return c;
}

MonogamyGap monogamy_gap(int receivers, double rbar, double alpha) {
    require(alpha > 0.0, "monogamy_gap: alpha must be positive");
    const PureCapabilities c = capabilities_pure(receivers, rbar);
    MonogamyGap g;
    g.gap = std::pow(c.collective, alpha) - receivers * std::pow(c.pair, alpha);
    g.violated = g.gap < 0.0;
    return g;
}

double asymptotic_check(int receivers, std::span<const double> rbars) {
    const double n = receivers;
    double worst = 0.0;
    for (double r : rbars) {
        require(r > 0.0 && r <= 0.2, "asymptotic_check: rbar must lie in (0, 0.2]");
        const PureCapabilities c = capabilities_pure(receivers, r);
        const double linear = 2.0 * r / (n + 1.0);
        const double quad = 4.0 * (n - 1.0) * r * r / ((n + 1.0) * (n + 1.0));
        const double dev_coll = std::abs(c.collective - (linear + quad)) / (r * r * r);
        const double dev_pair = std::abs(c.pair - (linear - quad)) / (r * r * r);
        worst = std::max({worst, dev_coll, dev_pair});
    }
    return worst;
}

double protocol_fidelity(const NetworkParams& params) {
    check_params(params.receivers, params.n1, params.n2);
    const int n = params.receivers;
    const GaussianState state =
        network_symmetric_cm(n, params.r1, params.r2, params.n1, params.n2);
    const Eigen::MatrixXd& cm = state.cm;
    const double g = params.gain;

    // Noise quadratures of the displaced output: n_x = x_1 - x_0 and
    // n_p = p_0 + p_1 + g sum_{j>=2} p_j. They commute, so the output is the
    // input displaced by classical Gaussian noise with covariance N and
    // F = 1 / sqrt(det(I + N)).
    Eigen::VectorXd wx = Eigen::VectorXd::Zero(state.dim());
    Eigen::VectorXd wp = Eigen::VectorXd::Zero(state.dim());
    wx(2) = 1.0;   // x_1
    wx(0) = -1.0;  // -x_0
    wp(1) = 1.0;   // p_0
    wp(3) = 1.0;   // p_1
    for (int j = 2; j <= n; ++j) wp(2 * j + 1) = g;

    const double nxx = wx.dot(cm * wx);
    const double npp = wp.dot(cm * wp);
    const double nxp = wx.dot(cm * wp);
    const double det = (1.0 + nxx) * (1.0 + npp) - nxp * nxp;
    return 1.0 / std::sqrt(det);
}

ProtocolOptimum optimize_protocol(int receivers, double n1, double n2, double rbar) {
    check_params(receivers, n1, n2);
    ProtocolOptimum best;
    const auto fidelity_at = [&](double d, double g) {
        NetworkParams p;
        p.receivers = receivers;
        p.n1 = n1;
        p.n2 = n2;
        p.r1 = rbar - d;
        p.r2 = rbar + d;
        p.gain = g;
        return protocol_fidelity(p);
    };
    const auto best_gain = [&](double d) {
        if (receivers == 1) return std::make_pair(0.0, -fidelity_at(d, 0.0));
        return detail::golden_minimize([&](double g) { return -fidelity_at(d, g); }, 0.0,
                                       3.0, 1e-11);
    };
    auto [d_opt, neg_f] = detail::golden_minimize(
        [&](double d) { return best_gain(d).second; }, -2.0, 2.0, 1e-11);
    best.dshift = d_opt;
    best.gain = best_gain(d_opt).first;
    best.fidelity = -neg_f;
    return best;
}

CapabilityReport capability_report(int receivers, double rbar, double alpha) {
    CapabilityReport rep;
    rep.receivers = receivers;
    rep.rbar = rbar;
    rep.alpha = alpha;
    rep.f_collective = fidelity_from_nu(nu_assisted(receivers, 1.0, 1.0, rbar));
    rep.f_pair = fidelity_from_nu(nu_pair(receivers, 1.0, 1.0, rbar));
    const PureCapabilities c = capabilities_pure(receivers, rbar);
    rep.c_collective = c.collective;
    rep.c_pair = c.pair;
    rep.gap = monogamy_gap(receivers, rbar, alpha).gap;
    rep.ratio = c.collective > 0.0 ? c.pair / c.collective : 0.0;
    return rep;
}

void write_network_csv(std::ostream& out, const std::vector<CapabilityReport>& rows) {
    out << "N,rbar,alpha,C_collective,C_pair,gap,ratio\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.receivers,
                      r.rbar, r.alpha, r.c_collective, r.c_pair, r.gap, r.ratio);
        out << buf;
    }
}

std::vector<double> log_grid(double lo, double hi, int points) {
    require(lo > 0.0 && hi > lo && points >= 2, "log_grid: bad range");
    std::vector<double> grid(points);
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) grid[i] = lo * std::exp(i * step);
    grid.back() = hi;
    return grid;
}

std::vector<CapabilityReport> ratio_limit_scan(int receivers,
                                               std::span<const double> rbars,
                                               double alpha) {
    std::vector<CapabilityReport> rows;
    rows.reserve(rbars.size());
    for (double r : rbars) rows.push_back(capability_report(receivers, r, alpha));
    return rows;
}

} // namespace cvqt
