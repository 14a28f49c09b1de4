#include "cvqt/nongaussian.hpp"

#include "cvqt/detail/parallel.hpp"
#include "cvqt/detail/quadrature.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace cvqt {

namespace {

using Complex = std::complex<double>;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

const char* op_name(ModeOp op) {
    switch (op) {
        case ModeOp::None: return "none";
        case ModeOp::Subtract: return "subtract";
        case ModeOp::Add: return "add";
    }
    return "?";
}

} // namespace

std::string OperationPattern::name() const {
    if (alice == ModeOp::None && receivers == ModeOp::None) return "none";
    if (receivers == ModeOp::None) return std::string(op_name(alice)) + "_a";
    if (alice == ModeOp::None) return std::string(op_name(receivers)) + "_bc";
    if (alice == receivers) return std::string(op_name(alice)) + "_abc";
    return std::string(op_name(alice)) + "_a_" + op_name(receivers) + "_bc";
}

OperationPattern OperationPattern::parse(const std::string& name) {
    for (ModeOp a : {ModeOp::None, ModeOp::Subtract, ModeOp::Add})
        for (ModeOp r : {ModeOp::None, ModeOp::Subtract, ModeOp::Add}) {
            OperationPattern p{a, r};
            if (p.name() == name) return p;
        }
    throw std::invalid_argument("OperationPattern: unknown pattern '" + name + "'");
}

std::vector<OperationPattern> fig5_patterns() {
    return {
        {ModeOp::Subtract, ModeOp::None},     {ModeOp::None, ModeOp::Subtract},
        {ModeOp::Subtract, ModeOp::Subtract}, {ModeOp::Add, ModeOp::None},
        {ModeOp::None, ModeOp::Add},          {ModeOp::Add, ModeOp::Add},
        {ModeOp::Subtract, ModeOp::Add},      {ModeOp::Add, ModeOp::Subtract},
    };
}

int required_cutoff(double r, double leakage_tol) {
    require(r >= 0.0, "required_cutoff: r must be >= 0");
    require(leakage_tol > 0.0, "required_cutoff: tolerance must be positive");
    if (r == 0.0) return 2;
    const double t = std::tanh(r);
    // tanh^{2(c+1)} <= tol
    const int c = static_cast<int>(std::ceil(std::log(leakage_tol) / (2.0 * std::log(t)))) - 1;
    return std::max(2, c);
}

FockVector build_three_mode_fock(double r, int cutoff, double leakage_tol) {
    require(r >= 0.0, "build_three_mode_fock: r must be >= 0");
    require(cutoff >= 2, "build_three_mode_fock: cutoff too small");
    const double tail = std::pow(std::tanh(r), 2.0 * (cutoff + 1));
    if (tail > leakage_tol)
        throw std::invalid_argument(
            "build_three_mode_fock: truncation leakage exceeds tolerance; raise cutoff");
    const int d = cutoff + 1;
    FockVector v;
    v.n_modes = 3;
    v.cutoff = cutoff;
    v.amps = Eigen::VectorXcd::Zero(Eigen::Index(d) * d * d);
    v.leakage = tail;
    // TMSV amplitude tanh^n/cosh on (A, aux); the 50:50 splitter scatters
    // |n>_aux |0> into sqrt(C(n, k)) 2^{-n/2} (-1)^{n-k} |k>_B |n-k>_C. The
    // alternating sign is a local pi rotation on C and is absorbed here so
    // the state is exactly symmetric under exchanging the receivers.
    const double t = std::tanh(r);
    double tmsv_amp = 1.0 / std::cosh(r);
    for (int n = 0; n < d; ++n) {
        double binom_sqrt = 1.0;  // sqrt(C(n, k)), updated along k
        const double scale = std::pow(0.5, 0.5 * n);
        for (int k = 0; k <= n; ++k) {
            if (k > 0) binom_sqrt *= std::sqrt((n - k + 1.0) / k);
            v.amps((Eigen::Index(n) * d + k) * d + (n - k)) =
                tmsv_amp * binom_sqrt * scale;
        }
        tmsv_amp *= t;
    }
    return v;
}

PatternResult apply_pattern(const FockVector& state, const OperationPattern& pattern) {
    require(state.n_modes == 3, "apply_pattern: need a three-mode state");
    PatternResult result;
    result.state = state;
    result.herald_weight = 1.0;
    const auto apply = [&result](int mode, ModeOp op) {
        if (op == ModeOp::None) return;
        const JumpResult jump = photon_jump(
            result.state, mode, op == ModeOp::Subtract ? Jump::Subtract : Jump::Add);
        result.state = jump.state;
        result.herald_weight *= jump.weight;
    };
    apply(0, pattern.alice);
    apply(1, pattern.receivers);
    apply(2, pattern.receivers);
    if (result.state.norm() <= 0.0)
        throw std::runtime_error("apply_pattern: pattern annihilates the state");
    result.state.amps /= result.state.norm();
    return result;
}

PureEnsemble pair_ensemble(const FockVector& state, std::span<const int> pair,
                           double weight_floor) {
    require(pair.size() == 2, "pair_ensemble: need exactly two modes");
    const int d = state.levels();
    std::vector<Eigen::Index> stride(state.n_modes);
    {
        Eigen::Index s = 1;
        for (int m = state.n_modes - 1; m >= 0; --m) {
            stride[m] = s;
            s *= d;
        }
    }
    std::vector<int> rest;
    for (int m = 0; m < state.n_modes; ++m)
        if (m != pair[0] && m != pair[1]) rest.push_back(m);
    Eigen::Index dim_rest = 1;
    for (std::size_t i = 0; i < rest.size(); ++i) dim_rest *= d;

    Eigen::MatrixXcd m(Eigen::Index(d) * d, dim_rest);
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb) {
            const Eigen::Index base = na * stride[pair[0]] + nb * stride[pair[1]];
            for (Eigen::Index rr = 0; rr < dim_rest; ++rr) {
                Eigen::Index rem = rr, off = 0;
                for (int pos = static_cast<int>(rest.size()) - 1; pos >= 0; --pos) {
                    off += (rem % d) * stride[rest[pos]];
                    rem /= d;
                }
                m(Eigen::Index(na) * d + nb, rr) = state.amps(base + off);
            }
        }

    Eigen::BDCSVD<Eigen::MatrixXcd> bdc(m, Eigen::ComputeThinU);
    const double norm2 = m.squaredNorm();
    require(norm2 > 0.0, "pair_ensemble: zero state");

    PureEnsemble out;
    out.cutoff = state.cutoff;
    for (Eigen::Index k = 0; k < bdc.singularValues().size(); ++k) {
        const double w = bdc.singularValues()(k) * bdc.singularValues()(k) / norm2;
        if (w < weight_floor) continue;
        out.weights.push_back(w);
        out.vectors.push_back(bdc.matrixU().col(k));
    }
    return out;
}

// -------------------------------------------------------------------------
// Teleportation-channel kernel
//
// F = (1/pi) Int d^2 l e^{-|l|^2} <D(conj l) x D(l)> = Tr[rho K]. The phase
// integral forces equal level shifts on both modes, so K is banded:
//   K[(n1+d, n2+d), (n1, n2)] = 2^{-(d+1)} Int t^d e^{-t}
//       lt_{n1}(t/2) lt_{n2}(t/2) dt / d!
// with lt the orthonormal associated Laguerre polynomials scaled to
// lt_0 = 1; the Gamma(d+1) mass is folded into the unit-weight rule.

namespace {

class BkKernel {
  public:
    explicit BkKernel(int cutoff) : cutoff_(cutoff) {
        const int d_levels = cutoff + 1;
        std::vector<Eigen::Triplet<double>> triplets;
        for (int shift = 0; shift <= cutoff; ++shift) {
            const int span = d_levels - shift;  // n in 0..span-1
            const auto rule = detail::gauss_laguerre_unit(d_levels + 2, shift);
            // lag(i, n) = lt_n(t_i / 2)
            Eigen::MatrixXd lag(rule.nodes.size(), span);
            for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
                const double x = 0.5 * rule.nodes(i);
                lag(i, 0) = 1.0;
                if (span > 1)
                    lag(i, 1) = (shift + 1.0 - x) / std::sqrt(shift + 1.0);
                for (int n = 2; n < span; ++n)
                    lag(i, n) = ((2.0 * (n - 1) + shift + 1.0 - x) * lag(i, n - 1) -
                                 std::sqrt((n - 1.0) * (n - 1.0 + shift)) * lag(i, n - 2)) /
                                std::sqrt(static_cast<double>(n) * (n + shift));
            }
            const double scale = std::pow(0.5, shift + 1.0);
            for (int n1 = 0; n1 < span; ++n1)
                for (int n2 = 0; n2 < span; ++n2) {
                    double acc = 0.0;
                    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
                        acc += rule.weights(i) * lag(i, n1) * lag(i, n2);
                    const double value = scale * acc;
                    const Eigen::Index col = Eigen::Index(n1) * d_levels + n2;
                    const Eigen::Index row =
                        Eigen::Index(n1 + shift) * d_levels + (n2 + shift);
                    triplets.emplace_back(row, col, value);
                    if (shift > 0) triplets.emplace_back(col, row, value);
                }
        }
        const Eigen::Index dim = Eigen::Index(d_levels) * d_levels;
        op_.resize(dim, dim);
        op_.setFromTriplets(triplets.begin(), triplets.end());
    }

    double expectation(const Eigen::VectorXcd& psi) const {
        const Eigen::VectorXd re = psi.real(), im = psi.imag();
        return re.dot(op_ * re) + im.dot(op_ * im);
    }

    int cutoff() const { return cutoff_; }

  private:
    int cutoff_;
    Eigen::SparseMatrix<double> op_;
};

// Immutable after construction; guarded build, concurrent reads.
const BkKernel& kernel_for(int cutoff) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<BkKernel>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(cutoff);
    if (it == cache.end())
        it = cache.emplace(cutoff, std::make_unique<BkKernel>(cutoff)).first;
    return *it->second;
}

} // namespace

double teleport_fidelity_fock(const PureEnsemble& resource) {
    require(!resource.weights.empty(), "teleport_fidelity_fock: empty ensemble");
    const BkKernel& kernel = kernel_for(resource.cutoff);
    double f = 0.0, total_weight = 0.0;
    for (std::size_t k = 0; k < resource.weights.size(); ++k) {
        f += resource.weights[k] * kernel.expectation(resource.vectors[k]);
        total_weight += resource.weights[k];
    }
    f /= total_weight;
    return std::clamp(f, 0.0, 1.0);
}

double teleport_fidelity_fock(const FockVector& two_mode) {
    require(two_mode.n_modes == 2, "teleport_fidelity_fock: need a two-mode state");
    PureEnsemble e;
    e.cutoff = two_mode.cutoff;
    e.weights.push_back(1.0);
    e.vectors.push_back(two_mode.normalized().amps);
    return teleport_fidelity_fock(e);
}

double teleport_fidelity_fock(const Eigen::MatrixXcd& rho_two_mode, int cutoff) {
    const Eigen::Index d2 = Eigen::Index(cutoff + 1) * (cutoff + 1);
    require(rho_two_mode.rows() == d2 && rho_two_mode.cols() == d2,
            "teleport_fidelity_fock: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_two_mode);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("teleport_fidelity_fock: density eigensolve failed");
    PureEnsemble e;
    e.cutoff = cutoff;
    const double total = es.eigenvalues().sum();
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double w = es.eigenvalues()(k) / total;
        if (w < 1e-14) continue;
        e.weights.push_back(w);
        e.vectors.push_back(es.eigenvectors().col(k));
    }
    return teleport_fidelity_fock(e);
}

double teleport_fidelity_grid(const PureEnsemble& resource, int nodes) {
    const int cutoff = resource.cutoff;
    const int d = cutoff + 1;
    if (nodes <= 0) nodes = 2 * cutoff + 8;
    const auto rule = detail::gauss_hermite(nodes);

    // F = (1/2 pi) Int du dv e^{-(u^2+v^2)/2} chi_E(-u, v, u, v); the
    // displacement Gaussians supply another e^{-(u^2+v^2)/2}, so the GH
    // weight is matched exactly and the residual integrand is polynomial.
    double total_weight = 0.0;
    for (double w : resource.weights) total_weight += w;

    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double u = rule.nodes(i);
        for (int j = 0; j < nodes; ++j) {
            const double v = rule.nodes(j);
            const Complex beta_b(-v / std::sqrt(2.0), u / std::sqrt(2.0));
            const Complex beta_a = std::conj(beta_b);
            const Eigen::MatrixXcd da = displacement_matrix(beta_a, cutoff, 1.0);
            const Eigen::MatrixXcd db = displacement_matrix(beta_b, cutoff, 1.0);
            double chi = 0.0;
            for (std::size_t k = 0; k < resource.weights.size(); ++k) {
                Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>
                    phi(resource.vectors[k].data(), d, d);
                const Complex val = (phi.conjugate().cwiseProduct(da * phi * db.transpose()))
                                        .sum();
                chi += resource.weights[k] * val.real();
            }
            acc += rule.weights(i) * rule.weights(j) * chi / total_weight *
                   std::exp(0.5 * (u * u + v * v));
        }
    }
    return acc / (2.0 * M_PI);
}

std::vector<Fig5Row> fig5_scan(std::span<const OperationPattern> patterns,
                               std::span<const double> r_grid, const Fig5Options& opts) {
    struct Task {
        OperationPattern pattern;
        double r;
    };
    std::vector<Task> tasks;
    for (const auto& p : patterns)
        for (double r : r_grid) tasks.push_back({p, r});
    std::vector<Fig5Row> rows(tasks.size());

    // Pre-build kernels serially so parallel workers only read the cache.
    {
        std::vector<int> cutoffs;
        for (double r : r_grid) {
            int c = std::max(opts.cutoff, required_cutoff(r, opts.leakage_tol));
            c = ((c + 7) / 8) * 8;  // quantize for kernel reuse
            cutoffs.push_back(c);
        }
        for (int c : cutoffs) kernel_for(c);
    }

    detail::parallel_for(
        tasks.size(),
        [&](std::size_t idx) {
            const Task& task = tasks[idx];
            Fig5Row& row = rows[idx];
            row.pattern = task.pattern.name();
            row.r = task.r;
            int cutoff = std::max(opts.cutoff, required_cutoff(task.r, opts.leakage_tol));
            cutoff = ((cutoff + 7) / 8) * 8;
            row.cutoff = cutoff;
            const FockVector base = build_three_mode_fock(task.r, cutoff, opts.leakage_tol);
            row.leakage = base.leakage;
            try {
                const PatternResult pat = apply_pattern(base, task.pattern);
                row.herald_weight = pat.herald_weight;
                const std::array<int, 2> ab{0, 1};
                row.fidelity = teleport_fidelity_fock(pair_ensemble(pat.state, ab));
            } catch (const std::runtime_error&) {
                row.herald_weight = 0.0;
                row.fidelity = std::numeric_limits<double>::quiet_NaN();
            }
        },
        opts.threads);
    return rows;
}

void write_fig5_csv(std::ostream& out, const std::vector<Fig5Row>& rows) {
    out << "pattern,r,F,herald_weight,cutoff,leakage\n";
    char buf[192];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%d,%.9g\n", r.pattern.c_str(),
                      r.r, r.fidelity, r.herald_weight, r.cutoff, r.leakage);
        out << buf;
    }
}

} // namespace cvqt
