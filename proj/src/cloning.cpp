#include "cvqt/cloning.hpp"

#include "cvqt/detail/quadrature.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace cvqt {

namespace {

using Complex = std::complex<double>;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

Eigen::Index pow_int(int base, int exp) {
    Eigen::Index d = 1;
    for (int i = 0; i < exp; ++i) d *= base;
    return d;
}

} // namespace

double BogoliubovMap::commutator_defect() const {
    const Eigen::MatrixXcd uu = u * u.adjoint();
    const Eigen::MatrixXcd vv = v * v.adjoint();
    const Eigen::MatrixXcd uv = u * v.transpose();
    double defect =
        (uu - vv - Eigen::MatrixXcd::Identity(outputs(), outputs())).cwiseAbs().maxCoeff();
    defect = std::max(defect, (uv - uv.transpose()).cwiseAbs().maxCoeff());
    return defect;
}

void BogoliubovMap::validate(double tol) const {
    if (commutator_defect() > tol)
        throw std::runtime_error("BogoliubovMap: canonical commutators violated");
}

BogoliubovMap BogoliubovMap::compose(const BogoliubovMap& outer,
                                     const BogoliubovMap& inner) {
    require(outer.basis_size() == inner.outputs(),
            "BogoliubovMap::compose: basis/output mismatch");
    BogoliubovMap out;
    out.basis = inner.basis;
    out.u = outer.u * inner.u + outer.v * inner.v.conjugate();
    out.v = outer.u * inner.v + outer.v * inner.u.conjugate();
    return out;
}

SymplecticTransform BogoliubovMap::to_symplectic() const {
    require(outputs() == basis_size(), "BogoliubovMap: map must be complete");
    const int n = static_cast<int>(outputs());
    Eigen::MatrixXd s(2 * n, 2 * n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < n; ++k) {
            const Complex us = u(r, k), vs = v(r, k);
            s(2 * r, 2 * k) = (us + vs).real();
            s(2 * r, 2 * k + 1) = -(us - vs).imag();
            s(2 * r + 1, 2 * k) = (us + vs).imag();
            s(2 * r + 1, 2 * k + 1) = (us - vs).real();
        }
    return SymplecticTransform(n, s);
}

Eigen::MatrixXd expquad_single(double c, int cutoff) {
    require(c >= 0.0, "expquad_single: exponent coefficient must be >= 0");
    const int d = cutoff + 1;
    if (c == 0.0) return Eigen::MatrixXd::Identity(d, d);
    // <m|e^{-c x^2}|n> = (1+c)^{-1/2} Int h_m(y/s) h_n(y/s) e^{-y^2} dy with
    // s = sqrt(1+c) and h_n the normalized Hermite functions (weight removed).
    const int nodes = cutoff + 12;
    const auto rule = detail::gauss_hermite(nodes);
    const double scale = std::sqrt(1.0 + c);
    Eigen::MatrixXd h(nodes, d);
    for (int i = 0; i < nodes; ++i) {
        const double x = rule.nodes(i) / scale;
        h(i, 0) = std::pow(M_PI, -0.25);
        if (d > 1) h(i, 1) = std::sqrt(2.0) * x * h(i, 0);
        for (int n = 2; n < d; ++n)
            h(i, n) = std::sqrt(2.0 / n) * x * h(i, n - 1) -
                      std::sqrt((n - 1.0) / n) * h(i, n - 2);
    }
    Eigen::MatrixXd out(d, d);
    for (int m = 0; m < d; ++m)
        for (int n = m; n < d; ++n) {
            double acc = 0.0;
            if ((m + n) % 2 == 0)  // odd m+n vanishes by parity
                for (int i = 0; i < nodes; ++i) acc += rule.weights(i) * h(i, m) * h(i, n);
            out(m, n) = acc / scale;
            out(n, m) = out(m, n);
        }
    return out;
}

namespace {

// exp(-c p^2) from exp(-c x^2) by the quarter-wave phase conjugation
// p = R^dag x R with R = diag((-i)^n); elements pick up i^{m-n} and stay real.
Eigen::MatrixXd expquad_momentum(double c, int cutoff) {
    Eigen::MatrixXd m = expquad_single(c, cutoff);
    for (int i = 0; i <= cutoff; ++i)
        for (int j = 0; j <= cutoff; ++j)
            if ((i - j) % 4 != 0) m(i, j) = -m(i, j);  // nonzero entries have i-j even
    return m;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXd embed_real(const Eigen::MatrixXd& single, int mode, int n_modes) {
    const Eigen::Index d = single.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    for (int m = 0; m < n_modes; ++m)
        out = kron(out, m == mode ? single
                                  : Eigen::MatrixXd::Identity(d, d).eval());
    return out;
}

// Real Fock matrix of the beam splitter a_i -> cos(t) a_i + sin(t) a_j on two
// modes (i first factor).
Eigen::MatrixXd beamsplitter_real(double theta, int cutoff) {
    const int d = cutoff + 1;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d * d, d * d);
    // generator a_i^dag a_j - a_j^dag a_i (real antisymmetric)
    for (int mi = 0; mi < d; ++mi)
        for (int mj = 0; mj < d; ++mj) {
            if (mi + 1 < d && mj > 0) {
                const double w = std::sqrt((mi + 1.0) * mj);
                g((mi + 1) * d + (mj - 1), mi * d + mj) += w;
            }
            if (mi > 0 && mj + 1 < d) {
                const double w = std::sqrt(mi * (mj + 1.0));
                g((mi - 1) * d + (mj + 1), mi * d + mj) -= w;
            }
        }
    g *= theta;
    // exp of antisymmetric real matrix via the skew-symmetric eigensolve
    Eigen::MatrixXcd herm = Complex(0.0, -1.0) * g.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("beamsplitter_real: eigensolve failed");
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
    const Eigen::MatrixXcd u =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return u.real();
}

// Passive cascade V on the `others` modes (global indices) of an N-mode space
// with V^dag Q_{others[0]} V = (1/sqrt(M)) sum_k Q_{others[k]}.
Eigen::MatrixXd symmetric_combiner(const std::vector<int>& others, int n_modes,
                                   int cutoff) {
    const int m = static_cast<int>(others.size());
    const Eigen::Index dim = pow_int(cutoff + 1, n_modes);
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(dim, dim);
    for (int k = 1; k < m; ++k) {
        const double phi = std::asin(1.0 / std::sqrt(static_cast<double>(m - k + 1)));
        const Eigen::MatrixXd bs2 = beamsplitter_real(phi, cutoff);
        // embed the two-mode matrix on (others[0], others[k])
        const int a = others[0], b = others[k];
        Eigen::MatrixXd embedded = Eigen::MatrixXd::Zero(dim, dim);
        const Eigen::Index d = cutoff + 1;
        std::vector<Eigen::Index> stride(n_modes);
        {
            Eigen::Index s = 1;
            for (int mm = n_modes - 1; mm >= 0; --mm) {
                stride[mm] = s;
                s *= d;
            }
        }
        for (Eigen::Index base = 0; base < dim; ++base) {
            const int na = static_cast<int>(base / stride[a]) % static_cast<int>(d);
            const int nb = static_cast<int>(base / stride[b]) % static_cast<int>(d);
            if (na != 0 || nb != 0) continue;
            for (Eigen::Index ra = 0; ra < d; ++ra)
                for (Eigen::Index rb = 0; rb < d; ++rb)
                    for (Eigen::Index ca = 0; ca < d; ++ca)
                        for (Eigen::Index cb = 0; cb < d; ++cb) {
                            const double w = bs2(ra * d + rb, ca * d + cb);
                            if (w == 0.0) continue;
                            embedded(base + ra * stride[a] + rb * stride[b],
                                     base + ca * stride[a] + cb * stride[b]) = w;
                        }
        }
        v = v * embedded;
    }
    return v;
}

} // namespace

Eigen::MatrixXd clone_term(int clones, int cutoff, int j) {
    require(clones >= 2, "clone_term: need at least two clones");
    require(j >= 0 && j < clones, "clone_term: output index out of range");
    require(cutoff >= 2, "clone_term: cutoff too small");
    const Eigen::MatrixXd exp_p = expquad_momentum(0.5, cutoff);
    if (clones == 2) {
        const Eigen::MatrixXd exp_q = expquad_single(0.5, cutoff);
        return j == 0 ? kron(exp_p, exp_q) : kron(exp_q, exp_p);
    }
    std::vector<int> others;
    for (int k = 0; k < clones; ++k)
        if (k != j) others.push_back(k);
    // sum of the other quadratures -> sqrt(N-1) Q on others[0]
    const Eigen::MatrixXd combiner = symmetric_combiner(others, clones, cutoff);
    const Eigen::MatrixXd exp_qsum_local =
        embed_real(expquad_single(0.5 * (clones - 1.0), cutoff), others[0], clones);
    const Eigen::MatrixXd exp_qsum =
        combiner.transpose() * exp_qsum_local * combiner;
    return embed_real(exp_p, j, clones) * exp_qsum;
}

CloneObjective clone_objective(int clones, int cutoff) {
    CloneObjective obj;
    obj.clones = clones;
    obj.cutoff = cutoff;
    obj.op = clone_term(clones, cutoff, 0);
    for (int j = 1; j < clones; ++j) obj.op += clone_term(clones, cutoff, j);
    obj.op /= static_cast<double>(clones);
    obj.op = 0.5 * (obj.op + obj.op.transpose()).eval();
    return obj;
}

namespace {

std::pair<double, Eigen::VectorXd> top_eigenpair(const Eigen::MatrixXd& m) {
    if (m.rows() <= 1100) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("optimal_clone_fidelity: eigensolve failed");
        const Eigen::Index last = m.rows() - 1;
        return {es.eigenvalues()(last), es.eigenvectors().col(last)};
    }
    // Power iteration; the objective is positive with a simple top eigenvalue.
    Eigen::VectorXd v = Eigen::VectorXd::Constant(m.rows(), 1.0 / std::sqrt(m.rows()));
    double lambda = 0.0;
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd w = m * v;
        const double next = v.dot(w);
        w.normalize();
        if (std::abs(next - lambda) < 1e-12 && it > 10) {
            lambda = next;
            v = w;
            break;
        }
        lambda = next;
        v = w;
    }
    return {lambda, v};
}

} // namespace

double clone_optimum_value(int clones, int cutoff) {
    return top_eigenpair(clone_objective(clones, cutoff).op).first;
}

CloneOptimum optimal_clone_fidelity(int clones, int cutoff) {
    require(clones >= 2, "optimal_clone_fidelity: need at least two clones");
    CloneOptimum out;
    out.report.clones = clones;
    std::vector<int> ladder;
    for (int c : {16, 24, 32, 40})
        if (c < cutoff) ladder.push_back(c);
    ladder.push_back(cutoff);
    for (int c : ladder) {
        const CloneObjective obj = clone_objective(clones, c);
        auto [lambda, vec] = top_eigenpair(obj.op);
        out.report.cutoffs.push_back(c);
        out.report.fidelities.push_back(lambda);
        if (c == cutoff) {
            out.fidelity = lambda;
            out.rho_t = vec;
        }
    }
    return out;
}

std::vector<double> clone_fidelity_for(const FockVector& rho_t, int clones) {
    require(rho_t.n_modes == clones, "clone_fidelity_for: mode count mismatch");
    const double norm2 = rho_t.amps.squaredNorm();
    require(norm2 > 0.0, "clone_fidelity_for: zero state");
    std::vector<double> f(clones);
    for (int j = 0; j < clones; ++j) {
        const Eigen::MatrixXd term = clone_term(clones, rho_t.cutoff, j);
        const Complex val = rho_t.amps.dot(term.cast<Complex>() * rho_t.amps);
        f[j] = val.real() / norm2;
    }
    return f;
}

std::vector<double> clone_fidelity_for(const Eigen::MatrixXcd& rho_t, int clones,
                                       int cutoff) {
    require(rho_t.rows() == pow_int(cutoff + 1, clones),
            "clone_fidelity_for: dimension mismatch");
    std::vector<double> f(clones);
    for (int j = 0; j < clones; ++j) {
        const Eigen::MatrixXd term = clone_term(clones, cutoff, j);
        f[j] = (term.cast<Complex>() * rho_t).trace().real();
    }
    return f;
}

// -------------------------------------------------------------------------
// Heisenberg-picture maps. Basis ordering: {a_in, a_0, b_1, ..., b_N}.

namespace {

std::vector<std::string> clone_basis(int clones) {
    std::vector<std::string> basis{"a_in", "a_0"};
    for (int k = 1; k <= clones; ++k) basis.push_back("b_" + std::to_string(k));
    return basis;
}

// Resource modes a_1..a_N over the b modes (identity on a_in and a_0).
// a_1 is the collective amplified mode, a_j (j >= 2) difference modes.
BogoliubovMap psi_resource_map(int clones) {
    const int n = clones;
    BogoliubovMap m;
    m.basis = clone_basis(n);
    const Eigen::Index cols = n + 2;
    m.u = Eigen::MatrixXcd::Zero(cols, cols);
    m.v = Eigen::MatrixXcd::Zero(cols, cols);
    m.u(0, 0) = 1.0;  // a_in
    m.u(1, 1) = 1.0;  // a_0
    const double root_nm1 = std::sqrt(n - 1.0);
    for (int k = 0; k < n; ++k) {
        m.u(2, 2 + k) = n / (2.0 * root_nm1) / std::sqrt(static_cast<double>(n));
        m.v(2, 2 + k) = (n - 2.0) / (2.0 * root_nm1) / std::sqrt(static_cast<double>(n));
    }
    for (int j = 2; j <= n; ++j) {
        m.u(1 + j, 2 + (j - 2)) = std::sqrt((n - j + 1.0) / (n - j + 2.0));
        const double w = -std::sqrt(1.0 / ((n - j + 1.0) * (n - j + 2.0)));
        for (int k = j; k <= n; ++k) m.u(1 + j, 2 + (k - 1)) += w;
    }
    return m;
}

// Cloner outputs over {a_in, a_0, a_1..a_N}: a_in + sqrt((N-1)/N) a_1^dag
// - sqrt((N-j)/(N-j+1)) a_{j+1} + sum_{k=2}^{j} a_k / sqrt((N-k+2)(N-k+1)).
BogoliubovMap cloner_output_map(int clones) {
    const int n = clones;
    BogoliubovMap m;
    m.basis = clone_basis(n);  // labels reused; columns 2.. are a_1..a_N here
    m.u = Eigen::MatrixXcd::Zero(n, n + 2);
    m.v = Eigen::MatrixXcd::Zero(n, n + 2);
    for (int j = 1; j <= n; ++j) {
        const int row = j - 1;
        m.u(row, 0) = 1.0;
        m.v(row, 2) = std::sqrt((n - 1.0) / n);
        if (j < n) m.u(row, 2 + j) = -std::sqrt((n - j) / (n - j + 1.0));
        for (int k = 2; k <= j; ++k)
            m.u(row, 1 + k) = std::sqrt(1.0 / ((n - k + 2.0) * (n - k + 1.0)));
    }
    return m;
}

} // namespace

BogoliubovMap teleporter_resource_map(int clones) {
    require(clones >= 2, "teleporter_resource_map: need at least two clones");
    const int n = clones;
    // c_0..c_N over {a_0, a_1..a_N}; column 0 is the ancilla a_0.
    BogoliubovMap m;
    m.basis.push_back("a_0");
    for (int k = 1; k <= n; ++k) m.basis.push_back("a_" + std::to_string(k));
    m.u = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    m.v = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    const double inv_root = std::sqrt(1.0 / (n - 1.0));
    m.v(0, 0) = inv_root;                     // c_0 = a_0^dag / sqrt(N-1) ...
    m.u(0, 1) = -std::sqrt(n / (n - 1.0));    // ... - sqrt(N/(N-1)) a_1
    for (int j = 1; j <= n; ++j) {
        m.u(j, 0) = inv_root;
        m.v(j, 1) = -std::sqrt(1.0 / (n * (n - 1.0)));
        if (j < n) m.u(j, j + 1) = -std::sqrt((n - j) / (n - j + 1.0));
        for (int k = 2; k <= j; ++k)
            m.u(j, k) = std::sqrt(1.0 / ((n - k + 2.0) * (n - k + 1.0)));
    }
    return m;
}

BogoliubovMap bogoliubov_cloner(int clones) {
    require(clones >= 2, "bogoliubov_cloner: need at least two clones");
    BogoliubovMap map = BogoliubovMap::compose(cloner_output_map(clones),
                                               psi_resource_map(clones));
    map.validate();

    // The composed noise a_out - a_in splits into the commuting Hermitian
    // pair sum_{k != j} Q_k / sqrt(2) and -P_j / sqrt(2) (the fidelity
    // operator (P_j^2 + (sum Q_k)^2)/2 of the objective). In ladder
    // coefficients: u = -1/2 on b_j, +1/2 on the other b_k, v = +1/2 on all.
    const int n = clones;
    for (int j = 0; j < n; ++j) {
        double defect = std::abs(map.u(j, 0) - 1.0) + std::abs(map.v(j, 0)) +
                        std::abs(map.u(j, 1)) + std::abs(map.v(j, 1));
        for (int k = 0; k < n; ++k) {
            const double want_u = k == j ? -0.5 : 0.5;
            defect += std::abs(map.u(j, 2 + k) - Complex(want_u));
            defect += std::abs(map.v(j, 2 + k) - Complex(0.5));
        }
        if (defect > 1e-12)
            throw std::runtime_error("bogoliubov_cloner: quadrature-form mismatch");
    }
    return map;
}

BogoliubovMap bogoliubov_teleporter(int clones) {
    require(clones >= 2, "bogoliubov_teleporter: need at least two clones");
    const int n = clones;
    const BogoliubovMap resource = teleporter_resource_map(clones);

    // Embed the resource over {a_in, a_0, a_1..a_N} (identity on a_in), then
    // express the a_1..a_N columns through the b modes.
    BogoliubovMap embedded;
    embedded.basis = clone_basis(n);
    embedded.u = Eigen::MatrixXcd::Zero(n + 2, n + 2);
    embedded.v = Eigen::MatrixXcd::Zero(n + 2, n + 2);
    embedded.u(0, 0) = 1.0;  // a_in untouched
    embedded.u.block(1, 1, n + 1, n + 1) = resource.u;
    embedded.v.block(1, 1, n + 1, n + 1) = resource.v;
    const BogoliubovMap c_modes =
        BogoliubovMap::compose(embedded, psi_resource_map(clones));

    // Unit-gain feedforward: c_{j,out} = c_j + a_in - c_0^dag.
    BogoliubovMap out;
    out.basis = c_modes.basis;
    out.u = Eigen::MatrixXcd::Zero(n, n + 2);
    out.v = Eigen::MatrixXcd::Zero(n, n + 2);
    for (int j = 1; j <= n; ++j) {
        out.u.row(j - 1) = c_modes.u.row(1 + j) - c_modes.v.row(1).conjugate();
        out.v.row(j - 1) = c_modes.v.row(1 + j) - c_modes.u.row(1).conjugate();
        out.u(j - 1, 0) += 1.0;  // + a_in
    }
    out.validate();

    // The ancilla must drop out of the outputs entirely.
    for (int j = 0; j < n; ++j)
        if (std::abs(out.u(j, 1)) > 1e-15 || std::abs(out.v(j, 1)) > 1e-15)
            throw std::runtime_error("bogoliubov_teleporter: ancilla did not cancel");
    return out;
}

GaussianState phi_resource_gaussian(int clones) {
    require(clones >= 2, "phi_resource_gaussian: need at least two clones");
    const int n = clones;
    // Complete (N+1)-mode map over {a_0, b_1..b_N}; express the a-modes of
    // the resource map through the b modes.
    const BogoliubovMap resource = teleporter_resource_map(clones);
    BogoliubovMap psi;  // {a_0, a_1..a_N} over {a_0, b_1..b_N}
    psi.basis.push_back("a_0");
    for (int k = 1; k <= n; ++k) psi.basis.push_back("b_" + std::to_string(k));
    const BogoliubovMap full = psi_resource_map(clones);
    psi.u = full.u.block(1, 1, n + 1, n + 1);
    psi.v = full.v.block(1, 1, n + 1, n + 1);
    const BogoliubovMap c_modes = BogoliubovMap::compose(resource, psi);
    c_modes.validate();
    const SymplecticTransform s = c_modes.to_symplectic();
    return apply_symplectic(s, vacuum_state(n + 1));
}

double clone_fidelity_char(const BogoliubovMap& map, int row, const FockVector& rho_t,
                           int nodes) {
    require(row >= 0 && row < map.outputs(), "clone_fidelity_char: bad output row");
    const int basis = static_cast<int>(map.basis_size());
    const int nt = rho_t.n_modes;
    require(nt <= basis, "clone_fidelity_char: state larger than basis");
    const int first_t = basis - nt;  // trailing columns carry the rho_T modes

    // F = (1/pi) Int d^2 lambda e^{-|lambda|^2/2} < D_c(lambda) > with
    // D_c(lambda) the joint displacement at mu_k = lambda conj(u_k)
    // - conj(lambda) v_k. Aligning the full Gaussian envelope with the
    // Gauss-Hermite weight keeps the integrand polynomial.
    Eigen::Matrix2d quad_form = 0.5 * Eigen::Matrix2d::Identity();
    std::vector<Eigen::RowVector2cd> coeff(basis);
    for (int k = 0; k < basis; ++k) {
        const Complex uk = map.u(row, k), vk = map.v(row, k);
        coeff[k] << std::conj(uk) - vk, Complex(0, 1) * (std::conj(uk) + vk);
        Eigen::Matrix2d g;
        const Eigen::RowVector2d re = coeff[k].real(), im = coeff[k].imag();
        g = re.transpose() * re + im.transpose() * im;
        quad_form += 0.5 * g;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(quad_form);
    const Eigen::Matrix2d inv_sqrt = es.eigenvectors() *
                                     es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                     es.eigenvectors().transpose();
    const double det_factor = 1.0 / std::sqrt(quad_form.determinant());

    const auto rule = detail::gauss_hermite(nodes);
    const FockVector psi = rho_t.normalized();
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
        for (int jn = 0; jn < nodes; ++jn) {
            const Eigen::Vector2d y(rule.nodes(i), rule.nodes(jn));
            const Eigen::Vector2d z = inv_sqrt * y;
            const Complex lambda(z(0), z(1));
            double expo = -0.5 * std::norm(lambda);  // e^{-|lambda|^2/2}
            FockVector cur = psi;
            for (int k = 0; k < basis; ++k) {
                const Complex mu = coeff[k](0) * z(0) + coeff[k](1) * z(1);
                if (k < first_t) {
                    expo += -0.5 * std::norm(mu);  // vacuum-mode characteristic fn
                } else {
                    cur = apply_single_mode(
                        cur, displacement_matrix(mu, rho_t.cutoff, 1.0), k - first_t);
                }
            }
            const Complex chi = psi.amps.dot(cur.amps);
            // e^{|y|^2} undoes the Gaussian envelope folded into the GH weight
            total += rule.weights(i) * rule.weights(jn) * chi.real() *
                     std::exp(y.squaredNorm() + expo);
        }
    }
    return total * det_factor / M_PI;
}

void to_json(nlohmann::json& j, const CloneConvergence& report) {
    j = nlohmann::json{{"schema", "1"},
                       {"N", report.clones},
                       {"cutoffs", report.cutoffs},
                       {"fidelities", report.fidelities},
                       {"gaussian_value", report.gaussian_value},
                       {"reference", report.reference}};
}

} // namespace cvqt
