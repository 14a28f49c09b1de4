#include "cvqt/fock.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cvqt {

namespace {

using Complex = std::complex<double>;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

Eigen::Index pow_levels(int levels, int n_modes) {
    Eigen::Index d = 1;
    for (int i = 0; i < n_modes; ++i) d *= levels;
    return d;
}

// exp(G) for anti-Hermitian G via the Hermitian eigendecomposition of -iG.
Eigen::MatrixXcd exp_antihermitian(const Eigen::MatrixXcd& g) {
    const Eigen::MatrixXcd h = Complex(0.0, -1.0) * g;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("exp_antihermitian: eigensolve failed");
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double tmsv_tail(double r, int cutoff) {
    const double t = std::tanh(std::abs(r));
    return std::pow(t, 2.0 * (cutoff + 1));
}

// Weight of squeezed vacuum beyond the cutoff (even levels only).
double squeezed_vacuum_tail(double s, int cutoff) {
    const double t2 = std::tanh(std::abs(s)) * std::tanh(std::abs(s));
    double kept = 0.0, term = 1.0 / std::cosh(std::abs(s));
    for (int m = 0; 2 * m <= cutoff; ++m) {
        if (m > 0) term *= t2 * (2.0 * m - 1.0) / (2.0 * m);
        kept += term;
    }
    return std::max(0.0, 1.0 - kept);
}

} // namespace

FockVector FockVector::normalized() const {
    FockVector out = *this;
    const double n = norm();
    if (n <= 0.0) throw std::runtime_error("FockVector: cannot normalize zero vector");
    out.amps /= n;
    return out;
}

bool FockOperator::is_hermitian(double tol) const {
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() < tol;
}

FockVector vacuum_fock(int n_modes, int cutoff) {
    require(n_modes >= 1 && cutoff >= 1, "vacuum_fock: bad dimensions");
    FockVector v;
    v.n_modes = n_modes;
    v.cutoff = cutoff;
    v.amps = Eigen::VectorXcd::Zero(pow_levels(cutoff + 1, n_modes));
    v.amps(0) = 1.0;
    return v;
}

FockVector basis_fock(std::span<const int> occupation, int cutoff) {
    require(!occupation.empty(), "basis_fock: empty occupation list");
    FockVector v;
    v.n_modes = static_cast<int>(occupation.size());
    v.cutoff = cutoff;
    v.amps = Eigen::VectorXcd::Zero(pow_levels(cutoff + 1, v.n_modes));
    Eigen::Index idx = 0;
    for (int n : occupation) {
        require(n >= 0 && n <= cutoff, "basis_fock: occupation outside cutoff");
        idx = idx * (cutoff + 1) + n;
    }
    v.amps(idx) = 1.0;
    return v;
}

Eigen::MatrixXcd annihilation_matrix(int cutoff) {
    require(cutoff >= 2, "annihilation_matrix: cutoff too small");
    const int d = cutoff + 1;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXcd creation_matrix(int cutoff) {
    return annihilation_matrix(cutoff).adjoint();
}

Eigen::MatrixXcd quadrature_matrix(int cutoff, Axis which) {
    const Eigen::MatrixXcd a = annihilation_matrix(cutoff);
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    if (which == Axis::X) return inv_rt2 * (a + a.adjoint());
    return Complex(0.0, inv_rt2) * (a.adjoint() - a);
}

FockOperator embed(const Eigen::MatrixXcd& single, int mode, int n_modes, int cutoff) {
    require(mode >= 0 && mode < n_modes, "embed: mode out of range");
    const int d = cutoff + 1;
    require(single.rows() == d && single.cols() == d, "embed: dimension mismatch");
    const Eigen::Index left = pow_levels(d, mode);
    const Eigen::Index right = pow_levels(d, n_modes - mode - 1);
    FockOperator op;
    op.n_modes = n_modes;
    op.cutoff = cutoff;
    op.mat = Eigen::MatrixXcd::Zero(left * d * right, left * d * right);
    for (Eigen::Index l = 0; l < left; ++l)
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) {
                if (single(m, n) == Complex(0.0)) continue;
                for (Eigen::Index r = 0; r < right; ++r)
                    op.mat((l * d + m) * right + r, (l * d + n) * right + r) =
                        single(m, n);
            }
    return op;
}

FockVector apply_single_mode(const FockVector& v, const Eigen::MatrixXcd& op, int mode) {
    require(mode >= 0 && mode < v.n_modes, "apply_single_mode: mode out of range");
    const int d = v.levels();
    require(op.rows() == d && op.cols() == d, "apply_single_mode: dimension mismatch");
    const Eigen::Index left = pow_levels(d, mode);
    const Eigen::Index right = pow_levels(d, v.n_modes - mode - 1);
    FockVector out = v;
    out.amps.setZero();
    for (Eigen::Index l = 0; l < left; ++l) {
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
            src(v.amps.data() + l * d * right, d, right);
        Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            dst(out.amps.data() + l * d * right, d, right);
        dst = op * src;
    }
    return out;
}

FockVector apply_two_mode(const FockVector& v, const Eigen::MatrixXcd& op, int mode_a,
                          int mode_b) {
    require(mode_a != mode_b, "apply_two_mode: modes must be distinct");
    require(mode_a >= 0 && mode_a < v.n_modes && mode_b >= 0 && mode_b < v.n_modes,
            "apply_two_mode: mode out of range");
    const int d = v.levels();
    require(op.rows() == Eigen::Index(d) * d && op.cols() == Eigen::Index(d) * d,
            "apply_two_mode: dimension mismatch");
    std::vector<Eigen::Index> stride(v.n_modes);
    {
        Eigen::Index s = 1;
        for (int m = v.n_modes - 1; m >= 0; --m) {
            stride[m] = s;
            s *= d;
        }
    }
    FockVector out = v;
    out.amps.setZero();
    const Eigen::Index dim = v.dim();
    std::vector<Complex> column(static_cast<std::size_t>(d) * d);
    for (Eigen::Index base = 0; base < dim; ++base) {
        const int na = static_cast<int>(base / stride[mode_a]) % d;
        const int nb = static_cast<int>(base / stride[mode_b]) % d;
        if (na != 0 || nb != 0) continue;
        for (int ka = 0; ka < d; ++ka)
            for (int kb = 0; kb < d; ++kb)
                column[static_cast<std::size_t>(ka) * d + kb] =
                    v.amps(base + ka * stride[mode_a] + kb * stride[mode_b]);
        Eigen::Map<const Eigen::VectorXcd> in(column.data(), Eigen::Index(d) * d);
        const Eigen::VectorXcd res = op * in;
        for (int ma = 0; ma < d; ++ma)
            for (int mb = 0; mb < d; ++mb)
                out.amps(base + ma * stride[mode_a] + mb * stride[mode_b]) =
                    res(Eigen::Index(ma) * d + mb);
    }
    return out;
}

FockOperator beamsplitter_fock(double transmittance, int cutoff, double /*leakage_tol*/) {
    require(transmittance >= 0.0 && transmittance <= 1.0,
            "beamsplitter_fock: transmittance must lie in [0, 1]");
    const int d = cutoff + 1;
    const Eigen::MatrixXcd a = annihilation_matrix(cutoff);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(d * d, d * d);
    Eigen::MatrixXcd a2 = a1;
    // kron(a, I) and kron(I, a)
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            if (a(m, n) != Complex(0.0))
                for (int k = 0; k < d; ++k) a1(m * d + k, n * d + k) = a(m, n);
        }
    for (int k = 0; k < d; ++k) a2.block(k * d, k * d, d, d) = a;
    (void)id;
    const double theta = std::acos(std::min(1.0, std::sqrt(transmittance)));
    const Eigen::MatrixXcd g =
        theta * (a1.adjoint() * a2 - a2.adjoint() * a1);  // photon-number conserving
    FockOperator op;
    op.n_modes = 2;
    op.cutoff = cutoff;
    op.mat = exp_antihermitian(g);
    return op;
}

FockOperator two_mode_squeezer_fock(double r, int cutoff, double leakage_tol) {
    require(r >= 0.0, "two_mode_squeezer_fock: squeezing must be >= 0");
    if (tmsv_tail(r, cutoff) > leakage_tol)
        throw std::invalid_argument(
            "two_mode_squeezer_fock: cutoff too small for requested squeezing");
    const int d = cutoff + 1;
    const Eigen::MatrixXcd a = annihilation_matrix(cutoff);
    Eigen::MatrixXcd a1 = Eigen::MatrixXcd::Zero(d * d, d * d);
    Eigen::MatrixXcd a2 = a1;
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            if (a(m, n) != Complex(0.0))
                for (int k = 0; k < d; ++k) a1(m * d + k, n * d + k) = a(m, n);
    for (int k = 0; k < d; ++k) a2.block(k * d, k * d, d, d) = a;
    const Eigen::MatrixXcd g =
        r * (a1.adjoint() * a2.adjoint() - a1 * a2);
    FockOperator op;
    op.n_modes = 2;
    op.cutoff = cutoff;
    op.mat = exp_antihermitian(g);
    return op;
}

FockOperator squeezer_fock(double s, int cutoff, double leakage_tol) {
    if (squeezed_vacuum_tail(s, cutoff) > leakage_tol)
        throw std::invalid_argument(
            "squeezer_fock: cutoff too small for requested squeezing");
    const Eigen::MatrixXcd a = annihilation_matrix(cutoff);
    const Eigen::MatrixXcd g = 0.5 * s * (a * a - (a * a).adjoint());
    FockOperator op;
    op.n_modes = 1;
    op.cutoff = cutoff;
    op.mat = exp_antihermitian(g);
    return op;
}

FockVector tmsv_fock(double r, int cutoff) {
    require(r >= 0.0, "tmsv_fock: squeezing must be >= 0");
    const int d = cutoff + 1;
    FockVector v;
    v.n_modes = 2;
    v.cutoff = cutoff;
    v.amps = Eigen::VectorXcd::Zero(Eigen::Index(d) * d);
    const double t = std::tanh(r);
    double amp = 1.0 / std::cosh(r);
    for (int n = 0; n < d; ++n) {
        v.amps(Eigen::Index(n) * d + n) = amp;
        amp *= t;
    }
    v.leakage = tmsv_tail(r, cutoff);
    return v;
}

JumpResult photon_jump(const FockVector& state, int mode, Jump kind) {
    const double norm_in = state.norm();
    if (norm_in <= 0.0) throw std::invalid_argument("photon_jump: zero input state");
    const Eigen::MatrixXcd op = kind == Jump::Subtract
                                    ? annihilation_matrix(state.cutoff)
                                    : creation_matrix(state.cutoff);
    FockVector raw = apply_single_mode(state, op, mode);
    const double norm_out = raw.norm();
    JumpResult result;
    result.weight = (norm_out * norm_out) / (norm_in * norm_in);
    if (norm_out < 1e-12)
        throw std::runtime_error("photon_jump: operation annihilates the state");
    raw.amps /= norm_out;
    raw.leakage = state.leakage;
    result.state = std::move(raw);
    return result;
}

Eigen::MatrixXcd partial_trace_fock(const FockVector& state, std::span<const int> keep) {
    require(!keep.empty(), "partial_trace_fock: keep list must be nonempty");
    const int d = state.levels();
    std::vector<bool> kept(state.n_modes, false);
    for (int m : keep) {
        require(m >= 0 && m < state.n_modes, "partial_trace_fock: mode out of range");
        require(!kept[m], "partial_trace_fock: duplicate mode");
        kept[m] = true;
    }
    std::vector<int> rest;
    for (int m = 0; m < state.n_modes; ++m)
        if (!kept[m]) rest.push_back(m);

    std::vector<Eigen::Index> stride(state.n_modes);
    {
        Eigen::Index s = 1;
        for (int m = state.n_modes - 1; m >= 0; --m) {
            stride[m] = s;
            s *= d;
        }
    }
    const Eigen::Index dim_keep = pow_levels(d, static_cast<int>(keep.size()));
    const Eigen::Index dim_rest = pow_levels(d, static_cast<int>(rest.size()));

    // Reshape into a (keep x rest) matrix, then rho = M M^dagger.
    Eigen::MatrixXcd m(dim_keep, dim_rest);
    std::vector<int> digits(keep.size());
    for (Eigen::Index k = 0; k < dim_keep; ++k) {
        Eigen::Index rem = k, base = 0;
        for (int pos = static_cast<int>(keep.size()) - 1; pos >= 0; --pos) {
            digits[pos] = static_cast<int>(rem % d);
            rem /= d;
        }
        for (std::size_t pos = 0; pos < keep.size(); ++pos)
            base += digits[pos] * stride[keep[pos]];
        for (Eigen::Index r = 0; r < dim_rest; ++r) {
            Eigen::Index rrem = r, off = 0;
            for (int pos = static_cast<int>(rest.size()) - 1; pos >= 0; --pos) {
                off += (rrem % d) * stride[rest[pos]];
                rrem /= d;
            }
            m(k, r) = state.amps(base + off);
        }
    }
    return m * m.adjoint();
}

Eigen::MatrixXcd partial_trace_fock(const Eigen::MatrixXcd& rho, int n_modes, int cutoff,
                                    std::span<const int> keep) {
    require(!keep.empty(), "partial_trace_fock: keep list must be nonempty");
    const int d = cutoff + 1;
    require(rho.rows() == pow_levels(d, n_modes) && rho.cols() == rho.rows(),
            "partial_trace_fock: dimension mismatch");
    std::vector<bool> kept(n_modes, false);
    for (int m : keep) {
        require(m >= 0 && m < n_modes, "partial_trace_fock: mode out of range");
        require(!kept[m], "partial_trace_fock: duplicate mode");
        kept[m] = true;
    }
    std::vector<int> rest;
    for (int m = 0; m < n_modes; ++m)
        if (!kept[m]) rest.push_back(m);

    std::vector<Eigen::Index> stride(n_modes);
    {
        Eigen::Index s = 1;
        for (int m = n_modes - 1; m >= 0; --m) {
            stride[m] = s;
            s *= d;
        }
    }
    const Eigen::Index dim_keep = pow_levels(d, static_cast<int>(keep.size()));
    const Eigen::Index dim_rest = pow_levels(d, static_cast<int>(rest.size()));

    auto flat_index = [&](Eigen::Index multi, std::span<const int> modes) {
        Eigen::Index off = 0;
        for (int pos = static_cast<int>(modes.size()) - 1; pos >= 0; --pos) {
            off += (multi % d) * stride[modes[pos]];
            multi /= d;
        }
        return off;
    };

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_keep, dim_keep);
    for (Eigen::Index i = 0; i < dim_keep; ++i) {
        const Eigen::Index bi = flat_index(i, keep);
        for (Eigen::Index j = 0; j < dim_keep; ++j) {
            const Eigen::Index bj = flat_index(j, keep);
            Complex acc(0.0);
            for (Eigen::Index r = 0; r < dim_rest; ++r) {
                const Eigen::Index br = flat_index(r, {rest.data(), rest.size()});
                acc += rho(bi + br, bj + br);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

double overlap(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    require(rho.rows() == sigma.rows() && rho.cols() == sigma.cols() &&
                rho.rows() == rho.cols(),
            "overlap: dimension mismatch");
    const Complex tr = (rho * sigma).trace();
    if (std::abs(tr.imag()) > 1e-9 * std::max(1.0, std::abs(tr.real())))
        throw std::runtime_error("overlap: trace has a large imaginary part");
    return tr.real();
}

Eigen::MatrixXcd displacement_matrix(std::complex<double> alpha, int cutoff,
                                     double leakage_tol) {
    const int d = cutoff + 1;
    const double x = std::norm(alpha);  // |alpha|^2
    {
        // Poisson tail of D(alpha)|0> beyond the cutoff.
        double kept = 0.0, term = std::exp(-x);
        for (int n = 0; n <= cutoff; ++n) {
            kept += term;
            term *= x / (n + 1);
        }
        if (1.0 - kept > leakage_tol)
            throw std::invalid_argument("displacement_matrix: leakage exceeds tolerance");
    }
    Eigen::MatrixXcd dm(d, d);
    const double gauss = std::exp(-0.5 * x);
    // Upper triangle (m >= n): sqrt(n!/m!) alpha^{m-n} e^{-x/2} L_n^{(m-n)}(x);
    // lower triangle mirrors with -conj(alpha).
    for (int diff = 0; diff <= cutoff; ++diff) {
        const Complex pow_up = std::pow(alpha, diff);
        const Complex pow_dn = std::pow(-std::conj(alpha), diff);
        double lag_prev = 0.0, lag = 1.0;  // L_0^{(diff)} = 1
        for (int n = 0; n + diff <= cutoff; ++n) {
            if (n > 0) {
                const double next =
                    ((2.0 * (n - 1) + diff + 1.0 - x) * lag - (n - 1.0 + diff) * lag_prev) /
                    n;
                lag_prev = lag;
                lag = next;
            }
            const int m = n + diff;
            const double ratio =
                std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)));
            dm(m, n) = ratio * pow_up * gauss * lag;
            if (diff > 0) dm(n, m) = ratio * pow_dn * gauss * lag;
        }
    }
    return dm;
}

FockMoments fock_moments(const FockVector& state) {
    const int n = state.n_modes;
    const double norm2 = state.amps.squaredNorm();
    if (norm2 <= 0.0) throw std::invalid_argument("fock_moments: zero state");
    std::vector<Eigen::VectorXcd> quad_applied(2 * n);
    const Eigen::MatrixXcd xq = quadrature_matrix(state.cutoff, Axis::X);
    const Eigen::MatrixXcd pq = quadrature_matrix(state.cutoff, Axis::P);
    for (int m = 0; m < n; ++m) {
        quad_applied[2 * m] = apply_single_mode(state, xq, m).amps;
        quad_applied[2 * m + 1] = apply_single_mode(state, pq, m).amps;
    }
    FockMoments mom;
    mom.mean.resize(2 * n);
    mom.cm.resize(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
        mom.mean(i) = state.amps.dot(quad_applied[i]).real() / norm2;
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) {
            const double second = quad_applied[i].dot(quad_applied[j]).real() / norm2;
            const double c = second - mom.mean(i) * mom.mean(j);
            mom.cm(i, j) = c;
            mom.cm(j, i) = c;
        }
    return mom;
}

FockMoments fock_moments(const Eigen::MatrixXcd& rho, int n_modes, int cutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("fock_moments: density eigensolve failed");
    const double total = es.eigenvalues().sum();
    FockMoments mom;
    mom.mean = Eigen::VectorXd::Zero(2 * n_modes);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double w = es.eigenvalues()(k) / total;
        if (w < 1e-14) continue;
        FockVector v;
        v.n_modes = n_modes;
        v.cutoff = cutoff;
        v.amps = es.eigenvectors().col(k);
        const FockMoments part = fock_moments(v);
        mom.mean += w * part.mean;
        second += w * (part.cm + part.mean * part.mean.transpose());
    }
    mom.cm = second - mom.mean * mom.mean.transpose();
    return mom;
}

void dump_matrix(const std::string& path, const Eigen::MatrixXcd& mat) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("dump_matrix: cannot open " + path);
    const char magic[8] = {'C', 'V', 'Q', 'T', 'M', 'A', 'T', '1'};
    out.write(magic, sizeof magic);
    const std::int64_t rows = mat.rows(), cols = mat.cols();
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double re = mat(i, j).real(), im = mat(i, j).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof re);
            out.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

Eigen::MatrixXcd load_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (std::memcmp(magic, "CVQTMAT1", 8) != 0)
        throw std::runtime_error("load_matrix: bad magic");
    std::int64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    Eigen::MatrixXcd mat(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), sizeof re);
            in.read(reinterpret_cast<char*>(&im), sizeof im);
            mat(i, j) = Complex(re, im);
        }
    if (!in) throw std::runtime_error("load_matrix: truncated file");
    return mat;
}

} // namespace cvqt
