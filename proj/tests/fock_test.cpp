#include "cvqt/fock.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>

using namespace cvqt;
using Complex = std::complex<double>;

TEST_CASE("ladder and quadrature matrices") {
    const int cutoff = 12;
    const auto a = annihilation_matrix(cutoff);
    const auto x = quadrature_matrix(cutoff, Axis::X);
    const auto p = quadrature_matrix(cutoff, Axis::P);

    SUBCASE("vacuum x variance is 1/2") {
        CHECK((x * x)(0, 0).real() == doctest::Approx(0.5));
    }
    SUBCASE("[x, p] = i away from the truncation edge") {
        const Eigen::MatrixXcd comm = x * p - p * x;
        for (int m = 0; m < cutoff; ++m)
            for (int n = 0; n < cutoff; ++n) {
                const Complex want = m == n ? Complex(0.0, 1.0) : Complex(0.0);
                CHECK(std::abs(comm(m, n) - want) < 1e-12);
            }
        CHECK(std::abs(comm(cutoff, cutoff) - Complex(0.0, 1.0)) > 1.0);
    }
    SUBCASE("number operator diagonal") {
        const Eigen::MatrixXcd num = a.adjoint() * a;
        for (int n = 0; n <= cutoff; ++n)
            CHECK(num(n, n).real() == doctest::Approx(static_cast<double>(n)));
    }
    SUBCASE("cutoff too small throws") {
        CHECK_THROWS_AS(annihilation_matrix(1), std::invalid_argument);
    }
}

TEST_CASE("embedding single-mode operators") {
    const int cutoff = 3;
    const auto a = annihilation_matrix(cutoff);
    SUBCASE("identity embeds to identity") {
        const auto id = embed(Eigen::MatrixXcd::Identity(cutoff + 1, cutoff + 1), 1, 2,
                              cutoff);
        CHECK((id.mat - Eigen::MatrixXcd::Identity(id.mat.rows(), id.mat.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-15);
    }
    SUBCASE("embeddings on distinct modes commute") {
        const auto a0 = embed(a, 0, 2, cutoff);
        const auto n1 = embed((a.adjoint() * a).eval(), 1, 2, cutoff);
        CHECK((a0.mat * n1.mat - n1.mat * a0.mat).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("trace is multiplicative under the tensor product") {
        const Eigen::MatrixXcd num = a.adjoint() * a;
        const auto embedded = embed(num, 0, 2, cutoff);
        CHECK(embedded.mat.trace().real() ==
              doctest::Approx(num.trace().real() * (cutoff + 1)));
    }
}

TEST_CASE("Gaussian unitaries in the number basis") {
    const int cutoff = 14;
    SUBCASE("balanced beam splitter splits a single photon") {
        const auto bs = beamsplitter_fock(0.5, cutoff);
        const std::array<int, 2> one{1, 0};
        const auto out = apply_two_mode(basis_fock(one, cutoff), bs.mat, 0, 1);
        // amplitudes cos(t)|10> - sin(t)|01> at t = pi/4
        const int d = cutoff + 1;
        CHECK(std::abs(out.amps(1 * d + 0) - Complex(1.0 / std::sqrt(2.0))) < 1e-12);
        CHECK(std::abs(out.amps(0 * d + 1) - Complex(-1.0 / std::sqrt(2.0))) < 1e-12);
        CHECK(out.norm() == doctest::Approx(1.0));
    }
    SUBCASE("zero squeezing is the identity") {
        const auto sq = squeezer_fock(0.0, cutoff);
        CHECK((sq.mat - Eigen::MatrixXcd::Identity(cutoff + 1, cutoff + 1))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
    SUBCASE("unitarity on the retained space") {
        for (const auto& op : {beamsplitter_fock(0.3, cutoff),
                               two_mode_squeezer_fock(0.5, cutoff, 1e-2)}) {
            const Eigen::MatrixXcd gram = op.mat.adjoint() * op.mat;
            CHECK((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()))
                      .cwiseAbs()
                      .maxCoeff() < 1e-6);
        }
    }
    SUBCASE("two-mode squeezer applied to vacuum matches the amplitude formula") {
        const double r = 0.6;
        const auto tms = two_mode_squeezer_fock(r, cutoff, 1e-6);
        const auto out = apply_two_mode(vacuum_fock(2, cutoff), tms.mat, 0, 1);
        const auto want = tmsv_fock(r, cutoff);
        // deviation is truncation-reflection near the cutoff; low levels agree
        // far more tightly
        CHECK((out.amps - want.amps).cwiseAbs().maxCoeff() < 5e-4);
        const int d = cutoff + 1;
        for (int n = 0; n <= 6; ++n)
            CHECK(std::abs(out.amps(Eigen::Index(n) * d + n) -
                           want.amps(Eigen::Index(n) * d + n)) < 2e-6);
    }
    SUBCASE("insufficient cutoff for the squeezing is rejected") {
        CHECK_THROWS_AS(two_mode_squeezer_fock(2.5, 6, 1e-6), std::invalid_argument);
    }
}

TEST_CASE("two-mode squeezed vacuum in the number basis") {
    SUBCASE("zero squeezing is the vacuum") {
        const auto v = tmsv_fock(0.0, 8);
        CHECK(std::abs(v.amps(0) - Complex(1.0)) < 1e-15);
        CHECK(v.amps.tail(v.amps.size() - 1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(v.leakage == doctest::Approx(0.0));
    }
    SUBCASE("reduced photon distribution is thermal") {
        const double r = 0.7;
        const int cutoff = 24;
        const auto v = tmsv_fock(r, cutoff).normalized();
        const std::array<int, 1> keep{0};
        const auto rho = partial_trace_fock(v, keep);
        const double nbar = std::sinh(r) * std::sinh(r);
        for (int n = 0; n <= 6; ++n) {
            const double want = std::pow(nbar / (nbar + 1.0), n) / (nbar + 1.0);
            CHECK(rho(n, n).real() == doctest::Approx(want).epsilon(1e-6));
        }
    }
    SUBCASE("moments match the covariance-matrix construction") {
        const double r = 0.9;
        const auto mom = fock_moments(tmsv_fock(r, 40));
        const auto want = tmsv_cm(r);
        CHECK((mom.cm - want.cm).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(mom.mean.cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("photon jumps") {
    const int cutoff = 10;
    SUBCASE("subtraction maps |1> to |0> with unit weight") {
        const std::array<int, 1> one{1};
        const auto res = photon_jump(basis_fock(one, cutoff), 0, Jump::Subtract);
        CHECK(std::abs(res.state.amps(0) - Complex(1.0)) < 1e-15);
        CHECK(res.weight == doctest::Approx(1.0));
    }
    SUBCASE("addition maps |0> to |1>") {
        const std::array<int, 1> zero{0};
        const auto res = photon_jump(basis_fock(zero, cutoff), 0, Jump::Add);
        CHECK(std::abs(res.state.amps(1) - Complex(1.0)) < 1e-15);
        CHECK(res.weight == doctest::Approx(1.0));
    }
    SUBCASE("subtracting from vacuum fails") {
        CHECK_THROWS_AS(photon_jump(vacuum_fock(1, cutoff), 0, Jump::Subtract),
                        std::runtime_error);
    }
    SUBCASE("subtract then add is not the identity on superpositions") {
        FockVector v = vacuum_fock(1, cutoff);
        v.amps(0) = 1.0 / std::sqrt(2.0);
        v.amps(2) = 1.0 / std::sqrt(2.0);
        const auto sub = photon_jump(v, 0, Jump::Subtract);
        const auto back = photon_jump(sub.state, 0, Jump::Add);
        const Complex ip = v.amps.dot(back.state.amps);
        CHECK(std::abs(ip) < 1.0 - 1e-6);
    }
    SUBCASE("TMSV subtraction heralds at the mean photon number") {
        const double r = 0.8;
        const auto v = tmsv_fock(r, 30).normalized();
        const auto res = photon_jump(v, 0, Jump::Subtract);
        CHECK(res.weight ==
              doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-8));
    }
}

TEST_CASE("overlaps") {
    const int cutoff = 6;
    const std::array<int, 1> zero{0}, one{1};
    const auto v0 = basis_fock(zero, cutoff), v1 = basis_fock(one, cutoff);
    const Eigen::MatrixXcd rho0 = v0.amps * v0.amps.adjoint();
    const Eigen::MatrixXcd rho1 = v1.amps * v1.amps.adjoint();
    CHECK(overlap(rho0, rho0) == doctest::Approx(1.0));
    CHECK(overlap(rho0, rho1) == doctest::Approx(0.0));
}

TEST_CASE("displacement matrix") {
    const int cutoff = 24;
    SUBCASE("zero displacement is the identity") {
        const auto d = displacement_matrix(0.0, cutoff);
        CHECK((d - Eigen::MatrixXcd::Identity(cutoff + 1, cutoff + 1)).cwiseAbs().maxCoeff() <
              1e-14);
    }
    SUBCASE("vacuum matrix element is the Gaussian overlap") {
        const Complex alpha(0.7, -0.4);
        const auto d = displacement_matrix(alpha, cutoff);
        CHECK(std::abs(d(0, 0) - std::exp(-0.5 * std::norm(alpha))) < 1e-12);
    }
    SUBCASE("displacements invert") {
        const Complex alpha(0.9, 0.5);
        const int wide = 40;  // headroom so the low-block column norms saturate
        const auto d = displacement_matrix(alpha, wide);
        const auto dinv = displacement_matrix(-alpha, wide);
        CHECK((dinv - d.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXcd prod = d * dinv;
        CHECK((prod.topLeftCorner(12, 12) - Eigen::MatrixXcd::Identity(12, 12))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
    }
    SUBCASE("excessive displacement for the cutoff is rejected") {
        CHECK_THROWS_AS(displacement_matrix(Complex(4.0, 0.0), 6), std::invalid_argument);
    }
}

TEST_CASE("matrix dump round trip") {
    const auto mat = displacement_matrix(Complex(0.3, 0.2), 5);
    const std::string path = "/tmp/cvqt_dump_test.bin";
    dump_matrix(path, mat);
    const auto back = load_matrix(path);
    CHECK((mat - back).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    std::remove(path.c_str());
}
