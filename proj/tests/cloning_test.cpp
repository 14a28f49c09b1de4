#include "cvqt/cloning.hpp"
#include "cvqt/teleport.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <random>

using namespace cvqt;
using Complex = std::complex<double>;

TEST_CASE("exp(-c x^2) matrix elements") {
    const int cutoff = 20;
    SUBCASE("vacuum element at c = 1/2") {
        const auto m = expquad_single(0.5, cutoff);
        CHECK(m(0, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
        CHECK(m(0, 0) == doctest::Approx(0.816496580927726).epsilon(1e-12));
    }
    SUBCASE("zero coefficient gives the identity") {
        const auto m = expquad_single(0.0, cutoff);
        CHECK((m - Eigen::MatrixXd::Identity(cutoff + 1, cutoff + 1)).cwiseAbs().maxCoeff() <
              1e-14);
    }
    SUBCASE("odd-even elements vanish by parity") {
        const auto m = expquad_single(0.8, cutoff);
        for (int i = 0; i <= cutoff; ++i)
            for (int j = 0; j <= cutoff; ++j)
                if ((i + j) % 2 == 1) CHECK(m(i, j) == 0.0);
    }
    SUBCASE("agrees with the eigendecomposition of the truncated quadrature") {
        // independent oracle: exp(-c X^2) from the dense X matrix, accurate
        // away from the truncation corner
        const double c = 0.5;
        const Eigen::MatrixXcd x = quadrature_matrix(40, Axis::X);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(x * x);
        Eigen::MatrixXcd expm = es.eigenvectors() *
                                (-c * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                                es.eigenvectors().adjoint();
        const auto direct = expquad_single(c, 40);
        CHECK((expm.topLeftCorner(10, 10).real() - direct.topLeftCorner(10, 10))
                  .cwiseAbs()
                  .maxCoeff() < 1e-6);
    }
}

TEST_CASE("clone objective") {
    SUBCASE("two-clone vacuum expectation is 2/3") {
        const auto obj = clone_objective(2, 16);
        CHECK(obj.op(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("objective is symmetric under clone exchange") {
        const int cutoff = 8;
        const auto obj = clone_objective(2, cutoff);
        const int d = cutoff + 1;
        for (int m1 = 0; m1 < d; ++m1)
            for (int m2 = 0; m2 < d; ++m2)
                for (int n1 = 0; n1 < d; ++n1)
                    for (int n2 = 0; n2 < d; ++n2)
                        CHECK(obj.op(m1 * d + m2, n1 * d + n2) ==
                              doctest::Approx(obj.op(m2 * d + m1, n2 * d + n1))
                                  .epsilon(1e-10));
    }
    SUBCASE("eigenvalues lie in (0, 1]") {
        const auto obj = clone_objective(2, 10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(obj.op);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    }
    SUBCASE("three-clone term matches a direct matrix exponential") {
        // oracle: exp(-(Q_1 + Q_2)^2/2) on two modes by dense eigensolve;
        // both routes are truncation-limited near the cutoff, so compare
        // low-photon elements only
        const int cutoff = 12;
        const int d = cutoff + 1;
        const Eigen::MatrixXcd x = quadrature_matrix(cutoff, Axis::X);
        Eigen::MatrixXcd qsum = Eigen::MatrixXcd::Zero(d * d, d * d);
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) {
                if (x(m, n) == Complex(0.0)) continue;
                for (int k = 0; k < d; ++k) {
                    qsum(m * d + k, n * d + k) += x(m, n);
                    qsum(k * d + m, k * d + n) += x(m, n);
                }
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(qsum * qsum);
        const Eigen::MatrixXcd expm =
            es.eigenvectors() *
            (-0.5 * es.eigenvalues().array()).exp().matrix().asDiagonal() *
            es.eigenvectors().adjoint();
        // term j = 0 of the three-clone objective: exp(-P_0^2/2) (x) that factor
        const auto term = clone_term(3, cutoff, 0);
        const double p00 = expquad_single(0.5, cutoff)(0, 0);
        for (int m2 = 0; m2 <= 3; ++m2)
            for (int m3 = 0; m3 <= 3; ++m3)
                for (int n2 = 0; n2 <= 3; ++n2)
                    for (int n3 = 0; n3 <= 3; ++n3) {
                        const double got = term(m2 * d + m3, n2 * d + n3);
                        const double want =
                            p00 * expm(m2 * d + m3, n2 * d + n3).real();
                        CHECK(std::abs(got - want) < 1e-5);
                    }
        // vacuum element has the closed value sqrt(2/3) / sqrt(2)
        CHECK(term(0, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));
    }
}

TEST_CASE("optimal cloning fidelity") {
    SUBCASE("vacuum input reproduces the Gaussian value") {
        const auto f = clone_fidelity_for(vacuum_fock(2, 16), 2);
        REQUIRE(f.size() == 2);
        CHECK(std::abs(f[0] - 2.0 / 3.0) < 1e-9);
        CHECK(std::abs(f[1] - 2.0 / 3.0) < 1e-9);
    }
    SUBCASE("optimum exceeds the Gaussian value and converges monotonically") {
        const auto opt = optimal_clone_fidelity(2, 24);
        REQUIRE(opt.report.cutoffs.size() == 2);  // 16, 24
        CHECK(opt.report.fidelities[0] <= opt.report.fidelities[1] + 1e-12);
        CHECK(opt.fidelity > 2.0 / 3.0);
        CHECK(opt.fidelity < 0.69);
        // Rayleigh quotient: the eigenvector reproduces its eigenvalue
        FockVector v;
        v.n_modes = 2;
        v.cutoff = 24;
        v.amps = opt.rho_t.cast<Complex>();
        const auto f = clone_fidelity_for(v, 2);
        CHECK(std::abs(0.5 * (f[0] + f[1]) - opt.fidelity) < 1e-9);
        // symmetric optimum gives equal per-output fidelities
        CHECK(std::abs(f[0] - f[1]) < 1e-6);
    }
    SUBCASE("power-iteration path agrees with the dense ladder") {
        // dimension 35^2 exceeds the dense-solve threshold
        const double via_power = clone_optimum_value(2, 34);
        const double dense_32 = clone_optimum_value(2, 32);
        CHECK(via_power >= dense_32 - 1e-10);
        CHECK(via_power < 0.6836);
    }
    SUBCASE("convergence report serializes with schema") {
        const auto opt = optimal_clone_fidelity(2, 16);
        nlohmann::json j = opt.report;
        CHECK(j.at("schema") == "1");
        CHECK(j.at("N") == 2);
        CHECK(j.at("reference") == doctest::Approx(0.6826));
        CHECK(j.at("gaussian_value") == doctest::Approx(2.0 / 3.0));
    }
}

TEST_CASE("Heisenberg cloner map") {
    SUBCASE("two-clone coefficients") {
        const auto map = bogoliubov_cloner(2);
        // a_out,1 = a_in + a_1^dag/sqrt(2) - a_2/sqrt(2) expressed in b's:
        // Q_2/sqrt(2) - i P_1/sqrt(2) noise; columns are {a_in, a_0, b_1, b_2}
        CHECK(std::abs(map.u(0, 0) - Complex(1.0)) < 1e-14);
        CHECK(std::abs(map.u(0, 2) - Complex(-0.5)) < 1e-14);
        CHECK(std::abs(map.u(0, 3) - Complex(0.5)) < 1e-14);
        CHECK(std::abs(map.v(0, 2) - Complex(0.5)) < 1e-14);
        CHECK(std::abs(map.v(0, 3) - Complex(0.5)) < 1e-14);
        // second clone swaps the roles of the two resource modes
        CHECK(std::abs(map.u(1, 2) - Complex(0.5)) < 1e-14);
        CHECK(std::abs(map.u(1, 3) - Complex(-0.5)) < 1e-14);
    }
    SUBCASE("commutators hold for N = 2..5") {
        for (int n = 2; n <= 5; ++n) {
            const auto map = bogoliubov_cloner(n);
            CHECK(map.commutator_defect() < 1e-12);
        }
    }
}

TEST_CASE("teleporter reproduces the cloner") {
    for (int n = 2; n <= 5; ++n) {
        const auto cloner = bogoliubov_cloner(n);
        const auto teleporter = bogoliubov_teleporter(n);
        CHECK((cloner.u - teleporter.u).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((cloner.v - teleporter.v).cwiseAbs().maxCoeff() < 1e-12);
        // ancilla column identically zero
        CHECK(teleporter.u.col(1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(teleporter.v.col(1).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("amplifier gain matches the resource-map coefficients") {
    for (int n = 2; n <= 5; ++n) {
        const auto res = teleporter_resource_map(n);
        const double gain = static_cast<double>(n) / (n - 1);
        // c_0 couples like a two-mode squeezer of intensity gain N/(N-1)
        CHECK(std::abs(res.u(0, 1)) == doctest::Approx(std::sqrt(gain)));
        CHECK(std::abs(res.v(0, 0)) == doctest::Approx(std::sqrt(gain - 1.0)));
    }
}

TEST_CASE("Gaussian teleporter resource state") {
    const auto state = phi_resource_gaussian(2);
    REQUIRE(state.n_modes == 3);
    SUBCASE("pure and physical") {
        for (double nu : symplectic_spectrum(state))
            CHECK(nu == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("teleportation to each receiver hits the Gaussian cloning value") {
        const std::array<int, 2> ab{0, 1}, ac{0, 2};
        CHECK(fidelity_cm(partial_trace(state, ab)) ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-10));
        CHECK(fidelity_cm(partial_trace(state, ac)) ==
              doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    }
    SUBCASE("receiver permutation symmetry") {
        CHECK((state.block(1, 1) - state.block(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((state.block(0, 1) - state.block(0, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("locally equivalent to the tight-bound standard form") {
        const auto form = three_mode_standard_cm(1.5, 1.0, 1.0).to_state();
        // local symplectic invariants: per-mode determinants ...
        for (int m = 0; m < 3; ++m)
            CHECK(std::sqrt(state.block(m, m).determinant()) ==
                  doctest::Approx(std::sqrt(form.block(m, m).determinant()))
                      .epsilon(1e-9));
        // ... and pairwise PT least eigenvalues
        for (int rec : {1, 2}) {
            const std::array<int, 2> pair{0, rec};
            const std::array<int, 1> part{0};
            CHECK(pt_least_eigenvalue(partial_trace(state, pair), part) ==
                  doctest::Approx(
                      pt_least_eigenvalue(partial_trace(form, pair), part))
                      .epsilon(1e-9));
        }
    }
    SUBCASE("higher clone numbers remain pure with symmetric receivers") {
        const auto s4 = phi_resource_gaussian(3);
        for (double nu : symplectic_spectrum(s4))
            CHECK(nu == doctest::Approx(0.5).epsilon(1e-8));
        const std::array<int, 2> p1{0, 1}, p3{0, 3};
        CHECK(fidelity_cm(partial_trace(s4, p1)) ==
              doctest::Approx(fidelity_cm(partial_trace(s4, p3))).epsilon(1e-10));
        // teleported fidelity equals the vacuum-resource cloner fidelity
        const auto f = clone_fidelity_for(vacuum_fock(3, 12), 3);
        CHECK(fidelity_cm(partial_trace(s4, p1)) ==
              doctest::Approx(f[0]).epsilon(1e-8));
    }
}

TEST_CASE("output fidelity through the Heisenberg picture") {
    // The normal-ordered vacuum projector of the output mode, evaluated as a
    // characteristic-function integral, must match the direct objective
    // expectation.
    const int cutoff = 16;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto map = bogoliubov_cloner(2);
    for (int trial = 0; trial < 3; ++trial) {
        FockVector psi = vacuum_fock(2, cutoff);
        // random low-energy state
        const int span = 5;
        for (int i = 0; i < span; ++i)
            for (int j = 0; j < span; ++j)
                psi.amps(Eigen::Index(i) * (cutoff + 1) + j) =
                    Complex(gauss(rng), gauss(rng));
        psi.amps /= psi.norm();
        const auto direct = clone_fidelity_for(psi, 2);
        for (int out = 0; out < 2; ++out) {
            const double via_char = clone_fidelity_char(map, out, psi, 48);
            CHECK(std::abs(via_char - direct[out]) < 1e-8);
        }
    }
}
