#include "cvqt/gaussian.hpp"
#include "cvqt/network.hpp"

#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <random>

using namespace cvqt;

TEST_CASE("symplectic builders satisfy their defining matrices") {
    SUBCASE("fully transmissive beam splitter is the identity") {
        const auto bs = make_beamsplitter(1.0, 0, 1, 2);
        CHECK((bs.mat - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() ==
              doctest::Approx(0.0));
    }
    SUBCASE("two-mode squeezer at gain 2 has coefficients (sqrt2, 1)") {
        const auto s = make_two_mode_squeezer(2.0, 0, 1, 2);
        CHECK(s.mat(0, 0) == doctest::Approx(std::sqrt(2.0)));
        CHECK(s.mat(0, 2) == doctest::Approx(1.0));
        CHECK(s.mat(1, 1) == doctest::Approx(std::sqrt(2.0)));
        CHECK(s.mat(1, 3) == doctest::Approx(-1.0));
    }
    SUBCASE("quarter rotation maps (x,p) to (p,-x)") {
        const auto r = make_rotation(M_PI / 2.0, 0, 1);
        Eigen::Matrix2d want;
        want << 0, 1, -1, 0;
        CHECK((r.mat - want).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("parameter and index validation") {
        CHECK_THROWS_AS(make_beamsplitter(1.5, 0, 1, 2), std::invalid_argument);
        CHECK_THROWS_AS(make_two_mode_squeezer(0.5, 0, 1, 2), std::invalid_argument);
        CHECK_THROWS_AS(make_beamsplitter(0.5, 0, 0, 2), std::out_of_range);
        CHECK_THROWS_AS(make_rotation(0.1, 3, 2), std::out_of_range);
    }
}

TEST_CASE("apply_symplectic") {
    const GaussianState vac2 = vacuum_state(2);
    SUBCASE("identity leaves the state alone") {
        SymplecticTransform id(2, Eigen::MatrixXd::Identity(4, 4));
        const auto out = apply_symplectic(id, vac2);
        CHECK((out.cm - vac2.cm).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("balanced beam splitter preserves the two-mode vacuum") {
        const auto out = apply_symplectic(make_beamsplitter(0.5, 0, 1, 2), vac2);
        CHECK((out.cm - vac2.cm).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("squeezed vacuum matches the direct matrix product") {
        const double s = 0.7;
        const auto out =
            apply_symplectic(make_squeezer(s, Axis::X, 0, 1), vacuum_state(1));
        // oracle: S sigma S^T with S = diag(e^-s, e^s)
        Eigen::Matrix2d sq = Eigen::Vector2d(std::exp(-s), std::exp(s)).asDiagonal();
        const Eigen::Matrix2d want = sq * (0.5 * Eigen::Matrix2d::Identity()) * sq.transpose();
        CHECK((out.cm - want).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(out.cm(0, 0) == doctest::Approx(0.5 * std::exp(-2.0 * s)));
        CHECK(out.cm(1, 1) == doctest::Approx(0.5 * std::exp(2.0 * s)));
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS_AS(apply_symplectic(make_rotation(0.3, 0, 1), vac2),
                        std::invalid_argument);
    }
}

TEST_CASE("physicality and the symplectic spectrum") {
    SUBCASE("vacuum") {
        const auto rep = check_physical(vacuum_state(1));
        CHECK(rep.physical);
        CHECK(rep.least_symplectic_eigenvalue == doctest::Approx(0.5));
    }
    SUBCASE("sub-vacuum noise is unphysical") {
        const GaussianState bad(1, 0.25 * Eigen::Matrix2d::Identity());
        CHECK_FALSE(check_physical(bad).physical);
    }
    SUBCASE("TMSV is pure") {
        const auto nus = symplectic_spectrum(tmsv_cm(1.0));
        REQUIRE(nus.size() == 2);
        CHECK(nus[0] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(nus[1] == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("thermal state eigenvalue is nbar + 1/2") {
        const double nbar = 1.7;
        const auto nus = symplectic_spectrum(thermal_state(nbar));
        CHECK(nus[0] == doctest::Approx(nbar + 0.5));
    }
    SUBCASE("two-mode vacuum") {
        const auto nus = symplectic_spectrum(vacuum_state(2));
        CHECK(nus[0] == doctest::Approx(0.5));
        CHECK(nus[1] == doctest::Approx(0.5));
    }
}

TEST_CASE("symplectic transforms preserve the spectrum") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        const GaussianState state = test::random_two_mode(rng);
        const auto before = symplectic_spectrum(state);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        auto s = compose(make_beamsplitter(0.3, 0, 1, 2),
                         make_squeezer(0.8, Axis::P, 1, 2));
        s = compose(make_rotation(angle(rng), 0, 2), s);
        const auto after = symplectic_spectrum(apply_symplectic(s, state));
        for (std::size_t i = 0; i < before.size(); ++i)
            CHECK(std::abs(before[i] - after[i]) < 1e-10);
    }
}

TEST_CASE("partial trace") {
    SUBCASE("keeping every mode is the identity") {
        const auto state = tmsv_cm(0.9);
        const std::array<int, 2> keep{0, 1};
        const auto out = partial_trace(state, keep);
        CHECK((out.cm - state.cm).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    }
    SUBCASE("TMSV reduces to a thermal state") {
        const double r = 0.8;
        const std::array<int, 1> keep{0};
        const auto out = partial_trace(tmsv_cm(r), keep);
        const double want = 0.5 * std::cosh(2.0 * r);
        CHECK((out.cm - want * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("standard-form reduction keeps the local diagonals") {
        const auto form = three_mode_standard_cm(1.5, 1.0, 1.0);
        const std::array<int, 2> keep{0, 1};
        const auto out = partial_trace(form.to_state(), keep);
        CHECK(out.cm(0, 0) == doctest::Approx(1.5));
        CHECK(out.cm(1, 1) == doctest::Approx(1.5));
        CHECK(out.cm(2, 2) == doctest::Approx(1.0));
        CHECK(out.cm(3, 3) == doctest::Approx(1.0));
    }
    SUBCASE("empty keep list throws") {
        CHECK_THROWS_AS(partial_trace(tmsv_cm(0.2), std::span<const int>{}),
                        std::invalid_argument);
    }
}

TEST_CASE("partial transposition least eigenvalue") {
    SUBCASE("TMSV across the split") {
        const double r = 0.65;
        const std::array<int, 1> part{0};
        CHECK(pt_least_eigenvalue(tmsv_cm(r), part) ==
              doctest::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-10));
    }
    SUBCASE("product vacuum stays at 1/2") {
        const std::array<int, 1> part{1};
        CHECK(pt_least_eigenvalue(vacuum_state(2), part) == doctest::Approx(0.5));
    }
    SUBCASE("assist-conditioned network pair matches the closed form") {
        const GaussianState state = network_symmetric_cm(2, 1.0, 1.0, 1.0, 1.0);
        const std::array<int, 1> part{0};
        CHECK(std::abs(pt_least_eigenvalue(assisted_pair_cm(state), part) -
                       nu_assisted(2, 1.0, 1.0, 1.0)) < 1e-9);
    }
}

TEST_CASE("homodyne conditioning") {
    SUBCASE("measuring one half of a product state leaves the other alone") {
        GaussianState prod = vacuum_state(2);
        prod.cm(0, 0) = 0.9;
        prod.cm(1, 1) = 0.6;
        const auto out = homodyne_condition(prod, 1, Axis::X);
        CHECK(out.n_modes == 1);
        CHECK(out.cm(0, 0) == doctest::Approx(0.9));
        CHECK(out.cm(1, 1) == doctest::Approx(0.6));
    }
    SUBCASE("momentum measurement on TMSV squeezes the partner momentum") {
        const double r = 1.1;
        const auto out = homodyne_condition(tmsv_cm(r), 1, Axis::P);
        // Schur-complement oracle: app - c^2/app with app = cosh(2r)/2,
        // c = sinh(2r)/2.
        const double app = 0.5 * std::cosh(2.0 * r), c = 0.5 * std::sinh(2.0 * r);
        CHECK(out.cm(1, 1) == doctest::Approx(app - c * c / app));
        CHECK(out.cm(1, 1) == doctest::Approx(1.0 / (2.0 * std::cosh(2.0 * r))));
        CHECK(out.cm(0, 0) == doctest::Approx(app));
    }
    SUBCASE("conditioning commutes with rotating an untouched mode") {
        std::mt19937_64 rng(7);
        const GaussianState state = test::random_two_mode(rng);
        const auto rot = make_rotation(0.77, 0, 2);
        const auto a = homodyne_condition(apply_symplectic(rot, state), 1, Axis::P);
        const auto b = apply_symplectic(make_rotation(0.77, 0, 1),
                                        homodyne_condition(state, 1, Axis::P));
        CHECK((a.cm - b.cm).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("single mode cannot be conditioned") {
        CHECK_THROWS_AS(homodyne_condition(vacuum_state(1), 0, Axis::X),
                        std::invalid_argument);
    }
}

TEST_CASE("phase-insensitive channel") {
    SUBCASE("unit transmissivity without noise is the identity") {
        const auto state = tmsv_cm(0.5);
        const auto out = phase_insensitive_channel(state, 0, 1.0, 0.0);
        CHECK((out.cm - state.cm).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("full loss into vacuum returns vacuum") {
        const auto out = phase_insensitive_channel(vacuum_state(1), 0, 0.0, 0.0);
        CHECK((out.cm - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("zero x-p cross blocks stay exactly zero") {
        auto state = three_mode_standard_cm(1.4, 1.1, 0.9).to_state();
        for (int mode = 0; mode < 3; ++mode)
            state = phase_insensitive_channel(state, mode, 0.7, 0.3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                CHECK(state.cm(2 * i, 2 * j + 1) == 0.0);
                CHECK(state.cm(2 * i + 1, 2 * j) == 0.0);
            }
        CHECK(check_physical(state).physical);
    }
}

TEST_CASE("two-mode squeezed vacuum covariance") {
    SUBCASE("zero squeezing is vacuum") {
        CHECK((tmsv_cm(0.0).cm - vacuum_state(2).cm).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("half-acosh(3) gives local diagonals 3/2") {
        const double r = 0.5 * std::acosh(3.0);
        CHECK(tmsv_cm(r).cm(0, 0) == doctest::Approx(1.5));
        CHECK(tmsv_cm(r).cm(2, 2) == doctest::Approx(1.5));
    }
    SUBCASE("strong squeezing remains physical") {
        const auto rep = check_physical(tmsv_cm(5.0));
        CHECK(rep.physical);
    }
}

TEST_CASE("three-mode standard form") {
    SUBCASE("tight-bound parameters") {
        const auto f = three_mode_standard_cm(1.5, 1.0, 1.0);
        CHECK(f.e12p == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.e12m == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(f.e13p == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.e13m == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(f.e23p == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(f.e23m == doctest::Approx(0.5).epsilon(1e-9));
        const auto nus = symplectic_spectrum(f.to_state());
        for (double nu : nus) CHECK(nu == doctest::Approx(0.5).epsilon(1e-8));
    }
    SUBCASE("triple vacuum has no correlations") {
        const auto f = three_mode_standard_cm(0.5, 0.5, 0.5);
        CHECK(f.e12p == doctest::Approx(0.0));
        CHECK(f.e23m == doctest::Approx(0.0));
    }
    SUBCASE("TMSV times vacuum pattern") {
        const double a = 0.5 * std::cosh(2.0);
        const auto f = three_mode_standard_cm(a, a, 0.5);
        CHECK(f.e12p == doctest::Approx(0.5 * std::sinh(2.0)).epsilon(1e-9));
        CHECK(f.e12m == doctest::Approx(-0.5 * std::sinh(2.0)).epsilon(1e-9));
        CHECK(std::abs(f.e13p) < 1e-9);
        CHECK(std::abs(f.e23p) < 1e-9);
        CHECK(std::abs(f.e13m) < 1e-9);
        CHECK(std::abs(f.e23m) < 1e-9);
    }
    SUBCASE("triangle violations are rejected") {
        CHECK_THROWS_AS(three_mode_standard_cm(3.0, 0.6, 0.6), std::invalid_argument);
        CHECK_THROWS_AS(three_mode_standard_cm(0.4, 1.0, 1.0), std::invalid_argument);
    }
    SUBCASE("random feasible diagonals give pure states satisfying the triangle") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 40; ++trial) {
            const auto [a1, a2, a3] = test::random_standard_diagonals(rng);
            const auto f = three_mode_standard_cm(a1, a2, a3);
            const auto state = f.to_state();
            const auto nus = symplectic_spectrum(state);
            for (double nu : nus) CHECK(std::abs(nu - 0.5) < 1e-8);
            CHECK(check_physical(state).physical);
            // zero x-p blocks by construction
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) CHECK(state.cm(2 * i, 2 * j + 1) == 0.0);
        }
    }
}

TEST_CASE("network symmetric state") {
    SUBCASE("no squeezing gives vacuum") {
        const auto state = network_symmetric_cm(3, 0.0, 0.0, 1.0, 1.0);
        CHECK((state.cm - vacuum_state(4).cm).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("single receiver reproduces locally squeezed TMSV entanglement") {
        const double r = 0.9;
        const auto state = network_symmetric_cm(1, r, r, 1.0, 1.0);
        const std::array<int, 1> part{0};
        CHECK(pt_least_eigenvalue(state, part) ==
              doctest::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-9));
    }
    SUBCASE("receiver modes are permutation symmetric") {
        const auto state = network_symmetric_cm(4, 0.6, 0.9, 1.2, 1.1);
        for (int i = 1; i <= 4; ++i)
            for (int j = i + 1; j <= 4; ++j) {
                CHECK((state.block(i, i) - state.block(j, j)).cwiseAbs().maxCoeff() <
                      1e-12);
                CHECK((state.block(0, i) - state.block(0, j)).cwiseAbs().maxCoeff() <
                      1e-12);
            }
        // pairwise receiver correlations all equal
        const Eigen::Matrix2d ref = state.block(1, 2);
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j) {
                if (i == j) continue;
                CHECK((state.block(i, j) - ref).cwiseAbs().maxCoeff() < 1e-12);
            }
    }
    SUBCASE("builders produce physical states") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> rdist(0.0, 1.5), ndist(1.0, 1.6);
        for (int trial = 0; trial < 20; ++trial) {
            const auto state = network_symmetric_cm(1 + trial % 5, rdist(rng), rdist(rng),
                                                    ndist(rng), ndist(rng));
            CHECK(check_physical(state).physical);
        }
    }
}

TEST_CASE("network PT eigenvalues match the closed forms on a grid") {
    const std::array<double, 4> rbars{0.1, 0.5, 1.0, 2.0};
    const std::array<std::pair<double, double>, 2> ns{{{1.0, 1.0}, {1.5, 1.2}}};
    for (int n : {1, 2, 5, 10})
        for (double rbar : rbars)
            for (auto [n1, n2] : ns) {
                const auto state = network_symmetric_cm(n, rbar, rbar, n1, n2);
                const std::array<int, 1> part{0};
                CHECK(std::abs(pt_least_eigenvalue(assisted_pair_cm(state), part) -
                               nu_assisted(n, n1, n2, rbar)) < 1e-9);
                const std::array<int, 2> pair{0, 1};
                const auto reduced = partial_trace(state, pair);
                CHECK(std::abs(pt_least_eigenvalue(reduced, part) -
                               nu_pair(n, n1, n2, rbar)) < 1e-9);
            }
}

TEST_CASE("covariance serialization round trip") {
    std::mt19937_64 rng(5);
    const GaussianState state = test::random_two_mode(rng);
    nlohmann::json j = state;
    CHECK(j.at("n_modes") == 2);
    CHECK(j.at("cm").size() == 16);
    const auto back = j.get<GaussianState>();
    CHECK((back.cm - state.cm).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK((back.mean - state.mean).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}
