#ifndef CVQT_TESTS_SUPPORT_HPP
#define CVQT_TESTS_SUPPORT_HPP

#include "cvqt/gaussian.hpp"

#include <random>

namespace cvqt::test {

// Random physical two-mode state: random thermal diagonal pushed through a
// random circuit of squeezers, rotations and a beam splitter.
inline GaussianState random_two_mode(std::mt19937_64& rng, bool pure = false,
                                     double max_squeeze = 1.0) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> squeeze(-max_squeeze, max_squeeze);
    std::uniform_real_distribution<double> trans(0.05, 0.95);
    std::uniform_real_distribution<double> therm(0.0, 0.8);

    Eigen::MatrixXd d = kVacuumVariance * Eigen::MatrixXd::Identity(4, 4);
    if (!pure) {
        d(0, 0) = d(1, 1) = kVacuumVariance + therm(rng);
        d(2, 2) = d(3, 3) = kVacuumVariance + therm(rng);
    }
    GaussianState state(2, d);
    auto s = compose(make_rotation(angle(rng), 0, 2), make_rotation(angle(rng), 1, 2));
    s = compose(make_squeezer(squeeze(rng), Axis::X, 0, 2), s);
    s = compose(make_squeezer(squeeze(rng), Axis::X, 1, 2), s);
    s = compose(make_beamsplitter(trans(rng), 0, 1, 2), s);
    s = compose(make_rotation(angle(rng), 0, 2), s);
    s = compose(make_rotation(angle(rng), 1, 2), s);
    return apply_symplectic(s, state);
}

// Random local diagonals inside the purity triangle, a1 in [1/2, hi].
inline std::array<double, 3> random_standard_diagonals(std::mt19937_64& rng,
                                                       double hi = 3.0) {
    std::uniform_real_distribution<double> pick(0.5, hi);
    for (;;) {
        const double a1 = pick(rng), a2 = pick(rng), a3 = pick(rng);
        const double q1 = a1 - 0.5, q2 = a2 - 0.5, q3 = a3 - 0.5;
        if (q1 <= q2 + q3 && q2 <= q1 + q3 && q3 <= q1 + q2) return {a1, a2, a3};
    }
}

} // namespace cvqt::test

#endif
