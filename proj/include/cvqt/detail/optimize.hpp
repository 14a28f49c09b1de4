#ifndef CVQT_DETAIL_OPTIMIZE_HPP
#define CVQT_DETAIL_OPTIMIZE_HPP

#include <cmath>
#include <functional>
#include <utility>

namespace cvqt::detail {

// Golden-section minimization of a unimodal function on [lo, hi].
// Returns (argmin, min value).
template <typename F>
std::pair<double, double> golden_minimize(F&& f, double lo, double hi,
                                          double xtol = 1e-10, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

} // namespace cvqt::detail

#endif
