#pragma once

#include "imlambda/errors.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace imlambda {

struct ScalarMin {
    double x = 0.0;
    double f = 0.0;
    int evaluations = 0;
};

/// Golden-section search for a minimum of f on [a, b], stopping when the bracket
/// is narrower than xtol.
inline ScalarMin golden_section(const std::function<double(double)>& f, double a, double b, double xtol,
                                int max_iter = 200) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    int evals = 2;
    for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    return fc < fd ? ScalarMin{c, fc, evals} : ScalarMin{d, fd, evals};
}

/// Uniform scan with n points followed by golden-section on the cell pair around
/// the best sample. `at_edge` is set when the best sample is an endpoint.
inline ScalarMin scan_then_golden(const std::function<double(double)>& f, double a, double b, int n, double xtol,
                                  bool* at_edge = nullptr) {
    if (n < 3) n = 3;
    const double h = (b - a) / (n - 1);
    int best = 0;
    double fbest = 0.0;
    for (int k = 0; k < n; ++k) {
        const double v = f(a + h * k);
        if (k == 0 || v < fbest) {
            fbest = v;
            best = k;
        }
    }
    if (at_edge) *at_edge = (best == 0 || best == n - 1);
    const double lo = a + h * std::max(best - 1, 0);
    const double hi = a + h * std::min(best + 1, n - 1);
    ScalarMin m = golden_section(f, lo, hi, xtol);
    m.evaluations += n;
    if (fbest < m.f) m = {a + h * best, fbest, m.evaluations};
    return m;
}

/// Bisection for a sign change of f on [a, b]; requires f(a) f(b) <= 0.
inline double bisect(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter = 200) {
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) throw NumericalError("bisection bracket has no sign change");
    for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace imlambda
