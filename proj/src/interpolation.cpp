#include "imlambda/interpolation.hpp"

#include "imlambda/errors.hpp"

#include <algorithm>
#include <cmath>

namespace imlambda {

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("interpolation needs at least two matching nodes");
    for (std::size_t k = 1; k < n; ++k)
        if (!(x_[k] > x_[k - 1])) throw DomainError("interpolation nodes must be strictly increasing");

    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x_[k + 1] - x_[k];
        s[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = s[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (s[k - 1] * s[k] <= 0.0) continue;
        const double w1 = 2.0 * h[k] + h[k - 1], w2 = h[k] + 2.0 * h[k - 1];
        d_[k] = (w1 + w2) / (w1 / s[k - 1] + w2 / s[k]);
    }
    auto end_slope = [](double h0, double h1, double s0, double s1) {
        double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0) d = 0.0;
        else if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0)) d = 3.0 * s0;
        return d;
    };
    d_[0] = end_slope(h[0], h[1], s[0], s[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
}

double Pchip::operator()(double x) const {
    if (x_.empty()) throw DomainError("empty interpolant");
    if (x < x_.front() || x > x_.back()) throw DomainError("interpolation argument outside the tabulated range");
    std::size_t k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    k = std::clamp<std::size_t>(k, 1, x_.size() - 1) - 1;
    const double h = x_[k + 1] - x_[k];
    const double t = (x - x_[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * d_[k] + (-2 * t3 + 3 * t2) * y_[k + 1] +
           (t3 - t2) * h * d_[k + 1];
}

} // namespace imlambda
