#pragma once

#include <vector>

namespace imlambda {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
class Pchip {
public:
    Pchip() = default;
    // x strictly increasing, at least two points.
    Pchip(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const; // DomainError outside [x.front(), x.back()]
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::vector<double> x_, y_, d_;
};

} // namespace imlambda
