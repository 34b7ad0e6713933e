#pragma once

#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Splines>

namespace rotstar {

// Interpolating cubic B-spline y(x) on sorted samples; reproduces cubics exactly.
class Spline1D {
public:
    Spline1D() = default;
    Spline1D(const std::vector<double>& x, const std::vector<double>& y);
    double operator()(double x) const;
    double derivative(double x) const;
    double x_min() const { return x0_; }
    double x_max() const { return x1_; }

private:
    double param(double x) const;
    double x0_ = 0, x1_ = 1;
    Eigen::Spline<double, 1> s_;
};

}  // namespace rotstar
