#include "rotstar/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rotstar/errors.hpp"

namespace rotstar {

namespace {

void legendre(double x, int l_max, double* out) {
    out[0] = 1.0;
    if (l_max >= 1) out[1] = x;
    for (int l = 2; l <= l_max; ++l) out[l] = ((2 * l - 1) * x * out[l - 1] - (l - 1) * out[l - 2]) / l;
}

}  // namespace

MultipolePoisson::MultipolePoisson(const AxiGrid& grid, int l_max) : grid_(grid), l_max_(l_max) {
    if (l_max < 1) throw DomainError("MultipolePoisson: l_max must be >= 1");
    const int n = grid.size();
    scale_ = std::hypot(grid.r_max, grid.z_max);
    s_.resize(n);
    P_.resize(l_max + 1, n);
    w_ = grid.weights();
    for (int i = 0; i < grid.nr; ++i)
        for (int k = 0; k < grid.nz; ++k) {
            const int j = grid.idx(i, k);
            const double s = std::hypot(grid.r(i), grid.z(k));
            s_(j) = s / scale_;
            legendre(grid.z(k) / s, l_max, P_.col(j).data());
        }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return s_(a) < s_(b); });
}

VectorXd MultipolePoisson::apply(const VectorXd& f, Parity parity) const {
    const int n = grid_.size();
    const int l0 = parity == Parity::even ? 0 : 1;
    const int nl = (l_max_ - l0) / 2 + 1;
    VectorXd out = VectorXd::Zero(n);
    std::vector<double> acc(nl, 0.0);
    // Inner part: nodes with s_j <= s_i (including i itself).
    for (int t = 0; t < n; ++t) {
        const int j = order_[t];
        const double s = s_(j), a = w_(j) * f(j);
        double sl = l0 == 0 ? 1.0 : s;  // s^l
        const double s2 = s * s;
        double inv = 1.0 / (l0 == 0 ? s : s2);  // s^-(l+1)
        double v = 0;
        for (int q = 0; q < nl; ++q) {
            const int l = l0 + 2 * q;
            acc[q] += a * P_(l, j) * sl;
            v += P_(l, j) * inv * acc[q];
            sl *= s2;
            inv /= s2;
        }
        out(j) = v;
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    // Outer part: nodes with s_j > s_i.
    for (int t = n - 1; t >= 0; --t) {
        const int j = order_[t];
        const double s = s_(j), a = w_(j) * f(j);
        const double s2 = s * s;
        double sl = l0 == 0 ? 1.0 : s;
        double inv = 1.0 / (l0 == 0 ? s : s2);
        double v = 0;
        for (int q = 0; q < nl; ++q) {
            const int l = l0 + 2 * q;
            v += P_(l, j) * sl * acc[q];
            acc[q] += a * P_(l, j) * inv;
            sl *= s2;
            inv /= s2;
        }
        out(j) += v;
    }
    return out / scale_;
}

double MultipolePoisson::center(const VectorXd& f) const {
    double v = 0;
    for (int j = 0; j < grid_.size(); ++j) v += w_(j) * f(j) / s_(j);
    return v / scale_;
}

double MultipolePoisson::at_point(const VectorXd& f, double r, double z, Parity parity) const {
    const double sx = std::hypot(r, z) / scale_;
    if (sx == 0) return parity == Parity::even ? center(f) : 0.0;
    std::vector<double> px(l_max_ + 1);
    legendre(z / (sx * scale_), l_max_, px.data());
    const int l0 = parity == Parity::even ? 0 : 1;
    double v = 0;
    for (int j = 0; j < grid_.size(); ++j) {
        const double lo = std::min(sx, s_(j)), hi = std::max(sx, s_(j));
        const double ratio = lo / hi;
        double k = (l0 == 0 ? 1.0 : ratio) / hi;
        double acc = 0;
        for (int l = l0; l <= l_max_; l += 2) {
            acc += k * px[l] * P_(l, j);
            k *= ratio * ratio;
        }
        v += w_(j) * f(j) * acc;
    }
    return v / scale_;
}

}  // namespace rotstar
