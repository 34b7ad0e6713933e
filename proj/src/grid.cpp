#include "rotstar/grid.hpp"

#include "rotstar/errors.hpp"

namespace rotstar {

AxiGrid::AxiGrid(int nr_, int nz_, double r_max_, double z_max_)
    : nr(nr_), nz(nz_), r_max(r_max_), z_max(z_max_), dr(r_max_ / nr_), dz(z_max_ / nz_) {
    if (nr < 4 || nz < 4 || !(r_max > 0) || !(z_max > 0)) throw DomainError("AxiGrid: invalid dimensions");
}

VectorXd AxiGrid::weights() const {
    VectorXd w(size());
    for (int i = 0; i < nr; ++i) w.segment(i * nz, nz).setConstant(weight(i));
    return w;
}

double AxiGrid::integrate(const VectorXd& f) const {
    double s = 0;
    for (int i = 0; i < nr; ++i) s += weight(i) * f.segment(i * nz, nz).sum();
    return s;
}

double AxiGrid::dot(const VectorXd& f, const VectorXd& g) const {
    double s = 0;
    for (int i = 0; i < nr; ++i) s += weight(i) * f.segment(i * nz, nz).dot(g.segment(i * nz, nz));
    return s;
}

VectorXd AxiGrid::column_integral(const VectorXd& f) const {
    VectorXd W(nr);
    for (int i = 0; i < nr; ++i) W(i) = 2 * dz * f.segment(i * nz, nz).sum();
    return W;
}

VectorXd AxiGrid::cylinder_integral(const VectorXd& f) const {
    const VectorXd W = column_integral(f);
    VectorXd m(nr);
    double acc = 0;
    for (int i = 0; i < nr; ++i) {
        const double c = r(i) * dr * W(i);
        m(i) = acc + 0.5 * c;
        acc += c;
    }
    return m;
}

VectorXd AxiGrid::cylinder_tail(const VectorXd& f) const {
    const VectorXd W = column_integral(f);
    VectorXd t(nr);
    double acc = 0;
    for (int i = nr - 1; i >= 0; --i) {
        const double c = r(i) * dr * W(i);
        t(i) = acc + 0.5 * c;
        acc += c;
    }
    return t;
}

VectorXd AxiGrid::d_dr(const VectorXd& f) const {
    VectorXd d(size());
    for (int i = 0; i < nr; ++i)
        for (int k = 0; k < nz; ++k) {
            double v;
            if (i == 0) v = (f(idx(1, k)) - f(idx(0, k))) / (2 * dr);
            else if (i == nr - 1) v = (3 * f(idx(i, k)) - 4 * f(idx(i - 1, k)) + f(idx(i - 2, k))) / (2 * dr);
            else v = (f(idx(i + 1, k)) - f(idx(i - 1, k))) / (2 * dr);
            d(idx(i, k)) = v;
        }
    return d;
}

VectorXd AxiGrid::d_dz(const VectorXd& f, Parity parity) const {
    const double sgn = parity == Parity::even ? 1.0 : -1.0;
    VectorXd d(size());
    for (int i = 0; i < nr; ++i)
        for (int k = 0; k < nz; ++k) {
            double v;
            if (k == 0) v = (f(idx(i, 1)) - sgn * f(idx(i, 0))) / (2 * dz);
            else if (k == nz - 1) v = (3 * f(idx(i, k)) - 4 * f(idx(i, k - 1)) + f(idx(i, k - 2))) / (2 * dz);
            else v = (f(idx(i, k + 1)) - f(idx(i, k - 1))) / (2 * dz);
            d(idx(i, k)) = v;
        }
    return d;
}

}  // namespace rotstar
