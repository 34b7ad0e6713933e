#include "rotstar/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace rotstar {

PencilEigen pencil_eigen(const MatrixXd& Q, const MatrixXd& G, double drop_rel) {
    // Jacobi scaling first, so columns of very different size do not hide each other.
    const int n = static_cast<int>(G.rows());
    VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = G(i, i) > 0 ? 1 / std::sqrt(G(i, i)) : 0.0;
    const MatrixXd Gs = d.asDiagonal() * (0.5 * (G + G.transpose())) * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> gs(Gs);
    const VectorXd& gl = gs.eigenvalues();
    const double gmax = gl.size() ? gl.maxCoeff() : 0.0;
    int keep = 0;
    for (int i = 0; i < gl.size(); ++i)
        if (gl(i) > drop_rel * gmax) ++keep;
    PencilEigen out;
    out.S.resize(n, keep);
    int c = 0;
    for (int i = 0; i < gl.size(); ++i)
        if (gl(i) > drop_rel * gmax) out.S.col(c++) = d.asDiagonal() * gs.eigenvectors().col(i) / std::sqrt(gl(i));
    MatrixXd B = out.S.transpose() * Q * out.S;
    B = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
    out.values = es.eigenvalues();
    out.vectors = out.S * es.eigenvectors();
    return out;
}

QuadraticFormMatrix make_form(MatrixXd Q, MatrixXd G, double tol_rel) {
    QuadraticFormMatrix f;
    f.Q = 0.5 * (Q + Q.transpose());
    f.G = 0.5 * (G + G.transpose());
    PencilEigen pe = pencil_eigen(f.Q, f.G);
    f.eigenvalues = pe.values;
    f.eigenvectors = pe.vectors;
    const double norm = pe.values.size() ? pe.values.cwiseAbs().maxCoeff() : 0.0;
    f.tol_zero = tol_rel * norm;
    for (int i = 0; i < pe.values.size(); ++i) {
        if (pe.values(i) < -f.tol_zero) ++f.inertia.neg;
        else if (pe.values(i) > f.tol_zero) ++f.inertia.pos;
        else ++f.inertia.zero;
    }
    return f;
}

MatrixXd null_space_of_row(const VectorXd& b) {
    const int n = static_cast<int>(b.size());
    Eigen::HouseholderQR<MatrixXd> qr(b);
    MatrixXd Qm = qr.householderQ() * MatrixXd::Identity(n, n);
    return Qm.rightCols(n - 1);
}

double symmetry_defect(const MatrixXd& Q) {
    const double n = Q.norm();
    return n > 0 ? (Q - Q.transpose()).norm() / n : 0.0;
}

int gmres(const std::function<VectorXd(const VectorXd&)>& apply, const VectorXd& rhs, VectorXd& x,
          double rel_tol, int max_iter, int restart) {
    const double bnorm = std::max(rhs.norm(), 1e-300);
    int total = 0;
    const int n = static_cast<int>(rhs.size());
    while (total < max_iter) {
        VectorXd r = rhs - apply(x);
        double beta = r.norm();
        if (beta <= rel_tol * bnorm) return total;
        const int m = std::min(restart, max_iter - total);
        MatrixXd V(n, m + 1);
        MatrixXd H = MatrixXd::Zero(m + 1, m);
        VectorXd cs = VectorXd::Zero(m), sn = VectorXd::Zero(m), g = VectorXd::Zero(m + 1);
        V.col(0) = r / beta;
        g(0) = beta;
        int j = 0;
        for (; j < m; ++j) {
            VectorXd w = apply(V.col(j));
            ++total;
            for (int i = 0; i <= j; ++i) {
                H(i, j) = w.dot(V.col(i));
                w -= H(i, j) * V.col(i);
            }
            H(j + 1, j) = w.norm();
            if (H(j + 1, j) > 0) V.col(j + 1) = w / H(j + 1, j);
            for (int i = 0; i < j; ++i) {
                const double t = cs(i) * H(i, j) + sn(i) * H(i + 1, j);
                H(i + 1, j) = -sn(i) * H(i, j) + cs(i) * H(i + 1, j);
                H(i, j) = t;
            }
            const double den = std::hypot(H(j, j), H(j + 1, j));
            cs(j) = den > 0 ? H(j, j) / den : 1.0;
            sn(j) = den > 0 ? H(j + 1, j) / den : 0.0;
            H(j, j) = den;
            H(j + 1, j) = 0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);
            if (std::abs(g(j + 1)) <= rel_tol * bnorm || H(j, j) == 0) {
                ++j;
                break;
            }
        }
        VectorXd y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
        x += V.leftCols(j) * y;
        if (std::abs(g(j)) <= rel_tol * bnorm) return total;
    }
    return total;
}

}  // namespace rotstar

namespace rotstar {

SymmetryAdjusted inertia_with_symmetry_mode(const QuadraticFormMatrix& f, const VectorXd& overlap,
                                            double t_norm, double corr_min, double small_rel) {
    SymmetryAdjusted out;
    out.inertia = f.inertia;
    for (int i = 0; i < f.eigenvalues.size(); ++i) {
        // Pencil eigenvectors are G-orthonormal.
        const double c = std::abs(f.eigenvectors.col(i).dot(overlap)) / t_norm;
        if (c > out.correlation) {
            out.correlation = c;
            out.mode_index = i;
        }
    }
    if (out.mode_index < 0) return out;
    out.mode_value = f.eigenvalues(out.mode_index);
    const double norm = f.eigenvalues.cwiseAbs().maxCoeff();
    if (out.correlation >= corr_min && std::abs(out.mode_value) <= small_rel * norm) {
        if (out.mode_value < -f.tol_zero) {
            --out.inertia.neg;
            ++out.inertia.zero;
        } else if (out.mode_value > f.tol_zero) {
            --out.inertia.pos;
            ++out.inertia.zero;
        }
    }
    return out;
}

}  // namespace rotstar
