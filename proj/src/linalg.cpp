#include "dmtk/linalg.hpp"

#include "dmtk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dmtk {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

CMatrix matmul(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions differ");
    CMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const cdouble aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix adjoint(const CMatrix &a) {
    CMatrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            t(j, i) = std::conj(a(i, j));
    return t;
}

bool is_hermitian(const CMatrix &a, double tol) {
    if (a.rows() != a.cols())
        return false;
    double scale = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0)
        return true;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i; j < a.cols(); ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * scale)
                return false;
    return true;
}

namespace {

double off_diag_norm(const CMatrix &a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j)
                s += std::norm(a(i, j));
    return std::sqrt(s);
}

} // namespace

EigResult eigh(const CMatrix &input, double tol) {
    if (input.rows() != input.cols())
        throw std::invalid_argument("eigh: matrix must be square");
    if (!is_hermitian(input, 1e-10))
        throw std::invalid_argument("eigh: matrix must be Hermitian");

    const int n = input.rows();
    CMatrix a = input;
    // Symmetrize exactly so rounding in the input cannot bias the iteration.
    for (int i = 0; i < n; ++i) {
        a(i, i) = cdouble(a(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) {
            cdouble v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    CMatrix v = CMatrix::identity(n);

    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        scale += std::abs(a(i, i).real());
    scale = std::max(scale, 1.0);

    const int max_sweeps = 60;
    int sweep = 0;
    while (off_diag_norm(a) > tol * scale) {
        if (++sweep > max_sweeps)
            throw NumericalError("eigh: Jacobi iteration did not converge");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = std::abs(a(p, q));
                if (apq == 0.0)
                    continue;
                // Phase that makes the pivot real, then a real Jacobi rotation.
                const cdouble w = a(p, q) / apq;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cdouble sw = s * w;

                for (int k = 0; k < n; ++k) {
                    const cdouble akp = a(k, p);
                    const cdouble akq = a(k, q);
                    a(k, p) = c * akp - std::conj(sw) * akq;
                    a(k, q) = sw * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const cdouble apk = a(p, k);
                    const cdouble aqk = a(q, k);
                    a(p, k) = c * apk - sw * aqk;
                    a(q, k) = std::conj(sw) * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cdouble(a(p, p).real(), 0.0);
                a(q, q) = cdouble(a(q, q).real(), 0.0);

                for (int k = 0; k < n; ++k) {
                    const cdouble vkp = v(k, p);
                    const cdouble vkq = v(k, q);
                    v(k, p) = c * vkp - std::conj(sw) * vkq;
                    v(k, q) = sw * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    EigResult res;
    res.values.resize(n);
    res.vectors = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        res.values[j] = a(order[j], order[j]).real();
        for (int i = 0; i < n; ++i)
            res.vectors(i, j) = v(i, order[j]);
    }
    return res;
}

CMatrix hermitian_sqrt(const CMatrix &a, double neg_tol) {
    EigResult e = eigh(a);
    const int n = a.rows();
    double top = 1.0;
    for (double lam : e.values)
        top = std::max(top, std::abs(lam));
    std::vector<double> root_vals(n);
    for (int k = 0; k < n; ++k) {
        if (e.values[k] < -neg_tol * top)
            throw NumericalError("hermitian_sqrt: matrix has a negative eigenvalue");
        root_vals[k] = e.values[k] > 0.0 ? std::sqrt(e.values[k]) : 0.0;
    }
    CMatrix root(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cdouble sum = 0.0;
            for (int k = 0; k < n; ++k)
                sum += e.vectors(i, k) * root_vals[k] * std::conj(e.vectors(j, k));
            root(i, j) = sum;
        }
    return root;
}

double cholesky_log2_det(CMatrix a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("cholesky_log2_det: matrix must be square");
    const int n = a.rows();
    double log2det = 0.0;
    for (int j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (int k = 0; k < j; ++k)
            d -= std::norm(a(j, k));
        if (!(d > 0.0))
            throw NumericalError("cholesky_log2_det: matrix not positive definite");
        const double l = std::sqrt(d);
        log2det += 2.0 * std::log2(l);
        a(j, j) = l;
        for (int i = j + 1; i < n; ++i) {
            cdouble s = a(i, j);
            for (int k = 0; k < j; ++k)
                s -= a(i, k) * std::conj(a(j, k));
            a(i, j) = s / l;
        }
    }
    return log2det;
}

} // namespace dmtk
