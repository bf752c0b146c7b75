#pragma once

#include <complex>
#include <vector>

namespace dmtk {

using cdouble = std::complex<double>;

// Dense row-major complex matrix.  Everything in this project is at most a
// few antennas on a side, so the implementation favours clarity and exact
// control over the numerics instead of speed.
class CMatrix {
  public:
    CMatrix() : rows_(0), cols_(0) {}
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static CMatrix identity(int n);

    cdouble &operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const cdouble &operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

  private:
    int rows_, cols_;
    std::vector<cdouble> a_;
};

CMatrix matmul(const CMatrix &a, const CMatrix &b);
CMatrix adjoint(const CMatrix &a);

bool is_hermitian(const CMatrix &a, double tol = 1e-12);

// A = vectors * diag(values) * vectors^H, eigenvalues sorted descending.
struct EigResult {
    std::vector<double> values;
    CMatrix vectors;
};

// Cyclic Jacobi for Hermitian matrices.  Sweeps until the off-diagonal
// Frobenius norm falls below tol relative to the matrix scale.
EigResult eigh(const CMatrix &a, double tol = 1e-12);

// Hermitian PSD square root via the eigendecomposition.  Eigenvalues below
// -neg_tol * max|eig| are an error; small negatives are clamped to zero.
CMatrix hermitian_sqrt(const CMatrix &a, double neg_tol = 1e-10);

// log2 det of a Hermitian positive definite matrix via Cholesky.
double cholesky_log2_det(CMatrix a);

} // namespace dmtk
