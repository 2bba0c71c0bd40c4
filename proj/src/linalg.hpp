#pragma once

#include <functional>
#include <vector>

namespace cspec {

// Dense row-major square/rectangular matrix, just enough for desk-scale
// spectral work.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}
    static Matrix identity(int n);
    static Matrix from_row_major(int rows, int cols, std::vector<double> data);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix operator*(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix scaled(double s) const;
    Matrix transposed() const;
    std::vector<double> apply(const std::vector<double>& x) const;
    double max_abs() const;
    bool is_symmetric(double tol) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct EigenDecomposition {
    std::vector<double> values;  // sorted descending
    Matrix vectors;              // column j is the eigenvector of values[j]
};

// Cyclic Jacobi iteration for symmetric matrices; sweeps until the
// off-diagonal Frobenius norm drops below 1e-11 * ||m||_F.  Throws on
// non-symmetric input (tolerance 1e-12 relative) and after 100 sweeps
// without convergence.
EigenDecomposition symmetric_eigen(const Matrix& m);
std::vector<double> symmetric_eigenvalues(const Matrix& m);

// Perron eigenvalue of a non-negative square matrix: power iteration on
// m + I (the shift defeats periodic matrices such as Hashimoto matrices of
// cycles), returning rho(m + I) - 1.  Converged when successive norm-ratio
// estimates differ by < 1e-10; returns 0 for the zero/empty matrix.
double perron_eigenvalue(const Matrix& m, long max_iterations = 1000000);

// Determinant by LU with partial pivoting.
double det_lu(Matrix m);

// Solves the linear system a * x = b in place (a square, b one column).
std::vector<double> lu_solve(Matrix a, std::vector<double> b);

// Rayleigh quotient (m f, f) / (f, f); throws on the zero vector.
double rayleigh(const Matrix& m, const std::vector<double>& f);

// Extreme eigenvalues of a symmetric operator given as a matvec, restricted
// to the orthogonal complement of `constraints` (rows are an orthonormal
// family).  Lanczos with full reorthogonalization; `dim` is the ambient
// dimension.  Exact (up to roundoff) when it runs dim - #constraints steps.
struct ExtremeEigenvalues {
    double max = 0.0;
    double min = 0.0;
};
ExtremeEigenvalues lanczos_extremes(const std::function<void(const std::vector<double>&, std::vector<double>&)>& matvec,
                                    int dim, const std::vector<std::vector<double>>& constraints, int max_steps,
                                    unsigned long long seed);

// Extreme eigenvalues of a symmetric tridiagonal matrix (diag a, offdiag b)
// by bisection on the Sturm sign-change count.
ExtremeEigenvalues tridiagonal_extremes(const std::vector<double>& diag, const std::vector<double>& offdiag);

}  // namespace cspec
