#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "errors.hpp"
#include "rng.hpp"

namespace cspec {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_row_major(int rows, int cols, std::vector<double> data) {
    require(static_cast<size_t>(rows) * cols == data.size(), "Matrix: data size mismatch");
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    require(cols_ == rhs.rows_, "Matrix: incompatible product");
    Matrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            double v = (*this)(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += v * rhs(k, j);
        }
    return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Matrix: incompatible sum");
    Matrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Matrix: incompatible difference");
    Matrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

Matrix Matrix::scaled(double s) const {
    Matrix out = *this;
    for (double& v : out.data_) v *= s;
    return out;
}

Matrix Matrix::transposed() const {
    Matrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
    require(static_cast<int>(x.size()) == cols_, "Matrix: apply size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double acc = 0.0;
        const double* row = data_.data() + static_cast<size_t>(i) * cols_;
        for (int j = 0; j < cols_; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

bool Matrix::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    double scale = std::max(1.0, max_abs());
    for (int i = 0; i < rows_; ++i)
        for (int j = i + 1; j < cols_; ++j)
            if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol * scale) return false;
    return true;
}

namespace {

double frobenius(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

double off_diagonal_frobenius(const Matrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

}  // namespace

EigenDecomposition symmetric_eigen(const Matrix& input) {
    require(input.rows() == input.cols(), "symmetric_eigen: matrix not square");
    require(input.is_symmetric(1e-12), "symmetric_eigen: matrix not symmetric");
    const int n = input.rows();
    Matrix a = input;
    Matrix v = Matrix::identity(n);
    const double norm = frobenius(a);
    const double target = 1e-11 * std::max(norm, 1e-300);

    int sweep = 0;
    while (off_diagonal_frobenius(a) > target) {
        if (++sweep > 100) throw Error(ErrorKind::NoConvergence, "symmetric_eigen: no convergence in 100 sweeps");
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return a(x, x) > a(y, y); });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a(idx[j], idx[j]);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, idx[j]);
    }
    return out;
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) { return symmetric_eigen(m).values; }

double perron_eigenvalue(const Matrix& m, long max_iterations) {
    require(m.rows() == m.cols(), "perron_eigenvalue: matrix not square");
    const int n = m.rows();
    if (n == 0) return 0.0;
    for (double v : m.data()) require(v >= 0.0, "perron_eigenvalue: negative entry");
    if (m.max_abs() == 0.0) return 0.0;

    std::vector<double> x(n, 1.0 / n), y(n);
    double estimate = 0.0;
    int stable = 0;
    for (long it = 0; it < max_iterations; ++it) {
        // y = (m + I) x
        for (int i = 0; i < n; ++i) {
            double acc = x[i];
            const double* row = m.data().data() + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        double norm = 0.0;
        for (double v : y) norm += v;
        double next = norm;  // x is L1-normalized, so the ratio is the plain sum
        for (int i = 0; i < n; ++i) x[i] = y[i] / norm;
        if (std::fabs(next - estimate) < 1e-10) {
            if (++stable >= 3) return next - 1.0;
        } else {
            stable = 0;
        }
        estimate = next;
    }
    throw Error(ErrorKind::NoConvergence, "perron_eigenvalue: no convergence");
}

double det_lu(Matrix m) {
    require(m.rows() == m.cols(), "det_lu: matrix not square");
    const int n = m.rows();
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(m(r, col)) > std::fabs(m(pivot, col))) pivot = r;
        if (m(pivot, col) == 0.0) return 0.0;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        double inv = 1.0 / m(col, col);
        for (int r = col + 1; r < n; ++r) {
            double f = m(r, col) * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
        }
    }
    return det;
}

std::vector<double> lu_solve(Matrix a, std::vector<double> b) {
    require(a.rows() == a.cols(), "lu_solve: matrix not square");
    const int n = a.rows();
    require(static_cast<int>(b.size()) == n, "lu_solve: size mismatch");
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        require(a(pivot, col) != 0.0, "lu_solve: singular system");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            std::swap(b[pivot], b[col]);
        }
        double inv = 1.0 / a(col, col);
        for (int r = col + 1; r < n; ++r) {
            double f = a(r, col) * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= a(i, j) * b[j];
        b[i] = acc / a(i, i);
    }
    return b;
}

double rayleigh(const Matrix& m, const std::vector<double>& f) {
    require(m.rows() == m.cols() && static_cast<int>(f.size()) == m.rows(), "rayleigh: size mismatch");
    double ff = 0.0;
    for (double v : f) ff += v * v;
    require(ff > 0.0, "rayleigh: zero vector");
    std::vector<double> mf = m.apply(f);
    double num = 0.0;
    for (size_t i = 0; i < f.size(); ++i) num += mf[i] * f[i];
    return num / ff;
}

namespace {

// Number of eigenvalues of the tridiagonal matrix strictly below x.
int sturm_count(const std::vector<double>& diag, const std::vector<double>& offdiag, double x) {
    int count = 0;
    double d = 1.0;
    const int n = static_cast<int>(diag.size());
    for (int i = 0; i < n; ++i) {
        double b2 = (i == 0) ? 0.0 : offdiag[i - 1] * offdiag[i - 1];
        d = diag[i] - x - b2 / d;
        if (d == 0.0) d = 1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

}  // namespace

ExtremeEigenvalues tridiagonal_extremes(const std::vector<double>& diag, const std::vector<double>& offdiag) {
    const int n = static_cast<int>(diag.size());
    require(n >= 1, "tridiagonal_extremes: empty matrix");
    require(static_cast<int>(offdiag.size()) == n - 1, "tridiagonal_extremes: offdiag size");
    double radius = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = std::fabs(diag[i]);
        if (i > 0) r += std::fabs(offdiag[i - 1]);
        if (i + 1 < n) r += std::fabs(offdiag[i]);
        radius = std::max(radius, r);
    }
    radius += 1.0;

    auto bisect = [&](bool want_max) {
        double lo = -radius, hi = radius;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            int below = sturm_count(diag, offdiag, mid);
            bool all_below = (below == n);
            bool none_below = (below == 0);
            if (want_max) {
                if (all_below)
                    hi = mid;
                else
                    lo = mid;
            } else {
                if (none_below)
                    lo = mid;
                else
                    hi = mid;
            }
            if (hi - lo < 1e-13 * radius) break;
        }
        return 0.5 * (lo + hi);
    };

    ExtremeEigenvalues out;
    out.max = bisect(true);
    out.min = bisect(false);
    return out;
}

ExtremeEigenvalues lanczos_extremes(const std::function<void(const std::vector<double>&, std::vector<double>&)>& matvec,
                                    int dim, const std::vector<std::vector<double>>& constraints, int max_steps,
                                    unsigned long long seed) {
    require(dim >= 1, "lanczos_extremes: empty space");
    const int free_dim = dim - static_cast<int>(constraints.size());
    require(free_dim >= 1, "lanczos_extremes: constraints fill the space");
    const int steps = std::min(max_steps, free_dim);

    auto project = [&](std::vector<double>& x) {
        for (const auto& c : constraints) {
            double dot = 0.0;
            for (int i = 0; i < dim; ++i) dot += c[i] * x[i];
            for (int i = 0; i < dim; ++i) x[i] -= dot * c[i];
        }
    };

    RngStream rng(seed);
    std::vector<double> q(dim);
    for (int i = 0; i < dim; ++i) q[i] = rng.uniform_real() - 0.5;
    project(q);
    double norm = 0.0;
    for (double v : q) norm += v * v;
    norm = std::sqrt(norm);
    require(norm > 1e-12, "lanczos_extremes: degenerate start vector");
    for (double& v : q) v /= norm;

    std::vector<std::vector<double>> basis;
    basis.push_back(q);
    std::vector<double> alpha, beta;
    std::vector<double> w(dim);

    for (int k = 0; k < steps; ++k) {
        matvec(basis[k], w);
        project(w);
        double a = 0.0;
        for (int i = 0; i < dim; ++i) a += w[i] * basis[k][i];
        alpha.push_back(a);
        for (int i = 0; i < dim; ++i) w[i] -= a * basis[k][i];
        if (k > 0)
            for (int i = 0; i < dim; ++i) w[i] -= beta[k - 1] * basis[k - 1][i];
        // Full reorthogonalization keeps the tridiagonal honest; the
        // constraint projection must be reapplied too, or roundoff leaks the
        // dominant constrained direction back in and it snowballs.
        for (const auto& u : basis) {
            double dot = 0.0;
            for (int i = 0; i < dim; ++i) dot += w[i] * u[i];
            for (int i = 0; i < dim; ++i) w[i] -= dot * u[i];
        }
        project(w);
        double b = 0.0;
        for (double v : w) b += v * v;
        b = std::sqrt(b);
        if (b < 1e-12 || k + 1 == steps) break;
        beta.push_back(b);
        std::vector<double> next(dim);
        for (int i = 0; i < dim; ++i) next[i] = w[i] / b;
        basis.push_back(std::move(next));
    }

    return tridiagonal_extremes(alpha, beta);
}

}  // namespace cspec
