#include "qnl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace qnl {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
        throw std::invalid_argument("ComplexMatrix: entry count does not match dimensions");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> entries) {
    ComplexMatrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

Complex ComplexMatrix::trace() const {
    if (rows_ != cols_) throw std::invalid_argument("trace: matrix must be square");
    Complex sum = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) sum += (*this)(i, i);
    return sum;
}

bool ComplexMatrix::is_hermitian(double tolerance) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tolerance) return false;
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("matrix addition: dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("matrix subtraction: dimension mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (Complex& e : entries_) e *= scale;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
ComplexMatrix operator*(Complex scale, ComplexMatrix matrix) { return matrix *= scale; }
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) { return matmul(lhs, rhs); }

ComplexMatrix matmul(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.cols() != rhs.rows())
        throw std::invalid_argument("matmul: inner dimensions do not match");
    ComplexMatrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const Complex lik = lhs(i, k);
            if (lik == Complex{}) continue;
            for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += lik * rhs(k, j);
        }
    return out;
}

ComplexMatrix kron(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    ComplexMatrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t j = 0; j < lhs.cols(); ++j) {
            const Complex lij = lhs(i, j);
            if (lij == Complex{}) continue;
            for (std::size_t k = 0; k < rhs.rows(); ++k)
                for (std::size_t l = 0; l < rhs.cols(); ++l)
                    out(i * rhs.rows() + k, j * rhs.cols() + l) = lij * rhs(k, l);
        }
    return out;
}

double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
        throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs.rows(); ++i)
        for (std::size_t j = 0; j < lhs.cols(); ++j)
            worst = std::max(worst, std::abs(lhs(i, j) - rhs(i, j)));
    return worst;
}

StateVector::StateVector(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) throw std::invalid_argument("StateVector: empty amplitude list");
    double norm_sq = 0.0;
    for (const Complex& a : amplitudes_) norm_sq += std::norm(a);
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-10)
        throw std::invalid_argument("StateVector: amplitudes are not normalized");
}

StateVector StateVector::basis_state(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::invalid_argument("basis_state: index out of range");
    std::vector<Complex> amp(dim);
    amp[index] = 1.0;
    return StateVector(std::move(amp));
}

Complex StateVector::inner(const StateVector& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("inner: dimension mismatch");
    Complex sum = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) sum += std::conj(amplitudes_[i]) * other.amplitudes_[i];
    return sum;
}

ComplexMatrix StateVector::projector() const {
    ComplexMatrix m(dim(), dim());
    for (std::size_t i = 0; i < dim(); ++i)
        for (std::size_t j = 0; j < dim(); ++j)
            m(i, j) = amplitudes_[i] * std::conj(amplitudes_[j]);
    return m;
}

StateVector kron(const StateVector& lhs, const StateVector& rhs) {
    std::vector<Complex> amp(lhs.dim() * rhs.dim());
    for (std::size_t i = 0; i < lhs.dim(); ++i)
        for (std::size_t k = 0; k < rhs.dim(); ++k) amp[i * rhs.dim() + k] = lhs[i] * rhs[k];
    return StateVector(std::move(amp));
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) sum += 2.0 * std::norm(a(i, j));
    return std::sqrt(sum);
}

}  // namespace

EigenSystem hermitian_eig(const ComplexMatrix& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw std::invalid_argument("hermitian_eig: matrix must be square and non-empty");
    if (!matrix.is_hermitian())
        throw std::invalid_argument("hermitian_eig: matrix must be Hermitian");

    const std::size_t n = matrix.rows();
    ComplexMatrix a = matrix;
    ComplexMatrix v = ComplexMatrix::identity(n);

    constexpr double off_tolerance = 1e-13;
    constexpr int max_sweeps = 100;

    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= off_tolerance) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;

                // Factor out the pivot phase, then rotate the remaining real
                // symmetric 2x2 block by the smaller-angle root of
                // t^2 + 2 tau t - 1 = 0 with tau = cot(2 theta).
                const Complex phase = apq / mag;
                const double tau = (a(p, p).real() - a(q, q).real()) / (2.0 * mag);
                double t;
                if (std::abs(tau) > 1e150) {
                    t = 1.0 / (2.0 * tau);
                } else if (tau >= 0.0) {
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                } else {
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const Complex sp = s * std::conj(phase);
                const Complex cp = c * std::conj(phase);
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex aip = a(i, p);
                    const Complex aiq = a(i, q);
                    a(i, p) = c * aip + sp * aiq;
                    a(i, q) = -s * aip + cp * aiq;
                }
                const Complex sr = s * phase;
                const Complex cr = c * phase;
                for (std::size_t j = 0; j < n; ++j) {
                    const Complex apj = a(p, j);
                    const Complex aqj = a(q, j);
                    a(p, j) = c * apj + sr * aqj;
                    a(q, j) = -s * apj + cr * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const Complex vip = v(i, p);
                    const Complex viq = v(i, q);
                    v(i, p) = c * vip + sp * viq;
                    v(i, q) = -s * vip + cp * viq;
                }
            }
        }
    }
    if (!converged && off_diagonal_norm(a) > off_tolerance)
        throw std::runtime_error("hermitian_eig: sweep limit reached without convergence");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t lhs, std::size_t rhs) { return a(lhs, lhs).real() > a(rhs, rhs).real(); });

    EigenSystem out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t col : order) {
        out.values.push_back(a(col, col).real());
        std::vector<Complex> amp(n);
        for (std::size_t i = 0; i < n; ++i) amp[i] = v(i, col);
        out.vectors.emplace_back(std::move(amp));
    }
    return out;
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
        throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    if (!matrix_.is_hermitian())
        throw std::invalid_argument("DensityMatrix: matrix must be Hermitian");
    if (std::abs(matrix_.trace() - 1.0) > 1e-10)
        throw std::invalid_argument("DensityMatrix: trace must equal one");
    const EigenSystem eig = hermitian_eig(matrix_);
    if (eig.values.back() < -1e-10)
        throw std::invalid_argument("DensityMatrix: matrix must be positive semidefinite");
}

DensityMatrix::DensityMatrix(Unchecked, ComplexMatrix matrix) : matrix_(std::move(matrix)) {}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
    return DensityMatrix(Unchecked{}, state.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("maximally_mixed: dimension must be positive");
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0 / static_cast<double>(dim);
    return DensityMatrix(Unchecked{}, std::move(m));
}

DensityMatrix partial_trace(const DensityMatrix& state, Subsystem traced_out,
                            std::size_t dim_a, std::size_t dim_b) {
    if (dim_a == 0 || dim_b == 0 || dim_a * dim_b != state.dim())
        throw std::invalid_argument("partial_trace: subsystem dimensions do not factor the state");
    const ComplexMatrix& rho = state.matrix();
    if (traced_out == Subsystem::A) {
        ComplexMatrix out(dim_b, dim_b);
        for (std::size_t k = 0; k < dim_b; ++k)
            for (std::size_t l = 0; l < dim_b; ++l) {
                Complex sum = 0.0;
                for (std::size_t j = 0; j < dim_a; ++j) sum += rho(j * dim_b + k, j * dim_b + l);
                out(k, l) = sum;
            }
        return DensityMatrix(std::move(out));
    }
    ComplexMatrix out(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_a; ++j) {
            Complex sum = 0.0;
            for (std::size_t k = 0; k < dim_b; ++k) sum += rho(i * dim_b + k, j * dim_b + k);
            out(i, j) = sum;
        }
    return DensityMatrix(std::move(out));
}

double expectation(const DensityMatrix& state, const ComplexMatrix& observable) {
    if (observable.rows() != state.dim() || observable.cols() != state.dim())
        throw std::invalid_argument("expectation: observable dimension mismatch");
    if (!observable.is_hermitian())
        throw std::invalid_argument("expectation: observable must be Hermitian");
    const ComplexMatrix& rho = state.matrix();
    Complex sum = 0.0;
    for (std::size_t i = 0; i < rho.rows(); ++i)
        for (std::size_t j = 0; j < rho.cols(); ++j) sum += rho(i, j) * observable(j, i);
    return sum.real();
}

}  // namespace qnl
