#pragma once

// Dense complex linear algebra sized for few-qudit systems: matrices, state
// vectors, density operators, and a cyclic Jacobi Hermitian eigensolver.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qnl {

using Complex = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    bool is_hermitian(double tolerance = 1e-10) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs);
ComplexMatrix operator*(Complex scale, ComplexMatrix matrix);
ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

ComplexMatrix matmul(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

// Tensor product with the left factor on the slow index:
// (A x B)(i*rb + k, j*cb + l) = A(i, j) * B(k, l).
ComplexMatrix kron(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

// Unit-norm pure state. A bipartite product |j>|k> occupies flat index
// j * dim_b + k, matching the kron convention above.
class StateVector {
public:
    explicit StateVector(std::vector<Complex> amplitudes);

    static StateVector basis_state(std::size_t dim, std::size_t index);

    std::size_t dim() const { return amplitudes_.size(); }
    const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
    const std::vector<Complex>& amplitudes() const { return amplitudes_; }

    Complex inner(const StateVector& other) const;
    ComplexMatrix projector() const;

private:
    std::vector<Complex> amplitudes_;
};

StateVector kron(const StateVector& lhs, const StateVector& rhs);

struct EigenSystem {
    std::vector<double> values;        // sorted descending
    std::vector<StateVector> vectors;  // orthonormal, vectors[i] belongs to values[i]
};

// Cyclic Jacobi diagonalization. Sweeps until the off-diagonal Frobenius norm
// drops below 1e-13, up to 100 sweeps. Throws std::invalid_argument if the
// input is not square Hermitian, std::runtime_error if the sweep limit is hit.
EigenSystem hermitian_eig(const ComplexMatrix& matrix);

// Trace-one positive semidefinite operator. The checked constructor runs a
// full eigendecomposition to verify positivity; the factories are for shapes
// that are positive by construction and skip that cost.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix matrix);

    static DensityMatrix pure(const StateVector& state);
    static DensityMatrix maximally_mixed(std::size_t dim);

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

private:
    struct Unchecked {};
    DensityMatrix(Unchecked, ComplexMatrix matrix);

    ComplexMatrix matrix_;
};

enum class Subsystem { A, B };

// Reduced state of a bipartite density operator with dim_a * dim_b = dim.
// `traced_out` names the subsystem that is summed away.
DensityMatrix partial_trace(const DensityMatrix& state, Subsystem traced_out,
                            std::size_t dim_a, std::size_t dim_b);

// Re(Tr(rho * observable)); the observable must be Hermitian.
double expectation(const DensityMatrix& state, const ComplexMatrix& observable);

}  // namespace qnl
