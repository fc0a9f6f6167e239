#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qnl/linalg.hpp"
#include "qnl/rng.hpp"

using qnl::Complex;
using qnl::ComplexMatrix;
using qnl::DensityMatrix;
using qnl::EigenSystem;
using qnl::StateVector;

namespace {

ComplexMatrix random_matrix(qnl::RandomStream& rng, std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    return m;
}

ComplexMatrix random_hermitian(qnl::RandomStream& rng, std::size_t n) {
    const ComplexMatrix g = random_matrix(rng, n, n);
    ComplexMatrix h = g;
    h += g.adjoint();
    h *= 0.5;
    return h;
}

DensityMatrix random_density(qnl::RandomStream& rng, std::size_t n) {
    const ComplexMatrix g = random_matrix(rng, n, n);
    ComplexMatrix m = matmul(g, g.adjoint());
    m *= 1.0 / m.trace();
    return DensityMatrix(std::move(m));
}

StateVector random_state(qnl::RandomStream& rng, std::size_t n) {
    std::vector<Complex> amp(n);
    double norm_sq = 0.0;
    for (Complex& a : amp) {
        a = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        norm_sq += std::norm(a);
    }
    const double scale = 1.0 / std::sqrt(norm_sq);
    for (Complex& a : amp) a *= scale;
    return StateVector(std::move(amp));
}

// Closed-form eigenvalues of a 2x2 Hermitian matrix.
std::array<double, 2> eig2(const ComplexMatrix& a) {
    const double mean = (a(0, 0).real() + a(1, 1).real()) / 2.0;
    const double half_gap = (a(0, 0).real() - a(1, 1).real()) / 2.0;
    const double radius = std::sqrt(half_gap * half_gap + std::norm(a(0, 1)));
    return {mean + radius, mean - radius};
}

// Trigonometric closed form for a 3x3 Hermitian matrix, descending.
std::array<double, 3> eig3(const ComplexMatrix& a) {
    const double q = (a(0, 0).real() + a(1, 1).real() + a(2, 2).real()) / 3.0;
    const double p1 = std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2));
    const double d0 = a(0, 0).real() - q;
    const double d1 = a(1, 1).real() - q;
    const double d2 = a(2, 2).real() - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if (p2 < 1e-28) return {q, q, q};
    const double p = std::sqrt(p2 / 6.0);
    ComplexMatrix b = a;
    for (std::size_t i = 0; i < 3; ++i) b(i, i) -= q;
    b *= 1.0 / p;
    const Complex det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(det.real() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double e1 = q + 2.0 * p * std::cos(phi);
    const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::acos(-1.0) / 3.0);
    return {e1, 3.0 * q - e1 - e3, e3};
}

double reconstruction_error(const ComplexMatrix& a, const EigenSystem& eig) {
    ComplexMatrix sum(a.rows(), a.cols());
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        ComplexMatrix term = eig.vectors[i].projector();
        term *= eig.values[i];
        sum += term;
    }
    return max_abs_diff(a, sum);
}

double orthonormality_error(const EigenSystem& eig) {
    double worst = 0.0;
    for (std::size_t i = 0; i < eig.vectors.size(); ++i)
        for (std::size_t j = 0; j < eig.vectors.size(); ++j) {
            const Complex overlap = eig.vectors[i].inner(eig.vectors[j]);
            worst = std::max(worst, std::abs(overlap - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

}  // namespace

TEST_CASE("matrix constructors and accessors") {
    const ComplexMatrix id = ComplexMatrix::identity(3);
    CHECK(id(0, 0) == Complex(1.0));
    CHECK(id(0, 1) == Complex(0.0));
    CHECK(id.trace() == Complex(3.0));

    const double d[] = {1.0, -2.0};
    const ComplexMatrix diag = ComplexMatrix::diagonal(d);
    CHECK(diag(1, 1) == Complex(-2.0));
    CHECK(diag(0, 1) == Complex(0.0));

    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<Complex>(3)), std::invalid_argument);
}

TEST_CASE("adjoint conjugates and transposes") {
    ComplexMatrix m(2, 2);
    m(0, 1) = Complex(1.0, 2.0);
    const ComplexMatrix a = m.adjoint();
    CHECK(a(1, 0) == Complex(1.0, -2.0));
    CHECK(a(0, 1) == Complex(0.0));
}

TEST_CASE("hermiticity detection") {
    ComplexMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(0, 1) = Complex(0.0, 1.0);
    m(1, 0) = Complex(0.0, -1.0);
    CHECK(m.is_hermitian());
    m(1, 0) = Complex(0.0, 1.0);
    CHECK_FALSE(m.is_hermitian());
    CHECK_FALSE(ComplexMatrix(2, 3).is_hermitian());
}

TEST_CASE("matmul matches a hand-computed product") {
    ComplexMatrix a(2, 2, {Complex(1), Complex(2), Complex(3), Complex(4)});
    ComplexMatrix b(2, 2, {Complex(0), Complex(1), Complex(1), Complex(0)});
    const ComplexMatrix p = matmul(a, b);
    CHECK(p(0, 0) == Complex(2));
    CHECK(p(0, 1) == Complex(1));
    CHECK(p(1, 0) == Complex(4));
    CHECK(p(1, 1) == Complex(3));
    CHECK_THROWS_AS(matmul(a, ComplexMatrix(3, 2)), std::invalid_argument);
}

TEST_CASE("kron uses the left-factor-slow convention") {
    const double z[] = {0.0, 1.0};
    const ComplexMatrix m = kron(ComplexMatrix::diagonal(z), ComplexMatrix::identity(2));
    CHECK(m.rows() == 4);
    CHECK(m(0, 0) == Complex(0.0));
    CHECK(m(1, 1) == Complex(0.0));
    CHECK(m(2, 2) == Complex(1.0));
    CHECK(m(3, 3) == Complex(1.0));
}

TEST_CASE("kron is multiplicative") {
    qnl::RandomStream rng(11);
    const ComplexMatrix a = random_matrix(rng, 2, 2);
    const ComplexMatrix b = random_matrix(rng, 3, 3);
    const ComplexMatrix c = random_matrix(rng, 2, 2);
    const ComplexMatrix d = random_matrix(rng, 3, 3);
    const ComplexMatrix lhs = matmul(kron(a, b), kron(c, d));
    const ComplexMatrix rhs = kron(matmul(a, c), matmul(b, d));
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("state vectors validate their norm") {
    CHECK_THROWS_AS(StateVector({Complex(1.0), Complex(1.0)}), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(std::vector<Complex>{}), std::invalid_argument);
    const StateVector e1 = StateVector::basis_state(4, 1);
    CHECK(e1[1] == Complex(1.0));
    CHECK(e1[0] == Complex(0.0));
    CHECK_THROWS_AS(StateVector::basis_state(4, 4), std::invalid_argument);
}

TEST_CASE("inner products and projectors") {
    const StateVector e0 = StateVector::basis_state(2, 0);
    const StateVector e1 = StateVector::basis_state(2, 1);
    CHECK(std::abs(e0.inner(e1)) == 0.0);
    CHECK(e0.inner(e0) == Complex(1.0));
    const ComplexMatrix p = e1.projector();
    CHECK(p(1, 1) == Complex(1.0));
    CHECK(p.trace() == Complex(1.0));

    const StateVector prod = kron(e0, e1);
    CHECK(prod.dim() == 4);
    CHECK(prod[1] == Complex(1.0));
}

TEST_CASE("eigensolver reproduces closed-form 2x2 spectra") {
    qnl::RandomStream rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix h = random_hermitian(rng, 2);
        const EigenSystem eig = hermitian_eig(h);
        const std::array<double, 2> expected = eig2(h);
        CHECK(std::abs(eig.values[0] - expected[0]) < 1e-12);
        CHECK(std::abs(eig.values[1] - expected[1]) < 1e-12);
    }
}

TEST_CASE("eigensolver reproduces closed-form 3x3 spectra") {
    qnl::RandomStream rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const ComplexMatrix h = random_hermitian(rng, 3);
        const EigenSystem eig = hermitian_eig(h);
        const std::array<double, 3> expected = eig3(h);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(eig.values[i] - expected[i]) < 1e-10);
    }
}

TEST_CASE("eigensolver reconstructs random Hermitian matrices") {
    qnl::RandomStream rng(23);
    for (std::size_t n : {2, 3, 4, 6, 8, 16}) {
        const ComplexMatrix h = random_hermitian(rng, n);
        const EigenSystem eig = hermitian_eig(h);
        CHECK(std::is_sorted(eig.values.rbegin(), eig.values.rend()));
        CHECK(reconstruction_error(h, eig) < 1e-10);
        CHECK(orthonormality_error(eig) < 1e-12);
    }
}

TEST_CASE("eigensolver handles already-diagonal and degenerate input") {
    const double d[] = {-1.0, 5.0, 5.0, 2.0};
    const EigenSystem eig = hermitian_eig(ComplexMatrix::diagonal(d));
    CHECK(eig.values[0] == 5.0);
    CHECK(eig.values[1] == 5.0);
    CHECK(eig.values[2] == 2.0);
    CHECK(eig.values[3] == -1.0);
    CHECK(orthonormality_error(eig) < 1e-12);

    const double single[] = {3.5};
    CHECK(hermitian_eig(ComplexMatrix::diagonal(single)).values[0] == 3.5);
}

TEST_CASE("eigensolver rejects bad input") {
    CHECK_THROWS_AS(hermitian_eig(ComplexMatrix(2, 3)), std::invalid_argument);
    ComplexMatrix m(2, 2);
    m(0, 1) = Complex(0.0, 1.0);
    m(1, 0) = Complex(0.0, 1.0);
    CHECK_THROWS_AS(hermitian_eig(m), std::invalid_argument);
}

TEST_CASE("density matrices validate trace, hermiticity, and positivity") {
    CHECK_NOTHROW(DensityMatrix(Complex(0.5) * ComplexMatrix::identity(2)));

    const double bad_trace[] = {0.7, 0.7};
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::diagonal(bad_trace)), std::invalid_argument);

    const double negative[] = {1.5, -0.5};
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::diagonal(negative)), std::invalid_argument);

    ComplexMatrix skew(2, 2);
    skew(0, 0) = 0.5;
    skew(1, 1) = 0.5;
    skew(0, 1) = Complex(0.0, 0.3);
    skew(1, 0) = Complex(0.0, 0.3);
    CHECK_THROWS_AS(DensityMatrix(std::move(skew)), std::invalid_argument);

    qnl::RandomStream rng(31);
    for (int trial = 0; trial < 20; ++trial) CHECK_NOTHROW(random_density(rng, 4));
}

TEST_CASE("pure and maximally mixed factories") {
    const DensityMatrix rho = DensityMatrix::pure(StateVector::basis_state(3, 2));
    CHECK(rho.matrix()(2, 2) == Complex(1.0));
    CHECK(rho.matrix().trace() == Complex(1.0));

    const DensityMatrix mixed = DensityMatrix::maximally_mixed(4);
    CHECK(mixed.matrix()(0, 0) == Complex(0.25));
    CHECK(mixed.matrix()(0, 1) == Complex(0.0));
}

TEST_CASE("partial trace splits product states and preserves trace") {
    qnl::RandomStream rng(41);
    const DensityMatrix rho_a = random_density(rng, 2);
    const DensityMatrix rho_b = random_density(rng, 3);
    const DensityMatrix joint = DensityMatrix(kron(rho_a.matrix(), rho_b.matrix()));

    const DensityMatrix back_a = partial_trace(joint, qnl::Subsystem::B, 2, 3);
    const DensityMatrix back_b = partial_trace(joint, qnl::Subsystem::A, 2, 3);
    CHECK(max_abs_diff(back_a.matrix(), rho_a.matrix()) < 1e-12);
    CHECK(max_abs_diff(back_b.matrix(), rho_b.matrix()) < 1e-12);
    CHECK(std::abs(back_a.matrix().trace() - 1.0) < 1e-12);

    CHECK_THROWS_AS(partial_trace(joint, qnl::Subsystem::A, 4, 3), std::invalid_argument);
}

TEST_CASE("partial trace of a maximally entangled pair is maximally mixed") {
    std::vector<Complex> amp(4);
    amp[0] = amp[3] = 1.0 / std::sqrt(2.0);
    const DensityMatrix rho = DensityMatrix::pure(StateVector(std::move(amp)));
    const DensityMatrix reduced = partial_trace(rho, qnl::Subsystem::B, 2, 2);
    CHECK(max_abs_diff(reduced.matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-12);
}

TEST_CASE("partial trace keeps random states positive") {
    qnl::RandomStream rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix rho = DensityMatrix::pure(random_state(rng, 16));
        const DensityMatrix reduced = partial_trace(rho, qnl::Subsystem::B, 4, 4);
        const EigenSystem eig = hermitian_eig(reduced.matrix());
        CHECK(eig.values.back() >= -1e-10);
        CHECK(std::abs(reduced.matrix().trace() - 1.0) < 1e-10);
    }
}

TEST_CASE("expectation values of simple observables") {
    const double z[] = {1.0, -1.0};
    const ComplexMatrix pauli_z = ComplexMatrix::diagonal(z);
    CHECK(expectation(DensityMatrix::pure(StateVector::basis_state(2, 0)), pauli_z) == 1.0);
    CHECK(expectation(DensityMatrix::pure(StateVector::basis_state(2, 1)), pauli_z) == -1.0);
    CHECK(expectation(DensityMatrix::maximally_mixed(2), pauli_z) == 0.0);

    CHECK_THROWS_AS(expectation(DensityMatrix::maximally_mixed(2), ComplexMatrix::identity(3)),
                    std::invalid_argument);
}

TEST_CASE("expectation is linear in the state") {
    qnl::RandomStream rng(43);
    const ComplexMatrix obs = random_hermitian(rng, 4);
    const DensityMatrix rho1 = random_density(rng, 4);
    const DensityMatrix rho2 = random_density(rng, 4);
    ComplexMatrix blend = rho1.matrix();
    blend *= 0.3;
    ComplexMatrix part = rho2.matrix();
    part *= 0.7;
    blend += part;
    const double lhs = expectation(DensityMatrix(std::move(blend)), obs);
    const double rhs = 0.3 * expectation(rho1, obs) + 0.7 * expectation(rho2, obs);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}
