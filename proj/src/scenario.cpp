#include "qnl/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qnl {

namespace {

constexpr double kAlgebraTolerance = 1e-10;

double max_abs(const ComplexMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

ComplexMatrix anticommutator(const ComplexMatrix& x, const ComplexMatrix& y) {
    return matmul(x, y) + matmul(y, x);
}

}  // namespace

Observable::Observable(ComplexMatrix matrix) : matrix_(std::move(matrix)), spectral_norm_(0.0) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
        throw std::invalid_argument("Observable: matrix must be square and non-empty");
    if (!matrix_.is_hermitian())
        throw std::invalid_argument("Observable: matrix must be Hermitian");
    const EigenSystem eig = hermitian_eig(matrix_);
    spectral_norm_ = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

Observable gell_mann(std::size_t n, std::size_t index) {
    if (n < 2) throw std::invalid_argument("gell_mann: dimension must be at least 2");
    if (index < 1 || index >= n * n) throw std::invalid_argument("gell_mann: index out of range");

    std::size_t k = static_cast<std::size_t>(std::sqrt(static_cast<double>(index)));
    while ((k + 1) * (k + 1) <= index) ++k;
    while (k * k > index) --k;

    ComplexMatrix m(n, n);
    if ((k + 1) * (k + 1) - 1 == index) {
        const double scale = std::sqrt(2.0 / (static_cast<double>(k) * (k + 1.0)));
        for (std::size_t j = 0; j < k; ++j) m(j, j) = scale;
        m(k, k) = -scale * static_cast<double>(k);
    } else {
        const std::size_t offset = index - k * k;
        const std::size_t j = offset / 2;
        if (offset % 2 == 0) {
            m(j, k) = 1.0;
            m(k, j) = 1.0;
        } else {
            m(j, k) = Complex(0.0, -1.0);
            m(k, j) = Complex(0.0, 1.0);
        }
    }
    return Observable(std::move(m));
}

ChshScenario::ChshScenario(Observable a1_in, Observable a2_in, Observable b1_in, Observable b2_in)
    : a1(std::move(a1_in)), a2(std::move(a2_in)), b1(std::move(b1_in)), b2(std::move(b2_in)) {
    const std::size_t dim = a1.dim();
    if (a2.dim() != dim || b1.dim() != dim || b2.dim() != dim)
        throw std::invalid_argument("ChshScenario: observables must share one dimension");
    for (const Observable* obs : {&a1, &a2, &b1, &b2})
        if (obs->spectral_norm() > 1.0 + 1e-10)
            throw std::invalid_argument("ChshScenario: observables must have spectral norm at most one");
}

const ChshScenario& maximal_violation_scenario() {
    static const ChshScenario scenario = [] {
        const ComplexMatrix g8 = gell_mann(4, 8).matrix();
        const ComplexMatrix g15 = gell_mann(4, 15).matrix();
        ComplexMatrix a1 = Complex(2.0 / std::sqrt(3.0)) * g8 + Complex(std::sqrt(6.0) / 3.0) * g15;
        ComplexMatrix a2 = gell_mann(4, 4).matrix() + gell_mann(4, 11).matrix();

        const double expected_a1[] = {1.0, 1.0, -1.0, -1.0};
        if (max_abs_diff(a1, ComplexMatrix::diagonal(expected_a1)) > kAlgebraTolerance)
            throw std::logic_error("maximal_violation_scenario: A1 combination is off");

        const ComplexMatrix id = ComplexMatrix::identity(4);
        if (max_abs_diff(matmul(a1, a1), id) > kAlgebraTolerance ||
            max_abs_diff(matmul(a2, a2), id) > kAlgebraTolerance ||
            max_abs(anticommutator(a1, a2)) > kAlgebraTolerance)
            throw std::logic_error("maximal_violation_scenario: setting algebra is off");

        const Complex inv_sqrt2 = 1.0 / std::sqrt(2.0);
        ComplexMatrix b1 = inv_sqrt2 * (a1 + a2);
        ComplexMatrix b2 = inv_sqrt2 * (a2 - a1);
        return ChshScenario(Observable(std::move(a1)), Observable(std::move(a2)),
                            Observable(std::move(b1)), Observable(std::move(b2)));
    }();
    return scenario;
}

ComplexMatrix bell_operator(const ChshScenario& scenario) {
    return kron(scenario.a1.matrix(), scenario.b1.matrix()) -
           kron(scenario.a1.matrix(), scenario.b2.matrix()) +
           kron(scenario.a2.matrix(), scenario.b1.matrix()) +
           kron(scenario.a2.matrix(), scenario.b2.matrix());
}

double chsh_expectation(const DensityMatrix& state, const ChshScenario& scenario) {
    return expectation(state, bell_operator(scenario));
}

CliffordReport check_clifford_conditions(const ChshScenario& scenario) {
    const ComplexMatrix id = ComplexMatrix::identity(scenario.local_dim());
    CliffordReport report{};
    report.a_square_deviation =
        std::max(max_abs_diff(matmul(scenario.a1.matrix(), scenario.a1.matrix()), id),
                 max_abs_diff(matmul(scenario.a2.matrix(), scenario.a2.matrix()), id));
    report.b_square_deviation =
        std::max(max_abs_diff(matmul(scenario.b1.matrix(), scenario.b1.matrix()), id),
                 max_abs_diff(matmul(scenario.b2.matrix(), scenario.b2.matrix()), id));
    report.a_anticommutator_norm = max_abs(anticommutator(scenario.a1.matrix(), scenario.a2.matrix()));
    report.b_anticommutator_norm = max_abs(anticommutator(scenario.b1.matrix(), scenario.b2.matrix()));
    report.satisfied = report.a_square_deviation <= kAlgebraTolerance &&
                       report.b_square_deviation <= kAlgebraTolerance &&
                       report.a_anticommutator_norm <= kAlgebraTolerance &&
                       report.b_anticommutator_norm <= kAlgebraTolerance;
    return report;
}

namespace {

StateVector two_term_state(std::size_t first, std::size_t second, double second_sign) {
    const double amp = 1.0 / std::sqrt(2.0);
    std::vector<Complex> v(16);
    v[first] = amp;
    v[second] = second_sign * amp;
    return StateVector(std::move(v));
}

BellSector make_sector(double eigenvalue, std::array<StateVector, 4> basis, const ComplexMatrix& bell) {
    for (const StateVector& state : basis) {
        double residual = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            Complex row = 0.0;
            for (std::size_t j = 0; j < 16; ++j) row += bell(i, j) * state[j];
            residual = std::max(residual, std::abs(row - eigenvalue * state[i]));
        }
        if (residual > 1e-12)
            throw std::logic_error("bell_sectors: basis state fails the eigenvalue equation");
    }
    ComplexMatrix projector(16, 16);
    for (const StateVector& state : basis) projector += state.projector();
    return BellSector{eigenvalue, std::move(basis), std::move(projector)};
}

}  // namespace

const BellSectors& bell_sectors() {
    static const BellSectors sectors = [] {
        const ComplexMatrix bell = bell_operator(maximal_violation_scenario());
        const double top = 2.0 * std::sqrt(2.0);
        // Flat index |j>|k> -> 4j + k.
        BellSector plus = make_sector(
            top,
            {two_term_state(5, 15, 1.0), two_term_state(4, 14, 1.0),
             two_term_state(1, 11, 1.0), two_term_state(0, 10, 1.0)},
            bell);
        BellSector minus = make_sector(
            -top,
            {two_term_state(13, 7, -1.0), two_term_state(12, 6, -1.0),
             two_term_state(9, 3, -1.0), two_term_state(8, 2, -1.0)},
            bell);
        return BellSectors{std::move(plus), std::move(minus)};
    }();
    return sectors;
}

}  // namespace qnl
