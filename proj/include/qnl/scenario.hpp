#pragma once

// Two-setting CHSH scenario for a pair of qudits: observables assembled from
// generalized Gell-Mann generators, the Bell operator, and its extremal
// eigensectors.

#include <array>
#include <cstddef>

#include "qnl/linalg.hpp"

namespace qnl {

// Hermitian operator with an eagerly computed spectral norm.
class Observable {
public:
    explicit Observable(ComplexMatrix matrix);

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }
    double spectral_norm() const { return spectral_norm_; }

private:
    ComplexMatrix matrix_;
    double spectral_norm_;
};

// Generalized Gell-Mann generator of su(n), indices 1 .. n^2 - 1. Ordering:
// the block introducing basis row k (k = 1 .. n-1) starts at index k^2 and
// holds the symmetric/antisymmetric pairs for j = 0 .. k-1 (symmetric on even
// offsets), followed by the diagonal generator at index (k+1)^2 - 1. All
// generators are traceless and satisfy Tr(g_i g_j) = 2 delta_ij.
Observable gell_mann(std::size_t n, std::size_t index);

// Four dichotomic-spectrum measurement operators, A side and B side. All must
// share one dimension and have spectral norm <= 1 + 1e-10 so that the local
// hidden variable bound |<B>| <= 2 applies.
struct ChshScenario {
    ChshScenario(Observable a1_in, Observable a2_in, Observable b1_in, Observable b2_in);

    std::size_t local_dim() const { return a1.dim(); }

    Observable a1;
    Observable a2;
    Observable b1;
    Observable b2;
};

// The fixed ququart scenario that reaches the Tsirelson bound on every state
// supported in the Bell operator's top eigensector:
//   A1 = (2/sqrt(3)) g8 + (sqrt(6)/3) g15 = diag(1, 1, -1, -1)
//   A2 = g4 + g11
//   B1 = (A1 + A2)/sqrt(2),  B2 = (A2 - A1)/sqrt(2)
// The factory asserts the algebra (A_i^2 = I, {A1, A2} = 0) at construction.
const ChshScenario& maximal_violation_scenario();

// A1 x B1 - A1 x B2 + A2 x B1 + A2 x B2.
ComplexMatrix bell_operator(const ChshScenario& scenario);

double chsh_expectation(const DensityMatrix& state, const ChshScenario& scenario);

// Deviations from the algebra that makes the Tsirelson bound attainable:
// squares equal to the identity and anticommuting setting pairs, per party.
// Norms are max-abs over matrix entries.
struct CliffordReport {
    double a_square_deviation;
    double b_square_deviation;
    double a_anticommutator_norm;
    double b_anticommutator_norm;
    bool satisfied;  // all four deviations within 1e-10
};

CliffordReport check_clifford_conditions(const ChshScenario& scenario);

// Extremal eigensector of the Bell operator: four orthonormal basis states
// sharing the eigenvalue, and the projector onto their span.
struct BellSector {
    double eigenvalue;
    std::array<StateVector, 4> basis;
    ComplexMatrix projector;
};

struct BellSectors {
    BellSector plus;   // eigenvalue +2*sqrt(2)
    BellSector minus;  // eigenvalue -2*sqrt(2)
};

// Sectors of the maximal_violation_scenario Bell operator. Every basis state
// is verified against the eigenvalue equation when first built.
const BellSectors& bell_sectors();

}  // namespace qnl
