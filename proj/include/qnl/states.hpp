#pragma once

// State families for the two-ququart scenario: pure superpositions over the
// top Bell sector, mixtures diagonal in that sector basis, the isotropic
// noise family, samplers for all of them, and the entanglement measure.

#include <array>
#include <cstddef>
#include <utility>

#include "qnl/linalg.hpp"
#include "qnl/rng.hpp"

namespace qnl {

// Hyperspherical parametrization of a pure state in the top Bell sector:
//   c1 = cos t1
//   c2 = e^{i g1} sin t1 cos t2
//   c3 = e^{i g2} sin t1 sin t2 cos t3
//   c4 = e^{i g3} sin t1 sin t2 sin t3
// with angles in [0, pi/2] and relative phases in [0, 2 pi).
struct PureBellParams {
    double theta1;
    double theta2;
    double theta3;
    double gamma1;
    double gamma2;
    double gamma3;
};

// Convex weights over the four top-sector basis states.
struct MixedBellParams {
    std::array<double, 4> weights;
};

// (1/sqrt(n)) sum_j |j>|j>.
StateVector max_entangled_state(std::size_t n);

// sum_i c_i |eta_i> over the top Bell sector basis. Throws if a parameter is
// outside its range.
StateVector pure_bell_state(const PureBellParams& params);

// sum_i w_i |eta_i><eta_i|. Weights must be nonnegative and sum to one
// within 1e-10.
DensityMatrix mixed_bell_state(const MixedBellParams& params);

// visibility * |Psi><Psi| + (1 - visibility) * I / n^2, where |Psi> is the
// n-level maximally entangled state. Visibility must lie in [0, 1].
DensityMatrix noisy_state(double visibility, std::size_t n);

// Draws angles uniformly from [0, pi/2) and phases uniformly from [0, 2 pi),
// in the order theta1, theta2, theta3, gamma1, gamma2, gamma3.
std::pair<PureBellParams, StateVector> sample_pure(RandomStream& rng);

// Draws weights uniformly from the probability simplex via three sorted
// uniform draws (spacings of [0, 1]).
std::pair<MixedBellParams, DensityMatrix> sample_mixed(RandomStream& rng);

struct EntanglementReport {
    double parameter;                        // lam1 + lam2 - lam3 - lam4 of the reduced state
    double measure;                          // 1 - parameter; 1 on maximally entangled states
    std::array<double, 4> reduced_spectrum;  // descending
};

// Entanglement of a pure state supported in the top Bell sector, read off the
// reduced state's spectrum. That spectrum is twofold degenerate for every
// state of this family, which the implementation verifies. Throws
// std::invalid_argument if the state is not (approximately) in the sector.
EntanglementReport entanglement_parameter(const StateVector& state);

}  // namespace qnl
