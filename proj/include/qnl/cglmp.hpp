#pragma once

// CGLMP correlation functional I_N for two N-outcome parties measuring a
// shared N x N qudit state in phase-parametrized Fourier bases.

#include <array>
#include <cstddef>
#include <vector>

#include "qnl/linalg.hpp"

namespace qnl {

enum class Party { A, B };

// The four measurement phases (two per party), stored canonically in [0, N).
// I_N is periodic in every phase with period N, so reduction modulo N never
// changes the functional's value.
class PhaseConfiguration {
public:
    PhaseConfiguration(double alpha1, double alpha2, double beta1, double beta2, std::size_t dim);

    std::size_t dim() const { return dim_; }
    double alpha1() const { return phases_[0]; }
    double alpha2() const { return phases_[1]; }
    double beta1() const { return phases_[2]; }
    double beta2() const { return phases_[3]; }
    const std::array<double, 4>& as_array() const { return phases_; }

private:
    std::array<double, 4> phases_;
    std::size_t dim_;
};

// Phases (0, 1/2, 1/4, -1/4): the known optimum for the maximally entangled
// four-level state.
PhaseConfiguration max_entangled_optimal_phases();

struct MeasurementSetting {
    Party party;
    int setting_index;  // 1 or 2
    double phase;
    std::size_t dim;
};

// Fourier basis vector for the given setting and outcome. Party A's outcome K
// has amplitudes exp(i 2 pi j (K + phase) / N) / sqrt(N); party B's outcome L
// uses (-L + phase) in place of (K + phase).
StateVector measurement_basis(const MeasurementSetting& setting, std::size_t outcome);

// Joint outcome distribution P(A = k, B = l). Probabilities are clipped to
// zero when rounding pushes them as low as -1e-12; anything lower is an error.
class JointDistribution {
public:
    JointDistribution(std::size_t dim, std::vector<double> probabilities);

    std::size_t dim() const { return dim_; }
    double operator()(std::size_t a_outcome, std::size_t b_outcome) const {
        return probabilities_[a_outcome * dim_ + b_outcome];
    }
    double sum() const;

private:
    std::size_t dim_;
    std::vector<double> probabilities_;
};

JointDistribution joint_distribution(const DensityMatrix& state, const MeasurementSetting& a,
                                     const MeasurementSetting& b);

enum class OutcomeRelation {
    AEqualsBPlus,  // P(A = B + k mod N)
    BEqualsAPlus,  // P(B = A + k mod N)
};

double coincidence_probability(const JointDistribution& dist, OutcomeRelation relation, long shift);

// I_N evaluated on `state` (dimension n * n) at the given phases. Weighted sum
// over k = 0 .. floor(n/2) - 1 of shifted coincidence probabilities from the
// four setting pairs (A1,B1), (A2,B1), (A2,B2), (A1,B2).
double cglmp_value(const DensityMatrix& state, const PhaseConfiguration& phases, std::size_t n);

}  // namespace qnl
