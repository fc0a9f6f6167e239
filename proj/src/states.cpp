#include "qnl/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qnl/scenario.hpp"

namespace qnl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

std::array<Complex, 4> sector_coefficients(const PureBellParams& p) {
    const double s1 = std::sin(p.theta1);
    const double s2 = std::sin(p.theta2);
    return {
        Complex(std::cos(p.theta1)),
        std::polar(s1 * std::cos(p.theta2), p.gamma1),
        std::polar(s1 * s2 * std::cos(p.theta3), p.gamma2),
        std::polar(s1 * s2 * std::sin(p.theta3), p.gamma3),
    };
}

}  // namespace

StateVector max_entangled_state(std::size_t n) {
    if (n < 2) throw std::invalid_argument("max_entangled_state: dimension must be at least 2");
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<Complex> v(n * n);
    for (std::size_t j = 0; j < n; ++j) v[j * n + j] = amp;
    return StateVector(std::move(v));
}

StateVector pure_bell_state(const PureBellParams& params) {
    for (double angle : {params.theta1, params.theta2, params.theta3})
        if (!(angle >= 0.0 && angle <= kHalfPi))
            throw std::invalid_argument("pure_bell_state: angles must lie in [0, pi/2]");
    for (double phase : {params.gamma1, params.gamma2, params.gamma3})
        if (!(phase >= 0.0 && phase < kTwoPi))
            throw std::invalid_argument("pure_bell_state: phases must lie in [0, 2 pi)");

    const std::array<Complex, 4> c = sector_coefficients(params);
    const auto& basis = bell_sectors().plus.basis;
    std::vector<Complex> v(16);
    for (std::size_t term = 0; term < 4; ++term)
        for (std::size_t i = 0; i < 16; ++i) v[i] += c[term] * basis[term][i];
    return StateVector(std::move(v));
}

DensityMatrix mixed_bell_state(const MixedBellParams& params) {
    double total = 0.0;
    for (double w : params.weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixed_bell_state: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("mixed_bell_state: weights must sum to one");

    const auto& basis = bell_sectors().plus.basis;
    ComplexMatrix rho(16, 16);
    for (std::size_t term = 0; term < 4; ++term) {
        if (params.weights[term] == 0.0) continue;
        rho += Complex(params.weights[term]) * basis[term].projector();
    }
    return DensityMatrix(std::move(rho));
}

DensityMatrix noisy_state(double visibility, std::size_t n) {
    if (!(visibility >= 0.0 && visibility <= 1.0))
        throw std::invalid_argument("noisy_state: visibility must lie in [0, 1]");
    const std::size_t dim = n * n;
    ComplexMatrix rho = Complex(visibility) * max_entangled_state(n).projector();
    const double floor_weight = (1.0 - visibility) / static_cast<double>(dim);
    for (std::size_t i = 0; i < dim; ++i) rho(i, i) += floor_weight;
    return DensityMatrix(std::move(rho));
}

std::pair<PureBellParams, StateVector> sample_pure(RandomStream& rng) {
    PureBellParams params{};
    params.theta1 = rng.uniform01() * kHalfPi;
    params.theta2 = rng.uniform01() * kHalfPi;
    params.theta3 = rng.uniform01() * kHalfPi;
    params.gamma1 = rng.uniform01() * kTwoPi;
    params.gamma2 = rng.uniform01() * kTwoPi;
    params.gamma3 = rng.uniform01() * kTwoPi;
    StateVector state = pure_bell_state(params);
    return {params, std::move(state)};
}

std::pair<MixedBellParams, DensityMatrix> sample_mixed(RandomStream& rng) {
    std::array<double, 3> cuts = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    std::sort(cuts.begin(), cuts.end());
    MixedBellParams params{{cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]}};
    DensityMatrix state = mixed_bell_state(params);
    return {params, std::move(state)};
}

EntanglementReport entanglement_parameter(const StateVector& state) {
    if (state.dim() != 16)
        throw std::invalid_argument("entanglement_parameter: state must live on two ququarts");

    const ComplexMatrix& projector = bell_sectors().plus.projector;
    double distance_sq = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        Complex projected = 0.0;
        for (std::size_t j = 0; j < 16; ++j) projected += projector(i, j) * state[j];
        distance_sq += std::norm(projected - state[i]);
    }
    if (std::sqrt(distance_sq) > 1e-9)
        throw std::invalid_argument("entanglement_parameter: state is not in the top Bell sector");

    const DensityMatrix reduced = partial_trace(DensityMatrix::pure(state), Subsystem::B, 4, 4);
    const EigenSystem eig = hermitian_eig(reduced.matrix());
    const auto& lam = eig.values;

    if (std::abs(lam[0] - lam[1]) > 1e-8 || std::abs(lam[2] - lam[3]) > 1e-8)
        throw std::runtime_error("entanglement_parameter: reduced spectrum lost its degeneracy");

    EntanglementReport report{};
    report.parameter = lam[0] + lam[1] - lam[2] - lam[3];
    report.measure = 1.0 - std::abs(report.parameter);
    report.reduced_spectrum = {lam[0], lam[1], lam[2], lam[3]};
    return report;
}

}  // namespace qnl
