#include "qnl/cglmp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace qnl {

namespace {

double canonical_phase(double phase, std::size_t dim) {
    if (!std::isfinite(phase)) throw std::invalid_argument("PhaseConfiguration: phase must be finite");
    const double n = static_cast<double>(dim);
    double r = std::fmod(phase, n);
    if (r < 0.0) r += n;
    if (r >= n) r = 0.0;  // adding n can round a tiny negative remainder up to n itself
    return r + 0.0;       // normalize -0.0
}

}  // namespace

PhaseConfiguration::PhaseConfiguration(double alpha1, double alpha2, double beta1, double beta2,
                                       std::size_t dim)
    : phases_{}, dim_(dim) {
    if (dim_ < 2) throw std::invalid_argument("PhaseConfiguration: dimension must be at least 2");
    phases_[0] = canonical_phase(alpha1, dim_);
    phases_[1] = canonical_phase(alpha2, dim_);
    phases_[2] = canonical_phase(beta1, dim_);
    phases_[3] = canonical_phase(beta2, dim_);
}

PhaseConfiguration max_entangled_optimal_phases() {
    return PhaseConfiguration(0.0, 0.5, 0.25, -0.25, 4);
}

StateVector measurement_basis(const MeasurementSetting& setting, std::size_t outcome) {
    if (setting.dim < 2)
        throw std::invalid_argument("measurement_basis: dimension must be at least 2");
    if (setting.setting_index != 1 && setting.setting_index != 2)
        throw std::invalid_argument("measurement_basis: setting index must be 1 or 2");
    if (!std::isfinite(setting.phase))
        throw std::invalid_argument("measurement_basis: phase must be finite");
    if (outcome >= setting.dim)
        throw std::invalid_argument("measurement_basis: outcome out of range");

    const double n = static_cast<double>(setting.dim);
    const double offset = setting.party == Party::A ? static_cast<double>(outcome) + setting.phase
                                                    : -static_cast<double>(outcome) + setting.phase;
    const double step = 2.0 * std::numbers::pi / n * offset;
    const double scale = 1.0 / std::sqrt(n);
    std::vector<Complex> amplitudes(setting.dim);
    for (std::size_t j = 0; j < setting.dim; ++j)
        amplitudes[j] = std::polar(scale, step * static_cast<double>(j));
    return StateVector(std::move(amplitudes));
}

JointDistribution::JointDistribution(std::size_t dim, std::vector<double> probabilities)
    : dim_(dim), probabilities_(std::move(probabilities)) {
    if (dim_ < 2) throw std::invalid_argument("JointDistribution: dimension must be at least 2");
    if (probabilities_.size() != dim_ * dim_)
        throw std::invalid_argument("JointDistribution: entry count does not match dimension");
    double total = 0.0;
    for (double& p : probabilities_) {
        if (!(p >= -1e-12))
            throw std::invalid_argument("JointDistribution: negative probability beyond tolerance");
        if (p < 0.0) p = 0.0;
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("JointDistribution: probabilities do not sum to one");
}

double JointDistribution::sum() const {
    double total = 0.0;
    for (double p : probabilities_) total += p;
    return total;
}

JointDistribution joint_distribution(const DensityMatrix& state, const MeasurementSetting& a,
                                     const MeasurementSetting& b) {
    if (a.party != Party::A || b.party != Party::B)
        throw std::invalid_argument("joint_distribution: settings must belong to parties A and B");
    if (a.dim != b.dim) throw std::invalid_argument("joint_distribution: setting dimensions differ");
    const std::size_t n = a.dim;
    if (state.dim() != n * n)
        throw std::invalid_argument("joint_distribution: state dimension must be the dimension squared");

    std::vector<StateVector> a_basis;
    std::vector<StateVector> b_basis;
    a_basis.reserve(n);
    b_basis.reserve(n);
    for (std::size_t outcome = 0; outcome < n; ++outcome) {
        a_basis.push_back(measurement_basis(a, outcome));
        b_basis.push_back(measurement_basis(b, outcome));
    }

    const ComplexMatrix& rho = state.matrix();
    const std::size_t total_dim = n * n;
    std::vector<Complex> product(total_dim);
    std::vector<double> probabilities(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& av = a_basis[k].amplitudes();
        for (std::size_t l = 0; l < n; ++l) {
            const auto& bv = b_basis[l].amplitudes();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) product[i * n + j] = av[i] * bv[j];
            Complex value = 0.0;
            for (std::size_t row = 0; row < total_dim; ++row) {
                Complex acc = 0.0;
                for (std::size_t col = 0; col < total_dim; ++col) acc += rho(row, col) * product[col];
                value += std::conj(product[row]) * acc;
            }
            probabilities[k * n + l] = value.real();
        }
    }
    return JointDistribution(n, std::move(probabilities));
}

double coincidence_probability(const JointDistribution& dist, OutcomeRelation relation, long shift) {
    const long n = static_cast<long>(dist.dim());
    const std::size_t k = static_cast<std::size_t>(((shift % n) + n) % n);
    double total = 0.0;
    if (relation == OutcomeRelation::AEqualsBPlus) {
        for (std::size_t b = 0; b < dist.dim(); ++b) total += dist((b + k) % dist.dim(), b);
    } else {
        for (std::size_t a = 0; a < dist.dim(); ++a) total += dist(a, (a + k) % dist.dim());
    }
    return total;
}

double cglmp_value(const DensityMatrix& state, const PhaseConfiguration& phases, std::size_t n) {
    if (n < 2) throw std::invalid_argument("cglmp_value: dimension must be at least 2");
    if (phases.dim() != n) throw std::invalid_argument("cglmp_value: phase dimension mismatch");
    if (state.dim() != n * n)
        throw std::invalid_argument("cglmp_value: state dimension must be the dimension squared");

    const MeasurementSetting a1{Party::A, 1, phases.alpha1(), n};
    const MeasurementSetting a2{Party::A, 2, phases.alpha2(), n};
    const MeasurementSetting b1{Party::B, 1, phases.beta1(), n};
    const MeasurementSetting b2{Party::B, 2, phases.beta2(), n};

    const JointDistribution d11 = joint_distribution(state, a1, b1);
    const JointDistribution d21 = joint_distribution(state, a2, b1);
    const JointDistribution d22 = joint_distribution(state, a2, b2);
    const JointDistribution d12 = joint_distribution(state, a1, b2);

    using enum OutcomeRelation;
    double total = 0.0;
    const long terms = static_cast<long>(n) / 2;
    for (long k = 0; k < terms; ++k) {
        const double weight = 1.0 - 2.0 * static_cast<double>(k) / (static_cast<double>(n) - 1.0);
        const double aligned = coincidence_probability(d11, AEqualsBPlus, k) +
                               coincidence_probability(d21, BEqualsAPlus, k + 1) +
                               coincidence_probability(d22, AEqualsBPlus, k) +
                               coincidence_probability(d12, BEqualsAPlus, k);
        const double misaligned = coincidence_probability(d11, AEqualsBPlus, -k - 1) +
                                  coincidence_probability(d21, BEqualsAPlus, -k) +
                                  coincidence_probability(d22, AEqualsBPlus, -k - 1) +
                                  coincidence_probability(d12, BEqualsAPlus, -k - 1);
        total += weight * (aligned - misaligned);
    }
    return total;
}

}  // namespace qnl
