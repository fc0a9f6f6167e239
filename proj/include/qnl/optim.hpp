#pragma once

// Derivative-free maximization: Nelder-Mead with a simplex-spread stopping
// rule, and the multi-start phase search for the CGLMP functional.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qnl/cglmp.hpp"
#include "qnl/linalg.hpp"
#include "qnl/rng.hpp"

namespace qnl {

struct NelderMeadConfig {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    // The search stops once the population standard deviation of the vertex
    // values falls below this.
    double error_tolerance = 1e-4;
    long max_iterations = 5000;
    double initial_simplex_scale = 0.5;

    void validate() const;  // throws std::invalid_argument
};

struct NelderMeadResult {
    double value;
    std::vector<double> point;
    bool converged;  // false when the iteration cap was hit first
    long iterations;
    long evaluations;
};

// Maximizes the objective from the given starting point. The initial simplex
// is the start plus one scaled step along each coordinate axis. Throws
// std::domain_error if the objective ever returns a non-finite value.
NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& objective,
                                      std::span<const double> start,
                                      const NelderMeadConfig& config = {});

struct OptimizationReport {
    double best_value;
    PhaseConfiguration best_phases;
    int restarts;
    int converged_restarts;
    long evaluations;       // summed over restarts
    std::uint64_t seed;     // of the stream the starting points were drawn from
};

// Multi-start search for the phases maximizing I_n on `state`. Each restart
// begins from a point drawn uniformly from [0, n)^4; the draws all come from
// `rng`, so a stream with the same seed reproduces the report bit for bit.
// Ties between restarts resolve to the earliest one.
OptimizationReport maximize_cglmp(const DensityMatrix& state, std::size_t n, int restarts,
                                  RandomStream& rng, const NelderMeadConfig& config = {});

}  // namespace qnl
