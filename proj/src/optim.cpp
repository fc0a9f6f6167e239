#include "qnl/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace qnl {

void NelderMeadConfig::validate() const {
    if (!(reflection > 0.0)) throw std::invalid_argument("NelderMeadConfig: reflection must be positive");
    if (!(expansion > reflection))
        throw std::invalid_argument("NelderMeadConfig: expansion must exceed reflection");
    if (!(contraction > 0.0 && contraction < 1.0))
        throw std::invalid_argument("NelderMeadConfig: contraction must lie in (0, 1)");
    if (!(shrink > 0.0 && shrink < 1.0))
        throw std::invalid_argument("NelderMeadConfig: shrink must lie in (0, 1)");
    if (!(error_tolerance >= 0.0))
        throw std::invalid_argument("NelderMeadConfig: error tolerance must be nonnegative");
    if (max_iterations < 1)
        throw std::invalid_argument("NelderMeadConfig: iteration cap must be positive");
    if (!(initial_simplex_scale > 0.0))
        throw std::invalid_argument("NelderMeadConfig: simplex scale must be positive");
}

namespace {

double checked_eval(const std::function<double(std::span<const double>)>& objective,
                    std::span<const double> point, long& evaluations) {
    const double value = objective(point);
    ++evaluations;
    if (!std::isfinite(value))
        throw std::domain_error("nelder_mead_maximize: objective returned a non-finite value");
    return value;
}

double value_spread(std::span<const double> values) {
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

}  // namespace

NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& objective,
                                      std::span<const double> start, const NelderMeadConfig& config) {
    config.validate();
    if (start.empty()) throw std::invalid_argument("nelder_mead_maximize: empty starting point");
    const std::size_t dim = start.size();

    long evaluations = 0;
    std::vector<std::vector<double>> vertex(dim + 1, std::vector<double>(start.begin(), start.end()));
    std::vector<double> value(dim + 1);
    for (std::size_t i = 1; i <= dim; ++i) vertex[i][i - 1] += config.initial_simplex_scale;
    for (std::size_t i = 0; i <= dim; ++i) value[i] = checked_eval(objective, vertex[i], evaluations);

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim);
    std::vector<double> candidate(dim);
    std::vector<double> second(dim);

    bool converged = false;
    long iteration = 0;
    for (; iteration < config.max_iterations; ++iteration) {
        if (value_spread(value) < config.error_tolerance) {
            converged = true;
            break;
        }

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&value](std::size_t lhs, std::size_t rhs) { return value[lhs] > value[rhs]; });
        const std::size_t best = order.front();
        const std::size_t second_worst = order[dim - 1];
        const std::size_t worst = order.back();

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t rank = 0; rank < dim; ++rank)
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += vertex[order[rank]][d];
        for (std::size_t d = 0; d < dim; ++d) centroid[d] /= static_cast<double>(dim);

        for (std::size_t d = 0; d < dim; ++d)
            candidate[d] = centroid[d] + config.reflection * (centroid[d] - vertex[worst][d]);
        const double reflected = checked_eval(objective, candidate, evaluations);

        if (reflected > value[best]) {
            for (std::size_t d = 0; d < dim; ++d)
                second[d] = centroid[d] + config.expansion * (centroid[d] - vertex[worst][d]);
            const double expanded = checked_eval(objective, second, evaluations);
            if (expanded > reflected) {
                vertex[worst] = second;
                value[worst] = expanded;
            } else {
                vertex[worst] = candidate;
                value[worst] = reflected;
            }
            continue;
        }
        if (reflected > value[second_worst]) {
            vertex[worst] = candidate;
            value[worst] = reflected;
            continue;
        }

        bool contracted = false;
        if (reflected > value[worst]) {
            for (std::size_t d = 0; d < dim; ++d)
                second[d] = centroid[d] + config.contraction * (candidate[d] - centroid[d]);
            const double outside = checked_eval(objective, second, evaluations);
            if (outside >= reflected) {
                vertex[worst] = second;
                value[worst] = outside;
                contracted = true;
            }
        } else {
            for (std::size_t d = 0; d < dim; ++d)
                second[d] = centroid[d] + config.contraction * (vertex[worst][d] - centroid[d]);
            const double inside = checked_eval(objective, second, evaluations);
            if (inside > value[worst]) {
                vertex[worst] = second;
                value[worst] = inside;
                contracted = true;
            }
        }
        if (contracted) continue;

        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < dim; ++d)
                vertex[i][d] = vertex[best][d] + config.shrink * (vertex[i][d] - vertex[best][d]);
            value[i] = checked_eval(objective, vertex[i], evaluations);
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::max_element(value.begin(), value.end()) - value.begin());
    return NelderMeadResult{value[best], vertex[best], converged, iteration, evaluations};
}

OptimizationReport maximize_cglmp(const DensityMatrix& state, std::size_t n, int restarts,
                                  RandomStream& rng, const NelderMeadConfig& config) {
    if (restarts < 1) throw std::invalid_argument("maximize_cglmp: need at least one restart");
    if (n < 2) throw std::invalid_argument("maximize_cglmp: dimension must be at least 2");
    if (state.dim() != n * n)
        throw std::invalid_argument("maximize_cglmp: state dimension must be the dimension squared");
    config.validate();

    std::vector<std::array<double, 4>> starts(static_cast<std::size_t>(restarts));
    for (auto& start : starts)
        for (double& coordinate : start) coordinate = rng.uniform(0.0, static_cast<double>(n));

    const auto objective = [&state, n](std::span<const double> x) {
        return cglmp_value(state, PhaseConfiguration(x[0], x[1], x[2], x[3], n), n);
    };

    bool have_best = false;
    NelderMeadResult best{};
    int converged_restarts = 0;
    long evaluations = 0;
    for (const auto& start : starts) {
        NelderMeadResult result = nelder_mead_maximize(objective, start, config);
        evaluations += result.evaluations;
        if (result.converged) ++converged_restarts;
        if (!have_best || result.value > best.value) {
            best = std::move(result);
            have_best = true;
        }
    }

    return OptimizationReport{
        best.value,
        PhaseConfiguration(best.point[0], best.point[1], best.point[2], best.point[3], n),
        restarts,
        converged_restarts,
        evaluations,
        rng.seed(),
    };
}

}  // namespace qnl
