#include "qnl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

#include <json.hpp>

#include "qnl/scenario.hpp"
#include "qnl/version.hpp"

namespace qnl {

namespace {

constexpr double kClassicalBound = 2.0;
const double kTsirelsonBound = 2.0 * std::sqrt(2.0);

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

NelderMeadConfig optimizer_config(const ExperimentConfig& config) {
    NelderMeadConfig nm;
    nm.error_tolerance = config.tolerance;
    return nm;
}

double interpolated_crossing(const std::vector<NoiseSweepRow>& rows, double target,
                             double NoiseSweepRow::* field) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double lo = rows[i].*field - target;
        const double hi = rows[i + 1].*field - target;
        if (lo == 0.0) return rows[i].p;
        if (hi == 0.0) return rows[i + 1].p;
        if (lo * hi < 0.0)
            return rows[i].p + (rows[i + 1].p - rows[i].p) * (-lo) / (hi - lo);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

void append_row(std::string& out, std::initializer_list<double> values, bool converged_flag,
                bool has_flag) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        out += format_double(v);
        first = false;
    }
    if (has_flag) {
        out += ',';
        out += converged_flag ? '1' : '0';
    }
    out += '\n';
}

nlohmann::json phases_json(const PhaseConfiguration& phases) {
    return {
        {"alpha1", phases.alpha1()},
        {"alpha2", phases.alpha2()},
        {"beta1", phases.beta1()},
        {"beta2", phases.beta2()},
    };
}

nlohmann::json histogram_json(const Histogram& histogram) {
    nlohmann::json bins = nlohmann::json::array();
    for (const HistogramBin& bin : histogram.bins)
        bins.push_back({{"center", bin.center}, {"count", bin.count}});
    return {{"bin_width", histogram.bin_width}, {"bins", std::move(bins)}};
}

nlohmann::json config_json(const ExperimentConfig& config) {
    return {
        {"samples", config.samples},
        {"seed", config.seed},
        {"restarts", config.restarts},
        {"tolerance", config.tolerance},
        {"bin_width", config.bin_width},
    };
}

void maybe_write(const ExperimentConfig& config, const std::function<std::string()>& csv,
                 const std::function<std::string()>& json) {
    if (config.output_path.empty()) return;
    write_text_file(config.output_path, config.format == OutputFormat::Csv ? csv() : json());
}

}  // namespace

void ExperimentConfig::validate() const {
    if (samples < 1) throw std::invalid_argument("ExperimentConfig: need at least one sample");
    if (restarts < 1) throw std::invalid_argument("ExperimentConfig: need at least one restart");
    if (!(tolerance > 0.0) || !std::isfinite(tolerance))
        throw std::invalid_argument("ExperimentConfig: tolerance must be positive and finite");
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw std::invalid_argument("ExperimentConfig: bin width must be positive and finite");
    if (threads < 0) throw std::invalid_argument("ExperimentConfig: thread count cannot be negative");
}

double Histogram::total() const {
    double sum = 0.0;
    for (const HistogramBin& bin : bins) sum += bin.count;
    return sum;
}

Histogram make_histogram(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw std::invalid_argument("make_histogram: bin width must be positive and finite");
    Histogram histogram;
    histogram.bin_width = bin_width;
    if (values.empty()) return histogram;

    long lowest = 0;
    long highest = 0;
    bool first = true;
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("make_histogram: values must be finite");
        const long index = static_cast<long>(std::floor(v / bin_width));
        lowest = first ? index : std::min(lowest, index);
        highest = first ? index : std::max(highest, index);
        first = false;
    }
    if (highest - lowest >= 10'000'000L)
        throw std::invalid_argument("make_histogram: bin width too small for the value range");

    histogram.bins.resize(static_cast<std::size_t>(highest - lowest + 1));
    for (std::size_t i = 0; i < histogram.bins.size(); ++i) {
        histogram.bins[i].center = (static_cast<double>(lowest + static_cast<long>(i)) + 0.5) * bin_width;
        histogram.bins[i].count = 0.0;
    }
    for (double v : values) {
        const long index = static_cast<long>(std::floor(v / bin_width));
        histogram.bins[static_cast<std::size_t>(index - lowest)].count += 1.0;
    }
    return histogram;
}

PowerLawFit fit_power_law(const Histogram& histogram) {
    std::vector<std::pair<double, double>> points;  // (log center, log count)
    for (const HistogramBin& bin : histogram.bins)
        if (bin.count >= 1.0 && bin.center > 0.0)
            points.emplace_back(std::log(bin.center), std::log(bin.count));
    if (points.size() < 3)
        throw std::invalid_argument("fit_power_law: need at least three bins with data");

    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12)
        throw std::invalid_argument("fit_power_law: bin centers are degenerate");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double residual_sq = 0.0;
    for (const auto& [x, y] : points) {
        const double r = y - (intercept + slope * x);
        residual_sq += r * r;
    }
    return PowerLawFit{-slope, std::exp(intercept), std::sqrt(residual_sq / n), points.size()};
}

PureStateRecord evaluate_pure_record(std::size_t index, const PureBellParams& params,
                                     const ExperimentConfig& config, RandomStream& stream) {
    const StateVector psi = pure_bell_state(params);
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const OptimizationReport report =
        maximize_cglmp(rho, 4, config.restarts, stream, optimizer_config(config));
    return PureStateRecord{
        index,
        params,
        report.best_value,
        chsh_expectation(rho, maximal_violation_scenario()),
        entanglement_parameter(psi).measure,
        report.best_phases,
        report.converged_restarts == report.restarts,
    };
}

MixedStateRecord evaluate_mixed_record(std::size_t index, const MixedBellParams& params,
                                       const ExperimentConfig& config, RandomStream& stream) {
    const DensityMatrix rho = mixed_bell_state(params);
    const OptimizationReport report =
        maximize_cglmp(rho, 4, config.restarts, stream, optimizer_config(config));
    return MixedStateRecord{
        index,
        params,
        report.best_value,
        chsh_expectation(rho, maximal_violation_scenario()),
        report.best_phases,
        report.converged_restarts == report.restarts,
    };
}

namespace {

PureExperimentResult collect_pure_records(const ExperimentConfig& config) {
    config.validate();
    const RandomStream master(config.seed);
    std::vector<std::optional<PureStateRecord>> slots(config.samples);
    parallel_for(config.samples, config.threads, [&](std::size_t i) {
        RandomStream stream = master.substream(i);
        const auto [params, state] = sample_pure(stream);
        (void)state;
        slots[i] = evaluate_pure_record(i, params, config, stream);
    });

    PureExperimentResult result;
    result.records.reserve(config.samples);
    std::vector<double> values;
    values.reserve(config.samples);
    std::size_t above_classical = 0;
    std::size_t above_tsirelson = 0;
    for (auto& slot : slots) {
        const PureStateRecord& record = *slot;
        values.push_back(record.i4);
        if (record.i4 > kClassicalBound) ++above_classical;
        if (record.i4 > kTsirelsonBound) ++above_tsirelson;
        result.records.push_back(std::move(*slot));
    }
    result.histogram = make_histogram(values, config.bin_width);
    result.fraction_above_classical =
        static_cast<double>(above_classical) / static_cast<double>(config.samples);
    result.fraction_above_tsirelson =
        static_cast<double>(above_tsirelson) / static_cast<double>(config.samples);
    std::size_t usable = 0;
    for (const HistogramBin& bin : result.histogram.bins)
        if (bin.count >= 1.0 && bin.center > 0.0) ++usable;
    if (usable >= 3) result.fit = fit_power_law(result.histogram);
    return result;
}

}  // namespace

PureExperimentResult run_pure_experiment(const ExperimentConfig& config) {
    PureExperimentResult result = collect_pure_records(config);
    maybe_write(config, [&] { return to_csv(result); },
                [&] { return to_json(result, config, "pure"); });
    return result;
}

PureExperimentResult run_entanglement_scatter(const ExperimentConfig& config) {
    PureExperimentResult result = collect_pure_records(config);
    maybe_write(config, [&] { return to_scatter_csv(result); },
                [&] { return to_json(result, config, "entanglement"); });
    return result;
}

MixedExperimentResult run_mixed_experiment(const ExperimentConfig& config) {
    config.validate();
    const RandomStream master(config.seed);
    std::vector<std::optional<MixedStateRecord>> slots(config.samples);
    parallel_for(config.samples, config.threads, [&](std::size_t i) {
        RandomStream stream = master.substream(i);
        const auto [params, state] = sample_mixed(stream);
        (void)state;
        slots[i] = evaluate_mixed_record(i, params, config, stream);
    });

    MixedExperimentResult result;
    result.records.reserve(config.samples);
    std::vector<double> values;
    values.reserve(config.samples);
    result.max_abs_i4 = 0.0;
    for (auto& slot : slots) {
        values.push_back(slot->i4);
        result.max_abs_i4 = std::max(result.max_abs_i4, std::abs(slot->i4));
        result.records.push_back(std::move(*slot));
    }
    result.histogram = make_histogram(values, config.bin_width);
    maybe_write(config, [&] { return to_csv(result); }, [&] { return to_json(result, config); });
    return result;
}

NoiseSweepResult run_noise_sweep(double p_min, double p_max, std::size_t steps,
                                 const ExperimentConfig& config) {
    if (!(p_min >= 0.0 && p_min < p_max && p_max <= 1.0))
        throw std::invalid_argument("run_noise_sweep: need 0 <= p_min < p_max <= 1");
    if (steps < 2) throw std::invalid_argument("run_noise_sweep: need at least two grid points");

    const PhaseConfiguration phases = max_entangled_optimal_phases();
    const ChshScenario& scenario = maximal_violation_scenario();
    NoiseSweepResult result;
    result.rows.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
        const double p = p_min + (p_max - p_min) * t;
        const DensityMatrix rho = noisy_state(p, 4);
        result.rows.push_back({p, cglmp_value(rho, phases, 4), chsh_expectation(rho, scenario)});
    }
    result.i4_crossing = interpolated_crossing(result.rows, kClassicalBound, &NoiseSweepRow::i4);
    result.chsh_crossing = interpolated_crossing(result.rows, kClassicalBound, &NoiseSweepRow::chsh);
    maybe_write(config, [&] { return to_csv(result); }, [&] { return to_json(result); });
    return result;
}

SingleResult run_single(const SingleSpec& spec) {
    const int provided = static_cast<int>(spec.pure.has_value()) +
                         static_cast<int>(spec.mixed.has_value()) +
                         static_cast<int>(spec.noise_p.has_value());
    if (provided != 1)
        throw std::invalid_argument("run_single: specify exactly one of pure, mixed, or noise");

    const PhaseConfiguration phases = spec.phases ? *spec.phases : max_entangled_optimal_phases();
    if (phases.dim() != 4) throw std::invalid_argument("run_single: phases must have dimension four");

    std::optional<double> ent_measure;
    std::optional<DensityMatrix> rho;
    if (spec.pure) {
        const StateVector psi = pure_bell_state(*spec.pure);
        ent_measure = entanglement_parameter(psi).measure;
        rho = DensityMatrix::pure(psi);
    } else if (spec.mixed) {
        rho = mixed_bell_state(*spec.mixed);
    } else {
        rho = noisy_state(*spec.noise_p, 4);
    }

    return SingleResult{
        cglmp_value(*rho, phases, 4),
        chsh_expectation(*rho, maximal_violation_scenario()),
        ent_measure,
        phases,
    };
}

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buffer, ptr);
}

std::string to_csv(const PureExperimentResult& result) {
    std::string out =
        "index,theta1,theta2,theta3,gamma1,gamma2,gamma3,i4,chsh,ent_measure,"
        "alpha1,alpha2,beta1,beta2,converged\n";
    for (const PureStateRecord& r : result.records) {
        out += std::to_string(r.index);
        out += ',';
        append_row(out,
                   {r.params.theta1, r.params.theta2, r.params.theta3, r.params.gamma1,
                    r.params.gamma2, r.params.gamma3, r.i4, r.chsh, r.ent_measure,
                    r.phases_at_max.alpha1(), r.phases_at_max.alpha2(), r.phases_at_max.beta1(),
                    r.phases_at_max.beta2()},
                   r.converged, true);
    }
    return out;
}

std::string to_scatter_csv(const PureExperimentResult& result) {
    std::string out = "index,ent_measure,i4\n";
    for (const PureStateRecord& r : result.records) {
        out += std::to_string(r.index);
        out += ',';
        append_row(out, {r.ent_measure, r.i4}, false, false);
    }
    return out;
}

std::string to_csv(const MixedExperimentResult& result) {
    std::string out = "index,p1,p2,p3,p4,i4,chsh,alpha1,alpha2,beta1,beta2,converged\n";
    for (const MixedStateRecord& r : result.records) {
        out += std::to_string(r.index);
        out += ',';
        append_row(out,
                   {r.params.weights[0], r.params.weights[1], r.params.weights[2],
                    r.params.weights[3], r.i4, r.chsh, r.phases_at_max.alpha1(),
                    r.phases_at_max.alpha2(), r.phases_at_max.beta1(), r.phases_at_max.beta2()},
                   r.converged, true);
    }
    return out;
}

std::string to_csv(const NoiseSweepResult& result) {
    std::string out = "p,i4,chsh\n";
    for (const NoiseSweepRow& row : result.rows) append_row(out, {row.p, row.i4, row.chsh}, false, false);
    return out;
}

std::string to_csv(const SingleResult& result) {
    std::string out = "i4,chsh,ent_measure,alpha1,alpha2,beta1,beta2\n";
    out += format_double(result.i4);
    out += ',';
    out += format_double(result.chsh);
    out += ',';
    if (result.ent_measure) out += format_double(*result.ent_measure);
    for (double phase : result.phases.as_array()) {
        out += ',';
        out += format_double(phase);
    }
    out += '\n';
    return out;
}

std::string to_json(const PureExperimentResult& result, const ExperimentConfig& config,
                    std::string_view experiment) {
    nlohmann::json records = nlohmann::json::array();
    for (const PureStateRecord& r : result.records) {
        nlohmann::json record = {
            {"index", r.index},
            {"theta1", r.params.theta1},
            {"theta2", r.params.theta2},
            {"theta3", r.params.theta3},
            {"gamma1", r.params.gamma1},
            {"gamma2", r.params.gamma2},
            {"gamma3", r.params.gamma3},
            {"i4", r.i4},
            {"chsh", r.chsh},
            {"ent_measure", r.ent_measure},
            {"converged", r.converged},
        };
        record.update(phases_json(r.phases_at_max));
        records.push_back(std::move(record));
    }
    nlohmann::json doc = {
        {"experiment", std::string(experiment)},
        {"version", std::string(kVersion)},
        {"config", config_json(config)},
        {"records", std::move(records)},
        {"histogram", histogram_json(result.histogram)},
        {"summary",
         {{"fraction_above_classical", result.fraction_above_classical},
          {"fraction_above_tsirelson", result.fraction_above_tsirelson}}},
    };
    if (result.fit) {
        doc["power_law_fit"] = {
            {"exponent", result.fit->exponent},
            {"amplitude", result.fit->amplitude},
            {"residual", result.fit->residual},
            {"bins_used", result.fit->bins_used},
        };
    } else {
        doc["power_law_fit"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

std::string to_json(const MixedExperimentResult& result, const ExperimentConfig& config) {
    nlohmann::json records = nlohmann::json::array();
    for (const MixedStateRecord& r : result.records) {
        nlohmann::json record = {
            {"index", r.index},
            {"p1", r.params.weights[0]},
            {"p2", r.params.weights[1]},
            {"p3", r.params.weights[2]},
            {"p4", r.params.weights[3]},
            {"i4", r.i4},
            {"chsh", r.chsh},
            {"converged", r.converged},
        };
        record.update(phases_json(r.phases_at_max));
        records.push_back(std::move(record));
    }
    nlohmann::json doc = {
        {"experiment", "mixed"},
        {"version", std::string(kVersion)},
        {"config", config_json(config)},
        {"records", std::move(records)},
        {"histogram", histogram_json(result.histogram)},
        {"summary", {{"max_abs_i4", result.max_abs_i4}}},
    };
    return doc.dump(2) + "\n";
}

std::string to_json(const NoiseSweepResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const NoiseSweepRow& row : result.rows)
        rows.push_back({{"p", row.p}, {"i4", row.i4}, {"chsh", row.chsh}});
    nlohmann::json doc = {
        {"experiment", "noise"},
        {"version", std::string(kVersion)},
        {"rows", std::move(rows)},
        {"summary",
         {{"i4_crossing", result.i4_crossing}, {"chsh_crossing", result.chsh_crossing}}},
    };
    return doc.dump(2) + "\n";
}

std::string to_json(const SingleResult& result) {
    nlohmann::json doc = {
        {"i4", result.i4},
        {"chsh", result.chsh},
        {"ent_measure", result.ent_measure ? nlohmann::json(*result.ent_measure) : nlohmann::json()},
        {"phases", phases_json(result.phases)},
    };
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file: " + path);
    out << content;
    out.flush();
    if (!out.good()) throw IoError("failed writing output file: " + path);
}

}  // namespace qnl
