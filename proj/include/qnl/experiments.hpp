#pragma once

// Experiment drivers tying the pieces together: sample states, maximize the
// CGLMP functional per state, aggregate histograms and fits, and emit CSV or
// JSON artifacts. Per-state work runs on a thread pool; every state draws
// from its own substream, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnl/cglmp.hpp"
#include "qnl/linalg.hpp"
#include "qnl/optim.hpp"
#include "qnl/rng.hpp"
#include "qnl/states.hpp"

namespace qnl {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    int restarts = 20;
    double tolerance = 1e-4;  // optimizer stopping spread
    double bin_width = 0.1;
    int threads = 0;  // 0 picks the hardware thread count
    std::string output_path;  // empty writes no file
    OutputFormat format = OutputFormat::Csv;

    void validate() const;  // throws std::invalid_argument
};

struct HistogramBin {
    double center;
    double count;
};

struct Histogram {
    double bin_width = 0.0;
    std::vector<HistogramBin> bins;  // contiguous run from lowest to highest occupied bin

    double total() const;
};

// Bins value v into floor(v / bin_width); centers sit at (index + 0.5) * width.
Histogram make_histogram(std::span<const double> values, double bin_width);

struct PowerLawFit {
    double exponent;   // count ~ amplitude * center^(-exponent)
    double amplitude;
    double residual;   // rms log-space residual
    std::size_t bins_used;
};

// Least squares of log(count) against log(center) over bins with count >= 1
// and center > 0. Throws std::invalid_argument when fewer than three qualify.
PowerLawFit fit_power_law(const Histogram& histogram);

struct PureStateRecord {
    std::size_t index;
    PureBellParams params;
    double i4;
    double chsh;
    double ent_measure;
    PhaseConfiguration phases_at_max;
    bool converged;  // every restart stopped on the spread rule
};

struct MixedStateRecord {
    std::size_t index;
    MixedBellParams params;
    double i4;
    double chsh;
    PhaseConfiguration phases_at_max;
    bool converged;
};

struct PureExperimentResult {
    std::vector<PureStateRecord> records;
    Histogram histogram;                // of the maximized i4 values
    std::optional<PowerLawFit> fit;     // absent when too few usable bins
    double fraction_above_classical;    // i4 > 2
    double fraction_above_tsirelson;    // i4 > 2 sqrt(2)
};

struct MixedExperimentResult {
    std::vector<MixedStateRecord> records;
    Histogram histogram;
    double max_abs_i4;
};

struct NoiseSweepRow {
    double p;  // visibility
    double i4;
    double chsh;
};

struct NoiseSweepResult {
    std::vector<NoiseSweepRow> rows;
    double i4_crossing;    // interpolated visibility where i4 reaches 2; NaN if absent
    double chsh_crossing;  // same for the CHSH expectation
};

// One state's full evaluation: optimize the phases (restarts drawn from
// `stream`), plus the fixed-scenario CHSH expectation.
PureStateRecord evaluate_pure_record(std::size_t index, const PureBellParams& params,
                                     const ExperimentConfig& config, RandomStream& stream);
MixedStateRecord evaluate_mixed_record(std::size_t index, const MixedBellParams& params,
                                       const ExperimentConfig& config, RandomStream& stream);

// Random pure states: per-state record list (index order), histogram, power
// law fit, and violation fractions. Writes `output_path` when set.
PureExperimentResult run_pure_experiment(const ExperimentConfig& config);

// Same computation as run_pure_experiment (a shared code path, so the i4
// columns agree bit for bit at equal seeds); the CSV artifact carries the
// (ent_measure, i4) scatter instead of the full record rows.
PureExperimentResult run_entanglement_scatter(const ExperimentConfig& config);

MixedExperimentResult run_mixed_experiment(const ExperimentConfig& config);

// Evaluates i4 (at the fixed known-optimal phases) and the CHSH expectation
// on the isotropic noise family over an inclusive uniform visibility grid.
NoiseSweepResult run_noise_sweep(double p_min, double p_max, std::size_t steps,
                                 const ExperimentConfig& config);

// Exactly one of the three state fields must be set.
struct SingleSpec {
    std::optional<PureBellParams> pure;
    std::optional<MixedBellParams> mixed;
    std::optional<double> noise_p;
    std::optional<PhaseConfiguration> phases;  // defaults to the known optimum
};

struct SingleResult {
    double i4;
    double chsh;
    std::optional<double> ent_measure;  // pure states only
    PhaseConfiguration phases;
};

SingleResult run_single(const SingleSpec& spec);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::string to_csv(const PureExperimentResult& result);
std::string to_scatter_csv(const PureExperimentResult& result);
std::string to_csv(const MixedExperimentResult& result);
std::string to_csv(const NoiseSweepResult& result);
std::string to_csv(const SingleResult& result);

std::string to_json(const PureExperimentResult& result, const ExperimentConfig& config,
                    std::string_view experiment);
std::string to_json(const MixedExperimentResult& result, const ExperimentConfig& config);
std::string to_json(const NoiseSweepResult& result);
std::string to_json(const SingleResult& result);

// Throws IoError when the path cannot be opened or written.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qnl
