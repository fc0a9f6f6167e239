#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qnl/cglmp.hpp"
#include "qnl/experiments.hpp"
#include "qnl/linalg.hpp"
#include "qnl/states.hpp"

using qnl::ExperimentConfig;
using qnl::Histogram;
using qnl::MixedExperimentResult;
using qnl::NoiseSweepResult;
using qnl::PureExperimentResult;
using qnl::SingleResult;
using qnl::SingleSpec;

namespace {

constexpr double kMaxEntangledOptimum = 2.896243218458708;
constexpr double kTsirelson = 2.8284271247461903;

ExperimentConfig small_config() {
    ExperimentConfig config;
    config.samples = 6;
    config.seed = 11;
    config.restarts = 3;
    return config;
}

std::size_t count_lines(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

}  // namespace

TEST_CASE("histograms bin values onto a contiguous grid") {
    const std::vector<double> values = {0.05, 0.15, 0.17, -0.02};
    const Histogram h = qnl::make_histogram(values, 0.1);
    REQUIRE(h.bins.size() == 3);
    CHECK(h.bins[0].center == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(h.bins[1].center == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(h.bins[2].center == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(h.bins[0].count == 1.0);
    CHECK(h.bins[1].count == 1.0);
    CHECK(h.bins[2].count == 2.0);
    CHECK(h.total() == 4.0);
    CHECK(h.bin_width == 0.1);

    CHECK_THROWS_AS(qnl::make_histogram(values, 0.0), std::invalid_argument);
    CHECK(qnl::make_histogram({}, 0.1).bins.empty());
}

TEST_CASE("power law fits recover exact synthetic exponents") {
    Histogram h;
    h.bin_width = 0.1;
    const double amplitude = 12.5;
    const double exponent = 3.25;
    for (int i = 1; i <= 8; ++i) {
        const double center = 0.1 * i;
        h.bins.push_back({center, amplitude * std::pow(center, -exponent)});
    }
    const qnl::PowerLawFit fit = qnl::fit_power_law(h);
    CHECK(std::abs(fit.exponent - exponent) < 1e-9);
    CHECK(std::abs(fit.amplitude - amplitude) < 1e-9);
    CHECK(fit.residual < 1e-12);
    CHECK(fit.bins_used == 8);

    // zero-count bins and nonpositive centers are excluded from the fit
    h.bins.push_back({0.9, 0.0});
    h.bins.insert(h.bins.begin(), {-0.05, 4.0});
    const qnl::PowerLawFit pruned = qnl::fit_power_law(h);
    CHECK(pruned.bins_used == 8);
    CHECK(std::abs(pruned.exponent - exponent) < 1e-9);

    Histogram tiny;
    tiny.bin_width = 0.1;
    tiny.bins = {{0.1, 3.0}, {0.2, 1.0}};
    CHECK_THROWS_AS(qnl::fit_power_law(tiny), std::invalid_argument);
}

TEST_CASE("experiment configuration is validated") {
    ExperimentConfig config;
    config.samples = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = ExperimentConfig{};
    config.bin_width = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = ExperimentConfig{};
    config.tolerance = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = ExperimentConfig{};
    config.restarts = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    ExperimentConfig{}.validate();
}

TEST_CASE("the pure ensemble produces bounded, reproducible records") {
    const PureExperimentResult result = qnl::run_pure_experiment(small_config());
    REQUIRE(result.records.size() == 6);
    for (const qnl::PureStateRecord& r : result.records) {
        CHECK(r.i4 > -4.0);
        CHECK(r.i4 < 4.0);
        CHECK(std::abs(r.chsh - 2.0 * std::sqrt(2.0)) < 1e-9);
        CHECK(r.ent_measure >= 0.0);
        CHECK(r.ent_measure <= 1.0 + 1e-12);
        for (double phase : r.phases_at_max.as_array()) {
            CHECK(phase >= 0.0);
            CHECK(phase < 4.0);
        }
    }
    CHECK(result.fraction_above_classical >= 0.0);
    CHECK(result.fraction_above_tsirelson <= result.fraction_above_classical);
    CHECK(result.histogram.total() == 6.0);

    // records reproduce bit for bit from their stored parameters and phases
    for (const qnl::PureStateRecord& r : result.records) {
        const qnl::DensityMatrix rho =
            qnl::DensityMatrix::pure(qnl::pure_bell_state(r.params));
        CHECK(qnl::cglmp_value(rho, r.phases_at_max, 4) == r.i4);
    }

    const PureExperimentResult again = qnl::run_pure_experiment(small_config());
    CHECK(qnl::to_csv(again) == qnl::to_csv(result));

    ExperimentConfig threaded = small_config();
    threaded.threads = 2;
    const PureExperimentResult parallel = qnl::run_pure_experiment(threaded);
    CHECK(qnl::to_csv(parallel) == qnl::to_csv(result));
}

TEST_CASE("pure ensemble CSV has the fixed schema") {
    const PureExperimentResult result = qnl::run_pure_experiment(small_config());
    const std::string csv = qnl::to_csv(result);
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header ==
          "index,theta1,theta2,theta3,gamma1,gamma2,gamma3,i4,chsh,ent_measure,"
          "alpha1,alpha2,beta1,beta2,converged");
    CHECK(count_lines(csv) == 7);
    const std::string last_field = csv.substr(csv.rfind(',') + 1);
    CHECK((last_field == "0\n" || last_field == "1\n"));
}

TEST_CASE("pure ensemble JSON carries the full envelope") {
    const PureExperimentResult result = qnl::run_pure_experiment(small_config());
    const nlohmann::json doc =
        nlohmann::json::parse(qnl::to_json(result, small_config(), "pure"));
    CHECK(doc.at("experiment") == "pure");
    CHECK(doc.at("version").is_string());
    CHECK(doc.at("config").at("samples") == 6);
    CHECK(doc.at("config").at("seed") == 11);
    CHECK(doc.at("records").size() == 6);
    CHECK(doc.at("records")[0].contains("theta1"));
    CHECK(doc.at("records")[0].contains("converged"));
    CHECK(doc.at("histogram").contains("bins"));
    CHECK(doc.at("summary").contains("fraction_above_classical"));
    CHECK(doc.contains("power_law_fit"));
}

TEST_CASE("the scatter run shares the pure ensemble computation") {
    const PureExperimentResult scatter = qnl::run_entanglement_scatter(small_config());
    const PureExperimentResult pure = qnl::run_pure_experiment(small_config());
    REQUIRE(scatter.records.size() == pure.records.size());
    for (std::size_t i = 0; i < scatter.records.size(); ++i) {
        CHECK(scatter.records[i].i4 == pure.records[i].i4);
        CHECK(scatter.records[i].ent_measure == pure.records[i].ent_measure);
    }
    const std::string csv = qnl::to_scatter_csv(scatter);
    CHECK(csv.substr(0, csv.find('\n')) == "index,ent_measure,i4");
    CHECK(count_lines(csv) == 7);
}

TEST_CASE("the mixed ensemble stays maximally correlated and reproducible") {
    ExperimentConfig config = small_config();
    config.samples = 5;
    const MixedExperimentResult result = qnl::run_mixed_experiment(config);
    REQUIRE(result.records.size() == 5);
    for (const qnl::MixedStateRecord& r : result.records) {
        CHECK(std::abs(r.chsh - 2.0 * std::sqrt(2.0)) < 1e-9);
        CHECK(std::abs(r.i4) <= result.max_abs_i4);
    }
    const std::string csv = qnl::to_csv(result);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "index,p1,p2,p3,p4,i4,chsh,alpha1,alpha2,beta1,beta2,converged");
    CHECK(count_lines(csv) == 6);
    CHECK(qnl::to_csv(qnl::run_mixed_experiment(config)) == csv);

    const nlohmann::json doc = nlohmann::json::parse(qnl::to_json(result, config));
    CHECK(doc.at("experiment") == "mixed");
    CHECK(doc.at("summary").contains("max_abs_i4"));
}

TEST_CASE("the noise sweep is linear with the expected thresholds") {
    const NoiseSweepResult result = qnl::run_noise_sweep(0.0, 1.0, 201, ExperimentConfig{});
    REQUIRE(result.rows.size() == 201);
    CHECK(result.rows.front().p == 0.0);
    CHECK(result.rows.back().p == 1.0);
    CHECK(std::abs(result.rows.front().i4) < 1e-12);
    CHECK(std::abs(result.rows.front().chsh) < 1e-12);
    CHECK(std::abs(result.rows.back().i4 - kMaxEntangledOptimum) < 1e-9);
    CHECK(std::abs(result.rows.back().chsh - kTsirelson) < 1e-12);

    for (const qnl::NoiseSweepRow& row : result.rows) {
        CHECK(std::abs(row.i4 - row.p * result.rows.back().i4) < 1e-9);
        CHECK(std::abs(row.chsh - row.p * kTsirelson) < 1e-9);
    }

    CHECK(std::abs(result.i4_crossing - 2.0 / kMaxEntangledOptimum) < 1e-6);
    CHECK(std::abs(result.chsh_crossing - 2.0 / kTsirelson) < 1e-6);
    CHECK(result.i4_crossing < result.chsh_crossing);

    const std::string csv = qnl::to_csv(result);
    CHECK(csv.substr(0, csv.find('\n')) == "p,i4,chsh");
    CHECK(count_lines(csv) == 202);

    CHECK_THROWS_AS(qnl::run_noise_sweep(0.0, 1.0, 1, ExperimentConfig{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(qnl::run_noise_sweep(0.8, 0.2, 10, ExperimentConfig{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(qnl::run_noise_sweep(-0.1, 1.0, 10, ExperimentConfig{}),
                    std::invalid_argument);
}

TEST_CASE("a sweep without crossings reports them as absent") {
    const NoiseSweepResult low = qnl::run_noise_sweep(0.0, 0.3, 4, ExperimentConfig{});
    CHECK(std::isnan(low.i4_crossing));
    CHECK(std::isnan(low.chsh_crossing));
}

TEST_CASE("single evaluations cover all three state families") {
    SingleSpec pure_spec;
    pure_spec.pure = qnl::PureBellParams{std::numbers::pi / 4.0, std::numbers::pi / 2.0,
                                         std::numbers::pi / 2.0, 0.0, 0.0, 0.0};
    const SingleResult pure = qnl::run_single(pure_spec);
    CHECK(std::abs(pure.i4 - kMaxEntangledOptimum) < 1e-9);
    CHECK(std::abs(pure.chsh - kTsirelson) < 1e-10);
    REQUIRE(pure.ent_measure.has_value());
    CHECK(std::abs(*pure.ent_measure - 1.0) < 1e-9);

    SingleSpec noise_spec;
    noise_spec.noise_p = 0.7;
    const SingleResult noisy = qnl::run_single(noise_spec);
    CHECK(std::abs(noisy.i4 - 2.027370252921095) < 1e-9);
    CHECK_FALSE(noisy.ent_measure.has_value());

    SingleSpec mixed_spec;
    mixed_spec.mixed = qnl::MixedBellParams{{0.25, 0.25, 0.25, 0.25}};
    const SingleResult mixed = qnl::run_single(mixed_spec);
    CHECK(std::abs(mixed.chsh - kTsirelson) < 1e-10);

    const std::string csv = qnl::to_csv(pure);
    CHECK(csv.substr(0, csv.find('\n')) == "i4,chsh,ent_measure,alpha1,alpha2,beta1,beta2");
    CHECK(count_lines(csv) == 2);

    SingleSpec empty;
    CHECK_THROWS_AS(qnl::run_single(empty), std::invalid_argument);
    SingleSpec doubled;
    doubled.noise_p = 0.5;
    doubled.mixed = qnl::MixedBellParams{{1.0, 0.0, 0.0, 0.0}};
    CHECK_THROWS_AS(qnl::run_single(doubled), std::invalid_argument);
}

TEST_CASE("doubles round trip through their shortest decimal form") {
    for (double v : {0.1, 1.0 / 3.0, 2.896243218458708, -0.0, 1e-300, 12345.6789}) {
        const std::string text = qnl::format_double(v);
        CHECK(std::stod(text) == v);
    }
    CHECK(qnl::format_double(0.25) == "0.25");
    CHECK(qnl::format_double(2.0) == "2");
}

TEST_CASE("output files land on disk and bad paths raise IoError") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "qnl_test_output.csv";
    ExperimentConfig config = small_config();
    config.samples = 2;
    config.output_path = path.string();
    qnl::run_pure_experiment(config);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header.starts_with("index,theta1"));
    in.close();
    fs::remove(path);

    CHECK_THROWS_AS(qnl::write_text_file("/nonexistent_dir_xyz/out.csv", "x"), qnl::IoError);
    config.output_path = "/nonexistent_dir_xyz/out.csv";
    config.samples = 1;
    CHECK_THROWS_AS(qnl::run_pure_experiment(config), qnl::IoError);
}
