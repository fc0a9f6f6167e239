// Command line driver for the non-locality experiments: sampled pure and
// mixed ensembles, the entanglement scatter, the isotropic noise sweep, and
// single-state evaluation.

#include <array>
#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qnl/experiments.hpp"
#include "qnl/version.hpp"

namespace {

void add_common_options(CLI::App* cmd, qnl::ExperimentConfig& config, std::string& format) {
    cmd->add_option("--samples", config.samples, "Number of sampled states")->capture_default_str();
    cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
    cmd->add_option("--restarts", config.restarts, "Optimizer restarts per state")
        ->capture_default_str();
    cmd->add_option("--tolerance", config.tolerance, "Optimizer stopping spread")
        ->capture_default_str();
    cmd->add_option("--bin-width", config.bin_width, "Histogram bin width")->capture_default_str();
    cmd->add_option("--threads", config.threads, "Worker threads, 0 uses all cores")
        ->capture_default_str();
    cmd->add_option("--out", config.output_path, "Output file path");
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

void apply_format(qnl::ExperimentConfig& config, const std::string& format) {
    config.format = format == "json" ? qnl::OutputFormat::Json : qnl::OutputFormat::Csv;
}

void print_pure_summary(const qnl::PureExperimentResult& result, const std::string& out_path) {
    std::cout << "samples: " << result.records.size() << '\n';
    std::cout << "fraction with i4 > 2: " << result.fraction_above_classical << '\n';
    std::cout << "fraction with i4 > 2*sqrt(2): " << result.fraction_above_tsirelson << '\n';
    if (result.fit) {
        std::cout << "power law exponent: " << result.fit->exponent << " (over "
                  << result.fit->bins_used << " bins)\n";
    } else {
        std::cout << "power law exponent: not enough populated bins\n";
    }
    if (!out_path.empty()) std::cout << "wrote " << out_path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-locality measures for bipartite qudit states"};
    app.set_version_flag("--version", std::string(qnl::kVersion));
    app.require_subcommand(1);

    qnl::ExperimentConfig pure_config;
    std::string pure_format = "csv";
    CLI::App* pure_cmd = app.add_subcommand("pure", "Random pure states: optimized i4 per state");
    add_common_options(pure_cmd, pure_config, pure_format);

    qnl::ExperimentConfig mixed_config;
    mixed_config.samples = 100;
    std::string mixed_format = "csv";
    CLI::App* mixed_cmd = app.add_subcommand("mixed", "Random sector-diagonal mixed states");
    add_common_options(mixed_cmd, mixed_config, mixed_format);

    qnl::ExperimentConfig scatter_config;
    std::string scatter_format = "csv";
    CLI::App* scatter_cmd =
        app.add_subcommand("entanglement", "Entanglement measure vs optimized i4 scatter");
    add_common_options(scatter_cmd, scatter_config, scatter_format);

    qnl::ExperimentConfig noise_config;
    std::string noise_format = "csv";
    double p_min = 0.0;
    double p_max = 1.0;
    std::size_t steps = 101;
    CLI::App* noise_cmd = app.add_subcommand("noise", "Visibility sweep of the isotropic noise family");
    noise_cmd->add_option("--p-min", p_min, "Lowest visibility")->capture_default_str();
    noise_cmd->add_option("--p-max", p_max, "Highest visibility")->capture_default_str();
    noise_cmd->add_option("--steps", steps, "Grid points, endpoints included")->capture_default_str();
    noise_cmd->add_option("--out", noise_config.output_path, "Output file path");
    noise_cmd->add_option("--format", noise_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    CLI::App* single_cmd = app.add_subcommand("single", "Evaluate one state at fixed phases");
    std::array<double, 3> theta{0.0, 0.0, 0.0};
    std::array<double, 3> gamma{0.0, 0.0, 0.0};
    std::array<double, 4> weights{0.0, 0.0, 0.0, 0.0};
    double noise_p = 1.0;
    std::array<double, 4> phase_values{0.0, 0.5, 0.25, -0.25};
    std::string single_out;
    std::string single_format = "csv";
    auto* theta1_opt = single_cmd->add_option("--theta1", theta[0], "First angle");
    auto* theta2_opt = single_cmd->add_option("--theta2", theta[1], "Second angle");
    auto* theta3_opt = single_cmd->add_option("--theta3", theta[2], "Third angle");
    auto* gamma1_opt = single_cmd->add_option("--gamma1", gamma[0], "First relative phase");
    auto* gamma2_opt = single_cmd->add_option("--gamma2", gamma[1], "Second relative phase");
    auto* gamma3_opt = single_cmd->add_option("--gamma3", gamma[2], "Third relative phase");
    auto* p1_opt = single_cmd->add_option("--p1", weights[0], "First sector weight");
    auto* p2_opt = single_cmd->add_option("--p2", weights[1], "Second sector weight");
    auto* p3_opt = single_cmd->add_option("--p3", weights[2], "Third sector weight");
    auto* p4_opt = single_cmd->add_option("--p4", weights[3], "Fourth sector weight");
    auto* noise_opt = single_cmd->add_option("--noise-p", noise_p, "Visibility of the noise family");
    single_cmd->add_option("--alpha1", phase_values[0], "Measurement phase alpha1")
        ->capture_default_str();
    single_cmd->add_option("--alpha2", phase_values[1], "Measurement phase alpha2")
        ->capture_default_str();
    single_cmd->add_option("--beta1", phase_values[2], "Measurement phase beta1")
        ->capture_default_str();
    single_cmd->add_option("--beta2", phase_values[3], "Measurement phase beta2")
        ->capture_default_str();
    single_cmd->add_option("--out", single_out, "Output file path");
    single_cmd->add_option("--format", single_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (pure_cmd->parsed()) {
            apply_format(pure_config, pure_format);
            const qnl::PureExperimentResult result = qnl::run_pure_experiment(pure_config);
            print_pure_summary(result, pure_config.output_path);
        } else if (mixed_cmd->parsed()) {
            apply_format(mixed_config, mixed_format);
            const qnl::MixedExperimentResult result = qnl::run_mixed_experiment(mixed_config);
            std::cout << "samples: " << result.records.size() << '\n';
            std::cout << "max |i4|: " << result.max_abs_i4 << '\n';
            if (!mixed_config.output_path.empty())
                std::cout << "wrote " << mixed_config.output_path << '\n';
        } else if (scatter_cmd->parsed()) {
            apply_format(scatter_config, scatter_format);
            const qnl::PureExperimentResult result = qnl::run_entanglement_scatter(scatter_config);
            print_pure_summary(result, scatter_config.output_path);
        } else if (noise_cmd->parsed()) {
            apply_format(noise_config, noise_format);
            const qnl::NoiseSweepResult result =
                qnl::run_noise_sweep(p_min, p_max, steps, noise_config);
            std::cout << "i4 crossing: " << result.i4_crossing << '\n';
            std::cout << "chsh crossing: " << result.chsh_crossing << '\n';
            if (!noise_config.output_path.empty())
                std::cout << "wrote " << noise_config.output_path << '\n';
        } else if (single_cmd->parsed()) {
            qnl::SingleSpec spec;
            const bool pure_given = theta1_opt->count() || theta2_opt->count() ||
                                    theta3_opt->count() || gamma1_opt->count() ||
                                    gamma2_opt->count() || gamma3_opt->count();
            const bool mixed_given =
                p1_opt->count() || p2_opt->count() || p3_opt->count() || p4_opt->count();
            if (pure_given)
                spec.pure = qnl::PureBellParams{theta[0], theta[1], theta[2],
                                                gamma[0], gamma[1], gamma[2]};
            if (mixed_given) spec.mixed = qnl::MixedBellParams{weights};
            if (noise_opt->count()) spec.noise_p = noise_p;
            spec.phases =
                qnl::PhaseConfiguration(phase_values[0], phase_values[1], phase_values[2],
                                        phase_values[3], 4);
            const qnl::SingleResult result = qnl::run_single(spec);
            std::cout << "i4 = " << qnl::format_double(result.i4) << '\n';
            std::cout << "chsh = " << qnl::format_double(result.chsh) << '\n';
            if (result.ent_measure)
                std::cout << "ent_measure = " << qnl::format_double(*result.ent_measure) << '\n';
            std::cout << "phases = (" << qnl::format_double(result.phases.alpha1()) << ", "
                      << qnl::format_double(result.phases.alpha2()) << ", "
                      << qnl::format_double(result.phases.beta1()) << ", "
                      << qnl::format_double(result.phases.beta2()) << ")\n";
            if (!single_out.empty()) {
                qnl::write_text_file(single_out, single_format == "json" ? qnl::to_json(result)
                                                                         : qnl::to_csv(result));
                std::cout << "wrote " << single_out << '\n';
            }
        }
    } catch (const qnl::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
