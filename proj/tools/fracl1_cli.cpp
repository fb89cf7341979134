#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracl1/errors.hpp"
#include "fracl1/experiment.hpp"
#include "fracl1/kernelcheck.hpp"
#include "fracl1/specfun.hpp"

using namespace fracl1;

namespace {

/// Flags shared by `solve` and `convergence`; only flags actually given
/// override the config file.
struct ConfigFlags {
    std::string config_path;
    std::string problem, ic, projection, normalization, reference;
    double alpha = 0.0, beta = 0.0;
    std::vector<double> t;
    std::size_t M = 0, N_ref = 0, K = 0;
    std::vector<std::size_t> N;

    CLI::Option* o_problem = nullptr;
    CLI::Option* o_alpha = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_ic = nullptr;
    CLI::Option* o_t = nullptr;
    CLI::Option* o_M = nullptr;
    CLI::Option* o_N = nullptr;
    CLI::Option* o_projection = nullptr;
    CLI::Option* o_normalization = nullptr;
    CLI::Option* o_reference = nullptr;
    CLI::Option* o_N_ref = nullptr;
    CLI::Option* o_K = nullptr;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config file; flags override its values");
        o_problem = app->add_option("--problem", problem, "subdiffusion | space_time_fractional");
        o_alpha = app->add_option("--alpha", alpha, "time order alpha in (0, 1]");
        o_beta = app->add_option("--beta", beta, "space order beta (space_time_fractional)");
        o_ic = app->add_option("--ic", ic, "sin2pix | xnegquarter | indicator_half | xoneminusx");
        o_t = app->add_option("--t", t, "target time(s), comma separated")->delimiter(',');
        o_M = app->add_option("--M", M, "number of subintervals");
        o_N = app->add_option("--N", N, "time step counts, comma separated")->delimiter(',');
        o_projection = app->add_option("--projection", projection, "l2 | ritz");
        o_normalization = app->add_option("--normalization", normalization, "raw | normalized");
        o_reference = app->add_option("--reference", reference, "eigen_expansion | self_reference");
        o_N_ref = app->add_option("--N-ref", N_ref, "steps of the self-reference (default 32 x max N)");
        o_K = app->add_option("--K", K, "eigen-expansion truncation (default automatic)");
    }

    ExperimentConfig build() const {
        ExperimentConfig c;
        if (!config_path.empty()) c = load_config(config_path);
        if (o_problem->count()) {
            c.problem = parse_problem(problem);
            if (c.problem == Problem::space_time_fractional && !o_reference->count() && config_path.empty()) {
                c.reference = ReferenceKind::self_reference;
            }
        }
        if (o_alpha->count()) c.alpha = alpha;
        if (o_beta->count()) c.beta = beta;
        if (o_ic->count()) c.ic = parse_initial_condition(ic);
        if (o_t->count()) c.t_list = t;
        if (o_M->count()) c.M = M;
        if (o_N->count()) c.N_list = N;
        if (o_projection->count()) c.projection = parse_projection(projection);
        if (o_normalization->count()) c.normalization = parse_normalization(normalization);
        if (o_reference->count()) c.reference = parse_reference(reference);
        if (o_N_ref->count()) c.N_ref = N_ref;
        if (o_K->count()) c.K = K;
        return c;
    }
};

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const ArgumentError*>(&e)) return "ArgumentError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    return "Error";
}

int exit_code(const std::string& type) {
    if (type == "ArgumentError" || type == "UsageError") return 2;
    if (type == "DomainError") return 3;
    if (type == "NumericalError") return 4;
    if (type == "IoError") return 5;
    return 1;
}

int report_error(const std::string& type, const std::string& message) {
    nlohmann::json j = {{"status", "error"}, {"type", type}, {"message", message}};
    std::cerr << j.dump() << '\n';
    return exit_code(type);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to standard output");
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

void run_solve(const ConfigFlags& flags, const std::string& output) {
    ExperimentConfig c = flags.build();
    validate(c);
    if (c.N_list.size() != 1 || c.t_list.size() != 1) {
        throw ArgumentError("solve expects exactly one N and one t");
    }
    const Mesh mesh = make_mesh(c.M);
    const SpatialDiscretization disc =
        c.problem == Problem::subdiffusion
            ? make_laplace_discretization(mesh)
            : make_rl_discretization(mesh, *c.beta, RlOptions{RlAssembly::exact, *c.beta < 1.5});
    const Vector v_h = c.effective_projection() == Projection::ritz ? ritz_project(disc, c.ic) : l2_project(disc, c.ic);
    const TimeGrid grid = make_time_grid(c.t_list.front(), c.N_list.front());
    const auto hist = march(disc, l1_weights(c.alpha, grid.N), v_h, grid);
    std::string text = "x,u\n";
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", 0.0, 0.0);
    text += buf;
    const Vector& u = hist.final_level();
    for (std::size_t k = 0; k < u.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", mesh.interior_node(k), u[k]);
        text += buf;
    }
    std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", 1.0, 0.0);
    text += buf;
    write_text(output, text);
}

nlohmann::json run_diagnostics(double alpha, double theta, double delta, std::size_t samples,
                               const std::vector<double>& taus) {
    nlohmann::json out;
    out["alpha"] = alpha;
    out["theta"] = theta;
    out["delta"] = delta;
    out["samples_per_branch"] = samples;
    std::vector<double> chi1_ratio, kernel_ratio;
    const auto lambdas = default_lambda_grid();
    for (double tau : taus) {
        ContourSpec spec{theta, delta, tau, samples};
        const auto scan = lemma_scan(spec, alpha);
        const auto ks = kernel_scan(spec, alpha, lambdas);
        chi1_ratio.push_back(scan.max_chi1_ratio);
        kernel_ratio.push_back(ks.max_ratio);
        out["scans"].push_back({{"tau", tau},
                                {"min_re_psi", scan.min_re_psi},
                                {"min_abs_psi", scan.min_abs_psi},
                                {"chi1_ratio", scan.max_chi1_ratio},
                                {"min_chi_ratio", scan.min_chi_ratio},
                                {"max_chi_ratio", scan.max_chi_ratio},
                                {"min_chi_ratio_rays", scan.min_chi_ratio_rays},
                                {"max_abs_arg_chi1_over_pi", scan.max_abs_arg_chi1 / std::numbers::pi},
                                {"kernel_ratio", ks.max_ratio}});
    }
    out["chi1_ratio_drift"] = max_relative_drift(chi1_ratio);
    out["kernel_ratio_drift"] = max_relative_drift(kernel_ratio);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"L1 time stepping for subdiffusion and space-time fractional diffusion"};
    app.require_subcommand(1);

    ConfigFlags solve_flags;
    std::string solve_output;
    auto* solve = app.add_subcommand("solve", "single run; prints nodal values at the final time");
    solve_flags.attach(solve);
    solve->add_option("--output,-o", solve_output, "output path (default stdout)");

    ConfigFlags conv_flags;
    std::string conv_output, conv_format = "csv";
    auto* conv = app.add_subcommand("convergence", "one configuration -> convergence report");
    conv_flags.attach(conv);
    conv->add_option("--format", conv_format, "csv | markdown");
    conv->add_option("--output,-o", conv_output, "output path (default stdout)");

    int table_id = 0;
    std::string table_scale = "desk", table_format = "csv", table_output;
    std::size_t table_workers = 0;
    auto* table = app.add_subcommand("table", "reproduce one of the tables 1-6");
    table->add_option("--id", table_id, "table number 1..6")->required();
    table->add_option("--scale", table_scale, "desk | paper");
    table->add_option("--format", table_format, "csv | markdown");
    table->add_option("--output,-o", table_output, "output path (default stdout)");
    table->add_option("--workers", table_workers, "worker threads (default FRACL1_WORKERS or core count)");

    double ml_alpha = 0.5, ml_beta = 1.0, ml_z = 0.0;
    auto* ml = app.add_subcommand("ml-eval", "evaluate the Mittag-Leffler function E_{alpha,beta}(z)");
    ml->add_option("--alpha", ml_alpha, "alpha in (0, 2]")->required();
    ml->add_option("--beta", ml_beta, "beta > 0 (default 1)");
    ml->add_option("--z", ml_z, "real argument")->required();

    double d_alpha = 0.5, d_theta = 0.51 * std::numbers::pi, d_delta = 1.0;
    std::size_t d_samples = 200;
    std::vector<double> d_taus = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
    std::string d_output;
    auto* diag = app.add_subcommand("diagnostics", "scan the discrete kernel symbols over the contour");
    diag->add_option("--alpha", d_alpha, "alpha in (0, 1]")->required();
    diag->add_option("--theta", d_theta, "contour angle in radians, in (pi/2, 5pi/6) (default 0.51 pi)");
    diag->add_option("--delta", d_delta, "arc radius (default 1)");
    diag->add_option("--samples", d_samples, "samples per contour branch (default 200)");
    diag->add_option("--tau-list", d_taus, "time steps, comma separated")->delimiter(',');
    diag->add_option("--output,-o", d_output, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("UsageError", e.what());
    }

    try {
        if (*solve) {
            run_solve(solve_flags, solve_output);
        } else if (*conv) {
            const auto report = run_experiment(conv_flags.build());
            emit({report}, parse_format(conv_format), conv_output);
        } else if (*table) {
            const auto scale = parse_scale(table_scale);
            const auto format = parse_format(table_format);
            std::optional<std::size_t> workers;
            if (table_workers > 0) workers = table_workers;
            emit(reproduce_table(table_id, scale, workers), format, table_output);
        } else if (*ml) {
            std::printf("%.17g\n", mittag_leffler({ml_alpha, ml_beta}, ml_z));
        } else if (*diag) {
            write_text(d_output, run_diagnostics(d_alpha, d_theta, d_delta, d_samples, d_taus).dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        return report_error(error_type(e), e.what());
    }
    return 0;
}
