#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracl1/reference.hpp"

namespace fracl1 {

enum class Projection { l2, ritz };
enum class ReferenceKind {
    eigen_expansion,  // Mittag-Leffler series (subdiffusion only)
    self_reference,   // fine-step L1 run on the same mesh
};

std::string_view to_string(Projection p);
Projection parse_projection(std::string_view s);
std::string_view to_string(ReferenceKind r);
ReferenceKind parse_reference(std::string_view s);

/// One convergence study. A list of N values at a fixed t (time-step sweep),
/// or a single N over a list of target times (t-sweep).
struct ExperimentConfig {
    Problem problem = Problem::subdiffusion;
    double alpha = 0.5;
    std::optional<double> beta;
    InitialCondition ic = InitialCondition::sin2pix;
    std::vector<double> t_list = {0.1};
    std::size_t M = 2048;
    std::vector<std::size_t> N_list = {10, 20, 40, 80, 160, 320};
    std::optional<Projection> projection;  // default: ritz for smooth data, l2 otherwise
    Normalization normalization = Normalization::normalized;
    ReferenceKind reference = ReferenceKind::eigen_expansion;
    std::size_t N_ref = 0;  // 0: 32 * max N
    std::size_t K = 0;      // 0: default_truncation

    Projection effective_projection() const;
    std::size_t effective_N_ref() const;
};

/// Throws ArgumentError on an inconsistent configuration.
void validate(const ExperimentConfig& config);

/// Overlay keys of a JSON object onto `config`. Recognised keys: problem, alpha,
/// beta, ic, t, t_list, M, N (number or list), N_list, projection,
/// normalization, reference, N_ref, K.
void apply_json(ExperimentConfig& config, std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

ConvergenceReport run_experiment(const ExperimentConfig& config);

enum class TableScale { desk, paper };
TableScale parse_scale(std::string_view s);
std::string_view to_string(TableScale s);

/// Preset configurations for convergence tables 1-6.
std::vector<ExperimentConfig> table_configs(int table_id, TableScale scale);

/// Run configurations concurrently; results are returned in input order.
/// Worker count: `workers`, else FRACL1_WORKERS, else hardware concurrency.
std::vector<ConvergenceReport> run_all(const std::vector<ExperimentConfig>& configs,
                                       std::optional<std::size_t> workers = std::nullopt);

std::vector<ConvergenceReport> reproduce_table(int table_id, TableScale scale,
                                               std::optional<std::size_t> workers = std::nullopt);

enum class Format { csv, markdown };
Format parse_format(std::string_view s);

void emit_csv(const std::vector<ConvergenceReport>& reports, std::ostream& out);
void emit_markdown(const std::vector<ConvergenceReport>& reports, std::ostream& out);
void emit(const std::vector<ConvergenceReport>& reports, Format format, std::ostream& out);

/// Write to a file path, or to standard output when path is empty or "-".
void emit(const std::vector<ConvergenceReport>& reports, Format format, const std::string& path);

/// Inverse of emit_csv. Rows sharing (problem, alpha, beta, ic, M) and
/// consecutive in the file form one report.
std::vector<ConvergenceReport> parse_csv(std::istream& in);

}  // namespace fracl1
