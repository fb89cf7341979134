#include "fracl1/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fracl1/errors.hpp"

namespace fracl1 {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string describe(const ExperimentConfig& c) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s alpha=%g%s ic=%s M=%zu", std::string(to_string(c.problem)).c_str(),
                  c.alpha, c.beta ? (" beta=" + std::to_string(*c.beta)).c_str() : "",
                  std::string(to_string(c.ic)).c_str(), c.M);
    return buf;
}

/// Re-throw the active exception with a context prefix, keeping its type.
[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const NumericalError& e) {
        throw NumericalError(context + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(context + ": " + e.what());
    } catch (const ArgumentError& e) {
        throw ArgumentError(context + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(context + ": " + e.what());
    }
}

bool smooth_for(Problem p, InitialCondition ic) {
    if (ic == InitialCondition::sin2pix) return true;
    return p == Problem::subdiffusion && ic == InitialCondition::xoneminusx;
}

double max_norm_ratio(const SpatialDiscretization& disc, const SolutionHistory& hist) {
    const double n0 = l2_norm(disc, hist.levels.front());
    if (n0 == 0.0) return 0.0;
    double worst = 0.0;
    for (const auto& level : hist.levels) worst = std::max(worst, l2_norm(disc, level) / n0);
    return worst;
}

}  // namespace

std::string_view to_string(Projection p) { return p == Projection::l2 ? "l2" : "ritz"; }

Projection parse_projection(std::string_view s) {
    const std::string l = lowercase(s);
    if (l == "l2") return Projection::l2;
    if (l == "ritz") return Projection::ritz;
    throw ArgumentError("unknown projection '" + std::string(s) + "' (expected l2 or ritz)");
}

std::string_view to_string(ReferenceKind r) {
    return r == ReferenceKind::eigen_expansion ? "eigen_expansion" : "self_reference";
}

ReferenceKind parse_reference(std::string_view s) {
    const std::string l = lowercase(s);
    if (l == "eigen_expansion" || l == "eigen") return ReferenceKind::eigen_expansion;
    if (l == "self_reference" || l == "self") return ReferenceKind::self_reference;
    throw ArgumentError("unknown reference '" + std::string(s) + "' (expected eigen_expansion or self_reference)");
}

Projection ExperimentConfig::effective_projection() const {
    if (projection) return *projection;
    return smooth_for(problem, ic) ? Projection::ritz : Projection::l2;
}

std::size_t ExperimentConfig::effective_N_ref() const {
    if (N_ref > 0) return N_ref;
    const std::size_t max_n = N_list.empty() ? 1 : *std::max_element(N_list.begin(), N_list.end());
    return 32 * max_n;
}

void validate(const ExperimentConfig& c) {
    if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
    if (c.problem == Problem::space_time_fractional) {
        if (!c.beta) throw ArgumentError("space_time_fractional requires beta");
        if (!(*c.beta > 1.0 && *c.beta < 2.0)) throw ArgumentError("beta must lie in (1, 2)");
        if (c.reference == ReferenceKind::eigen_expansion) {
            throw ArgumentError("the eigen-expansion reference exists only for the subdiffusion problem");
        }
    } else if (c.beta) {
        throw ArgumentError("beta is only meaningful for space_time_fractional");
    }
    if (c.M < 2) throw ArgumentError("M must be at least 2");
    if (c.N_list.empty()) throw ArgumentError("N_list must not be empty");
    if (c.t_list.empty()) throw ArgumentError("t_list must not be empty");
    for (std::size_t i = 0; i < c.N_list.size(); ++i) {
        if (c.N_list[i] < 1) throw ArgumentError("every N must be positive");
        if (i > 0 && !(c.N_list[i] > c.N_list[i - 1])) throw ArgumentError("N_list must be strictly increasing");
    }
    for (double t : c.t_list) {
        if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("target times must be positive");
    }
    if (c.N_list.size() > 1 && c.t_list.size() > 1) {
        throw ArgumentError("sweep either N (one t) or t (one N), not both");
    }
    if (c.reference == ReferenceKind::self_reference) {
        const std::size_t max_n = *std::max_element(c.N_list.begin(), c.N_list.end());
        if (c.effective_N_ref() < 8 * max_n) {
            throw ArgumentError("self-reference N_ref must be at least 8 times the largest N");
        }
    }
    if (c.effective_projection() == Projection::ritz) {
        const bool ok = c.ic == InitialCondition::sin2pix ||
                        (c.problem == Problem::subdiffusion && c.ic == InitialCondition::xoneminusx);
        if (!ok) throw ArgumentError("Ritz projection is not available for this initial condition; use l2");
    }
}

void apply_json(ExperimentConfig& c, std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ArgumentError("config must be a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            const auto& v = it.value();
            if (key == "problem") c.problem = parse_problem(v.get<std::string>());
            else if (key == "alpha") c.alpha = v.get<double>();
            else if (key == "beta") {
                if (v.is_null()) c.beta.reset();
                else c.beta = v.get<double>();
            } else if (key == "ic") c.ic = parse_initial_condition(v.get<std::string>());
            else if (key == "t") {
                if (v.is_array()) c.t_list = v.get<std::vector<double>>();
                else c.t_list = {v.get<double>()};
            } else if (key == "t_list") c.t_list = v.get<std::vector<double>>();
            else if (key == "M") c.M = v.get<std::size_t>();
            else if (key == "N" || key == "N_list") {
                if (v.is_array()) c.N_list = v.get<std::vector<std::size_t>>();
                else c.N_list = {v.get<std::size_t>()};
            } else if (key == "projection") c.projection = parse_projection(v.get<std::string>());
            else if (key == "normalization") c.normalization = parse_normalization(v.get<std::string>());
            else if (key == "reference") c.reference = parse_reference(v.get<std::string>());
            else if (key == "N_ref") c.N_ref = v.get<std::size_t>();
            else if (key == "K") c.K = v.get<std::size_t>();
            else throw ArgumentError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("config value has the wrong type: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig c;
    apply_json(c, ss.str());
    return c;
}

ConvergenceReport run_experiment(const ExperimentConfig& config) {
    validate(config);
    try {
        ConvergenceReport report;
        report.problem = config.problem;
        report.alpha = config.alpha;
        report.beta = config.beta;
        report.ic = config.ic;
        report.M = config.M;
        report.normalization = config.normalization;
        report.sweep = config.t_list.size() > 1 ? Sweep::target_time : Sweep::time_steps;

        const Mesh mesh = make_mesh(config.M);
        SpatialDiscretization disc;
        if (config.problem == Problem::subdiffusion) {
            disc = make_laplace_discretization(mesh);
        } else {
            RlOptions opts;
            opts.allow_outside_theory = *config.beta < 1.5;
            disc = make_rl_discretization(mesh, *config.beta, opts);
            if (opts.allow_outside_theory) {
                report.notes.push_back("beta=" + std::to_string(*config.beta) +
                                       " lies outside [3/2, 2) where coercivity is proven; run permitted");
            }
        }
        const Projection proj = config.effective_projection();
        const Vector v_h = proj == Projection::ritz ? ritz_project(disc, config.ic) : l2_project(disc, config.ic);
        const double v_norm = std::sqrt(exact_norm_squared(config.ic));

        std::optional<EigenExpansion> expansion;
        if (config.reference == ReferenceKind::eigen_expansion) {
            const std::size_t K = config.K > 0 ? config.K : default_truncation(config.ic, config.M);
            expansion = make_expansion(config.alpha, config.ic, K);
        } else {
            report.notes.push_back("reference: L1 self-reference with N_ref=" +
                                   std::to_string(config.effective_N_ref()) +
                                   " on the same mesh (first-order in time)");
        }
        report.notes.push_back("initial projection: " + std::string(to_string(proj)));

        double worst_truncation = 0.0;
        for (double t : config.t_list) {
            Vector ref;
            if (expansion) {
                ref = exact_subdiffusion_nodal(*expansion, t, mesh);
                worst_truncation = std::max(worst_truncation, truncation_bound(*expansion, t));
            } else {
                ref = self_reference(disc, config.alpha, v_h, t, config.effective_N_ref());
            }
            for (std::size_t N : config.N_list) {
                const TimeGrid grid = make_time_grid(t, N);
                SolutionHistory hist;
                try {
                    hist = march(disc, l1_weights(config.alpha, N), v_h, grid);
                } catch (...) {
                    rethrow_with_context("N=" + std::to_string(N));
                }
                ConvergenceRow row;
                row.t = t;
                row.N = N;
                row.error_raw = error_at(disc, hist.final_level(), ref);
                row.error_normalized = row.error_raw / v_norm;
                row.stability_ratio = max_norm_ratio(disc, hist);
                row.rate = std::numeric_limits<double>::quiet_NaN();
                report.rows.push_back(row);
            }
        }
        for (std::size_t i = 1; i < report.rows.size(); ++i) {
            const auto& a = report.rows[i - 1];
            const auto& b = report.rows[i];
            const double factor = report.sweep == Sweep::target_time ? a.t / b.t
                                                                     : static_cast<double>(b.N) / static_cast<double>(a.N);
            report.rows[i].rate = std::log(a.error_raw / b.error_raw) / std::log(factor);
        }
        if (expansion) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "reference: eigen-expansion with K=%zu modes, truncation bound %.2e",
                          expansion->K, worst_truncation);
            report.notes.push_back(buf);
        }
        return report;
    } catch (...) {
        rethrow_with_context(describe(config));
    }
}

TableScale parse_scale(std::string_view s) {
    const std::string l = lowercase(s);
    if (l == "desk") return TableScale::desk;
    if (l == "paper") return TableScale::paper;
    throw ArgumentError("unknown scale '" + std::string(s) + "' (expected desk or paper)");
}

std::string_view to_string(TableScale s) { return s == TableScale::desk ? "desk" : "paper"; }

std::vector<ExperimentConfig> table_configs(int id, TableScale scale) {
    const bool desk = scale == TableScale::desk;
    const std::vector<double> alphas = {0.1, 0.5, 0.9};
    const std::vector<double> small_t = {1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
    std::vector<ExperimentConfig> out;
    auto subdiffusion = [&](std::size_t paper_m) {
        ExperimentConfig c;
        c.problem = Problem::subdiffusion;
        c.M = desk ? 2048 : paper_m;
        c.reference = ReferenceKind::eigen_expansion;
        return c;
    };
    auto fractional = [&](double alpha, double beta) {
        ExperimentConfig c;
        c.problem = Problem::space_time_fractional;
        c.alpha = alpha;
        c.beta = beta;
        c.M = desk ? 1024 : 8192;
        c.N_list = {5, 10, 20, 40, 80};
        c.reference = ReferenceKind::self_reference;
        c.N_ref = desk ? 0 : 1000;
        return c;
    };
    switch (id) {
        case 1:
        case 2:
            for (double a : alphas) {
                for (auto ic : id == 1 ? std::vector{InitialCondition::indicator_half, InitialCondition::xoneminusx}
                                       : std::vector{InitialCondition::sin2pix, InitialCondition::xnegquarter}) {
                    auto c = subdiffusion(id == 1 ? 4096 : 8192);
                    c.alpha = a;
                    c.ic = ic;
                    out.push_back(c);
                }
            }
            break;
        case 3:
            for (auto ic : {InitialCondition::sin2pix, InitialCondition::xnegquarter}) {
                auto c = subdiffusion(8192);
                c.alpha = 0.5;
                c.ic = ic;
                c.N_list = {10};
                c.t_list = small_t;
                out.push_back(c);
            }
            break;
        case 4:
            for (double a : alphas) {
                for (double b : {1.25, 1.5, 1.75}) {
                    auto c = fractional(a, b);
                    c.ic = InitialCondition::sin2pix;
                    out.push_back(c);
                }
            }
            break;
        case 5:
            for (double a : alphas) {
                for (double t : {0.1, 0.01, 0.001}) {
                    auto c = fractional(a, 1.5);
                    c.ic = InitialCondition::xnegquarter;
                    c.t_list = {t};
                    out.push_back(c);
                }
            }
            break;
        case 6:
            for (auto ic : {InitialCondition::sin2pix, InitialCondition::xnegquarter}) {
                auto c = fractional(0.5, 1.5);
                c.ic = ic;
                c.N_list = {5};
                c.t_list = small_t;
                out.push_back(c);
            }
            break;
        default: throw ArgumentError("table id must be 1..6, got " + std::to_string(id));
    }
    return out;
}

std::vector<ConvergenceReport> run_all(const std::vector<ExperimentConfig>& configs,
                                       std::optional<std::size_t> workers) {
    std::size_t n_workers = 0;
    if (workers) {
        n_workers = *workers;
    } else if (const char* env = std::getenv("FRACL1_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) {
            throw ArgumentError("FRACL1_WORKERS must be a positive integer, got '" + std::string(env) + "'");
        }
        n_workers = static_cast<std::size_t>(v);
    } else {
        n_workers = std::max(1u, std::thread::hardware_concurrency());
    }
    n_workers = std::max<std::size_t>(1, std::min(n_workers, configs.size()));

    std::vector<ConvergenceReport> results(configs.size());
    std::vector<std::exception_ptr> failures(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = run_experiment(configs[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return results;
}

std::vector<ConvergenceReport> reproduce_table(int id, TableScale scale, std::optional<std::size_t> workers) {
    auto reports = run_all(table_configs(id, scale), workers);
    const std::string tag = "table " + std::to_string(id) + ", " + std::string(to_string(scale)) + " scale";
    for (auto& r : reports) r.notes.insert(r.notes.begin(), tag);
    return reports;
}

Format parse_format(std::string_view s) {
    const std::string l = lowercase(s);
    if (l == "csv") return Format::csv;
    if (l == "markdown" || l == "md") return Format::markdown;
    throw ArgumentError("unknown format '" + std::string(s) + "' (expected csv or markdown)");
}

}  // namespace fracl1
