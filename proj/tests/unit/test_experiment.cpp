#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <doctest.h>
#include <json.hpp>

#include "fracl1/errors.hpp"
#include "fracl1/experiment.hpp"

using namespace fracl1;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.alpha = 0.5;
    c.ic = InitialCondition::indicator_half;
    c.M = 128;
    c.N_list = {10, 20, 40};
    c.t_list = {0.1};
    c.K = 500;
    return c;
}

ExperimentConfig small_rl_config() {
    ExperimentConfig c;
    c.problem = Problem::space_time_fractional;
    c.alpha = 0.5;
    c.beta = 1.5;
    c.ic = InitialCondition::sin2pix;
    c.M = 64;
    c.N_list = {5, 10};
    c.reference = ReferenceKind::self_reference;
    return c;
}

struct CommandResult {
    int status = -1;
    std::string out;
};

/// Run the CLI with stderr folded into the captured output.
CommandResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FRACL1_CLI_PATH) + " " + args + " 2>&1";
    CommandResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) r.out += buf.data();
    const int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string to_csv(const std::vector<ConvergenceReport>& reports) {
    std::ostringstream os;
    emit_csv(reports, os);
    return os.str();
}

struct ScopedEnv {
    explicit ScopedEnv(const char* value) {
        if (const char* old = std::getenv("FRACL1_WORKERS")) saved = old;
        if (value) setenv("FRACL1_WORKERS", value, 1);
        else unsetenv("FRACL1_WORKERS");
    }
    ~ScopedEnv() {
        if (saved) setenv("FRACL1_WORKERS", saved->c_str(), 1);
        else unsetenv("FRACL1_WORKERS");
    }
    std::optional<std::string> saved;
};

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config validation") {
    CHECK_NOTHROW(validate(small_config()));
    CHECK_NOTHROW(validate(small_rl_config()));

    auto c = small_config();
    c.alpha = 1.2;
    CHECK_THROWS_AS(validate(c), ArgumentError);
    c = small_config();
    c.N_list = {20, 10};
    CHECK_THROWS_AS(validate(c), ArgumentError);
    c = small_config();
    c.N_list = {10, 10};
    CHECK_THROWS_AS(validate(c), ArgumentError);
    c = small_config();
    c.beta = 1.5;
    CHECK_THROWS_AS(validate(c), ArgumentError);
    c = small_config();
    c.t_list = {0.1, 0.01};
    CHECK_THROWS_AS(validate(c), ArgumentError);
    c = small_config();
    c.projection = Projection::ritz;
    CHECK_THROWS_AS(validate(c), ArgumentError);

    auto r = small_rl_config();
    r.beta.reset();
    CHECK_THROWS_AS(validate(r), ArgumentError);
    r = small_rl_config();
    r.beta = 2.0;
    CHECK_THROWS_AS(validate(r), ArgumentError);
    r = small_rl_config();
    r.reference = ReferenceKind::eigen_expansion;
    CHECK_THROWS_AS(validate(r), ArgumentError);
    r = small_rl_config();
    r.N_ref = 40;
    CHECK_THROWS_AS(validate(r), ArgumentError);
    r = small_rl_config();
    r.beta = 1.25;
    CHECK_NOTHROW(validate(r));
}

TEST_CASE("projection defaults follow the smoothness of the data") {
    auto c = small_config();
    CHECK(c.effective_projection() == Projection::l2);
    c.ic = InitialCondition::sin2pix;
    CHECK(c.effective_projection() == Projection::ritz);
    c.ic = InitialCondition::xoneminusx;
    CHECK(c.effective_projection() == Projection::ritz);
    auto r = small_rl_config();
    r.ic = InitialCondition::xoneminusx;
    CHECK(r.effective_projection() == Projection::l2);
    CHECK(small_rl_config().effective_N_ref() == 320);
}

TEST_CASE("JSON configuration") {
    ExperimentConfig c;
    apply_json(c, R"({"problem": "space_time_fractional", "alpha": 0.9, "beta": 1.75, "ic": "xnegquarter",
                      "t": 0.01, "M": 256, "N": [5, 10, 20], "reference": "self_reference", "N_ref": 400,
                      "normalization": "raw"})");
    CHECK(c.problem == Problem::space_time_fractional);
    CHECK(c.alpha == 0.9);
    CHECK(c.beta == 1.75);
    CHECK(c.ic == InitialCondition::xnegquarter);
    CHECK(c.t_list == std::vector<double>{0.01});
    CHECK(c.M == 256);
    CHECK(c.N_list == std::vector<std::size_t>{5, 10, 20});
    CHECK(c.reference == ReferenceKind::self_reference);
    CHECK(c.N_ref == 400);
    CHECK(c.normalization == Normalization::raw);
    CHECK_NOTHROW(validate(c));

    ExperimentConfig d;
    CHECK_THROWS_AS(apply_json(d, R"({"alpha": 0.5, "gamma": 3})"), ArgumentError);
    CHECK_THROWS_AS(apply_json(d, R"({"alpha": "half"})"), ArgumentError);
    CHECK_THROWS_AS(apply_json(d, "[1, 2]"), ArgumentError);
    CHECK_THROWS_AS(apply_json(d, "{not json"), ArgumentError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);

    const auto path = std::filesystem::temp_directory_path() / "fracl1_config_test.json";
    {
        std::ofstream out(path);
        out << R"({"alpha": 0.3, "ic": "indicator_half", "M": 64, "N": 10})";
    }
    const auto e = load_config(path.string());
    CHECK(e.alpha == 0.3);
    CHECK(e.N_list == std::vector<std::size_t>{10});
    std::filesystem::remove(path);
}

TEST_CASE("run_experiment report shape") {
    const auto r = run_experiment(small_config());
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rates().size() == 2);
    CHECK(std::isnan(r.rows[0].rate));
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].rate == doctest::Approx(r.rates()[i - 1]).epsilon(1e-14));
        CHECK(r.rows[i].error_raw < r.rows[i - 1].error_raw);
    }
    for (const auto& row : r.rows) {
        CHECK(row.error_normalized == doctest::Approx(row.error_raw / std::sqrt(0.5)).epsilon(1e-14));
        CHECK(row.stability_ratio <= 1.0 + 1e-12);
    }
    CHECK(r.sweep == Sweep::time_steps);

    auto one = small_config();
    one.N_list = {10};
    const auto s = run_experiment(one);
    CHECK(s.rows.size() == 1);
    CHECK(s.rates().empty());
    CHECK(std::isnan(s.rate()));
}

TEST_CASE("errors carry configuration context") {
    auto c = small_config();
    c.M = 1;
    try {
        (void)run_experiment(c);
        FAIL("expected ArgumentError");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("M") != std::string::npos);
    }
}

TEST_CASE("t sweep and self-reference notes") {
    auto c = small_config();
    c.ic = InitialCondition::sin2pix;
    c.N_list = {10};
    c.t_list = {1e-3, 1e-4, 1e-5};
    const auto r = run_experiment(c);
    CHECK(r.sweep == Sweep::target_time);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[2].t == 1e-5);

    const auto s = run_experiment(small_rl_config());
    bool has_note = false;
    for (const auto& n : s.notes) has_note |= n.find("self-reference") != std::string::npos;
    CHECK(has_note);
}

TEST_CASE("CSV emission") {
    std::ostringstream empty;
    emit_csv({}, empty);
    CHECK(empty.str() == "problem,alpha,beta,ic,t,M,N,error_raw,error_normalized,rate\n");

    const std::vector<ConvergenceReport> reports{run_experiment(small_config()), run_experiment(small_rl_config())};
    const std::string text = to_csv(reports);
    std::istringstream lines(text);
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        ++count;
        CHECK(std::count(line.begin(), line.end(), ',') == 9);
    }
    CHECK(count == 1 + 3 + 2);

    // Re-running gives identical bytes.
    CHECK(to_csv({run_experiment(small_config()), run_experiment(small_rl_config())}) == text);

    std::istringstream in(text);
    const auto parsed = parse_csv(in);
    REQUIRE(parsed.size() == 2);
    CHECK(to_csv(parsed) == text);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(parsed[k].problem == reports[k].problem);
        CHECK(parsed[k].alpha == reports[k].alpha);
        CHECK(parsed[k].beta == reports[k].beta);
        CHECK(parsed[k].ic == reports[k].ic);
        CHECK(parsed[k].M == reports[k].M);
        REQUIRE(parsed[k].rows.size() == reports[k].rows.size());
        for (std::size_t i = 0; i < parsed[k].rows.size(); ++i) {
            CHECK(parsed[k].rows[i].N == reports[k].rows[i].N);
            CHECK(parsed[k].rows[i].error_raw == doctest::Approx(reports[k].rows[i].error_raw).epsilon(1e-8));
        }
    }

    std::istringstream bad("a,b,c\n");
    CHECK_THROWS_AS(parse_csv(bad), ArgumentError);
}

TEST_CASE("Markdown emission mirrors the table layout") {
    std::ostringstream os;
    emit_markdown({run_experiment(small_config())}, os);
    const std::string md = os.str();
    CHECK(md.find("| N=10 | N=20 | N=40 | rate |") != std::string::npos);
    CHECK(md.find("indicator_half") != std::string::npos);
    CHECK(parse_format("markdown") == Format::markdown);
    CHECK(parse_format("csv") == Format::csv);
    CHECK_THROWS_AS(parse_format("xml"), ArgumentError);
}

TEST_CASE("emit to an unwritable path") {
    CHECK_THROWS_AS(emit({}, Format::csv, std::string("/nonexistent-dir/out.csv")), IoError);
}

TEST_CASE("table presets") {
    for (int id = 1; id <= 6; ++id) {
        for (auto scale : {TableScale::desk, TableScale::paper}) {
            const auto configs = table_configs(id, scale);
            CHECK(!configs.empty());
            for (const auto& c : configs) CHECK_NOTHROW(validate(c));
        }
    }
    CHECK(table_configs(2, TableScale::desk).front().M == 2048);
    CHECK(table_configs(2, TableScale::paper).front().M == 8192);
    CHECK(table_configs(1, TableScale::paper).front().M == 4096);
    CHECK(table_configs(4, TableScale::desk).front().M == 1024);
    CHECK(table_configs(4, TableScale::paper).front().N_ref == 1000);
    CHECK(table_configs(4, TableScale::desk).size() == 9);
    CHECK(table_configs(3, TableScale::desk).front().t_list.size() == 6);
    CHECK_THROWS_AS(table_configs(7, TableScale::desk), ArgumentError);
    CHECK_THROWS_AS(parse_scale("huge"), ArgumentError);
}

TEST_CASE("worker count from the environment") {
    const std::vector<ExperimentConfig> configs{small_config(), small_rl_config(), small_config()};
    std::string serial, parallel;
    {
        ScopedEnv env("1");
        serial = to_csv(run_all(configs));
    }
    {
        ScopedEnv env("3");
        parallel = to_csv(run_all(configs));
    }
    CHECK(serial == parallel);
    CHECK(to_csv(run_all(configs, 2)) == serial);
    {
        ScopedEnv env("zero");
        CHECK_THROWS_AS(run_all(configs), ArgumentError);
    }
    {
        ScopedEnv env("0");
        CHECK_THROWS_AS(run_all(configs), ArgumentError);
    }
    auto bad = configs;
    bad[1].M = 1;
    CHECK_THROWS_AS(run_all(bad, 2), ArgumentError);
}

TEST_CASE("desk and paper scales give the same subdiffusion rates") {
    for (int id : {1, 2, 3}) {
        const auto desk = reproduce_table(id, TableScale::desk);
        const auto paper = reproduce_table(id, TableScale::paper);
        REQUIRE(desk.size() == paper.size());
        for (std::size_t k = 0; k < desk.size(); ++k) {
            CAPTURE(id);
            CAPTURE(k);
            CHECK(std::abs(desk[k].rate() - paper[k].rate()) <= 0.05);
        }
    }
}

TEST_CASE("CLI reports errors as JSON with distinct exit codes") {
    auto r = run_cli("convergence --alpha 1.5 --M 16 --N 10,20");
    CHECK(r.status == 2);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "error");
    CHECK(j["type"] == "ArgumentError");

    r = run_cli("ml-eval --alpha 0.5 --beta 2 --z -60");
    CHECK(r.status == 3);
    CHECK(nlohmann::json::parse(r.out)["type"] == "DomainError");

    r = run_cli("table --id 3 --output /nonexistent-dir/t3.csv");
    CHECK(r.status == 5);
    CHECK(nlohmann::json::parse(r.out)["type"] == "IoError");

    r = run_cli("table --bogus");
    CHECK(r.status == 2);
    CHECK(nlohmann::json::parse(r.out)["type"] == "UsageError");

    r = run_cli("convergence --config /nonexistent/config.json");
    CHECK(r.status == 5);
}

TEST_CASE("CLI subcommands produce well-formed output") {
    auto r = run_cli("ml-eval --alpha 0.5 --z -1");
    CHECK(r.status == 0);
    CHECK(std::stod(r.out) == doctest::Approx(0.4275835761558070).epsilon(1e-12));

    r = run_cli("solve --alpha 0.5 --ic sin2pix --M 8 --N 10 --t 0.1");
    CHECK(r.status == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,u");
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 9);

    r = run_cli("convergence --alpha 0.5 --ic indicator_half --M 64 --N 10,20 --K 200");
    CHECK(r.status == 0);
    CHECK(r.out.rfind("problem,alpha,beta,ic,t,M,N,error_raw,error_normalized,rate\n", 0) == 0);

    r = run_cli("convergence --problem space_time_fractional --alpha 0.5 --beta 1.5 --M 32 --N 5,10");
    CHECK(r.status == 0);
    CHECK(r.out.find("space_time_fractional,0.5,1.5,sin2pix") != std::string::npos);

    r = run_cli("diagnostics --alpha 0.5 --samples 50 --tau-list 0.01,0.005");
    CHECK(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["scans"].size() == 2);
    CHECK(j["scans"][0]["min_re_psi"].get<double>() > 0.0);
    CHECK(j["chi1_ratio_drift"].get<double>() < 0.10);
}

}
