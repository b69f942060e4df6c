#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ostop/cli.hpp"
#include "ostop/config.hpp"
#include "ostop/errors.hpp"

using namespace ostop;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kQuinticConfig = R"({
  "schema": "ostop-config/1",
  "diffusion": {"family": "brownian", "alpha": 2.0, "drift": 0.0, "volatility": 1.0},
  "reward": {"kind": "polynomial", "coefficients": [0, -4, 0, 5, 0, -1]},
  "output": {"sample_range": [-4, 4], "sample_count": 801}
})";

const char* kKinkedConfig = R"({
  "schema": "ostop-config/1",
  "diffusion": {"family": "brownian", "alpha": 1.0, "drift": 0.0, "volatility": 1.0},
  "reward": {"kind": "piecewise_linear", "knots": [[-1, -1], [1, 1], [2, 0], [3, 1]]}
})";

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing builds the quintic problem") {
    const ProblemConfig cfg = parse_config_text(kQuinticConfig);
    CHECK(cfg.model.alpha() == 2.0);
    CHECK(cfg.reward.is_smooth());
    CHECK(cfg.reward.g(1.0) == 0.0);
    CHECK(cfg.reward.g(0.5) == doctest::Approx(-(0.5 - 2.0) * (0.5 - 1.0) * 0.5 * 1.5 * 2.5));
    const auto& alg = std::get<SmoothReward>(cfg.reward.kind).alpha_minus_generator;
    for (double x : {-2.0, 0.3, 1.7})
        CHECK(alg(x) == doctest::Approx(((-2.0 * x * x + 20.0) * x * x - 23.0) * x).epsilon(1e-12));
    CHECK(cfg.sample_count == 801);
}

TEST_CASE("config parsing derives the representing measure from knots") {
    const ProblemConfig cfg = parse_config_text(kKinkedConfig);
    CHECK_FALSE(cfg.reward.is_smooth());
    const auto& nu = std::get<RepresentedReward>(cfg.reward.kind).nu;
    REQUIRE(nu.atoms.size() == 2);
    CHECK(nu.atoms[0].location == 1.0);
    CHECK(nu.atoms[0].mass == doctest::Approx(2.0));
    CHECK(nu.atoms[1].location == 2.0);
    CHECK(nu.atoms[1].mass == doctest::Approx(-2.0));
    CHECK(nu.density(-1.5) == doctest::Approx(2.0 * -1.5));
    CHECK(nu.density(1.5) == doctest::Approx(2.0 * 0.5));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config_text("{not json"), InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text(R"({"schema":"other/9"})"), InvalidParameterError);
    CHECK_THROWS_AS(parse_config_text(R"({"diffusion":{"family":"brownian","alpha":1}})"),
                    InvalidParameterError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"diffusion":{"family":"gbm","alpha":1},"reward":{"kind":"polynomial","coefficients":[1]}})"),
        InvalidParameterError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"diffusion":{"family":"brownian","alpha":1},"reward":{"kind":"piecewise_linear","knots":[[2,0],[1,1]]}})"),
        InvalidParameterError);
}

TEST_CASE("custom diffusion registry") {
    register_custom_diffusion("exp_bm", [](double alpha, const std::map<std::string, double>&) {
        return DiffusionModel::standard_brownian(alpha);
    });
    const ProblemConfig cfg = parse_config_text(R"({
      "schema": "ostop-config/1",
      "diffusion": {"family": "custom", "name": "exp_bm", "alpha": 2.0},
      "reward": {"kind": "polynomial", "coefficients": [0, -4, 0, 5, 0, -1],
                 "alg_coefficients": [0, -23, 0, 20, 0, -2]}
    })");
    CHECK(cfg.model.wronskian() == doctest::Approx(4.0));
    CHECK_THROWS_AS(parse_config_text(R"({
      "schema": "ostop-config/1",
      "diffusion": {"family": "custom", "name": "missing", "alpha": 2.0},
      "reward": {"kind": "polynomial", "coefficients": [1]}
    })"),
                    InvalidParameterError);
}

TEST_CASE("solve command writes a report with the known intervals") {
    const fs::path cfg = write_temp("ostop_cfg_q2.json", kQuinticConfig);
    const fs::path out = fs::temp_directory_path() / "ostop_report_q2.json";
    const int rc = cli::run_main(
        {"solve", "--config", cfg.string(), "--out", out.string(), "--quiet"});
    REQUIRE(rc == cli::kExitOk);

    const json rep = read_json(out);
    CHECK(rep.at("schema") == "ostop-report/1");
    REQUIRE(rep.at("continuation").size() == 3);
    CHECK(rep.at("continuation")[2].at("hi") == "inf");
    CHECK(rep.at("continuation")[2].at("k2").get<double>() == 0.0);
    CHECK(rep.at("solver_meta").at("merges") == 0);
    CHECK(std::abs(rep.at("continuation")[0].at("lo").get<double>() + 3.23) < 0.02);
    for (const auto& d : rep.at("diagnostics"))
        CHECK(d.at("satisfied") == true);
}

TEST_CASE("solve then verify round-trips interval endpoints bit for bit") {
    const fs::path cfg = write_temp("ostop_cfg_rt.json", kQuinticConfig);
    const fs::path report = fs::temp_directory_path() / "ostop_report_rt.json";
    const fs::path verdict = fs::temp_directory_path() / "ostop_verify_rt.json";
    REQUIRE(cli::run_main({"solve", "--config", cfg.string(), "--out", report.string(),
                           "--quiet"}) == cli::kExitOk);
    REQUIRE(cli::run_main({"verify", report.string(), "--config", cfg.string(), "--out",
                           verdict.string(), "--quiet"}) == cli::kExitOk);

    const json a = read_json(report);
    const json b = read_json(verdict);
    CHECK(b.at("schema") == "ostop-verify/1");
    REQUIRE(a.at("continuation").size() == b.at("continuation").size());
    for (std::size_t i = 0; i < a.at("continuation").size(); ++i) {
        const json& ia = a.at("continuation")[i];
        const json& ib = b.at("continuation")[i];
        for (const char* key : {"lo", "hi"}) {
            if (ia.at(key).is_number()) {
                REQUIRE(ib.at(key).is_number());
                CHECK(ia.at(key).get<double>() == ib.at(key).get<double>());
            } else {
                CHECK(ia.at(key) == ib.at(key));
            }
        }
    }
    CHECK(b.at("verification").at("smooth_fit_max").get<double>() < 1e-3);
}

TEST_CASE("solve command on the kinked config reports the boundary coefficient") {
    const fs::path cfg = write_temp("ostop_cfg_k.json", kKinkedConfig);
    const fs::path out = fs::temp_directory_path() / "ostop_report_k.json";
    REQUIRE(cli::run_main({"solve", "--config", cfg.string(), "--out", out.string(),
                           "--quiet"}) == cli::kExitOk);
    const json rep = read_json(out);
    REQUIRE(rep.at("continuation").size() == 2);
    CHECK(rep.at("continuation")[0].at("lo") == "-inf");
    CHECK(std::abs(rep.at("continuation")[0].at("k2").get<double>() - 0.26) < 0.002);
}

TEST_CASE("stop-everywhere problems are reported as such") {
    const fs::path cfg = write_temp("ostop_cfg_const.json", R"({
      "schema": "ostop-config/1",
      "diffusion": {"family": "brownian", "alpha": 3.0, "drift": 0.0, "volatility": 1.0},
      "reward": {"kind": "polynomial", "coefficients": [5]}
    })");
    const fs::path out = fs::temp_directory_path() / "ostop_report_const.json";
    REQUIRE(cli::run_main({"solve", "--config", cfg.string(), "--out", out.string(),
                           "--quiet"}) == cli::kExitOk);
    const json rep = read_json(out);
    CHECK(rep.at("stop_everywhere") == true);
    CHECK(rep.at("continuation").empty());
}

TEST_CASE("sample command emits a continuous csv") {
    const fs::path cfg = write_temp("ostop_cfg_s.json", kQuinticConfig);
    const fs::path csv = fs::temp_directory_path() / "ostop_samples.csv";
    REQUIRE(cli::run_main({"sample", "--config", cfg.string(), "--samples", csv.string(),
                           "--quiet"}) == cli::kExitOk);

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,g,V,region");

    double prev_x = 0.0, prev_v = 0.0;
    bool first = true;
    int rows = 0, cont_rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        double x, g, v;
        char region[32];
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%31s", &x, &g, &v, region) == 4);
        if (std::string(region) != "stop")
            ++cont_rows;
        if (!first) {
            const double spacing = x - prev_x;
            // local slope bound for the quintic family on [-4, 4]
            const double slope_bound = 2000.0;
            REQUIRE(std::abs(v - prev_v) < 10.0 * spacing * slope_bound);
        }
        prev_x = x;
        prev_v = v;
        first = false;
        ++rows;
    }
    CHECK(rows == 801);
    CHECK(cont_rows > 0);
}

TEST_CASE("exit codes: config trouble and degeneracy") {
    CHECK(cli::run_main({"solve", "--config", "/nonexistent/cfg.json", "--quiet"}) ==
          cli::kExitConfig);

    const fs::path bad = write_temp("ostop_cfg_bad.json", "{\"schema\": \"ostop-config/1\"}");
    CHECK(cli::run_main({"solve", "--config", bad.string(), "--quiet"}) == cli::kExitConfig);

    // negative constant reward: widened interval swallows the state space
    const fs::path degenerate = write_temp("ostop_cfg_deg.json", R"({
      "schema": "ostop-config/1",
      "diffusion": {"family": "brownian", "alpha": 1.0, "drift": 0.0, "volatility": 1.0},
      "reward": {"kind": "polynomial", "coefficients": [-1]}
    })");
    const fs::path err_out = fs::temp_directory_path() / "ostop_err.json";
    CHECK(cli::run_main({"solve", "--config", degenerate.string(), "--out", err_out.string(),
                         "--quiet"}) == cli::kExitDegeneracy);
    const json err = read_json(err_out);
    CHECK(err.at("schema") == "ostop-error/1");
    CHECK(err.at("error").at("type") == "degeneracy");
}

TEST_CASE("window flag overrides the scan range") {
    const fs::path cfg = write_temp("ostop_cfg_w.json", kQuinticConfig);
    const fs::path out = fs::temp_directory_path() / "ostop_report_w.json";
    REQUIRE(cli::run_main({"solve", "--config", cfg.string(), "--out", out.string(),
                           "--window", "-12", "12", "--quiet"}) == cli::kExitOk);
    const json rep = read_json(out);
    CHECK(rep.at("solver_meta").at("work_window")[0].get<double>() == -12.0);
}

} // TEST_SUITE
