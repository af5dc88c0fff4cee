#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "esl/config.hpp"
#include "esl/scenarios.hpp"

using namespace esl;

static std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

TEST_CASE("parse_config defaults") {
    RunConfig cfg = parse_config("scenario = ssf\n");
    CHECK(cfg.scenario == Scenario::ssf);
    CHECK(cfg.b == 1.0);
    CHECK(cfg.bc == BoundaryCondition::Dirichlet);
    CHECK(cfg.m == 4.0);
    CHECK(cfg.r == 0.3);
}

TEST_CASE("parse_config full file with comments") {
    RunConfig cfg = parse_config(
        "# experiment\n"
        "scenario = bands   # trailing comment\n"
        "fiber.b = 2.0\n"
        "fiber.bc = neumann\n"
        "sweep.j = 2\n"
        "sweep.k_min = -3\n"
        "sweep.k_max = 5\n"
        "output.dir = /tmp/somewhere\n");
    CHECK(cfg.scenario == Scenario::bands);
    CHECK(cfg.b == 2.0);
    CHECK(cfg.bc == BoundaryCondition::Neumann);
    CHECK(cfg.j == 2);
    CHECK(cfg.out_dir == "/tmp/somewhere");
}

TEST_CASE("parse_config errors carry line numbers") {
    // unknown key
    try {
        parse_config("scenario = ssf\nbogus.key = 1\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
    }
    // duplicate key names both lines
    try {
        parse_config("scenario = ssf\nfiber.b = 1\n\nfiber.b = 2\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 4") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("duplicate") != std::string::npos);
    }
    // out of range: decay exponent
    try {
        parse_config("scenario = ssf\npotential.m = 1.5\n");
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    // missing scenario
    CHECK_THROWS_AS(parse_config("fiber.b = 1\n"), config_error);
    // malformed line
    CHECK_THROWS_AS(parse_config("scenario = ssf\nnonsense\n"), config_error);
}

TEST_CASE("config echo is complete and typed") {
    RunConfig cfg = parse_config("scenario = volume\npotential.m = 6\n");
    auto e = cfg.echo();
    CHECK(e.at("scenario") == "volume");
    CHECK(e.at("potential.m") == "6");
    CHECK(e.count("fiber.b") == 1);
    CHECK(e.count("sweep.node_budget") == 1);
}

TEST_CASE("volume scenario writes deterministic outputs") {
    RunConfig cfg = parse_config(
        "scenario = volume\n"
        "sweep.lambda_min = 1e-3\n"
        "sweep.lambda_max = 1e-1\n"
        "sweep.points_per_decade = 3\n");
    std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "esl_cli_test_volume";
    std::filesystem::remove_all(dir);
    RunReport rep = run_scenario(cfg);
    emit_report(rep, dir.string());
    REQUIRE(std::filesystem::exists(dir / "volume.csv"));
    REQUIRE(std::filesystem::exists(dir / "summary.json"));
    std::string csv1 = slurp(dir / "volume.csv");
    std::string json1 = slurp(dir / "summary.json");
    CHECK(csv1.rfind("lambda,N_half,N_full,scaled\n", 0) == 0);
    // rerun: byte-identical
    RunReport rep2 = run_scenario(cfg);
    emit_report(rep2, dir.string());
    CHECK(slurp(dir / "volume.csv") == csv1);
    CHECK(slurp(dir / "summary.json") == json1);
    // closed-form spot value: half-plane N at lambda = 0.01, C=1, m=4
    CHECK(csv1.find("2.2500000000000000e+00") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("bands scenario monotone flags") {
    RunConfig cfg = parse_config(
        "scenario = bands\n"
        "fiber.n_x = 300\n"
        "sweep.j = 1\n"
        "sweep.k_min = -4\n"
        "sweep.k_max = 4\n"
        "sweep.n_nodes = 20\n");
    RunReport rep = run_scenario(cfg);
    CHECK(rep.properties_ok);
    REQUIRE(rep.tables.size() == 1);
    CHECK(rep.tables[0].header == "k,E,dE,disc_error");
    CHECK(rep.tables[0].rows.size() == 20);
    // energies strictly decreasing in k (column 1)
    for (std::size_t i = 0; i + 1 < rep.tables[0].rows.size(); ++i)
        CHECK(rep.tables[0].rows[i][1] > rep.tables[0].rows[i + 1][1] - 1e-9);
}

TEST_CASE("invert scenario round trip") {
    RunConfig cfg = parse_config(
        "scenario = invert\n"
        "fiber.n_x = 300\n"
        "sweep.lambda_min = 1e-4\n"
        "sweep.lambda_max = 1e-1\n"
        "sweep.points_per_decade = 2\n");
    RunReport rep = run_scenario(cfg);
    CHECK(rep.properties_ok);
    REQUIRE(rep.tables.size() == 1);
    for (const auto& row : rep.tables[0].rows) {
        CHECK(row[3] < 1e-6);  // residual
    }
}

TEST_CASE("neumann scenario finds the interior minimum") {
    RunConfig cfg = parse_config(
        "scenario = neumann\n"
        "fiber.n_x = 300\n"
        "sweep.k_min = -2\n"
        "sweep.k_max = 4\n"
        "sweep.n_nodes = 24\n");
    RunReport rep = run_scenario(cfg);
    CHECK(rep.properties_ok);
    double theta0 = rep.summary["minimum"]["theta0"].get<double>();
    CHECK(theta0 > 0.55);
    CHECK(theta0 < 0.65);
    double kmin = rep.summary["minimum"]["k"].get<double>();
    CHECK(kmin > 0.5);
    CHECK(kmin < 1.1);
}
