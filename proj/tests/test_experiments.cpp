#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gibbslab/experiments.hpp"

#include <filesystem>
#include <fstream>

using namespace gibbslab;

TEST_CASE("config validation")
{
    ConfigParse empty = validate_config("");
    CHECK(empty.ok());
    CHECK(empty.config.potential == "circle2d");
    CHECK(empty.config.out_dir == "out");

    ConfigParse bad = validate_config("epsilonn = 0.1\n");
    REQUIRE(bad.errors.size() == 1);
    CHECK(bad.errors[0].find("epsilonn") != std::string::npos);
    CHECK(bad.errors[0].find("line 1") != std::string::npos);

    ConfigParse zero = validate_config("eps = 0.1,0,0.01\n");
    REQUIRE_FALSE(zero.ok());
    CHECK(zero.errors[0].find("positive") != std::string::npos);

    ConfigParse multi = validate_config("potential = softwell2d\n# comment\nbogus line\n");
    REQUIRE(multi.errors.size() == 1);
    CHECK(multi.errors[0].find("line 3") != std::string::npos);
    CHECK(multi.config.potential == "softwell2d");
}

TEST_CASE("generator spectrum runner on OU")
{
    auto ou = make_potential("quadratic1d");
    GeneratorRun gr = run_generator_spectrum(*ou, 0.1);
    CHECK(gr.lambda1 == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(gr.rho == doctest::Approx(10.0).epsilon(5e-3));
    CHECK(gr.lambda0 <= 1e-8);
}

TEST_CASE("direct tube quadrature closed form")
{
    double v = direct_tube_quadrature("circle", [](const Vec&) { return 1.0; }, 0.1);
    CHECK(v == doctest::Approx(0.4 * M_PI).epsilon(1e-12));
    double s = direct_tube_quadrature("sphere", [](const Vec&) { return 1.0; }, 0.1);
    CHECK(s == doctest::Approx(4.0 * M_PI / 3.0 * (std::pow(1.1, 3) - std::pow(0.9, 3)))
                   .epsilon(1e-10));
}

TEST_CASE("certify experiment emits the catalog certificates")
{
    ExperimentConfig cfg;
    cfg.experiment = "certify";
    cfg.potential = "circle2d";
    cfg.out_dir = "/tmp/gibbslab_test_out";
    RunReport rep = run(cfg);
    CHECK(rep.all_pass());
    bool has_nu = rep.extra_json.find("\"constant_name\":\"nu\"") != std::string::npos;
    CHECK(has_nu);
    write_report(rep, cfg);
    namespace fs = std::filesystem;
    CHECK(fs::exists(fs::path(cfg.out_dir) / ("report-" + rep.experiment_id + ".json")));
    CHECK(fs::exists(fs::path(cfg.out_dir) / ("config-" + rep.inputs_hash + ".json")));
}

TEST_CASE("weyl experiment cross-checks the co-area factorization")
{
    ExperimentConfig cfg;
    cfg.experiment = "weyl";
    cfg.manifold = "circle";
    cfg.radii = {0.1};
    RunReport rep = run(cfg);
    CHECK(rep.all_pass());
}

TEST_CASE("spectrum experiment rows are reproducible bit-exactly")
{
    ExperimentConfig cfg;
    cfg.experiment = "spectrum";
    cfg.potential = "quadratic1d";
    cfg.eps_list = {0.1};
    cfg.out_dir = "/tmp/gibbslab_test_out2";
    RunReport r1 = run(cfg);
    write_report(r1, cfg);
    RunReport r2 = run(cfg);
    write_report(r2, cfg);
    CHECK(r1.inputs_hash == r2.inputs_hash);

    namespace fs = std::filesystem;
    fs::path csv = fs::path(cfg.out_dir) / ("spectrum-" + r1.inputs_hash + ".csv");
    REQUIRE(fs::exists(csv));
    std::ifstream in(csv);
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(r1.tables.size() == r2.tables.size());
    for (std::size_t t = 0; t < r1.tables.size(); ++t)
        for (std::size_t i = 0; i < r1.tables[t].rows.size(); ++i)
            for (std::size_t j = 0; j < r1.tables[t].rows[i].size(); ++j)
                CHECK(r1.tables[t].rows[i][j] == r2.tables[t].rows[i][j]);
    CHECK(contents.find("rho") != std::string::npos);
}

TEST_CASE("report aggregates spectrum runs into figure data")
{
    ExperimentConfig spec_cfg;
    spec_cfg.experiment = "spectrum";
    spec_cfg.potential = "circle2d";
    spec_cfg.eps_list = {0.05};
    spec_cfg.out_dir = "/tmp/gibbslab_report_test";
    write_report(run(spec_cfg), spec_cfg);

    ExperimentConfig rep_cfg;
    rep_cfg.experiment = "report";
    rep_cfg.potential = "circle2d";
    rep_cfg.out_dir = "/tmp/gibbslab_report_test";
    RunReport rep = run(rep_cfg);
    REQUIRE_FALSE(rep.tables.empty());
    const Table& t = rep.tables[0];
    REQUIRE_FALSE(t.rows.empty());
    // columns: eps, rho_measured, log_bound, lambda1_S
    CHECK(t.rows[0][0] == doctest::Approx(0.05));
    CHECK(t.rows[0][1] == doctest::Approx(1.219).epsilon(0.05));
    CHECK(t.rows[0][2] == doctest::Approx(-230.04).epsilon(1e-3));
    CHECK(t.rows[0][3] == doctest::Approx(1.0).epsilon(1e-3));
    // the bound sits far below the measurement, in log space
    CHECK(t.rows[0][2] < std::log(t.rows[0][1]));
}

TEST_CASE("unknown experiment is rejected")
{
    ExperimentConfig cfg;
    cfg.experiment = "frobnicate";
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
}
