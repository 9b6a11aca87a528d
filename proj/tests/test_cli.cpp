#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "casdet/commands.hpp"
#include "casdet/kv_config.hpp"

using namespace casdet;

namespace {

const char* baseline_config =
    "# sensitivity baseline\n"
    "dim = 3\n"
    "prevalence = 0.1\n"
    "tpr = 0.85, 0.8\n"
    "fpr = 0.05, 0.1\n";

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

// row lookup by first column
std::vector<std::string> csv_row(const std::vector<std::vector<std::string>>& rows,
                                 const std::string& metric) {
    for (const auto& row : rows) {
        if (!row.empty() && row[0] == metric) {
            return row;
        }
    }
    FAIL("missing csv row: " << metric);
    return {};
}

struct run_result {
    int exit_code;
    std::string out;
    std::string info;
};

run_result run(const std::string& mode, const std::string& config_text,
               const std::string& format = "csv") {
    std::ostringstream out, info;
    const kv_file cfg = kv_file::parse_text(config_text);
    command_streams io{out, info};
    const int code = run_command(mode, cfg, format, io);
    return {code, out.str(), info.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("kv parsing handles comments, nesting, and overrides") {
    kv_file cfg = kv_file::parse_text("a = 1 # trailing\n\n # full comment\n b.c = 2.5, 3\n");
    CHECK(cfg.get_int("a") == 1);
    CHECK(cfg.get_double_list("b.c") == std::vector<double>{2.5, 3.0});
    cfg.set_entry("a=7");
    CHECK(cfg.get_int("a") == 7);
    CHECK_THROWS_AS(cfg.get_string("missing"), kv_error);
    CHECK_THROWS_AS(kv_file::parse_text("no equals sign\n"), kv_error);
    CHECK_THROWS_AS(cfg.set_entry("broken"), kv_error);

    const auto grid = kv_file::parse_text("g = linspace(0, 1, 5)\n").get_grid("g");
    CHECK(grid == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("model parsing validates probabilities and names the field") {
    const kv_file good = kv_file::parse_text(baseline_config);
    const cascade_model model = model_from_config(good);
    CHECK(model.dim == 3);
    CHECK(model.profiles.size() == 2);
    CHECK(model.profiles[1].fpr == 0.1);

    try {
        model_from_config(kv_file::parse_text("dim = 3\nprevalence = 0.1\ntpr = 0.85, 1.2\nfpr = 0.05, 0.1\n"));
        FAIL("expected kv_error");
    } catch (const kv_error& e) {
        CHECK(std::string(e.what()).find("tpr[1]") != std::string::npos);
    }
}

TEST_CASE("analyze reports the baseline closed forms") {
    const run_result r = run("analyze", baseline_config);
    CHECK(r.exit_code == exit_ok);
    const auto rows = parse_csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"metric", "cascade", "single_level"});
    CHECK(std::stod(csv_row(rows, "tpr")[1]) == doctest::Approx(0.68).epsilon(1e-12));
    CHECK(std::stod(csv_row(rows, "fpr")[1]) == doctest::Approx(0.0232596085).epsilon(1e-12));
    CHECK(std::stod(csv_row(rows, "calls_level0")[1]) ==
          doctest::Approx(0.498672953).epsilon(1e-12));
    CHECK(std::stod(csv_row(rows, "tpr")[2]) == doctest::Approx(0.85).epsilon(1e-12));
    CHECK(std::stod(csv_row(rows, "precision")[2]) ==
          doctest::Approx(0.65384615384615385).epsilon(1e-12));
}

TEST_CASE("a pass-through coarse level makes analyze columns agree") {
    const run_result r = run("analyze",
                             "dim = 3\nprevalence = 0.1\ntpr = 0.85, 1\nfpr = 0.05, 1\n");
    CHECK(r.exit_code == exit_ok);
    const auto rows = parse_csv(r.out);
    for (const char* metric : {"tpr", "fpr", "precision"}) {
        CHECK(csv_row(rows, metric)[1] == csv_row(rows, metric)[2]);
    }
}

TEST_CASE("malformed probability exits with code 2 naming the field") {
    const run_result r =
        run("analyze", "dim = 3\nprevalence = 1.2\ntpr = 0.85, 0.8\nfpr = 0.05, 0.1\n");
    CHECK(r.exit_code == exit_config_error);
    CHECK(r.info.find("prevalence") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("unknown mode is a config error") {
    CHECK(run("frobnicate", baseline_config).exit_code == exit_config_error);
}

TEST_CASE("sweep rows preserve grid order and match analyze at a point") {
    const std::string config = std::string(baseline_config) +
                               "sweep.parameter = prevalence\nsweep.grid = 0.1\n";
    const run_result r = run("sweep", config);
    CHECK(r.exit_code == exit_ok);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(0.68).epsilon(1e-12));
    CHECK(std::stod(rows[1][4]) == doctest::Approx(0.623672953).epsilon(1e-12));
    CHECK(std::stod(rows[1][8]) == 1.0);

    const std::string unsorted = std::string(baseline_config) +
                                 "sweep.parameter = tpr\nsweep.level = 1\nsweep.grid = 0.9, 0.2, 0.5\n";
    const auto rows2 = parse_csv(run("sweep", unsorted).out);
    REQUIRE(rows2.size() == 4);
    CHECK(std::stod(rows2[1][0]) == 0.9);
    CHECK(std::stod(rows2[2][0]) == 0.2);
    CHECK(std::stod(rows2[3][0]) == 0.5);

    const std::string bad_grid = std::string(baseline_config) +
                                 "sweep.parameter = prevalence\nsweep.grid = 0.5, 1.5\n";
    CHECK(run("sweep", bad_grid).exit_code == exit_config_error);
}

TEST_CASE("the three standard sweeps produce full sensitivity curves") {
    const char* axes[][2] = {{"prevalence", ""},
                             {"tpr", "sweep.level = 1\n"},
                             {"fpr", "sweep.level = 1\n"}};
    for (const auto& axis : axes) {
        const std::string config = std::string(baseline_config) + "sweep.parameter = " + axis[0] +
                                   "\nsweep.grid = linspace(0, 1, 50)\n" + axis[1];
        const run_result r = run("sweep", config);
        CHECK(r.exit_code == exit_ok);
        const auto rows = parse_csv(r.out);
        REQUIRE(rows.size() == 51);  // header + 50 grid points
    }

    // qualitative curve shapes at the baseline
    const auto tpr_rows = parse_csv(run("sweep", std::string(baseline_config) +
                                                     "sweep.parameter = tpr\nsweep.level = 1\n"
                                                     "sweep.grid = 0, 0.5, 1\n")
                                        .out);
    CHECK(std::stod(tpr_rows[1][1]) == 0.0);                             // b1=0 kills sensitivity
    CHECK(std::stod(tpr_rows[3][1]) == doctest::Approx(0.85));           // b1=1 restores b0
    CHECK(std::stod(tpr_rows[1][5]) == doctest::Approx(0.85));           // single level unaffected
    const auto p_rows = parse_csv(run("sweep", std::string(baseline_config) +
                                                   "sweep.parameter = prevalence\n"
                                                   "sweep.grid = 0.05, 0.5\n")
                                      .out);
    CHECK(std::stod(p_rows[1][1]) == std::stod(p_rows[2][1]));  // sensitivity free of p
    CHECK(std::stod(p_rows[1][4]) < std::stod(p_rows[2][4]));   // calls grow with p
}

TEST_CASE("simulate compares empirical against analytic with pass flags") {
    const std::string config = std::string(baseline_config) +
                               "l0_chunks_per_axis = 2, 2, 2\ntrials = 20000\nseed = 42\n";
    const run_result r = run("simulate", config);
    CHECK(r.exit_code == exit_ok);
    const auto rows = parse_csv(r.out);
    CHECK(rows[0] == std::vector<std::string>{"metric", "trials", "empirical", "std_error",
                                              "analytic", "pass"});
    for (const char* metric : {"tpr", "fpr", "precision", "calls_level0", "calls_level1"}) {
        const auto row = csv_row(rows, metric);
        CHECK(row[5] == "true");
        const double emp = std::stod(row[2]);
        const double ana = std::stod(row[4]);
        const double se = std::stod(row[3]);
        CHECK(std::abs(emp - ana) <= 4.0 * se);
    }
}

TEST_CASE("simulate exits 3 when an estimate misses its band") {
    // seed pinned by search: at 1000 trials this run lands outside four
    // standard errors on at least one metric
    const std::string config = std::string(baseline_config) +
                               "l0_chunks_per_axis = 2, 2, 2\ntrials = 1000\nseed = 3742\n";
    const run_result r = run("simulate", config);
    CHECK(r.exit_code == exit_check_failed);
    CHECK(r.out.find("false") != std::string::npos);
}

TEST_CASE("simulate withholds verdicts below the trials floor") {
    const std::string config = std::string(baseline_config) +
                               "l0_chunks_per_axis = 2, 2, 2\ntrials = 10\nseed = 1\n";
    const run_result r = run("simulate", config);
    CHECK(r.exit_code == exit_ok);
    for (const auto& row : parse_csv(r.out)) {
        if (row[0] != "metric") {
            CHECK(row[5].empty());
        }
    }
}

TEST_CASE("simulate output is byte-identical across repeats and thread counts") {
    const std::string config = std::string(baseline_config) +
                               "l0_chunks_per_axis = 2, 2, 2\ntrials = 5000\nseed = 9\n";
    const run_result once = run("simulate", config);
    const run_result twice = run("simulate", config);
    CHECK(once.out == twice.out);
    const run_result threaded = run("simulate", config + "threads = 4\n");
    CHECK(once.out == threaded.out);
}

TEST_CASE("bench reports calibration, accounting, and detection metrics") {
    const std::string config =
        "dim = 3\n"
        "levels = 2\n"
        "prevalence = 0.2\n"
        "l0_chunks_per_axis = 4, 4, 4\n"
        "seed = 5\n"
        "scene.pixels_per_chunk_axis = 8\n"
        "scene.object_radius_px = 2.5\n"
        "scene.noise_std = 0.02\n"
        "bench.min_component_area = 4\n";
    const run_result r = run("bench", config);
    CHECK(r.exit_code == exit_ok);
    // the primary stream is itself a kv document
    const kv_file report = kv_file::parse_text(r.out);
    CHECK(report.get_string("report") == "casdet-bench/1");
    CHECK(report.get_double("calibration.level1.tpr") >= 0.9);
    CHECK(report.get_double("calibration.level1.fpr") <= 0.1);
    // accounting identity: fine calls = 2^dim * flagged parents
    const std::string calls = report.get_string("cascade.calls");
    const auto colon = calls.find(':');
    REQUIRE(colon != std::string::npos);
    const long l0_calls = std::stol(calls.substr(colon + 1));
    CHECK(l0_calls % 8 == 0);
    CHECK(report.get_int("cascade.l0_calls") == l0_calls);
    CHECK(report.get_double("single.detection_recall") > 0.5);
    // timings live on the info stream only
    CHECK(r.out.find("timing:") == std::string::npos);
    CHECK(r.info.find("timing:") != std::string::npos);

    const run_result again = run("bench", config);
    CHECK(r.out == again.out);
}

TEST_CASE("bench on an empty scene makes almost no fine-level calls") {
    const std::string config =
        "dim = 3\n"
        "prevalence = 0\n"
        "l0_chunks_per_axis = 4, 4, 4\n"
        "seed = 2\n"
        "scene.pixels_per_chunk_axis = 8\n"
        "scene.object_radius_px = 2.5\n"
        "scene.noise_std = 0.05\n";
    const run_result r = run("bench", config);
    CHECK(r.exit_code == exit_ok);
    const kv_file report = kv_file::parse_text(r.out);
    CHECK(report.get_double("cascade.l0_call_fraction") <= 0.05);
}

TEST_CASE("bench on a dense scene approaches full evaluation") {
    const std::string config =
        "dim = 3\n"
        "prevalence = 0.9\n"
        "l0_chunks_per_axis = 4, 4, 4\n"
        "seed = 3\n"
        "scene.pixels_per_chunk_axis = 8\n"
        "scene.object_radius_px = 2.5\n";
    const run_result r = run("bench", config);
    CHECK(r.exit_code == exit_ok);
    const kv_file report = kv_file::parse_text(r.out);
    CHECK(report.get_double("cascade.l0_call_fraction") >= 0.9);
}

TEST_CASE("bench rejects invalid scenes as config errors") {
    const std::string config =
        "dim = 3\n"
        "prevalence = 0.1\n"
        "l0_chunks_per_axis = 4, 4, 4\n"
        "scene.pixels_per_chunk_axis = 8\n"
        "scene.object_radius_px = 20\n";  // radius exceeds the chunk extent
    const run_result r = run("bench", config);
    CHECK(r.exit_code == exit_config_error);
    CHECK(r.info.find("radius") != std::string::npos);
}

TEST_CASE("json format carries the same analyze numbers") {
    const run_result r = run("analyze", baseline_config, "json");
    CHECK(r.exit_code == exit_ok);
    CHECK(r.out.find("\"tpr\": 0.68") != std::string::npos);
    CHECK(r.out.find("\"single_level\"") != std::string::npos);
}

}  // TEST_SUITE
