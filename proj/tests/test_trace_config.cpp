#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epsplit/config.hpp"
#include "epsplit/trace_io.hpp"

using namespace epsplit;

namespace {

std::string temp_path(const std::string& name) {
    static int counter = 0;
    return (std::filesystem::temp_directory_path() /
            ("epsplit_test_" + std::to_string(counter++) + "_" + name))
        .string();
}

std::string write_config(const std::string& body) {
    const std::string path = temp_path("config.json");
    std::ofstream out(path);
    out << body;
    return path;
}

const char* kCournotConfig = R"({
  "seed": 11,
  "problem": {
    "kind": "cournot",
    "a": 10.0, "b": 1.0, "c": [1.0, 1.0],
    "action_lo": 0.0, "action_hi": 10.0,
    "split": "lumped"
  },
  "solver": {"gamma": 0.5, "beta0": 1.0, "max_iters": 5000, "tol": 1e-6,
             "record_wall_time": false},
  "x0": [5.0, 5.0],
  "output": {"format": "csv"}
})";

Trace sample_trace(bool with_oracle) {
    Trace trace;
    for (long k = 0; k < 5; ++k) {
        TraceRecord r;
        r.k = k;
        r.beta = 1.0 / (k + 1.0);
        r.lambda = 0.5 / (k + 1.0);
        r.norm_y_minus_x = 0.125 * k;
        r.norm_z_minus_x = 0.0625 * k;
        r.fixed_point_residual = 1e-3 / (k + 1);
        r.prox_residual = 1e-4 / (k + 1);
        if (with_oracle) r.dist_to_oracle = 3.0 / (k + 1);
        r.wall_time_s = 0.0;
        trace.push_back(r);
    }
    // Exercise full 17-digit doubles.
    trace[2].beta = 0.1234567890123456789;
    trace[3].prox_residual = 1.0 / 3.0;
    return trace;
}

}  // namespace

TEST_CASE("empty trace produces a header-only CSV") {
    std::ostringstream out;
    emit_trace({}, TraceFormat::csv, out);
    CHECK(out.str() ==
          "k,beta,lambda,norm_y_minus_x,norm_z_minus_x,fixed_point_residual,prox_residual,"
          "dist_to_oracle,wall_time_s\n");
}

TEST_CASE("single stationary row renders zero residuals") {
    Trace trace(1);
    trace[0].k = 0;
    trace[0].beta = 1.0;
    trace[0].lambda = 1.0;
    std::ostringstream out;
    emit_trace(trace, TraceFormat::csv, out);
    CHECK(out.str().find("0,1,1,0,0,0,0,,0\n") != std::string::npos);
}

TEST_CASE("trace round-trips bit-exactly in both formats") {
    for (const bool with_oracle : {false, true}) {
        const Trace trace = sample_trace(with_oracle);
        for (const TraceFormat format : {TraceFormat::csv, TraceFormat::json_lines}) {
            const std::string path = temp_path("trace");
            emit_trace(trace, format, path);
            const Trace replica = read_trace(format, path);
            CHECK(trace_bit_equal(trace, replica));
            std::remove(path.c_str());
        }
    }
}

TEST_CASE("format_double survives a string round trip") {
    const double values[] = {0.1, 1.0 / 3.0, 1e-300, 12345678.87654321, -0.0, 2.0};
    for (double v : values) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("emit_trace raises on unwritable paths") {
    CHECK_THROWS_AS(emit_trace({}, TraceFormat::csv, "/nonexistent_dir/trace.csv"),
                    std::runtime_error);
}

TEST_CASE("run config loads a cournot problem") {
    const std::string path = write_config(kCournotConfig);
    const RunConfig run = load_run_config(path);
    CHECK(run.instance.name == "cournot");
    CHECK(run.instance.dimension == 2);
    REQUIRE(run.instance.oracle_solution.has_value());
    CHECK(dist(*run.instance.oracle_solution, {3.0, 3.0}) < 1e-10);
    CHECK(run.solver.gamma == 0.5);
    CHECK(run.solver.max_iters == 5000);
    CHECK(run.solver.seed == 11);
    CHECK_FALSE(run.solver.record_wall_time);
    CHECK(dist(run.x0, {5.0, 5.0}) == 0.0);
    CHECK(run.output.trace_path.find("_trace.csv") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("config errors name the offending field") {
    SUBCASE("gamma outside (0,1)") {
        const std::string path = write_config(R"({
          "problem": {"kind": "cournot", "a": 10, "b": 1, "c": [1, 1],
                      "action_lo": 0, "action_hi": 10},
          "solver": {"gamma": 1.5},
          "x0": [5, 5]
        })");
        CHECK_THROWS_WITH_AS(load_run_config(path),
                             "config error at solver: gamma must lie strictly inside (0,1)",
                             ConfigError);
        std::remove(path.c_str());
    }

    SUBCASE("unknown kind") {
        const std::string path = write_config(R"({"problem": {"kind": "mystery"}})");
        try {
            load_run_config(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("problem.kind") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SUBCASE("missing field") {
        const std::string path = write_config(R"({
          "problem": {"kind": "cournot", "a": 10, "b": 1,
                      "action_lo": 0, "action_hi": 10}
        })");
        try {
            load_run_config(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("problem.c") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SUBCASE("x0 dimension mismatch") {
        std::string body = kCournotConfig;
        body.replace(body.find("[5.0, 5.0]"), 10, "[5.0]");
        const std::string path = write_config(body);
        try {
            load_run_config(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("x0") != std::string::npos);
        }
        std::remove(path.c_str());
    }

    SUBCASE("malformed JSON reports the position") {
        const std::string path = write_config("{\"problem\": ");
        try {
            load_run_config(path);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("parse error") != std::string::npos);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("custom problem with explicit map, set, and oracle") {
    const std::string path = write_config(R"({
      "problem": {
        "kind": "custom",
        "f1": {"type": "vi_linear", "M": [[1, 0], [0, 1]], "q": [-1, -1]},
        "f2": {"type": "zero"},
        "set": {"type": "ball", "center": [0, 0], "radius": 2.0},
        "map": {"type": "identity"},
        "oracle": [1.0, 1.0]
      },
      "solver": {"record_wall_time": false},
      "x0": [0.0, 0.0]
    })");
    const RunConfig run = load_run_config(path);
    CHECK(run.instance.name == "custom");
    REQUIRE(run.instance.oracle_solution.has_value());
    std::remove(path.c_str());
}

TEST_CASE("custom config with a wrong oracle is rejected up front") {
    const std::string path = write_config(R"({
      "problem": {
        "kind": "custom",
        "f1": {"type": "vi_linear", "M": [[1, 0], [0, 1]], "q": [-1, -1]},
        "f2": {"type": "zero"},
        "set": {"type": "ball", "center": [0, 0], "radius": 2.0},
        "map": {"type": "identity"},
        "oracle": [2.0, 2.0]
      },
      "x0": [0.0, 0.0]
    })");
    CHECK_THROWS_AS(load_run_config(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("project_random start point is deterministic and feasible") {
    std::string body = kCournotConfig;
    body.replace(body.find("[5.0, 5.0]"), 10,
                 R"({"project_random": {"seed": 3}})");
    const std::string path = write_config(body);
    const RunConfig a = load_run_config(path);
    const RunConfig b = load_run_config(path);
    CHECK(dist(a.x0, b.x0) == 0.0);
    CHECK(a.instance.set.contains(a.x0));
    std::remove(path.c_str());
}

TEST_CASE("sep_game config builds averaged halfspace projections") {
    const std::string path = write_config(R"({
      "problem": {
        "kind": "sep_game",
        "a": 10.0, "b": 1.0, "c": [1.0, 1.0],
        "action_lo": 0.0, "action_hi": 10.0,
        "constraints": [{"a": [1.0, 1.0], "b": 4.0}]
      },
      "solver": {"record_wall_time": false},
      "x0": [5.0, 5.0]
    })");
    const RunConfig run = load_run_config(path);
    CHECK(run.instance.name == "sep_game");
    REQUIRE(run.instance.oracle_solution.has_value());
    CHECK(dist(*run.instance.oracle_solution, {2.0, 2.0}) <= 1e-9);
    std::remove(path.c_str());
}
