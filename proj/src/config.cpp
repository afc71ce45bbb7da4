#include "epsplit/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "epsplit/rng.hpp"

namespace epsplit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

const json* optional_member(const json& j, const std::string& key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

long integer_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<long>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vector vector_at(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vector v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        v.push_back(j[i].get<double>());
    }
    if (v.empty()) fail(path, "must be nonempty");
    return v;
}

/// Scalar broadcast to n, or an explicit array of length n.
Vector vector_or_scalar(const json& j, const std::string& path, std::size_t n) {
    if (j.is_number()) return Vector(n, j.get<double>());
    Vector v = vector_at(j, path);
    if (v.size() != n) {
        fail(path, "expected " + std::to_string(n) + " entries, got " +
                       std::to_string(v.size()));
    }
    return v;
}

Matrix matrix_at(const json& j, const std::string& path, std::size_t n) {
    if (j.is_number()) {
        Matrix m(n, n, j.get<double>());
        return m;
    }
    if (!j.is_array()) fail(path, "expected a matrix (array of rows) or a scalar");
    if (j.size() != n) fail(path, "expected " + std::to_string(n) + " rows");
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector row = vector_at(j[i], path + "[" + std::to_string(i) + "]");
        if (row.size() != n) {
            fail(path + "[" + std::to_string(i) + "]",
                 "expected " + std::to_string(n) + " columns");
        }
        for (std::size_t k = 0; k < n; ++k) m(i, k) = row[k];
    }
    return m;
}

ConvexSet parse_set(const json& j, const std::string& path) {
    const std::string type = string_at(member(j, path, "type"), path + ".type");
    try {
        if (type == "box") {
            return ConvexSet::box(vector_at(member(j, path, "lo"), path + ".lo"),
                                  vector_at(member(j, path, "hi"), path + ".hi"));
        }
        if (type == "ball") {
            return ConvexSet::ball(
                vector_at(member(j, path, "center"), path + ".center"),
                number_at(member(j, path, "radius"), path + ".radius"));
        }
        if (type == "halfspace") {
            return ConvexSet::halfspace(vector_at(member(j, path, "a"), path + ".a"),
                                        number_at(member(j, path, "b"), path + ".b"));
        }
        if (type == "simplex") {
            return ConvexSet::simplex(
                static_cast<std::size_t>(integer_at(member(j, path, "dim"), path + ".dim")),
                number_at(member(j, path, "scale"), path + ".scale"));
        }
        if (type == "product") {
            const json& parts = member(j, path, "parts");
            if (!parts.is_array() || parts.empty()) fail(path + ".parts", "expected sets");
            std::vector<ConvexSet> sets;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                sets.push_back(parse_set(parts[i], path + ".parts[" + std::to_string(i) + "]"));
            }
            return ConvexSet::product(std::move(sets));
        }
        if (type == "whole_space") {
            return ConvexSet::whole_space(
                static_cast<std::size_t>(integer_at(member(j, path, "dim"), path + ".dim")));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& err) {
        fail(path, err.what());
    }
    fail(path + ".type", "unknown set type '" + type + "'");
}

Bifunction parse_bifunction(const json& j, const std::string& path, std::size_t n) {
    const std::string type = string_at(member(j, path, "type"), path + ".type");
    try {
        if (type == "zero") return Bifunction::zero(n);
        if (type == "vi_linear") {
            return Bifunction::vi_linear(matrix_at(member(j, path, "M"), path + ".M", n),
                                         vector_or_scalar(member(j, path, "q"), path + ".q", n));
        }
        if (type == "separable_quadratic") {
            const json* lin = optional_member(j, "L");
            const json* off = optional_member(j, "d");
            return Bifunction::separable_quadratic(
                vector_or_scalar(member(j, path, "q"), path + ".q", n),
                lin ? matrix_at(*lin, path + ".L", n) : Matrix(n, n, 0.0),
                off ? vector_or_scalar(*off, path + ".d", n) : Vector(n, 0.0));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& err) {
        fail(path, err.what());
    }
    fail(path + ".type", "unknown bifunction type '" + type + "'");
}

MonotoneOperator parse_operator(const json& j, const std::string& path, std::size_t n) {
    try {
        if (optional_member(j, "Q")) {
            return MonotoneOperator::convex_quadratic_gradient(
                matrix_at(member(j, path, "Q"), path + ".Q", n),
                vector_or_scalar(member(j, path, "q"), path + ".q", n));
        }
        return MonotoneOperator::linear(
            matrix_at(member(j, path, "M"), path + ".M", n),
            vector_or_scalar(member(j, path, "q"), path + ".q", n));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& err) {
        fail(path, err.what());
    }
    fail(path, "unreachable");
}

NonexpansiveMap parse_map(const json& j, const std::string& path, std::size_t n) {
    const std::string type = string_at(member(j, path, "type"), path + ".type");
    try {
        if (type == "identity") return NonexpansiveMap::identity(n);
        if (type == "projection") {
            return NonexpansiveMap::projection(
                parse_set(member(j, path, "set"), path + ".set"));
        }
        if (type == "averaged") {
            const Vector weights = vector_at(member(j, path, "weights"), path + ".weights");
            const json& maps = member(j, path, "maps");
            if (!maps.is_array()) fail(path + ".maps", "expected an array of maps");
            std::vector<NonexpansiveMap> sub;
            for (std::size_t i = 0; i < maps.size(); ++i) {
                sub.push_back(parse_map(maps[i], path + ".maps[" + std::to_string(i) + "]", n));
            }
            return NonexpansiveMap::averaged(weights, std::move(sub));
        }
        if (type == "resolvent") {
            return NonexpansiveMap::resolvent(
                parse_operator(j, path, n),
                optional_member(j, "c") ? number_at(*optional_member(j, "c"), path + ".c")
                                        : 1.0);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& err) {
        fail(path, err.what());
    }
    fail(path + ".type", "unknown map type '" + type + "'");
}

NiSplit parse_ni_split(const json& j, const std::string& path) {
    const json* split = optional_member(j, "split");
    if (!split) return NiSplit::revenue_cost;
    const std::string s = string_at(*split, path + ".split");
    if (s == "revenue_cost") return NiSplit::revenue_cost;
    if (s == "lumped") return NiSplit::lumped;
    fail(path + ".split", "expected 'revenue_cost' or 'lumped'");
}

CournotProblem parse_cournot_fields(const json& j, const std::string& path) {
    const Vector c = vector_at(member(j, path, "c"), path + ".c");
    const std::size_t n = c.size();
    CournotProblem cournot;
    cournot.game.a = vector_or_scalar(member(j, path, "a"), path + ".a", n);
    cournot.game.b = matrix_at(member(j, path, "b"), path + ".b", n);
    cournot.game.c = c;
    cournot.action_lo = vector_or_scalar(member(j, path, "action_lo"), path + ".action_lo", n);
    cournot.action_hi = vector_or_scalar(member(j, path, "action_hi"), path + ".action_hi", n);
    return cournot;
}

SplitBifunction parse_split_pair(const json& j, const std::string& path, std::size_t n) {
    const json* f1 = optional_member(j, "f1");
    const json* f2 = optional_member(j, "f2");
    return SplitBifunction{
        f1 ? parse_bifunction(*f1, path + ".f1", n) : Bifunction::zero(n),
        f2 ? parse_bifunction(*f2, path + ".f2", n) : Bifunction::zero(n)};
}

Vector parse_weights(const json& j, const std::string& path, std::size_t count) {
    const json* w = optional_member(j, "weights");
    if (!w) return Vector(count, 1.0 / static_cast<double>(count));
    const Vector weights = vector_at(*w, path + ".weights");
    if (weights.size() != count) {
        fail(path + ".weights", "expected " + std::to_string(count) + " weights");
    }
    return weights;
}

ProblemInstance parse_problem(const json& j, const std::string& path) {
    const std::string kind = string_at(member(j, path, "kind"), path + ".kind");
    try {
        if (kind == "cournot") {
            return build_cournot(parse_cournot_fields(j, path), parse_ni_split(j, path));
        }
        if (kind == "sep_game") {
            CournotProblem cournot = parse_cournot_fields(j, path);
            std::vector<LinearConstraint> constraints;
            if (const json* cs = optional_member(j, "constraints")) {
                if (!cs->is_array()) fail(path + ".constraints", "expected an array");
                for (std::size_t i = 0; i < cs->size(); ++i) {
                    const std::string cpath = path + ".constraints[" + std::to_string(i) + "]";
                    constraints.push_back(LinearConstraint{
                        vector_at(member((*cs)[i], cpath, "a"), cpath + ".a"),
                        number_at(member((*cs)[i], cpath, "b"), cpath + ".b")});
                }
            }
            const Vector weights =
                constraints.empty() ? Vector{} : parse_weights(j, path, constraints.size());
            return build_sep_game(cournot, constraints, weights, parse_ni_split(j, path));
        }
        if (kind == "intersection_ep") {
            const json& sets_json = member(j, path, "sets");
            if (!sets_json.is_array() || sets_json.empty()) {
                fail(path + ".sets", "expected a nonempty array of sets");
            }
            std::vector<ConvexSet> sets;
            for (std::size_t i = 0; i < sets_json.size(); ++i) {
                sets.push_back(
                    parse_set(sets_json[i], path + ".sets[" + std::to_string(i) + "]"));
            }
            const std::size_t n = sets.front().dim();
            std::optional<std::pair<Vector, Vector>> box;
            if (optional_member(j, "prox_lo") || optional_member(j, "prox_hi")) {
                box = std::make_pair(
                    vector_or_scalar(member(j, path, "prox_lo"), path + ".prox_lo", n),
                    vector_or_scalar(member(j, path, "prox_hi"), path + ".prox_hi", n));
            }
            std::optional<Vector> witness;
            if (const json* w = optional_member(j, "witness")) {
                witness = vector_at(*w, path + ".witness");
            }
            ProblemInstance instance = build_intersection_ep(
                parse_split_pair(j, path, n), sets, parse_weights(j, path, sets.size()), box,
                witness);
            if (const json* oracle = optional_member(j, "oracle")) {
                instance.oracle_solution = vector_at(*oracle, path + ".oracle");
                instance.oracle_provenance = "supplied by config";
                validate_instance(instance);
            }
            return instance;
        }
        if (kind == "inclusion_ep") {
            ConvexSet set = parse_set(member(j, path, "set"), path + ".set");
            const std::size_t n = set.dim();
            const json& ops_json = member(j, path, "operators");
            if (!ops_json.is_array() || ops_json.empty()) {
                fail(path + ".operators", "expected a nonempty array of operators");
            }
            std::vector<MonotoneOperator> ops;
            for (std::size_t i = 0; i < ops_json.size(); ++i) {
                ops.push_back(parse_operator(
                    ops_json[i], path + ".operators[" + std::to_string(i) + "]", n));
            }
            const double c = optional_member(j, "c")
                                 ? number_at(*optional_member(j, "c"), path + ".c")
                                 : 1.0;
            ProblemInstance instance =
                build_inclusion_ep(parse_split_pair(j, path, n), ops, c,
                                   parse_weights(j, path, ops.size()), std::move(set));
            if (const json* oracle = optional_member(j, "oracle")) {
                instance.oracle_solution = vector_at(*oracle, path + ".oracle");
                instance.oracle_provenance = "supplied by config";
                validate_instance(instance);
            }
            return instance;
        }
        if (kind == "custom") {
            ConvexSet set = parse_set(member(j, path, "set"), path + ".set");
            const std::size_t n = set.dim();
            ProblemInstance instance{"custom",
                                     n,
                                     parse_split_pair(j, path, n),
                                     set,
                                     parse_map(member(j, path, "map"), path + ".map", n),
                                     std::nullopt,
                                     ""};
            if (const json* oracle = optional_member(j, "oracle")) {
                instance.oracle_solution = vector_at(*oracle, path + ".oracle");
                instance.oracle_provenance = "supplied by config";
                validate_instance(instance);
            }
            return instance;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& err) {
        fail(path, err.what());
    }
    fail(path + ".kind",
         "unknown problem kind '" + kind +
             "' (expected cournot, sep_game, intersection_ep, inclusion_ep, or custom)");
}

SolverConfig parse_solver(const json* j, const std::string& path, std::uint64_t seed) {
    SolverConfig config;
    config.seed = seed;
    if (!j) return config;
    if (const json* v = optional_member(*j, "gamma")) config.gamma = number_at(*v, path + ".gamma");
    if (const json* v = optional_member(*j, "beta0")) {
        config.beta.beta0 = number_at(*v, path + ".beta0");
    }
    if (const json* v = optional_member(*j, "beta_exponent")) {
        config.beta.exponent = number_at(*v, path + ".beta_exponent");
    }
    if (const json* v = optional_member(*j, "beta_values")) {
        config.beta.explicit_values = vector_at(*v, path + ".beta_values");
    }
    if (const json* v = optional_member(*j, "max_iters")) {
        config.max_iters = integer_at(*v, path + ".max_iters");
    }
    if (const json* v = optional_member(*j, "tol")) config.tol = number_at(*v, path + ".tol");
    if (const json* v = optional_member(*j, "fixed_residual_lambda")) {
        config.fixed_residual_lambda = number_at(*v, path + ".fixed_residual_lambda");
    }
    if (const json* v = optional_member(*j, "trace_every")) {
        config.trace_every = integer_at(*v, path + ".trace_every");
    }
    if (const json* v = optional_member(*j, "inner_tol")) {
        config.inner_tol = number_at(*v, path + ".inner_tol");
    }
    if (const json* v = optional_member(*j, "inner_max_iters")) {
        config.inner_max_iters = static_cast<int>(integer_at(*v, path + ".inner_max_iters"));
    }
    if (const json* v = optional_member(*j, "record_wall_time")) {
        if (!v->is_boolean()) fail(path + ".record_wall_time", "expected true or false");
        config.record_wall_time = v->get<bool>();
    }
    try {
        config.validate();
    } catch (const std::exception& err) {
        fail(path, err.what());
    }
    return config;
}

std::string default_output_dir() {
    if (const char* dir = std::getenv("EPSPLIT_OUT_DIR")) return dir;
    return ".";
}

Vector parse_x0(const json* j, const std::string& path, const ProblemInstance& instance,
                std::uint64_t seed) {
    if (!j) {
        // No start point: sample the set's bounding box deterministically.
        if (!instance.set.bounded()) {
            fail(path, "missing x0 and the constraint set is unbounded");
        }
        auto [lo, hi] = instance.set.bounding_box();
        Rng rng(derive_seed(seed, 0x783030ULL));
        return instance.set.project(rng.uniform_vector(lo, hi));
    }
    if (j->is_array()) {
        Vector x0 = vector_at(*j, path);
        if (x0.size() != instance.dimension) {
            fail(path, "expected dimension " + std::to_string(instance.dimension));
        }
        return x0;
    }
    if (j->is_object() && optional_member(*j, "project_random")) {
        const json& pr = *optional_member(*j, "project_random");
        const std::string prpath = path + ".project_random";
        const std::uint64_t prseed =
            optional_member(pr, "seed")
                ? static_cast<std::uint64_t>(
                      integer_at(*optional_member(pr, "seed"), prpath + ".seed"))
                : seed;
        Vector lo, hi;
        if (optional_member(pr, "lo") || optional_member(pr, "hi")) {
            lo = vector_or_scalar(member(pr, prpath, "lo"), prpath + ".lo", instance.dimension);
            hi = vector_or_scalar(member(pr, prpath, "hi"), prpath + ".hi", instance.dimension);
        } else if (instance.set.bounded()) {
            std::tie(lo, hi) = instance.set.bounding_box();
        } else {
            fail(prpath, "unbounded set: provide lo/hi for the sampling box");
        }
        Rng rng(derive_seed(prseed, 0x783030ULL));
        return instance.set.project(rng.uniform_vector(lo, hi));
    }
    fail(path, "expected an array or {\"project_random\": {...}}");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& err) {
        // nlohmann reports the byte offset; surface it with the file name.
        throw ConfigError("config parse error in '" + path + "': " + err.what());
    }

    const std::uint64_t seed =
        optional_member(j, "seed")
            ? static_cast<std::uint64_t>(integer_at(*optional_member(j, "seed"), "seed"))
            : 0;

    RunConfig run{parse_problem(member(j, "config", "problem"), "problem"),
                  parse_solver(optional_member(j, "solver"), "solver", seed),
                  Vector{},
                  OutputConfig{},
                  ProbeOptions{}};
    run.x0 = parse_x0(optional_member(j, "x0"), "x0", run.instance, seed);

    const std::string stem = std::filesystem::path(path).stem().string();
    if (const json* out = optional_member(j, "output")) {
        if (const json* v = optional_member(*out, "format")) {
            try {
                run.output.format = trace_format_from_string(string_at(*v, "output.format"));
            } catch (const std::exception& err) {
                fail("output.format", err.what());
            }
        }
        if (const json* v = optional_member(*out, "trace_path")) {
            run.output.trace_path = string_at(*v, "output.trace_path");
        }
        if (const json* v = optional_member(*out, "summary_path")) {
            run.output.summary_path = string_at(*v, "output.summary_path");
        }
    }
    const std::string ext = run.output.format == TraceFormat::csv ? ".csv" : ".jsonl";
    if (run.output.trace_path.empty()) {
        run.output.trace_path = default_output_dir() + "/" + stem + "_trace" + ext;
    }
    if (run.output.summary_path.empty()) {
        run.output.summary_path = default_output_dir() + "/" + stem + "_summary.json";
    }

    if (const json* probe = optional_member(j, "probe")) {
        if (const json* v = optional_member(*probe, "samples")) {
            run.probe.samples = static_cast<int>(integer_at(*v, "probe.samples"));
        }
        if (optional_member(*probe, "sampling_lo") || optional_member(*probe, "sampling_hi")) {
            run.probe.sampling_box = std::make_pair(
                vector_or_scalar(member(*probe, "probe", "sampling_lo"), "probe.sampling_lo",
                                 run.instance.dimension),
                vector_or_scalar(member(*probe, "probe", "sampling_hi"), "probe.sampling_hi",
                                 run.instance.dimension));
        }
    }
    return run;
}

}  // namespace epsplit
