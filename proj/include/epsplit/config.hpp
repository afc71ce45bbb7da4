#ifndef EPSPLIT_CONFIG_HPP
#define EPSPLIT_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "epsplit/problems.hpp"
#include "epsplit/solver.hpp"
#include "epsplit/trace_io.hpp"

namespace epsplit {

/// Configuration problem: message names the offending field.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct OutputConfig {
    std::string trace_path;
    TraceFormat format = TraceFormat::csv;
    std::string summary_path;
};

struct ProbeOptions {
    std::optional<std::pair<Vector, Vector>> sampling_box;
    int samples = 2000;
};

/// One fully parsed run: problem instance, solver settings, start point, and
/// output routing. Exactly one instance per config.
struct RunConfig {
    ProblemInstance instance;
    SolverConfig solver;
    Vector x0;
    OutputConfig output;
    ProbeOptions probe;
};

/// Loads and validates a JSON config. Unknown problem kinds, malformed
/// fields, and inconsistent dimensions raise ConfigError with the field
/// path; the optional output directory fallback is the EPSPLIT_OUT_DIR
/// environment variable.
RunConfig load_run_config(const std::string& path);

}  // namespace epsplit

#endif  // EPSPLIT_CONFIG_HPP
