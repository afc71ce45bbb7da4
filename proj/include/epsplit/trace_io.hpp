#ifndef EPSPLIT_TRACE_IO_HPP
#define EPSPLIT_TRACE_IO_HPP

#include <iosfwd>
#include <string>

#include "epsplit/solver.hpp"

namespace epsplit {

enum class TraceFormat { csv, json_lines };

TraceFormat trace_format_from_string(const std::string& name);
std::string to_string(TraceFormat format);

/// Writes the trace with the fixed column set
///   k,beta,lambda,norm_y_minus_x,norm_z_minus_x,fixed_point_residual,
///   prox_residual,dist_to_oracle,wall_time_s
/// (dist_to_oracle left empty / null without an oracle). Floats carry 17
/// significant digits, so a re-read reproduces every double bit-exactly.
void emit_trace(const Trace& trace, TraceFormat format, const std::string& path);
void emit_trace(const Trace& trace, TraceFormat format, std::ostream& out);

/// Inverse of emit_trace for both formats.
Trace read_trace(TraceFormat format, const std::string& path);

bool trace_bit_equal(const Trace& a, const Trace& b);

/// Run summary written next to the trace; status is populated on every path,
/// including errors.
struct RunSummary {
    std::string status;
    long iterations = 0;
    double final_fixed_point_residual = 0.0;
    double final_prox_residual = 0.0;
    std::optional<double> dist_to_oracle;
    double wall_time_s = 0.0;
    std::string trace_path;
    std::string message;
};

void write_summary(const RunSummary& summary, const std::string& path);
void print_summary(const RunSummary& summary, std::ostream& out);

/// %.17g rendering used across every emitter.
std::string format_double(double v);

}  // namespace epsplit

#endif  // EPSPLIT_TRACE_IO_HPP
