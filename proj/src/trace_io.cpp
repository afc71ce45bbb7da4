#include "epsplit/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace epsplit {

namespace {

constexpr const char* kCsvHeader =
    "k,beta,lambda,norm_y_minus_x,norm_z_minus_x,fixed_point_residual,prox_residual,"
    "dist_to_oracle,wall_time_s";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

TraceFormat trace_format_from_string(const std::string& name) {
    if (name == "csv") return TraceFormat::csv;
    if (name == "json-lines" || name == "jsonl") return TraceFormat::json_lines;
    throw std::invalid_argument("unknown trace format '" + name +
                                "' (expected csv or json-lines)");
}

std::string to_string(TraceFormat format) {
    return format == TraceFormat::csv ? "csv" : "json-lines";
}

void emit_trace(const Trace& trace, TraceFormat format, std::ostream& out) {
    if (format == TraceFormat::csv) {
        out << kCsvHeader << '\n';
        for (const auto& r : trace) {
            out << r.k << ',' << format_double(r.beta) << ',' << format_double(r.lambda) << ','
                << format_double(r.norm_y_minus_x) << ',' << format_double(r.norm_z_minus_x)
                << ',' << format_double(r.fixed_point_residual) << ','
                << format_double(r.prox_residual) << ','
                << (r.dist_to_oracle ? format_double(*r.dist_to_oracle) : std::string()) << ','
                << format_double(r.wall_time_s) << '\n';
        }
        return;
    }
    // json-lines mirrors the CSV fields; numbers are rendered through the
    // same %.17g path so both formats round-trip identically.
    for (const auto& r : trace) {
        out << "{\"k\":" << r.k << ",\"beta\":" << format_double(r.beta)
            << ",\"lambda\":" << format_double(r.lambda)
            << ",\"norm_y_minus_x\":" << format_double(r.norm_y_minus_x)
            << ",\"norm_z_minus_x\":" << format_double(r.norm_z_minus_x)
            << ",\"fixed_point_residual\":" << format_double(r.fixed_point_residual)
            << ",\"prox_residual\":" << format_double(r.prox_residual) << ",\"dist_to_oracle\":"
            << (r.dist_to_oracle ? format_double(*r.dist_to_oracle) : std::string("null"))
            << ",\"wall_time_s\":" << format_double(r.wall_time_s) << "}\n";
    }
}

void emit_trace(const Trace& trace, TraceFormat format, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_trace: cannot open '" + path + "' for writing");
    emit_trace(trace, format, out);
    if (!out.good()) throw std::runtime_error("emit_trace: write failure on '" + path + "'");
}

Trace read_trace(TraceFormat format, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace: cannot open '" + path + "'");
    Trace trace;
    std::string line;
    if (format == TraceFormat::csv) {
        if (!std::getline(in, line) || line != kCsvHeader) {
            throw std::runtime_error("read_trace: '" + path + "' has an unexpected header");
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            if (fields.size() != 9) {
                throw std::runtime_error("read_trace: malformed row in '" + path + "'");
            }
            TraceRecord r;
            r.k = std::stol(fields[0]);
            r.beta = std::stod(fields[1]);
            r.lambda = std::stod(fields[2]);
            r.norm_y_minus_x = std::stod(fields[3]);
            r.norm_z_minus_x = std::stod(fields[4]);
            r.fixed_point_residual = std::stod(fields[5]);
            r.prox_residual = std::stod(fields[6]);
            if (!fields[7].empty()) r.dist_to_oracle = std::stod(fields[7]);
            r.wall_time_s = std::stod(fields[8]);
            trace.push_back(r);
        }
        return trace;
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        TraceRecord r;
        r.k = j.at("k").get<long>();
        r.beta = j.at("beta").get<double>();
        r.lambda = j.at("lambda").get<double>();
        r.norm_y_minus_x = j.at("norm_y_minus_x").get<double>();
        r.norm_z_minus_x = j.at("norm_z_minus_x").get<double>();
        r.fixed_point_residual = j.at("fixed_point_residual").get<double>();
        r.prox_residual = j.at("prox_residual").get<double>();
        if (!j.at("dist_to_oracle").is_null()) {
            r.dist_to_oracle = j.at("dist_to_oracle").get<double>();
        }
        r.wall_time_s = j.at("wall_time_s").get<double>();
        trace.push_back(r);
    }
    return trace;
}

bool trace_bit_equal(const Trace& a, const Trace& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& x = a[i];
        const auto& y = b[i];
        if (x.k != y.k || x.beta != y.beta || x.lambda != y.lambda ||
            x.norm_y_minus_x != y.norm_y_minus_x || x.norm_z_minus_x != y.norm_z_minus_x ||
            x.fixed_point_residual != y.fixed_point_residual ||
            x.prox_residual != y.prox_residual || x.wall_time_s != y.wall_time_s) {
            return false;
        }
        if (x.dist_to_oracle.has_value() != y.dist_to_oracle.has_value()) return false;
        if (x.dist_to_oracle && *x.dist_to_oracle != *y.dist_to_oracle) return false;
    }
    return true;
}

void write_summary(const RunSummary& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_summary: cannot open '" + path + "'");
    nlohmann::json j;
    j["status"] = summary.status;
    j["iterations"] = summary.iterations;
    j["final_fixed_point_residual"] = summary.final_fixed_point_residual;
    j["final_prox_residual"] = summary.final_prox_residual;
    if (summary.dist_to_oracle) {
        j["dist_to_oracle"] = *summary.dist_to_oracle;
    } else {
        j["dist_to_oracle"] = nullptr;
    }
    j["wall_time_s"] = summary.wall_time_s;
    j["trace_path"] = summary.trace_path;
    j["message"] = summary.message;
    out << j.dump(2) << '\n';
}

void print_summary(const RunSummary& summary, std::ostream& out) {
    out << "status: " << summary.status << '\n'
        << "iterations: " << summary.iterations << '\n'
        << "final_fixed_point_residual: " << format_double(summary.final_fixed_point_residual)
        << '\n'
        << "final_prox_residual: " << format_double(summary.final_prox_residual) << '\n';
    if (summary.dist_to_oracle) {
        out << "dist_to_oracle: " << format_double(*summary.dist_to_oracle) << '\n';
    }
    out << "wall_time_s: " << format_double(summary.wall_time_s) << '\n';
    if (!summary.trace_path.empty()) out << "trace: " << summary.trace_path << '\n';
    if (!summary.message.empty()) out << "note: " << summary.message << '\n';
}

}  // namespace epsplit
