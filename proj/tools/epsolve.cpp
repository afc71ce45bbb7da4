// epsolve: splitting solver for equilibrium problems coupled with fixed-point
// constraints. Subcommands:
//   run <config>      solve and write trace + summary
//   verify <config>   solve with invariant checking, print per-invariant table
//   probe <config>    sampling-based monotonicity diagnostic
// Exit codes: 0 converged / all checks pass, 2 iteration budget exhausted,
// 1 error or failed checks.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "epsplit/config.hpp"
#include "epsplit/trace_io.hpp"

namespace {

using namespace epsplit;

struct CommonFlags {
    std::optional<long> max_iters;
    std::optional<double> tol;
    std::optional<double> gamma;
    std::optional<double> beta0;
    std::optional<std::string> out;
    std::optional<long> seed;
};

void apply_overrides(RunConfig& run, const CommonFlags& flags) {
    if (flags.max_iters) run.solver.max_iters = *flags.max_iters;
    if (flags.tol) run.solver.tol = *flags.tol;
    if (flags.gamma) run.solver.gamma = *flags.gamma;
    if (flags.beta0) run.solver.beta.beta0 = *flags.beta0;
    if (flags.seed) run.solver.seed = static_cast<std::uint64_t>(*flags.seed);
    if (flags.out) run.output.trace_path = *flags.out;
    run.solver.validate();
}

RunSummary summarize(const RunConfig& run, const SolveResult& result) {
    RunSummary summary;
    summary.status = to_string(result.status);
    summary.iterations = result.iterations;
    summary.final_fixed_point_residual = result.final_map_residual;
    summary.final_prox_residual = result.final_prox_residual;
    if (run.instance.oracle_solution) {
        summary.dist_to_oracle = dist(result.x, *run.instance.oracle_solution);
    }
    summary.wall_time_s = result.wall_time_s;
    summary.trace_path = run.output.trace_path;
    summary.message = result.message;
    return summary;
}

int exit_code_for(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged:
            return 0;
        case SolveStatus::max_iters:
            return 2;
        default:
            return 1;
    }
}

void ensure_parent_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

int run_one(const std::string& config_path, const CommonFlags& flags, std::ostream& out) {
    RunConfig run = load_run_config(config_path);
    apply_overrides(run, flags);
    const SolveResult result =
        solve(run.instance.problem(), run.solver, run.x0, run.instance.oracle_solution);

    ensure_parent_dir(run.output.trace_path);
    emit_trace(result.trace, run.output.format, run.output.trace_path);
    const RunSummary summary = summarize(run, result);
    ensure_parent_dir(run.output.summary_path);
    write_summary(summary, run.output.summary_path);
    print_summary(summary, out);
    return exit_code_for(result.status);
}

int cmd_run(const std::vector<std::string>& configs, const CommonFlags& flags, int jobs) {
    if (configs.size() == 1 || jobs <= 1) {
        int worst = 0;
        for (const auto& path : configs) {
            if (configs.size() > 1) std::cout << "== " << path << " ==\n";
            worst = std::max(worst, run_one(path, flags, std::cout));
        }
        return worst;
    }
    // Independent configs in parallel; outputs are isolated per config and
    // stdout is serialized per run.
    std::mutex io_mutex;
    std::vector<int> codes(configs.size(), 1);
    std::vector<std::thread> workers;
    std::size_t next = 0;
    std::mutex next_mutex;
    const int thread_count = std::min<int>(jobs, static_cast<int>(configs.size()));
    for (int t = 0; t < thread_count; ++t) {
        workers.emplace_back([&]() {
            while (true) {
                std::size_t index;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next >= configs.size()) return;
                    index = next++;
                }
                std::ostringstream local;
                int code = 1;
                try {
                    code = run_one(configs[index], flags, local);
                } catch (const std::exception& err) {
                    local << "error: " << err.what() << '\n';
                }
                codes[index] = code;
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cout << "== " << configs[index] << " ==\n" << local.str();
            }
        });
    }
    for (auto& w : workers) w.join();
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

int cmd_verify(const std::string& config_path, const CommonFlags& flags, bool want_oracle,
               double corrupt_beta_factor) {
    RunConfig run = load_run_config(config_path);
    apply_overrides(run, flags);
    if (want_oracle && !run.instance.oracle_solution) {
        std::cerr << "verify --oracle: instance '" << run.instance.name
                  << "' carries no oracle solution\n";
        return 1;
    }
    run.solver.trace_every = 1;

    InvariantMonitor monitor(run.instance.problem(), run.solver,
                             want_oracle ? run.instance.oracle_solution : std::nullopt);
    if (corrupt_beta_factor != 1.0) monitor.corrupt_reported_beta(corrupt_beta_factor);

    const SolveResult result = solve(run.instance.problem(), run.solver, run.x0,
                                     run.instance.oracle_solution, &monitor);
    print_summary(summarize(run, result), std::cout);

    std::cout << "\ninvariant                       worst-slack                 bound        verdict\n";
    bool all_pass = true;
    for (const auto& row : monitor.rows()) {
        all_pass = all_pass && row.pass;
        std::cout << std::left << std::setw(32) << row.name << std::setw(28)
                  << format_double(row.worst) << std::setw(13) << format_double(row.bound)
                  << (row.pass ? "pass" : "FAIL") << '\n';
    }
    if (result.status == SolveStatus::error) {
        std::cout << "run ended in error: " << result.message << '\n';
        return 1;
    }
    return all_pass ? 0 : 1;
}

int cmd_probe(const std::string& config_path, int samples_override, long seed_override) {
    RunConfig run = load_run_config(config_path);
    const int samples = samples_override > 0 ? samples_override : run.probe.samples;
    const std::uint64_t seed =
        seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : run.solver.seed;

    const auto report_line = [&](const std::string& name, const Bifunction& f) {
        const MonotonicityReport report =
            probe_monotonicity(f, run.instance.set, samples, seed, run.probe.sampling_box);
        std::cout << std::left << std::setw(10) << name << " max f(x,y)+f(y,x) = "
                  << std::setw(26) << format_double(report.max_symmetric_sum)
                  << " pseudo-violations = " << std::setw(8) << report.pseudo_violations
                  << " verdict: " << to_string(report.verdict) << '\n';
        return report.verdict;
    };

    std::cout << "monotonicity probe over " << samples << " sample pairs (seed " << seed
              << ")\n";
    report_line("f1", run.instance.split.f1);
    report_line("f2", run.instance.split.f2);
    const MonotonicityVerdict total =
        report_line("f1+f2", run.instance.split.combined());
    return total == MonotonicityVerdict::violated ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Splitting solver for equilibrium problems with nonexpansive-map constraints"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::vector<std::string> run_configs;
    int jobs = 1;

    CLI::App* run_cmd = app.add_subcommand("run", "solve a config, write trace and summary");
    run_cmd->add_option("config", run_configs, "config file(s)")->required()->expected(-1);
    run_cmd->add_option("--max-iters", flags.max_iters, "override solver.max_iters");
    run_cmd->add_option("--tol", flags.tol, "override solver.tol");
    run_cmd->add_option("--gamma", flags.gamma, "override solver.gamma");
    run_cmd->add_option("--beta0", flags.beta0, "override solver.beta0");
    run_cmd->add_option("--out", flags.out, "override output.trace_path");
    run_cmd->add_option("--seed", flags.seed, "override seed");
    run_cmd->add_option("--jobs", jobs, "run multiple configs concurrently");

    std::string verify_config;
    bool want_oracle = false;
    double corrupt_beta = 1.0;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run with invariant checks and report per-invariant slack");
    verify_cmd->add_option("config", verify_config, "config file")->required();
    verify_cmd->add_flag("--oracle", want_oracle,
                         "require an oracle and check the Fejer inequality against it");
    verify_cmd->add_option("--max-iters", flags.max_iters, "override solver.max_iters");
    verify_cmd->add_option("--tol", flags.tol, "override solver.tol");
    verify_cmd->add_option("--seed", flags.seed, "override seed");
    verify_cmd
        ->add_option("--corrupt-beta-report", corrupt_beta,
                     "test hook: scale the beta fed to the checks (report only)")
        ->group("");  // hidden

    std::string probe_config;
    int probe_samples = 0;
    long probe_seed = -1;
    CLI::App* probe_cmd = app.add_subcommand("probe", "sampling-based monotonicity classifier");
    probe_cmd->add_option("config", probe_config, "config file")->required();
    probe_cmd->add_option("--samples", probe_samples, "number of sample pairs");
    probe_cmd->add_option("--seed", probe_seed, "probe seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_configs, flags, jobs);
        if (verify_cmd->parsed()) return cmd_verify(verify_config, flags, want_oracle, corrupt_beta);
        if (probe_cmd->parsed()) return cmd_probe(probe_config, probe_samples, probe_seed);
    } catch (const ConfigError& err) {
        std::cerr << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 1;
}
