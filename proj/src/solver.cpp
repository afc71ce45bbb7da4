#include "epsplit/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "epsplit/rng.hpp"

namespace epsplit {

namespace {

constexpr std::uint64_t kStreamYStep = 1;
constexpr std::uint64_t kStreamZStep = 2;
constexpr std::uint64_t kStreamStopping = 3;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double BetaSchedule::at(long k) const {
    if (!explicit_values.empty()) {
        if (k < 0 || static_cast<std::size_t>(k) >= explicit_values.size()) {
            throw std::out_of_range("BetaSchedule: explicit sequence exhausted at iteration " +
                                    std::to_string(k));
        }
        return explicit_values[static_cast<std::size_t>(k)];
    }
    return beta0 / std::pow(static_cast<double>(k) + 1.0, exponent);
}

void BetaSchedule::validate() const {
    if (!explicit_values.empty()) {
        for (double b : explicit_values) {
            if (!(b > 0.0)) {
                throw std::invalid_argument("beta sequence values must be > 0");
            }
        }
        return;
    }
    if (!(beta0 > 0.0)) throw std::invalid_argument("beta0 must be > 0");
    // Sum beta_k = inf and sum beta_k^2 < inf hold for beta0/(k+1)^p exactly
    // when 1/2 < p <= 1.
    if (!(exponent > 0.5 && exponent <= 1.0)) {
        throw std::invalid_argument("beta exponent must lie in (1/2, 1]");
    }
}

void SolverConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("gamma must lie strictly inside (0,1)");
    }
    beta.validate();
    if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (!(fixed_residual_lambda > 0.0)) {
        throw std::invalid_argument("fixed_residual_lambda must be > 0");
    }
    if (trace_every < 1) throw std::invalid_argument("trace_every must be >= 1");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be > 0");
    if (inner_max_iters < 1) throw std::invalid_argument("inner_max_iters must be >= 1");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged:
            return "converged";
        case SolveStatus::max_iters:
            return "max_iters";
        default:
            return "error";
    }
}

double fixed_prox_residual(const Bifunction& lumped, const ConvexSet& set, const Vector& x,
                           double lambda_bar, double inner_tol, int inner_max_iters,
                           std::uint64_t seed) {
    ProxRequest req{lumped, x, x, lambda_bar, set, inner_tol, inner_max_iters, seed};
    return dist(x, prox_step(req).point);
}

SolverState step(const SolverState& state, const Problem& problem, const SolverConfig& config) {
    const Vector& x = state.x;
    const long k = state.k;
    const double beta = config.beta.at(k);

    SolverState next;
    next.g1 = problem.split.f1.diag_subgradient(x);
    next.g2 = problem.split.f2.diag_subgradient(x);
    next.beta = beta;
    next.eta = std::max({beta, norm(next.g1), norm(next.g2)});
    next.lambda = beta / next.eta;

    ProxRequest y_req{problem.split.f1, x,          x,
                      next.lambda,      problem.set, config.inner_tol,
                      config.inner_max_iters, derive_seed(config.seed, k, kStreamYStep)};
    ProxResult y_res = prox_step(y_req);
    next.y = std::move(y_res.point);
    next.cert_y = y_res.certificate;

    ProxRequest z_req{problem.split.f2, x,          next.y,
                      next.lambda,      problem.set, config.inner_tol,
                      config.inner_max_iters, derive_seed(config.seed, k, kStreamZStep)};
    ProxResult z_res = prox_step(z_req);
    next.z = std::move(z_res.point);
    next.cert_z = z_res.certificate;

    const Vector tx = problem.map.apply(x);
    next.x = convex_combination(config.gamma, next.z, tx);
    next.k = k + 1;

    if (!is_finite(next.x)) {
        throw std::runtime_error("solver diverged: non-finite iterate at iteration " +
                                 std::to_string(k));
    }
    return next;
}

SolveResult solve(const Problem& problem, const SolverConfig& config, Vector x0,
                  const std::optional<Vector>& oracle, IterationObserver* observer) {
    config.validate();
    const std::size_t n = problem.set.dim();
    if (problem.split.f1.dim() != n || problem.split.f2.dim() != n || problem.map.dim() != n) {
        throw std::invalid_argument("solve: problem dimensions are inconsistent");
    }
    if (x0.size() != n) throw std::invalid_argument("solve: x0 dimension mismatch");
    if (oracle && oracle->size() != n) {
        throw std::invalid_argument("solve: oracle dimension mismatch");
    }

    SolveResult result;
    if (!problem.set.contains(x0, 1e-10)) {
        x0 = problem.set.project(std::move(x0));
        result.message = "x0 was outside C and has been projected; ";
    }

    const Bifunction lumped = problem.split.combined();
    const auto t0 = std::chrono::steady_clock::now();

    SolverState state;
    state.k = 0;
    state.x = std::move(x0);
    state.y = zeros(n);
    state.z = zeros(n);

    if (observer) observer->on_start(state.x);

    auto emit = [&](const SolverState& s, double wall, bool stepped) {
        TraceRecord rec;
        rec.k = s.k;
        rec.beta = s.beta;
        rec.lambda = s.lambda;
        rec.norm_y_minus_x = stepped ? dist(s.y, s.x) : 0.0;
        rec.norm_z_minus_x = stepped ? dist(s.z, s.x) : 0.0;
        rec.fixed_point_residual = s.residual_map;
        rec.prox_residual = s.residual_prox;
        if (oracle) rec.dist_to_oracle = dist(s.x, *oracle);
        rec.wall_time_s = config.record_wall_time ? wall : 0.0;
        result.trace.push_back(std::move(rec));
    };

    try {
        while (true) {
            state.residual_map = fixed_point_residual(problem.map, state.x);
            state.residual_prox = fixed_prox_residual(
                lumped, problem.set, state.x, config.fixed_residual_lambda, config.inner_tol,
                config.inner_max_iters, derive_seed(config.seed, state.k, kStreamStopping));

            const bool stop =
                std::max(state.residual_map, state.residual_prox) <= config.tol;
            const bool exhausted = state.k >= config.max_iters;
            if (stop || exhausted) {
                // Terminal row: stepsizes of the iteration that was *about*
                // to run, no subproblem displacements.
                state.beta = config.beta.at(state.k);
                Vector g1 = problem.split.f1.diag_subgradient(state.x);
                Vector g2 = problem.split.f2.diag_subgradient(state.x);
                state.eta = std::max({state.beta, norm(g1), norm(g2)});
                state.lambda = state.beta / state.eta;
                SolverState terminal = state;
                terminal.y = state.x;
                terminal.z = state.x;
                emit(terminal, seconds_since(t0), false);
                result.status = stop ? SolveStatus::converged : SolveStatus::max_iters;
                break;
            }

            SolverState next = step(state, problem, config);
            next.residual_map = state.residual_map;
            next.residual_prox = state.residual_prox;
            result.max_certificate =
                std::max({result.max_certificate, next.cert_y, next.cert_z});

            if (state.k % config.trace_every == 0) {
                // The row describes iteration k: quantities measured at x^k
                // plus the subproblem points the step produced.
                SolverState row = next;
                row.k = state.k;
                row.x = state.x;
                emit(row, seconds_since(t0), true);
            }
            if (observer) observer->on_step(next);
            state = std::move(next);
        }
    } catch (const std::exception& err) {
        result.status = SolveStatus::error;
        result.message += err.what();
    }

    result.x = state.x;
    result.iterations = state.k;
    result.final_map_residual = state.residual_map;
    result.final_prox_residual = state.residual_prox;
    result.wall_time_s = seconds_since(t0);
    return result;
}

FejerReport check_fejer(const Trace& trace, const Vector& oracle, double gamma,
                        const BetaSchedule& schedule) {
    FejerReport report;
    const double bound = 1e-8 * (1.0 + norm_sq(oracle));
    report.worst_slack = -std::numeric_limits<double>::infinity();
    bool any_pair = false;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const TraceRecord& a = trace[i];
        const TraceRecord& b = trace[i + 1];
        if (b.k != a.k + 1) continue;  // needs consecutive iterations
        if (!a.dist_to_oracle || !b.dist_to_oracle) continue;
        any_pair = true;
        if (a.beta != schedule.at(a.k) && !report.schedule_mismatch) {
            report.schedule_mismatch = true;
            report.mismatch_index = a.k;
        }
        const double da = *a.dist_to_oracle;
        const double db = *b.dist_to_oracle;
        const double slack = db * db - da * da - 2.0 * gamma * a.beta * a.beta;
        if (slack > report.worst_slack) {
            report.worst_slack = slack;
            report.worst_index = a.k;
        }
    }
    if (!any_pair) {
        report.pass = false;
        report.message =
            "check_fejer: trace has no consecutive iterations with oracle distances "
            "(record with trace_every = 1 and an oracle)";
        return report;
    }
    report.pass = report.worst_slack <= bound && !report.schedule_mismatch;
    if (report.schedule_mismatch) {
        report.message = "beta column does not match the configured schedule at iteration " +
                         std::to_string(report.mismatch_index);
    }
    return report;
}

InvariantMonitor::InvariantMonitor(Problem problem, SolverConfig config,
                                   std::optional<Vector> oracle)
    : problem_(std::move(problem)), config_(std::move(config)), oracle_(std::move(oracle)) {
    min_map_residual_ = std::numeric_limits<double>::infinity();
}

void InvariantMonitor::on_start(const Vector& x0) {
    prev_x_ = x0;
    if (oracle_) {
        const double d = dist(x0, *oracle_);
        prev_dist_sq_ = d * d;
    }
    worst_feasibility_ = std::max(worst_feasibility_, problem_.set.distance(x0));
    min_map_residual_ = std::min(min_map_residual_, fixed_point_residual(problem_.map, x0));
}

void InvariantMonitor::on_step(const SolverState& next) {
    any_step_ = true;
    const long k = next.k - 1;
    const double beta_reported = next.beta * beta_report_factor_;

    // lambda_k in (0, 1] by the max rule.
    worst_lambda_slack_ = std::max(worst_lambda_slack_, next.lambda - 1.0);
    if (!(next.lambda > 0.0)) worst_lambda_slack_ = std::max(worst_lambda_slack_, 1.0);

    worst_feasibility_ = std::max({worst_feasibility_, problem_.set.distance(next.x),
                                   problem_.set.distance(next.y),
                                   problem_.set.distance(next.z)});

    // ||z^k - x^k|| <= sqrt(2) beta_k, from the prox inequalities alone.
    worst_z_bound_slack_ = std::max(
        worst_z_bound_slack_, dist(next.z, prev_x_) - std::sqrt(2.0) * beta_reported);

    worst_schedule_mismatch_ =
        std::max(worst_schedule_mismatch_, std::abs(beta_reported - config_.beta.at(k)));

    if (oracle_) {
        const double d = dist(next.x, *oracle_);
        const double slack =
            d * d - prev_dist_sq_ - 2.0 * config_.gamma * beta_reported * beta_reported;
        worst_fejer_slack_ = std::max(worst_fejer_slack_, slack);
        prev_dist_sq_ = d * d;
    }

    worst_certificate_ = std::max({worst_certificate_, next.cert_y, next.cert_z});
    min_map_residual_ =
        std::min(min_map_residual_, fixed_point_residual(problem_.map, next.x));
    prev_x_ = next.x;
}

std::vector<InvariantMonitor::Row> InvariantMonitor::rows() const {
    std::vector<Row> rows;
    auto push = [&rows](const std::string& name, double worst, double bound) {
        rows.push_back(Row{name, worst, bound, worst <= bound});
    };
    push("lambda_in_unit_interval", worst_lambda_slack_, 0.0);
    push("iterate_feasibility", worst_feasibility_, 1e-10);
    push("z_step_beta_bound", worst_z_bound_slack_, 1e-8);
    push("beta_schedule_consistency", worst_schedule_mismatch_, 0.0);
    if (oracle_) {
        push("fejer_inequality", worst_fejer_slack_,
             1e-8 * (1.0 + norm_sq(*oracle_)));
    }
    push("prox_certificates", worst_certificate_, config_.inner_tol);
    push("map_residual_decay", min_map_residual_, config_.tol);
    return rows;
}

bool InvariantMonitor::all_pass() const {
    for (const auto& row : rows()) {
        if (!row.pass) return false;
    }
    return true;
}

}  // namespace epsplit
