#ifndef EPSPLIT_SOLVER_HPP
#define EPSPLIT_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epsplit/bifunction.hpp"
#include "epsplit/convex_set.hpp"
#include "epsplit/maps.hpp"
#include "epsplit/prox.hpp"
#include "epsplit/vec.hpp"

namespace epsplit {

/// Stepsize schedule beta_k. The built-in rule beta_k = beta0 / (k+1)^p is
/// divergent-sum / square-summable exactly when 1/2 < p <= 1; explicit user
/// sequences are taken on trust.
struct BetaSchedule {
    double beta0 = 1.0;
    double exponent = 1.0;
    std::vector<double> explicit_values;  // overrides the rule when nonempty

    double at(long k) const;
    void validate() const;
};

struct SolverConfig {
    double gamma = 0.5;
    BetaSchedule beta;
    long max_iters = 100000;
    double tol = 1e-6;
    /// Stepsize of the fixed prox residual used for stopping; the in-run
    /// quantities ||y-x||, ||z-x|| shrink with beta_k regardless of
    /// optimality and cannot serve as a stopping signal.
    double fixed_residual_lambda = 1.0;
    long trace_every = 1;
    double inner_tol = 1e-10;
    int inner_max_iters = 10000;
    /// When false the trace records 0 wall seconds, keeping trace files
    /// byte-reproducible across runs.
    bool record_wall_time = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// The data triple Algorithm-level code consumes.
struct Problem {
    SplitBifunction split;
    ConvexSet set;
    NonexpansiveMap map;
};

/// Quantities of one iteration: x = x^k together with the subgradients,
/// stepsizes, and subproblem solutions that produced it (k >= 1) or zeros at
/// k = 0.
struct SolverState {
    long k = 0;
    Vector x;
    Vector g1, g2;
    double eta = 0.0;
    double lambda = 0.0;
    double beta = 0.0;
    Vector y, z;
    double cert_y = 0.0;
    double cert_z = 0.0;
    double residual_map = 0.0;
    double residual_prox = 0.0;
};

struct TraceRecord {
    long k = 0;
    double beta = 0.0;
    double lambda = 0.0;
    double norm_y_minus_x = 0.0;
    double norm_z_minus_x = 0.0;
    double fixed_point_residual = 0.0;
    double prox_residual = 0.0;
    std::optional<double> dist_to_oracle;
    double wall_time_s = 0.0;
};

using Trace = std::vector<TraceRecord>;

enum class SolveStatus { converged, max_iters, error };

std::string to_string(SolveStatus s);

struct SolveResult {
    Vector x;
    Trace trace;
    SolveStatus status = SolveStatus::error;
    long iterations = 0;
    double final_map_residual = 0.0;
    double final_prox_residual = 0.0;
    double max_certificate = 0.0;
    double wall_time_s = 0.0;
    std::string message;
};

/// Per-iteration observer for verification runs: sees x^{k+1} along with the
/// iteration-k quantities right after the Mann update.
class IterationObserver {
  public:
    virtual ~IterationObserver() = default;
    virtual void on_start(const Vector& x0) = 0;
    virtual void on_step(const SolverState& next) = 0;
};

/// ||x - argmin{ lambda_bar f(x,y) + 1/2||y-x||^2 : y in C }|| for the lumped
/// bifunction f = f1 + f2; zero exactly at the solutions of the equilibrium
/// problem, independent of the vanishing in-run stepsizes.
double fixed_prox_residual(const Bifunction& lumped, const ConvexSet& set, const Vector& x,
                           double lambda_bar, double inner_tol, int inner_max_iters,
                           std::uint64_t seed);

/// One iteration: subgradients at x^k, stepsize eta/lambda rule, the two
/// prox subproblems, and the Mann update x^{k+1} = gamma z + (1-gamma) T(x).
SolverState step(const SolverState& state, const Problem& problem, const SolverConfig& config);

/// Full driver: iterates step() until max(||T(x)-x||, fixed prox residual)
/// <= tol or the iteration budget runs out. x0 outside C is projected (with
/// a note in SolveResult::message).
SolveResult solve(const Problem& problem, const SolverConfig& config, Vector x0,
                  const std::optional<Vector>& oracle = std::nullopt,
                  IterationObserver* observer = nullptr);

/// Quasi-Fejer inequality audit over a recorded trace:
///   d_{k+1}^2 <= d_k^2 + 2 gamma beta_k^2  (d_k = dist to the oracle).
/// Also cross-checks the recorded beta column against the schedule, so a
/// doctored report cannot pass silently.
struct FejerReport {
    bool pass = false;
    double worst_slack = 0.0;
    long worst_index = -1;
    bool schedule_mismatch = false;
    long mismatch_index = -1;
    std::string message;
};

FejerReport check_fejer(const Trace& trace, const Vector& oracle, double gamma,
                        const BetaSchedule& schedule);

/// Streaming invariant checks for verification mode; one worst-case slack
/// per invariant.
class InvariantMonitor : public IterationObserver {
  public:
    InvariantMonitor(Problem problem, SolverConfig config, std::optional<Vector> oracle);

    void on_start(const Vector& x0) override;
    void on_step(const SolverState& next) override;

    struct Row {
        std::string name;
        double worst = 0.0;
        double bound = 0.0;
        bool pass = true;
    };
    std::vector<Row> rows() const;
    bool all_pass() const;

    /// Test hook: scales the beta value fed to the *checks* (not to the
    /// algorithm), modelling a corrupted report.
    void corrupt_reported_beta(double factor) { beta_report_factor_ = factor; }

  private:
    Problem problem_;
    SolverConfig config_;
    std::optional<Vector> oracle_;
    double beta_report_factor_ = 1.0;
    Vector prev_x_;
    double prev_dist_sq_ = 0.0;
    double worst_lambda_slack_ = 0.0;
    double worst_feasibility_ = 0.0;
    double worst_z_bound_slack_ = 0.0;
    double worst_fejer_slack_ = 0.0;
    double worst_schedule_mismatch_ = 0.0;
    double worst_certificate_ = 0.0;
    double min_map_residual_ = 0.0;
    bool any_step_ = false;
};

}  // namespace epsplit

#endif  // EPSPLIT_SOLVER_HPP
