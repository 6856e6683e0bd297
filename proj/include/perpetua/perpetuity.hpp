#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perpetua/models.hpp"
#include "perpetua/regvar.hpp"
#include "perpetua/rng.hpp"

namespace perpetua {

/// Exact trajectory X_0, ..., X_n of X_k = A_k X_{k-1} + B_k.
std::vector<double> iterate(const PairModel& model, int n, double x0, Rng& rng);

/// One draw of the stationary law via the series sum_{n>=1} B_n prod_{k<n} A_k,
/// truncated at the first n with prod_{k<=n} A_k < trunc_tol. The truncation
/// error is the discarded product times an independent stationary copy, so the
/// bias is bounded by trunc_tol * ess_sup_ratio when that is finite and is an
/// unbounded-tail caveat otherwise. Throws after 1e6 factors without descent.
double sample_stationary(const PairModel& model, double trunc_tol, Rng& rng);

enum class TailMethod { recursion_burnin, series };

struct TailEstimate {
    std::vector<double> t_grid;
    std::vector<std::uint64_t> hits;
    std::uint64_t n_samples = 0;
    std::vector<double> prob;
    std::vector<double> ratios;  // -log p_hat / f(t), +inf where hits == 0
    std::vector<bool> floor_hit;  // hits < 10
    TailMethod method = TailMethod::series;
    double predicted_lambda_star = 0.0;
    bool all_floor = false;
};

/// Tail exponent estimate from n_samples independent stationary draws: either
/// fresh chains run for `burnin` steps from X_0 = 0, or series-representation
/// draws (unbiased up to the documented truncation). Replications are chunked
/// into 256 generator streams, so results are identical for any worker count.
TailEstimate tail_log_estimate(const PairModel& model, const RegVarFn& f,
                               std::span<const double> t_grid, std::uint64_t n_samples,
                               TailMethod method, int burnin, std::uint64_t seed,
                               int workers, double predicted_lambda_star = 0.0,
                               double trunc_tol = 1e-12);

struct EnvelopeReport {
    std::uint64_t horizon = 0;
    int n_traj = 0;
    std::vector<std::uint64_t> checkpoints;
    /// running_max[traj][checkpoint] = max_{3 <= m <= n} X_m / f^{-1}(log m);
    /// nondecreasing per trajectory, but frozen by transient spikes at small m.
    std::vector<std::vector<double>> running_max;
    /// final_ratios[traj] = max over the tail window m in (N/8, N] -- the
    /// statistic that actually converges to the limsup constant.
    std::vector<double> final_ratios;
    double median_final_ratio = 0.0;
    double predicted_limit = 0.0;  // (lambda*)^{-1/rho}
};

/// Long-run envelope statistics of X_n / f^{-1}(log n), n >= 3, along n_traj
/// independent trajectories started at X_0 = 0. Checkpoints default to the
/// geometric schedule n = ceil(1.5^k) capped at N. Requires lambda* in (0, inf).
/// The summary median uses the tail-window maxima (see EnvelopeReport).
EnvelopeReport envelope(const PairModel& model, const RegVarFn& f, double lambda_star,
                        std::uint64_t N, int n_traj, std::uint64_t seed, int workers);

/// One-step tail map: MC ratios -log P(A Z + B > t) / f(t) with Z ~ ED_f(lambda)
/// drawn independently of (A, B). Converges toward phi_rho(lambda).
TailEstimate one_step_tail(const PairModel& model, const RegVarFn& f, double lambda,
                           std::span<const double> t_grid, std::uint64_t n_samples,
                           std::uint64_t seed, int workers,
                           double predicted_phi = 0.0);

struct MonotonicityReport {
    std::vector<int> n_list;
    std::vector<double> t_grid;
    /// survival[k][j] = empirical P(X_{n_list[k]} > t_j); last row is stationary draws
    std::vector<std::vector<double>> survival;
    std::uint64_t n_samples = 0;
    bool ok = true;
    double worst_violation = 0.0;  // most negative slack-adjusted increment
    double worst_t = 0.0;
    int worst_n = 0;
};

/// Stochastic monotonicity from X_0 = 0: empirical tails of X_n must be
/// nondecreasing in n, and stationary draws must dominate every X_n, all up to
/// 4 binomial standard deviations on the t grid.
MonotonicityReport stochastic_monotonicity_check(const PairModel& model,
                                                 std::span<const int> n_list,
                                                 std::uint64_t n_samples,
                                                 std::span<const double> t_grid,
                                                 std::uint64_t seed, int workers);

}  // namespace perpetua
