#include "perpetua/perpetuity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perpetua/parallel.hpp"

namespace perpetua {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kChunks = 256;  // fixed stream count: worker-count independent

// Split n items into kChunks nearly equal pieces; chunk i draws from stream i.
std::uint64_t chunk_size(std::uint64_t n, std::uint64_t chunk) {
    const std::uint64_t base = n / kChunks, extra = n % kChunks;
    return base + (chunk < extra ? 1 : 0);
}

void finalize_tail(TailEstimate& est, const RegVarFn& f) {
    const std::size_t m = est.t_grid.size();
    est.prob.resize(m);
    est.ratios.resize(m);
    est.floor_hit.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double p =
            static_cast<double>(est.hits[i]) / static_cast<double>(est.n_samples);
        est.prob[i] = p;
        est.ratios[i] = est.hits[i] == 0 ? kInf : -std::log(p) / f(est.t_grid[i]);
        est.floor_hit[i] = est.hits[i] < 10;
    }
    est.all_floor =
        std::all_of(est.floor_hit.begin(), est.floor_hit.end(), [](bool b) { return b; });
}

template <typename DrawFn>
TailEstimate run_tail_mc(const RegVarFn& f, std::span<const double> t_grid,
                         std::uint64_t n_samples, std::uint64_t seed, int workers,
                         DrawFn&& draw) {
    TailEstimate est;
    est.t_grid.assign(t_grid.begin(), t_grid.end());
    est.n_samples = n_samples;
    const std::size_t m = t_grid.size();
    std::vector<std::vector<std::uint64_t>> per_chunk(kChunks,
                                                      std::vector<std::uint64_t>(m, 0));
    parallel_for(kChunks, workers, [&](std::size_t chunk) {
        Rng rng = Rng::stream(seed, chunk);
        const std::uint64_t cnt = chunk_size(n_samples, chunk);
        auto& hits = per_chunk[chunk];
        for (std::uint64_t k = 0; k < cnt; ++k) {
            const double x = draw(rng);
            for (std::size_t i = 0; i < m; ++i)
                if (x > t_grid[i]) ++hits[i];
        }
    });
    est.hits.assign(m, 0);
    for (const auto& hits : per_chunk)
        for (std::size_t i = 0; i < m; ++i) est.hits[i] += hits[i];
    finalize_tail(est, f);
    return est;
}

}  // namespace

std::vector<double> iterate(const PairModel& model, int n, double x0, Rng& rng) {
    if (n < 0) throw std::invalid_argument("iterate: n must be >= 0");
    if (!(x0 >= 0.0)) throw std::invalid_argument("iterate: x0 must be >= 0");
    std::vector<double> traj(static_cast<std::size_t>(n) + 1);
    traj[0] = x0;
    double x = x0;
    for (int k = 1; k <= n; ++k) {
        const auto [a, b] = model.sample(rng);
        x = a * x + b;
        traj[static_cast<std::size_t>(k)] = x;
    }
    return traj;
}

double sample_stationary(const PairModel& model, double trunc_tol, Rng& rng) {
    if (!(trunc_tol > 0.0 && trunc_tol < 1.0))
        throw std::invalid_argument("sample_stationary: trunc_tol must be in (0,1)");
    double sum = 0.0;
    double product = 1.0;  // prod_{k<n} A_k
    for (std::uint64_t n = 0; n < 1000000; ++n) {
        const auto [a, b] = model.sample(rng);
        sum += product * b;
        product *= a;
        if (product < trunc_tol) return sum;
    }
    throw std::runtime_error(
        "sample_stationary: product did not descend below trunc_tol within 1e6 factors");
}

TailEstimate tail_log_estimate(const PairModel& model, const RegVarFn& f,
                               std::span<const double> t_grid, std::uint64_t n_samples,
                               TailMethod method, int burnin, std::uint64_t seed,
                               int workers, double predicted_lambda_star,
                               double trunc_tol) {
    if (t_grid.empty()) throw std::invalid_argument("tail_log_estimate: empty t grid");
    if (n_samples < 100000)
        throw std::invalid_argument("tail_log_estimate: n_samples must be >= 1e5");
    if (method == TailMethod::recursion_burnin && burnin < 1)
        throw std::invalid_argument("tail_log_estimate: burnin must be >= 1");

    TailEstimate est = run_tail_mc(
        f, t_grid, n_samples, seed, workers, [&](Rng& rng) {
            if (method == TailMethod::series)
                return sample_stationary(model, trunc_tol, rng);
            double x = 0.0;
            for (int k = 0; k < burnin; ++k) {
                const auto [a, b] = model.sample(rng);
                x = a * x + b;
            }
            return x;
        });
    est.method = method;
    est.predicted_lambda_star = predicted_lambda_star;
    return est;
}

EnvelopeReport envelope(const PairModel& model, const RegVarFn& f, double lambda_star,
                        std::uint64_t N, int n_traj, std::uint64_t seed, int workers) {
    if (!(lambda_star > 0.0) || !std::isfinite(lambda_star))
        throw std::invalid_argument("envelope: lambda* must be in (0, inf)");
    if (N < 3) throw std::invalid_argument("envelope: horizon must be >= 3");
    if (n_traj < 1) throw std::invalid_argument("envelope: need at least one trajectory");

    EnvelopeReport report;
    report.horizon = N;
    report.n_traj = n_traj;
    report.predicted_limit = std::pow(lambda_star, -1.0 / f.rho());
    // geometric checkpoints n = ceil(1.5^k), deduplicated, ending at N
    for (double v = 3.0; v < static_cast<double>(N); v *= 1.5) {
        const auto n = static_cast<std::uint64_t>(std::ceil(v));
        if (report.checkpoints.empty() || n > report.checkpoints.back())
            report.checkpoints.push_back(n);
    }
    if (report.checkpoints.empty() || report.checkpoints.back() != N)
        report.checkpoints.push_back(N);

    report.running_max.assign(static_cast<std::size_t>(n_traj),
                              std::vector<double>(report.checkpoints.size(), 0.0));
    report.final_ratios.assign(static_cast<std::size_t>(n_traj), 0.0);

    // The cumulative running max (from m = 3) is frozen by transient spikes at
    // small m, where f^{-1}(log m) is still tiny; it stops changing after a few
    // hundred steps and does not estimate the limsup. The headline statistic is
    // therefore the maximum over the tail window (N/8, N], which hits the
    // limsup constant as the window slides out.
    const std::uint64_t window_lo = std::max<std::uint64_t>(3, N / 8 + 1);

    parallel_for(static_cast<std::size_t>(n_traj), workers, [&](std::size_t traj) {
        Rng rng = Rng::stream(seed, traj);
        double x = 0.0;  // envelope statistics are for the zero-started chain
        double running = 0.0;
        double window_max = 0.0;
        std::size_t next_cp = 0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            const auto [a, b] = model.sample(rng);
            x = a * x + b;
            if (n >= 3) {  // log n > 1: the scale function is in its tail regime
                const double ratio = x / f.inverse(std::log(static_cast<double>(n)));
                if (ratio > running) running = ratio;
                if (n >= window_lo && ratio > window_max) window_max = ratio;
            }
            if (next_cp < report.checkpoints.size() && n == report.checkpoints[next_cp])
                report.running_max[traj][next_cp++] = running;
        }
        report.final_ratios[traj] = window_max;
    });

    std::vector<double> sorted = report.final_ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t h = sorted.size() / 2;
    report.median_final_ratio =
        sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    return report;
}

TailEstimate one_step_tail(const PairModel& model, const RegVarFn& f, double lambda,
                           std::span<const double> t_grid, std::uint64_t n_samples,
                           std::uint64_t seed, int workers, double predicted_phi) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("one_step_tail: lambda must be >= 0");
    if (t_grid.empty()) throw std::invalid_argument("one_step_tail: empty t grid");
    TailEstimate est = run_tail_mc(
        f, t_grid, n_samples, seed, workers, [&](Rng& rng) {
            const double z = sample_ED(f, lambda, rng);
            const auto [a, b] = model.sample(rng);
            if (std::isinf(z)) return a > 0.0 ? kInf : b;  // lambda = 0 degenerate tail
            return a * z + b;
        });
    est.predicted_lambda_star = predicted_phi;
    return est;
}

MonotonicityReport stochastic_monotonicity_check(const PairModel& model,
                                                 std::span<const int> n_list,
                                                 std::uint64_t n_samples,
                                                 std::span<const double> t_grid,
                                                 std::uint64_t seed, int workers) {
    if (n_list.empty() || t_grid.empty())
        throw std::invalid_argument("stochastic_monotonicity_check: empty grids");
    MonotonicityReport report;
    report.n_list.assign(n_list.begin(), n_list.end());
    std::sort(report.n_list.begin(), report.n_list.end());
    report.t_grid.assign(t_grid.begin(), t_grid.end());
    report.n_samples = n_samples;
    const std::size_t rows = report.n_list.size() + 1;  // + stationary
    const std::size_t cols = t_grid.size();
    report.survival.assign(rows, std::vector<double>(cols, 0.0));

    parallel_for(rows, workers, [&](std::size_t r) {
        Rng rng = Rng::stream(seed, r);
        std::vector<std::uint64_t> hits(cols, 0);
        for (std::uint64_t k = 0; k < n_samples; ++k) {
            double x;
            if (r + 1 == rows) {
                x = sample_stationary(model, 1e-12, rng);
            } else {
                x = 0.0;
                const int steps = report.n_list[r];
                for (int s = 0; s < steps; ++s) {
                    const auto [a, b] = model.sample(rng);
                    x = a * x + b;
                }
            }
            for (std::size_t j = 0; j < cols; ++j)
                if (x > report.t_grid[j]) ++hits[j];
        }
        for (std::size_t j = 0; j < cols; ++j)
            report.survival[r][j] =
                static_cast<double>(hits[j]) / static_cast<double>(n_samples);
    });

    // tails must be nondecreasing in n (and dominated by stationary), up to 4 sigma
    report.worst_violation = kInf;
    auto check_pair = [&](std::size_t lo, std::size_t hi, int n_label) {
        for (std::size_t j = 0; j < cols; ++j) {
            const double p1 = report.survival[lo][j], p2 = report.survival[hi][j];
            const double sigma = std::sqrt(
                (p1 * (1.0 - p1) + p2 * (1.0 - p2)) / static_cast<double>(n_samples));
            const double margin = p2 - p1 + 4.0 * sigma;
            if (margin < report.worst_violation) {
                report.worst_violation = margin;
                report.worst_t = report.t_grid[j];
                report.worst_n = n_label;
            }
            if (margin < 0.0) report.ok = false;
        }
    };
    for (std::size_t r = 0; r + 1 < report.n_list.size(); ++r)
        check_pair(r, r + 1, report.n_list[r + 1]);
    for (std::size_t r = 0; r < report.n_list.size(); ++r)
        check_pair(r, rows - 1, -report.n_list[r]);  // negative label: vs stationary
    return report;
}

}  // namespace perpetua
