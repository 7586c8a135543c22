#pragma once
// Replicated-trial harness: runtime sweeps over problem sizes with
// deterministic per-trial seeding, bootstrap-percentile confidence intervals
// for the mean runtime, closed-form least-squares fits of the candidate
// growth models and CSV/JSON persistence.
//
// Determinism contract: (config, master_seed) fully determines every output
// byte. Trial seeds are derive_seed(master, {n_index, trial_index}), the
// bootstrap stream is derive_seed(master, {hash("bootstrap"), n_index}) over
// sorted samples, and aggregation reduces integer evaluation counts exactly,
// so neither thread count nor execution order can leak into the results.

#include <cstdint>
#include <string>
#include <vector>

#include "edalab/engine.hpp"
#include "edalab/problems.hpp"

namespace edalab {

// lambda(n) / mu(n) rules: a fixed grammar covering every setting used in
// the scaling study -- a constant, or c * {n, sqrt_n, log_n, sqrt_n_log_n}
// with an optional "c*" coefficient prefix. Values are rounded up.
struct ParamRule {
    enum class Base { constant, linear_n, sqrt_n, log_n, sqrt_n_log_n };

    Base base = Base::constant;
    double coefficient = 1.0;  // for Base::constant this is the value itself

    static ParamRule parse(const std::string& text);
    std::uint64_t eval(std::uint64_t n) const;
    std::string str() const;
};

struct SweepConfig {
    ProblemKind problem = ProblemKind::onemax;
    std::vector<std::uint64_t> n_values;
    ParamRule lambda_rule;
    ParamRule mu_rule;
    std::uint32_t repeats = 100;
    std::uint64_t master_seed = 0;
    std::uint32_t bootstrap_samples = 100;
    double confidence = 0.95;
    std::uint64_t max_generations = 100000;
    double rho = 1.0;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct CellSummary {
    std::uint64_t n = 0;
    std::uint64_t lambda = 0;
    std::uint64_t mu = 0;
    std::vector<TrialRecord> trials;
    double mean_evaluations = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    std::uint32_t failures = 0;
};

struct SweepResult {
    SweepConfig config;
    std::vector<CellSummary> cells;
    std::string code_version;

    bool has_failures() const;
};

SweepResult run_sweep(const SweepConfig& config);

// Bootstrap percentile interval for the mean: b resamples with replacement,
// nearest-rank percentiles of the resampled means. The input is sorted
// before resampling, making the interval invariant under permutations of the
// sample order.
std::pair<double, double> bootstrap_ci(std::vector<double> samples, std::uint32_t b,
                                       double level, std::uint64_t seed);

enum class GrowthModel { n_log_n, n_pow_3_2, n_squared, n_squared_log_n };

double eval_growth(GrowthModel g, double n);  // natural logarithms
std::string growth_name(GrowthModel g);
int growth_order(GrowthModel g);  // asymptotic order, for tie-breaking

struct ModelFit {
    GrowthModel model = GrowthModel::n_log_n;
    double c = 0.0;    // least-squares constant for y = c g(n)
    double rho = 0.0;  // Pearson correlation between y and c g(n)
};

// Closed-form least squares for the one-constant model y = c g(n):
// c = sum y_i g(n_i) / sum g(n_i)^2. Requires >= 2 positive data points.
ModelFit fit_model(const std::vector<double>& n_values, const std::vector<double>& means,
                   GrowthModel g);

// Sorted by rho descending; near-ties (within 1e-12) resolved in favour of
// the lower asymptotic order.
std::vector<ModelFit> rank_models(std::vector<ModelFit> fits);

// Allowed model set for a fit report: the scaling study fits n ln n, n^{3/2}
// and n^2 everywhere and adds n^2 ln n for LeadingOnes.
std::vector<GrowthModel> models_for(ProblemKind problem);

// Persistence: a trials CSV with the exact header
// `problem,n,lambda,mu,trial,seed,generations,evaluations,success` plus a
// JSON sidecar carrying config, master seed and code version. Timestamps are
// recorded only when empty strings are not passed; reproducible runs leave
// them empty so artifacts stay byte-stable.
void write_csv(const SweepResult& result, const std::string& path);
void write_sidecar(const SweepResult& result, const std::string& path,
                   const std::string& started_at, const std::string& finished_at);

// One parsed CSV row; lambda/mu are stored per row so that fit reports can
// work from a bare trials file.
struct TrialRow {
    ProblemKind problem = ProblemKind::onemax;
    std::uint64_t n = 0;
    std::uint64_t lambda = 0;
    std::uint64_t mu = 0;
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t generations = 0;
    std::uint64_t evaluations = 0;
    bool success = false;
};

std::vector<TrialRow> load_trials_csv(const std::string& path);

// Rebuilds a SweepResult from the two files; aggregates are recomputed with
// the same deterministic code paths. I/O and schema errors carry file names,
// line numbers and the offending column.
SweepResult load_sweep(const std::string& csv_path, const std::string& sidecar_path);

}  // namespace edalab
