#pragma once
// Exact Poisson-Binomial distribution (sum of independent, heterogeneous
// Bernoulli variables) and numeric verifiers for the probability bounds the
// runtime analysis leans on:
//
//   * Feige-type lower bound      Pr(Y > E[Y] - D) >= min{1/13, D/(1+D)}
//   * anti-concentration          sigma * Pr(Y = y) <= eta ~ 0.4688
//   * integer-mean median         Pr(Y >= E[Y]) >= 1/2 when E[Y] is integer
//   * p_min = 1/4 mean tail       Pr(Y >= E[Y]) >= 2^-17 (proof-chain constant)
//   * constant-tail lemma         Pr(Y >= min{E[Y] + d* sqrt(k - floor(E[Y])), k}) > 0
//
// The pmf comes from the O(k^2) convolution recurrence, run in double
// precision with error-free transformations (TwoSum/TwoProd) carrying the
// rounding residue, so the masses stay accurate enough for 1e-12 level
// checks up to k ~ 10^4.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace edalab {

// Printed value from the underlying series; treated as an upper-bound
// constant with a one-unit-in-the-last-printed-digit slack.
inline constexpr double kAntiConcentrationEta = 0.4688;
inline constexpr double kAntiConcentrationSlack = 1e-4;

// (1/4) * (1/2) * (1/4)^7 = 2^-17: the worst-case constant assembled from the
// proof of the p_min = 1/4 tail lemma.
inline constexpr double kPminQuarterConstant = 0x1p-17;

class PoissonBinomial {
public:
    explicit PoissonBinomial(std::vector<double> probs);

    std::size_t trials() const { return probs_.size(); }
    const std::vector<double>& probs() const { return probs_; }

    double mean() const { return mean_; }
    double variance() const { return variance_; }

    const std::vector<double>& pmf() const;
    double pmf_at(std::int64_t y) const;

    // Pr(Y >= y), exact suffix sum; 1 for y <= 0 and 0 for y > k.
    double tail_geq(std::int64_t y) const;

    // Pr(Y > x) and Pr(Y >= x) for real thresholds.
    double prob_greater(double x) const;
    double prob_geq(double x) const;

private:
    std::vector<double> probs_;
    double mean_ = 0.0;
    double variance_ = 0.0;
    mutable std::vector<double> pmf_;  // computed on first use
};

struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied = false;
};

// Pr(Y > E[Y] - delta) vs min{1/13, delta/(1+delta)}; requires delta > 0.
BoundReport check_feige(const PoissonBinomial& d, double delta);

// max_y sigma * Pr(Y = y) vs eta + slack.
BoundReport check_anticoncentration(const PoissonBinomial& d);

// Pr(Y >= E[Y]) vs 1/2; rejects distributions whose mean is not an integer
// (within 1e-9), since that is the lemma's hypothesis.
BoundReport check_integer_mean_median(const PoissonBinomial& d);

// Pr(Y >= E[Y]) vs 2^-17; rejects any success probability below 1/4.
BoundReport check_pmin_quarter_bound(const PoissonBinomial& d);

// Pr(Y >= min{E[Y] + dstar * sqrt(k - floor(E[Y])), k}). The lemma only
// promises a positive constant, so rhs = 0 and satisfied means lhs > 0;
// sweeps record the empirical infimum. Requires all p >= p_min and
// dstar >= 1/p_min.
BoundReport check_ce_lemma(const PoissonBinomial& d, double dstar, double p_min = 0.25);

}  // namespace edalab
