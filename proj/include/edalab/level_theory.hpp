#pragma once
// Level partitions and the numeric side of the level-based theorem.
//
// A partition carries the per-level upgrade lower bounds z_j, the
// multiplication factor delta and the selective-pressure parameter gamma0.
// From those, g3_min_population evaluates the population-size condition
//
//     lambda >= (4 / (gamma0 delta^2)) ln(128 m / (z_* delta^2))
//
// and level_based_bound the expected-optimisation-time conclusion
//
//     E[T] <= (8 / delta^2) sum_j [ lambda ln(6 delta lambda /
//                                   (4 + z_j delta lambda)) + 1/z_j ]
//
// in units of fitness evaluations. The three presets package the partitions
// used for LeadingOnes/BinVal (z_j = 1/(en), m = n+1), OneMax with small
// parent populations (z_j = c (n-j+1)/n) and OneMax with large parent
// populations (constant z_j = kappa over the sqrt-spaced level sequence
// f_{i+1} = f_i + ceil(d sqrt(n - f_i))). Each preset derives the largest
// admissible delta <= 1 from its theorem's own inequality and rejects
// parameters outside the theorem's regime, naming the failed inequality.

#include <cstdint>
#include <string>
#include <vector>

#include "edalab/engine.hpp"

namespace edalab {

// Worst case for Pr(Y >= E[Y]) with all p >= 1/4, assembled from the lemma's
// proof: (1/2) * (1/4)^7 = 2^-15. Default for both psi and kappa knobs.
inline constexpr double kPsiWorstCase = 0x1p-15;

class RegimeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct LevelPartition {
    std::size_t m = 0;          // number of levels, optima in level m
    std::vector<double> z;      // m-1 upgrade lower bounds
    double delta = 0.0;         // in (0, 1]
    double gamma0 = 0.0;        // in (0, 1)
    std::string label;
    std::vector<std::string> warnings;  // advisory regime notes

    double z_star() const;
};

struct LevelSequence {
    std::uint64_t n = 0;
    double d = 0.0;
    std::vector<std::uint64_t> f;  // f_0 = 0, ..., f_ell = n
    std::size_t ell = 0;
};

// Runs the recurrence until it hits n; verifies the exact hit and the level
// count bounds sqrt(n)/(d+1) < ell < 2 sqrt(n)/d. d outside (0, 1] rejected.
LevelSequence level_sequence(std::uint64_t n, double d);

double g3_min_population(const LevelPartition& p);

// Upper bound on E[T] in evaluations; divide by lambda for generations.
// Evaluable regardless of the G3 condition (callers warn when lambda is
// below g3_min_population).
double level_based_bound(const LevelPartition& p, double lambda);

// m = n+1, z_j = 1/(en), gamma0 = mu/lambda, delta = min(1, lambda/(e mu) - 1).
// Rejects lambda <= e mu (no positive delta).
LevelPartition preset_leadingones(std::size_t n, std::size_t mu, std::size_t lambda);

// m = n+1, z_j = c (n-j+1)/n, delta from (1+delta) = (1-c) lambda / (13 e mu).
// Hard regime: mu <= sqrt(n(1-c)) and lambda large enough for delta > 0.
// mu >= a ln n is advisory (the constant a is existential in the analysis)
// and only produces a warning.
LevelPartition preset_onemax_small(std::size_t n, std::size_t mu, std::size_t lambda,
                                   double c = 0.5, double a = 1.0);

struct OnemaxLargeOptions {
    double d = 0.0;               // level spacing, must be in (0, max_spacing(psi)]
    double psi = kPsiWorstCase;   // lower bound used by the G2 step
    double kappa = kPsiWorstCase; // constant z_j
    double c_regime = 1.0;        // advisory constant in mu >= c sqrt(n) ln n
};

// Largest admissible d: positive root of psi^-2 d^2 + d - 1 = 0.
double onemax_large_max_spacing(double psi);

// m = ell+1 over level_sequence(n, d), z_j = kappa,
// delta = min(1, psi lambda / (e mu) - 1) so that gamma0 <= psi/((1+delta) e).
LevelPartition preset_onemax_large(std::size_t n, std::size_t mu, std::size_t lambda,
                                   const OnemaxLargeOptions& options);

// E + d sqrt(n - E) >= f_prev + d sqrt(n - f_prev) for d <= 1 and
// E >= f_prev - ell/n. Hypothesis violations rejected.
bool check_inequality_g1(double n, double d, double f_prev, double ell,
                         double expectation);

enum class PresetKind { leadingones, onemax_small, onemax_large };

struct ZjEstimate {
    std::size_t level = 0;     // j in [1, m-1]
    double estimate = 0.0;     // Monte-Carlo Pr(offspring in A_{>= j+1})
    double z_preset = 0.0;
    std::uint64_t samples = 0;
};

// Monte-Carlo estimate of the per-level upgrade probabilities against the
// preset z_j, sampling offspring from the worst-case model configuration the
// corresponding theorem pins down in its G1 step (borders-only for
// LeadingOnes and small-mu OneMax, a mean-f_{j-1} configuration with
// marginals >= 1/4 for large-mu OneMax).
std::vector<ZjEstimate> empirical_zj(PresetKind preset, std::size_t n,
                                     const LevelPartition& partition,
                                     const std::vector<std::size_t>& levels,
                                     std::uint64_t samples, std::uint64_t seed,
                                     const LevelSequence* sequence = nullptr);

}  // namespace edalab
