#pragma once
// Randomized verification sweeps for the probability results, driven by the
// exact Poisson-Binomial engine. Each sweep draws `cases` random instances
// from the statement's hypothesis region, evaluates the claim exactly and
// reports the number of violations plus the minimum slack observed. These
// are theorems: a violation beyond numeric tolerance indicates an
// implementation bug, which is exactly what the sweeps are for.

#include <cstdint>
#include <string>
#include <vector>

namespace edalab {

enum class VerifyCheck {
    feige,            // Pr(Y > E[Y] - D) >= min{1/13, D/(1+D)}
    anticoncentration,// sigma Pr(Y = y) <= eta + slack
    integer_median,   // Pr(Y >= E[Y]) >= 1/2 for integer E[Y]
    pmin_quarter,     // Pr(Y >= E[Y]) >= 2^-17 when all p >= 1/4
    ce,               // Pr(Y >= min{E[Y]+d* sqrt(k-floor E[Y]), k}) > 0
    inequality_g1,    // E + d sqrt(n-E) >= f + d sqrt(n-f) on its hypothesis
};

VerifyCheck verify_check_from_string(const std::string& name);
std::string to_string(VerifyCheck check);

struct VerifyReport {
    std::string check;
    std::uint64_t cases = 0;
    double min_slack = 0.0;
    std::uint64_t violations = 0;
    std::vector<std::string> counterexamples;  // at most 10, with parameters
};

// `scale` bounds the instance size: the number of Bernoulli variables for
// the distribution checks, the problem size n for inequality_g1.
VerifyReport run_verification(VerifyCheck check, std::uint64_t cases, std::uint64_t scale,
                              std::uint64_t seed);

std::string report_to_json(const VerifyReport& report);

}  // namespace edalab
