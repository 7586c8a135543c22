#pragma once
// UMDA with margins and its PBIL generalization.
//
// One generation: sample lambda offspring from the marginal model, sort by
// fitness with uniformly random tie-breaking, keep the mu fittest, replace
// each marginal by the selected ones-frequency (smoothed by rho; rho = 1 is
// the plain UMDA) and clamp to the borders [1/n, 1-1/n]. A trial stops when
// the all-ones optimum is sampled or a generation cap is hit.
//
// Evaluation accounting: every sampled individual costs one evaluation and
// the generation containing the first optimum is charged in full, so
// evaluations = lambda * generations for every outcome.

#include <cstdint>
#include <optional>
#include <vector>

#include "edalab/bitstring.hpp"
#include "edalab/problems.hpp"
#include "edalab/rng.hpp"

namespace edalab {

struct MarginalModel {
    std::size_t n = 0;
    std::vector<double> p;

    static MarginalModel uniform(std::size_t n) {
        MarginalModel m;
        m.n = n;
        m.p.assign(n, 0.5);
        return m;
    }

    double lower_border() const { return 1.0 / static_cast<double>(n); }
    double upper_border() const { return 1.0 - 1.0 / static_cast<double>(n); }
};

struct AlgorithmParams {
    std::size_t n = 0;
    std::size_t lambda = 0;
    std::size_t mu = 0;
    double rho = 1.0;
    std::uint64_t max_generations = 100000;
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const AlgorithmParams& params);

struct Population {
    std::vector<BitString> members;
    std::vector<std::uint64_t> ranks;  // scalar sort keys; unused for BinVal
    bool sorted = false;

    std::size_t size() const { return members.size(); }
};

struct TrialRecord {
    std::uint64_t evaluations = 0;
    std::uint64_t generations = 0;
    bool success = false;
    std::uint64_t seed = 0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Samples individuals bit-independently from a fixed model: bit i is one with
// probability p(i). The constructor analyses the model once so that the two
// border groups (marginals pinned at 1/n and 1-1/n) are drawn by geometric
// flip-skipping instead of one RNG word per bit; everything else is a plain
// threshold comparison. Both paths realize the same product distribution.
class PopulationSampler {
public:
    explicit PopulationSampler(const MarginalModel& model);

    void sample_into(BitString& out, Rng& rng) const;
    Population sample(std::size_t lambda, Rng& rng) const;

private:
    struct RareGroup {
        double rate = 0.0;          // flip probability q
        double inv_log1m_rate = 0;  // 1 / log(1 - q), 0 when q == 0
        bool flips_to_zero = false; // group template bit is one
        std::vector<std::uint32_t> positions;  // 0-based
    };

    std::size_t n_ = 0;
    std::vector<std::uint64_t> base_words_;
    RareGroup lower_group_;  // template 0, flips set a one
    RareGroup upper_group_;  // template 1, flips clear to zero
    std::vector<std::uint32_t> dense_word_;
    std::vector<std::uint64_t> dense_mask_;
    std::vector<std::uint64_t> dense_threshold_;

    void apply_flips(const RareGroup& g, std::uint64_t* words, Rng& rng) const;
};

// One independent sample of lambda individuals from the model.
Population sample_population(const MarginalModel& model, std::size_t lambda, Rng& rng);

// The mu fittest of pop under the problem's order; ties broken uniformly at
// random. Throws std::invalid_argument if mu exceeds the population size.
Population truncation_select(const Population& pop, std::size_t mu,
                             const Problem& problem, Rng& rng);

// Same selection over explicit fitness values; returns the selected indices
// in rank order. Exists so the tie-breaking contract is testable without a
// bitstring problem behind it.
std::vector<std::size_t> truncation_select_by_fitness(const std::vector<double>& fitness,
                                                      std::size_t mu, Rng& rng);

// p'(i) = clamp((1-rho) p(i) + rho X_i/mu) with X_i the ones count at
// position i among the selected individuals. rho = 1 reproduces the UMDA
// update exactly.
MarginalModel update_model(const MarginalModel& model, const Population& selected,
                           double rho);

// Full trial. `initial` overrides the uniform-half start (used by tests that
// pin the model at the borders).
TrialRecord run(const AlgorithmParams& params, const Problem& problem,
                const MarginalModel* initial = nullptr);

}  // namespace edalab
