#include "edalab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace edalab {

namespace {

// Below this flip rate a border group is drawn by skipping between flips;
// above it (or for small groups) the plain threshold path is cheaper.
constexpr double kRareMaxRate = 0.05;
constexpr std::size_t kRareMinSize = 16;

std::uint64_t threshold_for(double p) {
    if (p >= 1.0) return ~0ULL;
    if (p <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

template <typename StrictlyFitter>
std::vector<std::size_t> selection_order(std::size_t count, std::size_t mu,
                                         StrictlyFitter&& fitter, Rng& rng) {
    // One random key per individual makes (fitness desc, key asc) a total
    // order that is uniform over permutations within every tied group.
    std::vector<std::uint64_t> keys(count);
    for (auto& k : keys) k = rng.next_u64();
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const auto before = [&](std::size_t a, std::size_t b) {
        if (fitter(a, b)) return true;
        if (fitter(b, a)) return false;
        return keys[a] < keys[b];
    };
    if (mu < count) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(mu),
                         idx.end(), before);
        idx.resize(mu);
    }
    std::sort(idx.begin(), idx.end(), before);
    return idx;
}

}  // namespace

void validate(const AlgorithmParams& params) {
    if (params.n < 2) throw std::invalid_argument("AlgorithmParams: n must be >= 2");
    if (params.mu < 1) throw std::invalid_argument("AlgorithmParams: mu must be >= 1");
    if (params.mu >= params.lambda)
        throw std::invalid_argument("AlgorithmParams: requires mu < lambda");
    if (!(params.rho > 0.0 && params.rho <= 1.0))
        throw std::invalid_argument("AlgorithmParams: rho must be in (0, 1]");
}

PopulationSampler::PopulationSampler(const MarginalModel& model) : n_(model.n) {
    base_words_.assign((n_ + 63) / 64, 0);
    const double lower = model.lower_border();
    const double upper = model.upper_border();

    std::vector<std::uint32_t> lower_positions, upper_positions, dense_positions;
    for (std::size_t i = 0; i < n_; ++i) {
        const double p = model.p[i];
        if (p >= 1.0) {
            // deterministic one; theory probes use models outside the borders
            base_words_[i >> 6] |= 1ULL << (63 - (i & 63));
        } else if (p <= 0.0) {
            // deterministic zero: template bit stays clear
        } else if (p == lower)
            lower_positions.push_back(static_cast<std::uint32_t>(i));
        else if (p == upper)
            upper_positions.push_back(static_cast<std::uint32_t>(i));
        else
            dense_positions.push_back(static_cast<std::uint32_t>(i));
    }

    const auto as_rare = [&](std::vector<std::uint32_t>&& positions, double rate,
                             bool flips_to_zero, RareGroup& out) {
        if (rate <= kRareMaxRate && positions.size() >= kRareMinSize) {
            out.rate = rate;
            out.inv_log1m_rate = rate > 0.0 ? 1.0 / std::log1p(-rate) : 0.0;
            out.flips_to_zero = flips_to_zero;
            out.positions = std::move(positions);
            return true;
        }
        return false;
    };

    if (!lower_positions.empty() &&
        !as_rare(std::move(lower_positions), lower, false, lower_group_)) {
        for (auto i : lower_positions) dense_positions.push_back(i);
    }
    if (!upper_positions.empty() &&
        !as_rare(std::move(upper_positions), 1.0 - upper, true, upper_group_)) {
        for (auto i : upper_positions) dense_positions.push_back(i);
    }

    for (auto i : upper_group_.positions)
        base_words_[i >> 6] |= 1ULL << (63 - (i & 63));

    dense_word_.reserve(dense_positions.size());
    dense_mask_.reserve(dense_positions.size());
    dense_threshold_.reserve(dense_positions.size());
    for (auto i : dense_positions) {
        dense_word_.push_back(i >> 6);
        dense_mask_.push_back(1ULL << (63 - (i & 63)));
        dense_threshold_.push_back(threshold_for(model.p[i]));
    }
}

void PopulationSampler::apply_flips(const RareGroup& g, std::uint64_t* words,
                                    Rng& rng) const {
    if (g.positions.empty() || g.rate <= 0.0) return;
    const std::size_t size = g.positions.size();
    // Gaps between flipped positions are geometric, which is exactly an
    // independent Bernoulli(rate) draw per position.
    std::size_t idx = 0;
    while (true) {
        const double jump = std::log(rng.next_double_pos()) * g.inv_log1m_rate;
        if (jump >= static_cast<double>(size)) break;
        idx += static_cast<std::size_t>(jump);
        if (idx >= size) break;
        const std::uint32_t pos = g.positions[idx];
        const std::uint64_t mask = 1ULL << (63 - (pos & 63));
        if (g.flips_to_zero)
            words[pos >> 6] &= ~mask;
        else
            words[pos >> 6] |= mask;
        ++idx;
    }
}

void PopulationSampler::sample_into(BitString& out, Rng& rng) const {
    if (out.size() != n_) out = BitString(n_);
    std::uint64_t* words = out.words();
    std::memcpy(words, base_words_.data(), base_words_.size() * sizeof(std::uint64_t));
    for (std::size_t t = 0; t < dense_threshold_.size(); ++t) {
        if (rng.next_u64() < dense_threshold_[t]) words[dense_word_[t]] |= dense_mask_[t];
    }
    apply_flips(lower_group_, words, rng);
    apply_flips(upper_group_, words, rng);
}

Population PopulationSampler::sample(std::size_t lambda, Rng& rng) const {
    Population pop;
    pop.members.assign(lambda, BitString(n_));
    for (auto& member : pop.members) sample_into(member, rng);
    return pop;
}

Population sample_population(const MarginalModel& model, std::size_t lambda, Rng& rng) {
    return PopulationSampler(model).sample(lambda, rng);
}

Population truncation_select(const Population& pop, std::size_t mu,
                             const Problem& problem, Rng& rng) {
    if (mu > pop.size())
        throw std::invalid_argument("truncation_select: mu exceeds population size");

    std::vector<std::uint64_t> ranks = pop.ranks;
    if (!problem.uses_lex_order() && ranks.size() != pop.size()) {
        ranks.resize(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) ranks[i] = problem.rank(pop.members[i]);
    }
    const auto fitter = [&](std::size_t a, std::size_t b) {
        if (problem.uses_lex_order())
            return binval_less(pop.members[b], pop.members[a]);
        return ranks[a] > ranks[b];
    };
    const auto order = selection_order(pop.size(), mu, fitter, rng);

    Population selected;
    selected.members.reserve(mu);
    selected.ranks.reserve(mu);
    for (auto i : order) {
        selected.members.push_back(pop.members[i]);
        if (!problem.uses_lex_order()) selected.ranks.push_back(ranks[i]);
    }
    selected.sorted = true;
    return selected;
}

std::vector<std::size_t> truncation_select_by_fitness(const std::vector<double>& fitness,
                                                      std::size_t mu, Rng& rng) {
    if (mu > fitness.size())
        throw std::invalid_argument("truncation_select: mu exceeds population size");
    return selection_order(
        fitness.size(), mu,
        [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; }, rng);
}

MarginalModel update_model(const MarginalModel& model, const Population& selected,
                           double rho) {
    const std::size_t mu = selected.size();
    if (mu == 0) throw std::invalid_argument("update_model: empty selection");

    std::vector<std::uint32_t> counts(model.n, 0);
    for (const auto& member : selected.members) {
        for (std::size_t w = 0; w < member.word_count(); ++w) {
            std::uint64_t bits = member.words()[w];
            while (bits) {
                const int lz = std::countl_zero(bits);
                counts[(w << 6) + static_cast<std::size_t>(lz)]++;
                bits &= ~(1ULL << (63 - lz));
            }
        }
    }

    MarginalModel next = model;
    const double lower = model.lower_border();
    const double upper = model.upper_border();
    for (std::size_t i = 0; i < model.n; ++i) {
        const double freq = static_cast<double>(counts[i]) / static_cast<double>(mu);
        const double mixed = rho >= 1.0 ? freq : (1.0 - rho) * model.p[i] + rho * freq;
        next.p[i] = std::min(upper, std::max(lower, mixed));
    }
    return next;
}

TrialRecord run(const AlgorithmParams& params, const Problem& problem,
                const MarginalModel* initial) {
    validate(params);
    Rng rng(params.seed);
    MarginalModel model = initial ? *initial : MarginalModel::uniform(params.n);

    TrialRecord record;
    record.seed = params.seed;

    Population pop;
    pop.members.assign(params.lambda, BitString(params.n));
    pop.ranks.assign(params.lambda, 0);

    for (std::uint64_t t = 0; t < params.max_generations; ++t) {
        const PopulationSampler sampler(model);
        bool optimum_seen = false;
        for (std::size_t k = 0; k < params.lambda; ++k) {
            sampler.sample_into(pop.members[k], rng);
            optimum_seen = optimum_seen || Problem::is_optimal(pop.members[k]);
        }
        record.generations = t + 1;
        record.evaluations = params.lambda * (t + 1);
        if (optimum_seen) {
            record.success = true;
            return record;
        }
        if (!problem.uses_lex_order()) {
            for (std::size_t k = 0; k < params.lambda; ++k)
                pop.ranks[k] = problem.rank(pop.members[k]);
        }
        pop.sorted = false;
        const Population selected = truncation_select(pop, params.mu, problem, rng);
        model = update_model(model, selected, params.rho);
    }
    return record;
}

}  // namespace edalab
