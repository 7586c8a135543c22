#include "edalab/level_theory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace edalab {

namespace {

constexpr double kE = 2.718281828459045235360287;

[[noreturn]] void regime_fail(const std::string& label, const std::string& inequality,
                              const std::string& got) {
    throw RegimeError(label + ": regime violation, requires " + inequality + " (got " +
                      got + ")");
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

double LevelPartition::z_star() const {
    double z_min = 1.0;
    for (double zj : z) z_min = std::min(z_min, zj);
    return z_min;
}

LevelSequence level_sequence(std::uint64_t n, double d) {
    if (n < 1) throw std::invalid_argument("level_sequence: n must be >= 1");
    if (!(d > 0.0 && d <= 1.0))
        throw std::invalid_argument("level_sequence: d must be in (0, 1]");

    LevelSequence seq;
    seq.n = n;
    seq.d = d;
    seq.f.push_back(0);
    while (seq.f.back() < n) {
        const double gap = static_cast<double>(n - seq.f.back());
        const auto step = static_cast<std::uint64_t>(std::ceil(d * std::sqrt(gap)));
        const std::uint64_t next = seq.f.back() + std::max<std::uint64_t>(1, step);
        if (next > n)
            throw std::logic_error("level_sequence: recurrence overshot n");
        seq.f.push_back(next);
    }
    seq.ell = seq.f.size() - 1;

    const double root = std::sqrt(static_cast<double>(n));
    const auto ell = static_cast<double>(seq.ell);
    if (!(ell > root / (d + 1.0)) || !(ell < 2.0 * root / d))
        throw std::logic_error("level_sequence: level count outside proven bounds");
    return seq;
}

double g3_min_population(const LevelPartition& p) {
    return (4.0 / (p.gamma0 * p.delta * p.delta)) *
           std::log(128.0 * static_cast<double>(p.m) / (p.z_star() * p.delta * p.delta));
}

double level_based_bound(const LevelPartition& p, double lambda) {
    const double delta = p.delta;
    double sum = 0.0, comp = 0.0;
    for (double zj : p.z) {
        const double term =
            lambda * std::log(6.0 * delta * lambda / (4.0 + zj * delta * lambda)) +
            1.0 / zj;
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return (8.0 / (delta * delta)) * (sum + comp);
}

LevelPartition preset_leadingones(std::size_t n, std::size_t mu, std::size_t lambda) {
    if (n < 1 || mu < 1 || lambda <= mu)
        throw RegimeError("leadingones preset: requires n >= 1 and lambda > mu >= 1");
    const double ratio = static_cast<double>(lambda) / (kE * static_cast<double>(mu));
    if (ratio <= 1.0)
        regime_fail("leadingones preset", "lambda > e*mu",
                    "lambda/(e*mu) = " + fmt(ratio));
    LevelPartition p;
    p.label = "leadingones";
    p.m = n + 1;
    p.z.assign(n, 1.0 / (kE * static_cast<double>(n)));
    p.delta = std::min(1.0, ratio - 1.0);
    p.gamma0 = static_cast<double>(mu) / static_cast<double>(lambda);
    return p;
}

LevelPartition preset_onemax_small(std::size_t n, std::size_t mu, std::size_t lambda,
                                   double c, double a) {
    if (!(c > 0.0 && c < 1.0))
        throw RegimeError("onemax-small preset: requires c in (0, 1)");
    if (n < 2 || mu < 1 || lambda <= mu)
        throw RegimeError("onemax-small preset: requires n >= 2 and lambda > mu >= 1");

    const double nd = static_cast<double>(n);
    const double mu_cap = std::sqrt(nd * (1.0 - c));
    if (static_cast<double>(mu) > mu_cap)
        regime_fail("onemax-small preset", "mu <= sqrt(n(1-c))",
                    "mu = " + fmt(static_cast<double>(mu)) + ", cap = " + fmt(mu_cap));
    const double one_plus_delta = (1.0 - c) * static_cast<double>(lambda) /
                                  (13.0 * kE * static_cast<double>(mu));
    if (one_plus_delta <= 1.0)
        regime_fail("onemax-small preset", "lambda > (13e/(1-c)) mu",
                    "(1-c) lambda / (13 e mu) = " + fmt(one_plus_delta));

    LevelPartition p;
    p.label = "onemax-small";
    p.m = n + 1;
    p.z.resize(n);
    for (std::size_t j = 1; j <= n; ++j)
        p.z[j - 1] = c * static_cast<double>(n - j + 1) / nd;
    p.delta = std::min(1.0, one_plus_delta - 1.0);
    p.gamma0 = static_cast<double>(mu) / static_cast<double>(lambda);
    if (static_cast<double>(mu) < a * std::log(nd))
        p.warnings.push_back("advisory: mu < a ln n with a = " + fmt(a) +
                             " (the analysis only needs some constant a)");
    return p;
}

double onemax_large_max_spacing(double psi) {
    if (!(psi > 0.0 && psi <= 1.0))
        throw std::invalid_argument("onemax_large_max_spacing: psi must be in (0, 1]");
    return (-1.0 + std::sqrt(1.0 + 4.0 / (psi * psi))) * psi * psi / 2.0;
}

LevelPartition preset_onemax_large(std::size_t n, std::size_t mu, std::size_t lambda,
                                   const OnemaxLargeOptions& options) {
    if (n < 2 || mu < 1 || lambda <= mu)
        throw RegimeError("onemax-large preset: requires n >= 2 and lambda > mu >= 1");
    if (!(options.kappa > 0.0 && options.kappa <= 1.0))
        throw RegimeError("onemax-large preset: requires kappa in (0, 1]");
    const double d2 = onemax_large_max_spacing(options.psi);
    if (!(options.d > 0.0) || options.d > d2)
        regime_fail("onemax-large preset", "0 < d <= d_2(psi)",
                    "d = " + fmt(options.d) + ", d_2 = " + fmt(d2));

    const double ratio = options.psi * static_cast<double>(lambda) /
                         (kE * static_cast<double>(mu));
    if (ratio <= 1.0)
        regime_fail("onemax-large preset", "gamma0 <= psi/((1+delta) e) for some delta > 0",
                    "psi lambda / (e mu) = " + fmt(ratio));

    const LevelSequence seq = level_sequence(n, options.d);

    LevelPartition p;
    p.label = "onemax-large";
    p.m = seq.ell + 1;
    p.z.assign(seq.ell, options.kappa);
    p.delta = std::min(1.0, ratio - 1.0);
    p.gamma0 = static_cast<double>(mu) / static_cast<double>(lambda);
    const double nd = static_cast<double>(n);
    if (static_cast<double>(mu) < options.c_regime * std::sqrt(nd) * std::log(nd))
        p.warnings.push_back("advisory: mu < c sqrt(n) ln n with c = " +
                             fmt(options.c_regime));
    return p;
}

bool check_inequality_g1(double n, double d, double f_prev, double ell,
                         double expectation) {
    if (!(d > 0.0 && d <= 1.0))
        throw std::invalid_argument("check_inequality_g1: d must be in (0, 1]");
    if (!(n >= 1.0) || !(f_prev >= 0.0) || f_prev > n - 1.0)
        throw std::invalid_argument("check_inequality_g1: requires 0 <= f_prev <= n-1");
    if (!(ell >= 0.0) || ell > n)
        throw std::invalid_argument("check_inequality_g1: requires 0 <= ell <= n");
    if (expectation < f_prev - ell / n || expectation > n)
        throw std::invalid_argument(
            "check_inequality_g1: requires f_prev - ell/n <= expectation <= n");

    const double lhs = expectation + d * std::sqrt(n - expectation);
    const double rhs = f_prev + d * std::sqrt(n - f_prev);
    return lhs >= rhs - 1e-12 * std::max(1.0, std::fabs(rhs));
}

namespace {

// Borders-only configuration of the G1 step: the j-1 covered positions at
// the upper border, everything else pessimistically at the lower border.
MarginalModel border_model(std::size_t n, std::size_t level) {
    MarginalModel m = MarginalModel::uniform(n);
    for (std::size_t i = 0; i < n; ++i)
        m.p[i] = (i + 1 <= level - 1) ? m.upper_border() : m.lower_border();
    return m;
}

// Large-mu configuration: marginals >= 1/4 with the mean pushed down to
// f_{j-1} and the weight majorized into leading all-one positions, the shape
// the tail lemma identifies as least favourable.
MarginalModel large_mu_model(std::size_t n, double target_mean) {
    MarginalModel m = MarginalModel::uniform(n);
    const double nd = static_cast<double>(n);
    if (target_mean <= nd / 4.0) {
        for (auto& p : m.p) p = 0.25;
        return m;
    }
    auto ones = static_cast<std::size_t>(std::floor((4.0 * target_mean - nd) / 3.0));
    ones = std::min(ones, n - 1);
    double q = target_mean - static_cast<double>(ones) -
               (nd - static_cast<double>(ones) - 1.0) * 0.25;
    while (q > 1.0 && ones + 1 < n) {
        ++ones;
        q = target_mean - static_cast<double>(ones) -
            (nd - static_cast<double>(ones) - 1.0) * 0.25;
    }
    q = std::clamp(q, 0.25, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        m.p[i] = i < ones ? 1.0 : (i == ones ? q : 0.25);
    return m;
}

}  // namespace

std::vector<ZjEstimate> empirical_zj(PresetKind preset, std::size_t n,
                                     const LevelPartition& partition,
                                     const std::vector<std::size_t>& levels,
                                     std::uint64_t samples, std::uint64_t seed,
                                     const LevelSequence* sequence) {
    if (preset == PresetKind::onemax_large && sequence == nullptr)
        throw std::invalid_argument("empirical_zj: onemax-large needs its level sequence");

    std::vector<ZjEstimate> out;
    out.reserve(levels.size());
    for (std::size_t j : levels) {
        if (j < 1 || j + 1 > partition.m)
            throw std::invalid_argument("empirical_zj: level outside [1, m-1]");

        MarginalModel model;
        std::uint64_t threshold = 0;  // offspring upgrades iff statistic >= threshold
        switch (preset) {
            case PresetKind::leadingones:
            case PresetKind::onemax_small:
                model = border_model(n, j);
                threshold = j;
                break;
            case PresetKind::onemax_large:
                model = large_mu_model(n, static_cast<double>(sequence->f[j - 1]));
                threshold = sequence->f[j];
                break;
        }

        const PopulationSampler sampler(model);
        Rng rng(derive_seed(seed, {hash_tag("empirical-zj"), j}));
        BitString y(n);
        std::uint64_t hits = 0;
        for (std::uint64_t s = 0; s < samples; ++s) {
            sampler.sample_into(y, rng);
            const std::uint64_t stat =
                preset == PresetKind::leadingones ? leadingones(y) : onemax(y);
            hits += stat >= threshold;
        }
        out.push_back({j, static_cast<double>(hits) / static_cast<double>(samples),
                       partition.z[j - 1], samples});
    }
    return out;
}

}  // namespace edalab
