#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "edalab/bigint.hpp"
#include "edalab/poisson_binomial.hpp"
#include "edalab/rng.hpp"
#include "edalab/verify.hpp"

using namespace edalab;

namespace {

// Oracle 1: brute-force enumeration of all 2^k outcomes (k <= ~20).
std::vector<double> pmf_by_enumeration(const std::vector<double>& p) {
    const std::size_t k = p.size();
    std::vector<double> out(k + 1, 0.0);
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        double prob = 1.0;
        int ones = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if ((mask >> i) & 1) {
                prob *= p[i];
                ++ones;
            } else {
                prob *= 1.0 - p[i];
            }
        }
        out[static_cast<std::size_t>(ones)] += prob;
    }
    return out;
}

// Oracle 2: the same recurrence in exact dyadic-rational arithmetic. Every
// double in [0,1] is num/2^shift; the DP numerators stay exact integers over
// the common denominator 2^(sum shifts).
struct Dyadic {
    std::uint64_t num = 0;
    int shift = 0;  // p = num / 2^shift, num <= 2^shift <= 2^62
};

Dyadic to_dyadic(double p) {
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    Dyadic d;
    d.num = static_cast<std::uint64_t>(std::ldexp(p, 53));
    d.shift = 53;
    REQUIRE(std::ldexp(static_cast<double>(d.num), -53) == p);  // p must be a 53-bit dyadic
    while (d.shift > 0 && (d.num & 1) == 0) {
        d.num >>= 1;
        --d.shift;
    }
    return d;
}

double top_scaled(const BigUint& v, long denominator_bits) {
    if (v.is_zero()) return 0.0;
    const long bits = static_cast<long>(v.bit_length());
    std::uint64_t top = 0;
    for (long b = bits - 1; b >= std::max<long>(0, bits - 53); --b)
        top = (top << 1) | static_cast<std::uint64_t>(v.bit(static_cast<std::size_t>(b)));
    const long kept = std::min<long>(bits, 53);
    return std::ldexp(static_cast<double>(top), static_cast<int>(bits - kept - denominator_bits));
}

std::vector<double> pmf_exact_dyadic(const std::vector<double>& probs) {
    std::vector<BigUint> numer(probs.size() + 1);
    numer[0] = BigUint(1);
    long denominator_bits = 0;
    std::size_t filled = 0;
    for (double p : probs) {
        const Dyadic d = to_dyadic(p);
        const std::uint64_t success = d.num;
        const std::uint64_t failure = (1ULL << d.shift) - d.num;
        for (std::size_t y = filled + 2; y-- > 0;) {
            BigUint keep = numer[y];
            keep.mul_u64(failure);
            if (y > 0) {
                BigUint move = numer[y - 1];
                move.mul_u64(success);
                keep += move;
            }
            numer[y] = keep;
        }
        denominator_bits += d.shift;
        ++filled;
    }
    std::vector<double> out(probs.size() + 1);
    for (std::size_t y = 0; y < out.size(); ++y) out[y] = top_scaled(numer[y], denominator_bits);
    return out;
}

std::vector<double> random_probs(Rng& rng, std::size_t k, double lo = 0.0, double hi = 1.0) {
    std::vector<double> p(k);
    for (auto& v : p) v = rng.uniform(lo, hi);
    return p;
}

double binomial_coefficient(int k, int y) {
    double c = 1.0;
    for (int i = 0; i < y; ++i) c = c * (k - i) / (i + 1);
    return c;
}

}  // namespace

TEST_CASE("pmf matches the worked examples") {
    const PoissonBinomial two_coins({0.5, 0.5});
    REQUIRE(two_coins.pmf().size() == 3);
    CHECK(two_coins.pmf_at(0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(two_coins.pmf_at(1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(two_coins.pmf_at(2) == doctest::Approx(0.25).epsilon(1e-14));

    const PoissonBinomial degenerate({1.0, 0.0});
    CHECK(degenerate.pmf_at(0) == 0.0);
    CHECK(degenerate.pmf_at(1) == 1.0);
    CHECK(degenerate.pmf_at(2) == 0.0);

    const PoissonBinomial mixed({0.1, 0.2, 0.3});
    CHECK(mixed.pmf_at(0) == doctest::Approx(0.504).epsilon(1e-14));  // 0.9*0.8*0.7
    CHECK(mixed.tail_geq(3) == doctest::Approx(0.006).epsilon(1e-12));
    CHECK(mixed.tail_geq(0) == 1.0);
    CHECK(mixed.tail_geq(1) == doctest::Approx(1.0 - 0.504).epsilon(1e-12));
}

TEST_CASE("pmf agrees with the enumeration oracle") {
    Rng rng(42);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t k = 1 + rng.next_below(12);
        const auto probs = random_probs(rng, k);
        const PoissonBinomial d(probs);
        const auto oracle = pmf_by_enumeration(probs);
        for (std::size_t y = 0; y <= k; ++y)
            CHECK(d.pmf_at(static_cast<std::int64_t>(y)) ==
                  doctest::Approx(oracle[y]).epsilon(1e-11));
    }
}

TEST_CASE("pmf agrees with the exact dyadic-rational oracle up to k = 64") {
    Rng rng(7);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t k = 1 + rng.next_below(24);
        const auto probs = random_probs(rng, k);
        const PoissonBinomial d(probs);
        const auto exact = pmf_exact_dyadic(probs);
        for (std::size_t y = 0; y <= k; ++y) {
            const double got = d.pmf_at(static_cast<std::int64_t>(y));
            CHECK(std::fabs(got - exact[y]) <= 1e-13 * std::max(1.0, exact[y]));
        }
    }
    for (std::size_t k : {48u, 64u}) {
        const auto probs = random_probs(rng, k);
        const PoissonBinomial d(probs);
        const auto exact = pmf_exact_dyadic(probs);
        for (std::size_t y = 0; y <= k; ++y)
            CHECK(std::fabs(d.pmf_at(static_cast<std::int64_t>(y)) - exact[y]) <=
                  1e-13 * std::max(1.0, exact[y]));
    }
}

TEST_CASE("fair coins give exact binomial masses") {
    for (int k : {1, 4, 10, 24}) {
        const PoissonBinomial d(std::vector<double>(static_cast<std::size_t>(k), 0.5));
        for (int y = 0; y <= k; ++y) {
            const double expect = std::ldexp(binomial_coefficient(k, y), -k);
            CHECK(std::fabs(d.pmf_at(y) - expect) <= 1e-12);
        }
    }
}

TEST_CASE("pmf invariants: nonnegative, normalized, matching moments") {
    Rng rng(1234);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t k = 1 + rng.next_below(300);
        const auto probs = random_probs(rng, k);
        const PoissonBinomial d(probs);
        const auto& masses = d.pmf();
        double sum = 0.0, mean = 0.0, second = 0.0;
        for (std::size_t y = 0; y <= k; ++y) {
            REQUIRE(masses[y] >= 0.0);
            sum += masses[y];
            mean += static_cast<double>(y) * masses[y];
            second += static_cast<double>(y) * static_cast<double>(y) * masses[y];
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
        CHECK(std::fabs(mean - d.mean()) <= 1e-10 * std::max(1.0, d.mean()));
        const double var = second - mean * mean;
        CHECK(std::fabs(var - d.variance()) <= 1e-9 * std::max(1.0, d.variance()));
    }
}

TEST_CASE("pmf normalization holds at k = 10^4") {
    Rng rng(77);
    const auto probs = random_probs(rng, 10000);
    const PoissonBinomial d(probs);
    double sum = 0.0, comp = 0.0;
    for (double m : d.pmf()) {  // Neumaier, so the check is not limited by the sum itself
        const double t = sum + m;
        comp += std::fabs(sum) >= m ? (sum - t) + m : (m - t) + sum;
        sum = t;
    }
    CHECK(std::fabs(sum + comp - 1.0) <= 1e-12);
}

TEST_CASE("monte-carlo frequencies match the exact pmf") {
    const std::vector<double> probs{0.03, 0.4, 0.55, 0.71, 0.97};
    const PoissonBinomial d(probs);
    Rng rng(2024);
    const int samples = 1000000;
    std::vector<int> hits(probs.size() + 1, 0);
    for (int s = 0; s < samples; ++s) {
        int ones = 0;
        for (double p : probs) ones += rng.next_double() < p;
        ++hits[static_cast<std::size_t>(ones)];
    }
    for (std::size_t y = 0; y <= probs.size(); ++y) {
        const double expect = d.pmf_at(static_cast<std::int64_t>(y));
        const double freq = static_cast<double>(hits[y]) / samples;
        const double sigma = std::sqrt(std::max(expect * (1.0 - expect), 1e-12) / samples);
        CHECK(std::fabs(freq - expect) <= 4.0 * sigma);
    }
}

TEST_CASE("feige bound: examples and exact-DP sweep") {
    const PoissonBinomial two_coins({0.5, 0.5});
    const auto r = check_feige(two_coins, 0.5);
    CHECK(r.lhs == doctest::Approx(0.75).epsilon(1e-14));  // Pr(Y > 0.5) = Pr(Y >= 1)
    CHECK(r.rhs == doctest::Approx(1.0 / 13.0).epsilon(1e-14));
    CHECK(r.satisfied);

    // delta beyond E[Y]+1 makes the left side certain
    const auto certain = check_feige(two_coins, 2.5);
    CHECK(certain.lhs == 1.0);
    CHECK(certain.satisfied);

    const auto report = run_verification(VerifyCheck::feige, 3000, 20, 3);
    CHECK(report.violations == 0);
    CHECK(report.min_slack >= 0.0);
}

TEST_CASE("anti-concentration: binomial example and sweep") {
    // four fair coins: sigma = 1, max mass 6/16
    const PoissonBinomial coins(std::vector<double>(4, 0.5));
    const auto r = check_anticoncentration(coins);
    CHECK(std::sqrt(coins.variance()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.lhs == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(r.satisfied);

    const PoissonBinomial deterministic({1.0, 1.0});
    const auto zero_var = check_anticoncentration(deterministic);
    CHECK(zero_var.lhs == 0.0);
    CHECK(zero_var.satisfied);

    const auto report = run_verification(VerifyCheck::anticoncentration, 3000, 50, 4);
    CHECK(report.violations == 0);
}

TEST_CASE("integer-mean median: examples, contract, sweep") {
    const auto two = check_integer_mean_median(PoissonBinomial({0.5, 0.5}));
    CHECK(two.lhs == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(two.satisfied);

    const auto one = check_integer_mean_median(PoissonBinomial({1.0}));
    CHECK(one.lhs == 1.0);

    const auto quarters = check_integer_mean_median(PoissonBinomial({0.25, 0.25, 0.25, 0.25}));
    CHECK(quarters.lhs == doctest::Approx(0.68359375).epsilon(1e-12));
    CHECK(quarters.satisfied);

    CHECK_THROWS_AS(check_integer_mean_median(PoissonBinomial({0.5, 0.25})),
                    std::invalid_argument);

    const auto report = run_verification(VerifyCheck::integer_median, 3000, 40, 5);
    CHECK(report.violations == 0);
}

TEST_CASE("pmin-quarter bound: examples, contract, sweep") {
    const auto single = check_pmin_quarter_bound(PoissonBinomial({0.25}));
    CHECK(single.lhs == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(single.rhs == doctest::Approx(std::ldexp(1.0, -17)).epsilon(1e-14));
    CHECK(single.satisfied);

    const auto pair = check_pmin_quarter_bound(PoissonBinomial({0.25, 0.25}));
    CHECK(pair.lhs == doctest::Approx(0.4375).epsilon(1e-12));  // Pr(Y >= 1) = 1 - 0.75^2
    CHECK(pair.satisfied);

    CHECK_THROWS_AS(check_pmin_quarter_bound(PoissonBinomial({0.2, 0.9})),
                    std::invalid_argument);

    const auto report = run_verification(VerifyCheck::pmin_quarter, 3000, 40, 6);
    CHECK(report.violations == 0);
    CHECK(report.min_slack >= 0.0);
}

TEST_CASE("constant-tail lemma: examples, contract, sweep") {
    const auto all_one = check_ce_lemma(PoissonBinomial({1.0, 1.0, 1.0}), 4.0);
    CHECK(all_one.lhs == 1.0);  // threshold clamps to k and Y = k surely
    CHECK(all_one.satisfied);

    const auto quarters = check_ce_lemma(PoissonBinomial(std::vector<double>(4, 0.25)), 4.0);
    // threshold exceeds k, so it clamps to k: Pr(Y = 4) = (1/4)^4
    CHECK(quarters.lhs == doctest::Approx(std::pow(0.25, 4)).epsilon(1e-10));
    CHECK(quarters.satisfied);

    CHECK_THROWS_AS(check_ce_lemma(PoissonBinomial({0.5}), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(check_ce_lemma(PoissonBinomial({0.1}), 4.0), std::invalid_argument);

    const auto report = run_verification(VerifyCheck::ce, 3000, 60, 7);
    CHECK(report.violations == 0);
    CHECK(report.min_slack > 0.0);
}

TEST_CASE("case-2 auxiliary tail: Pr(Y_{2,k} >= M) >= 1/14") {
    // Configurations from the small-mu analysis: marginals X_i/mu in
    // [1/mu, 1-1/mu] with an integral total M; position 1 carries the
    // smallest marginal (with an arbitrary index the claim is false, e.g.
    // p = (39/40, 1/40)).
    Rng rng(99);
    double worst = 1.0;
    for (int rep = 0; rep < 2000; ++rep) {
        const std::uint64_t mu = 14 + rng.next_below(47);
        const std::size_t k = 2 + rng.next_below(15);
        std::vector<std::uint64_t> x(k);
        while (true) {
            std::uint64_t sum = 0;
            for (std::size_t i = 0; i + 1 < k; ++i) {
                x[i] = 1 + rng.next_below(mu - 1);
                sum += x[i];
            }
            const std::uint64_t rest = (mu - sum % mu) % mu;
            if (rest >= 1 && rest <= mu - 1) {
                x[k - 1] = rest;
                break;
            }
        }
        std::sort(x.begin(), x.end());
        std::uint64_t total = 0;
        for (auto v : x) total += v;
        const auto target = static_cast<std::int64_t>(total / mu);
        std::vector<double> rest_probs;
        for (std::size_t i = 1; i < k; ++i)
            rest_probs.push_back(static_cast<double>(x[i]) / static_cast<double>(mu));
        const PoissonBinomial d(rest_probs);
        const double tail = d.tail_geq(target);
        worst = std::min(worst, tail);
        REQUIRE(tail >= 1.0 / 14.0 - 1e-12);
    }
    CHECK(worst >= 1.0 / 14.0);
}

TEST_CASE("verification reports are deterministic and json-shaped") {
    const auto a = run_verification(VerifyCheck::feige, 500, 20, 11);
    const auto b = run_verification(VerifyCheck::feige, 500, 20, 11);
    CHECK(a.min_slack == b.min_slack);
    CHECK(a.violations == b.violations);
    const auto json = report_to_json(a);
    CHECK(json.find("\"check\": \"feige\"") != std::string::npos);
    CHECK(json.find("\"cases\": 500") != std::string::npos);
    CHECK(json.find("\"violations\": 0") != std::string::npos);
}
