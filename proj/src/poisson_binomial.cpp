#include "edalab/poisson_binomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edalab {

namespace {

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double t = s - a;
    e = (a - (s - t)) + (b - t);
}

inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

// Neumaier-compensated accumulation.
struct Accumulator {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double t, e;
        two_sum(sum, v, t, e);
        sum = t;
        comp += e;
    }
    double value() const { return sum + comp; }
};

}  // namespace

PoissonBinomial::PoissonBinomial(std::vector<double> probs) : probs_(std::move(probs)) {
    Accumulator m, v;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("PoissonBinomial: probability outside [0, 1]");
        m.add(p);
        v.add(p * (1.0 - p));
    }
    mean_ = m.value();
    variance_ = std::max(0.0, v.value());
}

const std::vector<double>& PoissonBinomial::pmf() const {
    if (!pmf_.empty() || probs_.empty()) {
        if (pmf_.empty()) pmf_.assign(1, 1.0);
        return pmf_;
    }
    const std::size_t k = probs_.size();
    // main masses plus carried rounding residue
    std::vector<double> m(k + 1, 0.0), c(k + 1, 0.0);
    m[0] = 1.0;
    for (std::size_t t = 0; t < k; ++t) {
        const double p = probs_[t];
        const double q = 1.0 - p;
        for (std::size_t y = t + 2; y-- > 0;) {  // masses occupy 0..t+1 afterwards
            double keep, keep_err, move, move_err, s, s_err;
            two_prod(m[y], q, keep, keep_err);
            two_prod(y > 0 ? m[y - 1] : 0.0, p, move, move_err);
            two_sum(keep, move, s, s_err);
            const double carried = c[y] * q + (y > 0 ? c[y - 1] : 0.0) * p;
            m[y] = s;
            c[y] = carried + keep_err + move_err + s_err;
        }
    }
    pmf_.resize(k + 1);
    for (std::size_t y = 0; y <= k; ++y) pmf_[y] = std::max(0.0, m[y] + c[y]);
    return pmf_;
}

double PoissonBinomial::pmf_at(std::int64_t y) const {
    if (y < 0 || y > static_cast<std::int64_t>(trials())) return 0.0;
    return pmf()[static_cast<std::size_t>(y)];
}

double PoissonBinomial::tail_geq(std::int64_t y) const {
    const auto k = static_cast<std::int64_t>(trials());
    if (y <= 0) return 1.0;
    if (y > k) return 0.0;
    const auto& masses = pmf();
    Accumulator acc;
    for (std::int64_t i = k; i >= y; --i) acc.add(masses[static_cast<std::size_t>(i)]);
    return std::min(1.0, acc.value());
}

double PoissonBinomial::prob_greater(double x) const {
    // Y is integer valued: Pr(Y > x) = Pr(Y >= floor(x) + 1).
    if (x < 0.0) return 1.0;
    return tail_geq(static_cast<std::int64_t>(std::floor(x)) + 1);
}

double PoissonBinomial::prob_geq(double x) const {
    if (x <= 0.0) return 1.0;
    // Tolerate rounding noise in thresholds that are integral in exact
    // arithmetic; 1e-9 is far above pmf accumulation error and far below one.
    const double adjusted = x - 1e-9 * std::max(1.0, std::fabs(x));
    return tail_geq(static_cast<std::int64_t>(std::ceil(adjusted)));
}

BoundReport check_feige(const PoissonBinomial& d, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("check_feige: delta must be > 0");
    BoundReport r;
    r.lhs = d.prob_greater(d.mean() - delta);
    r.rhs = std::min(1.0 / 13.0, delta / (1.0 + delta));
    r.satisfied = r.lhs >= r.rhs;
    return r;
}

BoundReport check_anticoncentration(const PoissonBinomial& d) {
    const auto& masses = d.pmf();
    const double peak = *std::max_element(masses.begin(), masses.end());
    BoundReport r;
    r.lhs = std::sqrt(d.variance()) * peak;
    r.rhs = kAntiConcentrationEta + kAntiConcentrationSlack;
    r.satisfied = r.lhs <= r.rhs;
    return r;
}

BoundReport check_integer_mean_median(const PoissonBinomial& d) {
    const double mean = d.mean();
    const double nearest = std::round(mean);
    if (std::fabs(mean - nearest) > 1e-9)
        throw std::invalid_argument("check_integer_mean_median: E[Y] is not an integer");
    BoundReport r;
    r.lhs = d.tail_geq(static_cast<std::int64_t>(nearest));
    r.rhs = 0.5;
    r.satisfied = r.lhs >= r.rhs;
    return r;
}

BoundReport check_pmin_quarter_bound(const PoissonBinomial& d) {
    for (double p : d.probs())
        if (p < 0.25)
            throw std::invalid_argument("check_pmin_quarter_bound: requires all p >= 1/4");
    BoundReport r;
    r.lhs = d.prob_geq(d.mean());
    r.rhs = kPminQuarterConstant;
    r.satisfied = r.lhs >= r.rhs;
    return r;
}

BoundReport check_ce_lemma(const PoissonBinomial& d, double dstar, double p_min) {
    if (!(p_min > 0.0)) throw std::invalid_argument("check_ce_lemma: p_min must be > 0");
    if (!(dstar >= 1.0 / p_min))
        throw std::invalid_argument("check_ce_lemma: requires dstar >= 1/p_min");
    for (double p : d.probs())
        if (p < p_min) throw std::invalid_argument("check_ce_lemma: requires all p >= p_min");
    const auto k = static_cast<double>(d.trials());
    const double mean = d.mean();
    const double threshold =
        std::min(mean + dstar * std::sqrt(k - std::floor(mean)), k);
    BoundReport r;
    r.lhs = d.prob_geq(threshold);
    r.rhs = 0.0;
    r.satisfied = r.lhs > 0.0;
    return r;
}

}  // namespace edalab
