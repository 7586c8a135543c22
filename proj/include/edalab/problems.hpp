#pragma once
// The three benchmark functions over {0,1}^n and the comparison machinery the
// optimizer needs. OneMax counts ones, LeadingOnes the all-ones prefix,
// BinVal reads the string as a binary number with x_1 most significant. All
// three are maximized by the all-ones string.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "edalab/bigint.hpp"
#include "edalab/bitstring.hpp"

namespace edalab {

enum class ProblemKind { onemax, leadingones, binval };

inline std::string to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::onemax: return "onemax";
        case ProblemKind::leadingones: return "leadingones";
        case ProblemKind::binval: return "binval";
    }
    return "?";
}

inline ProblemKind problem_from_string(std::string_view s) {
    if (s == "onemax") return ProblemKind::onemax;
    if (s == "leadingones") return ProblemKind::leadingones;
    if (s == "binval") return ProblemKind::binval;
    throw std::invalid_argument("unknown problem: " + std::string(s));
}

// Exact BinVal value; needs arbitrary width well before n = 64. Used for
// spot-checks and reporting, not in the sorting hot path (binval_less covers
// that without materializing 2^n-scale integers).
inline BigUint binval(const BitString& x) {
    BigUint v;
    const std::size_t n = x.size();
    // The packed words already are the big-endian binary number times
    // 2^(word_count*64 - n); reassemble with that shift removed.
    for (std::size_t i = 1; i <= n; ++i) {
        if (x.get(i)) v.set_bit(n - i);
    }
    return v;
}

struct Problem {
    ProblemKind kind;

    // Scalar sort key for the two unimodal counters; unused for BinVal,
    // which is ordered lexicographically on the packed words.
    std::uint64_t rank(const BitString& x) const {
        switch (kind) {
            case ProblemKind::onemax: return onemax(x);
            case ProblemKind::leadingones: return leadingones(x);
            case ProblemKind::binval: return 0;
        }
        return 0;
    }

    bool uses_lex_order() const { return kind == ProblemKind::binval; }

    // Strictly fitter, given precomputed ranks.
    bool fitter(const BitString& a, std::uint64_t rank_a, const BitString& b,
                std::uint64_t rank_b) const {
        if (uses_lex_order()) return binval_less(b, a);
        return rank_a > rank_b;
    }

    static bool is_optimal(const BitString& x) { return x.all_set(); }
};

}  // namespace edalab
