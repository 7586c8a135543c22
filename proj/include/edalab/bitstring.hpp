#pragma once
// Fixed-length binary search points, bit-packed into 64-bit words.
//
// Logical position i (1-based, as in the benchmark definitions) maps to word
// (i-1)/64, bit 63-((i-1)%64), i.e. position 1 sits in the most significant
// bit of word 0. With the unused low bits of the last word kept at zero this
// layout makes three things one-liners:
//   * ones count        -> popcount per word,
//   * leading-ones      -> countl_one per word,
//   * binary-value order-> lexicographic comparison of the word array.

#include <bit>
#include <cassert>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace edalab {

class BitString {
public:
    BitString() = default;

    explicit BitString(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static BitString from_string(std::string_view bits) {
        BitString x(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            assert(bits[i] == '0' || bits[i] == '1');
            if (bits[i] == '1') x.set(i + 1, true);
        }
        return x;
    }

    static BitString all_ones(std::size_t n) {
        BitString x(n);
        for (auto& w : x.words_) w = ~0ULL;
        x.clear_padding();
        return x;
    }

    std::size_t size() const { return n_; }
    std::size_t word_count() const { return words_.size(); }
    const std::uint64_t* words() const { return words_.data(); }
    std::uint64_t* words() { return words_.data(); }

    // 1-based access, matching the x_1..x_n convention.
    bool get(std::size_t i) const {
        assert(i >= 1 && i <= n_);
        return (words_[(i - 1) >> 6] >> (63 - ((i - 1) & 63))) & 1ULL;
    }

    void set(std::size_t i, bool value) {
        assert(i >= 1 && i <= n_);
        const std::uint64_t mask = 1ULL << (63 - ((i - 1) & 63));
        if (value)
            words_[(i - 1) >> 6] |= mask;
        else
            words_[(i - 1) >> 6] &= ~mask;
    }

    bool all_set() const {
        if (n_ == 0) return true;
        const std::size_t full = n_ / 64;
        for (std::size_t w = 0; w < full; ++w)
            if (words_[w] != ~0ULL) return false;
        const std::size_t rem = n_ & 63;
        if (rem) {
            const std::uint64_t mask = ~0ULL << (64 - rem);
            if ((words_.back() & mask) != mask) return false;
        }
        return true;
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 1; i <= n_; ++i)
            if (get(i)) s[i - 1] = '1';
        return s;
    }

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }

    // Padding bits (past position n in the last word) must stay zero.
    void clear_padding() {
        const std::size_t rem = n_ & 63;
        if (rem && !words_.empty()) words_.back() &= ~0ULL << (64 - rem);
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

// OneMax(x) = number of ones.
inline std::uint64_t onemax(const BitString& x) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < x.word_count(); ++w)
        c += static_cast<std::uint64_t>(std::popcount(x.words()[w]));
    return c;
}

// LeadingOnes(x) = length of the maximal all-ones prefix. The zero padding in
// the last word terminates the scan at position n for the all-ones string.
inline std::uint64_t leadingones(const BitString& x) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < x.word_count(); ++w) {
        const int ones = std::countl_one(x.words()[w]);
        c += static_cast<std::uint64_t>(ones);
        if (ones < 64) break;
    }
    return c < x.size() ? c : x.size();
}

// Strict BinVal order without materializing the 2^n-scale value: with the
// MSB-first packing, comparing word arrays lexicographically compares
// sum 2^(n-i) x_i.
inline bool binval_less(const BitString& a, const BitString& b) {
    assert(a.size() == b.size());
    for (std::size_t w = 0; w < a.word_count(); ++w) {
        if (a.words()[w] != b.words()[w]) return a.words()[w] < b.words()[w];
    }
    return false;
}

inline BitString complement(const BitString& x) {
    BitString y(x.size());
    for (std::size_t w = 0; w < x.word_count(); ++w) y.words()[w] = ~x.words()[w];
    y.clear_padding();
    return y;
}

}  // namespace edalab
