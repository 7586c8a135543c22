#pragma once
// Minimal arbitrary-width unsigned integer.
//
// Two users: the exact BinVal fitness (weights up to 2^(n-1) with n in the
// thousands) and the exact dyadic-rational cross-check of the
// Poisson-Binomial recurrence in the tests. Only the operations those need
// are provided: add, multiply by a 64-bit word, shifts, comparison, decimal
// rendering and a double approximation.

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

namespace edalab {

class BigUint {
public:
    BigUint() = default;

    explicit BigUint(std::uint64_t v) {
        if (v) words_.push_back(v);
    }

    static BigUint power_of_two(std::size_t bit) {
        BigUint r;
        r.words_.assign(bit / 64 + 1, 0);
        r.words_.back() = 1ULL << (bit % 64);
        return r;
    }

    bool is_zero() const { return words_.empty(); }

    std::size_t bit_length() const {
        if (words_.empty()) return 0;
        std::size_t bits = 64 * (words_.size() - 1);
        std::uint64_t top = words_.back();
        while (top) {
            ++bits;
            top >>= 1;
        }
        return bits;
    }

    bool bit(std::size_t i) const {
        const std::size_t w = i / 64;
        if (w >= words_.size()) return false;
        return (words_[w] >> (i % 64)) & 1ULL;
    }

    void set_bit(std::size_t i) {
        const std::size_t w = i / 64;
        if (w >= words_.size()) words_.resize(w + 1, 0);
        words_[w] |= 1ULL << (i % 64);
    }

    BigUint& operator+=(const BigUint& o) {
        if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            unsigned __int128 s = carry + words_[i];
            if (i < o.words_.size()) s += o.words_[i];
            words_[i] = static_cast<std::uint64_t>(s);
            carry = s >> 64;
        }
        if (carry) words_.push_back(static_cast<std::uint64_t>(carry));
        return *this;
    }

    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }

    BigUint& mul_u64(std::uint64_t m) {
        if (m == 0) {
            words_.clear();
            return *this;
        }
        unsigned __int128 carry = 0;
        for (auto& w : words_) {
            unsigned __int128 p = static_cast<unsigned __int128>(w) * m + carry;
            w = static_cast<std::uint64_t>(p);
            carry = p >> 64;
        }
        if (carry) words_.push_back(static_cast<std::uint64_t>(carry));
        return *this;
    }

    BigUint& operator<<=(std::size_t bits) {
        if (is_zero() || bits == 0) return *this;
        const std::size_t word_shift = bits / 64;
        const std::size_t bit_shift = bits % 64;
        words_.insert(words_.begin(), word_shift, 0);
        if (bit_shift) {
            std::uint64_t carry = 0;
            for (std::size_t i = word_shift; i < words_.size(); ++i) {
                const std::uint64_t next = words_[i] >> (64 - bit_shift);
                words_[i] = (words_[i] << bit_shift) | carry;
                carry = next;
            }
            if (carry) words_.push_back(carry);
        }
        return *this;
    }

    // Three-way compare: -1, 0, +1.
    int compare(const BigUint& o) const {
        if (words_.size() != o.words_.size())
            return words_.size() < o.words_.size() ? -1 : 1;
        for (std::size_t i = words_.size(); i-- > 0;) {
            if (words_[i] != o.words_[i]) return words_[i] < o.words_[i] ? -1 : 1;
        }
        return 0;
    }

    friend bool operator==(const BigUint& a, const BigUint& b) { return a.compare(b) == 0; }
    friend bool operator<(const BigUint& a, const BigUint& b) { return a.compare(b) < 0; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return a.compare(b) <= 0; }

    // Nearest double <= exact magnitude error of one ulp; enough for ratio
    // and tolerance checks.
    double to_double() const {
        double r = 0.0;
        for (std::size_t i = words_.size(); i-- > 0;)
            r = r * 18446744073709551616.0 + static_cast<double>(words_[i]);
        return r;
    }

    std::string to_decimal_string() const {
        if (is_zero()) return "0";
        std::vector<std::uint64_t> tmp = words_;
        std::string out;
        while (!tmp.empty()) {
            // divide by 10^18, collecting the remainder
            unsigned __int128 rem = 0;
            for (std::size_t i = tmp.size(); i-- > 0;) {
                unsigned __int128 cur = (rem << 64) | tmp[i];
                tmp[i] = static_cast<std::uint64_t>(cur / 1000000000000000000ULL);
                rem = cur % 1000000000000000000ULL;
            }
            while (!tmp.empty() && tmp.back() == 0) tmp.pop_back();
            std::string chunk = std::to_string(static_cast<std::uint64_t>(rem));
            if (!tmp.empty()) chunk.insert(0, 18 - chunk.size(), '0');
            out.insert(0, chunk);
        }
        return out;
    }

private:
    // little-endian, no trailing zero words
    std::vector<std::uint64_t> words_;
};

}  // namespace edalab
