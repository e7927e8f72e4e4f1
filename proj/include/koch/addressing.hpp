#pragma once

// Boundary-side addresses over the alphabet {0,1,2,3,4,5} and the word
// rewrites used by the symbolic dynamics: truncation and straightening.
//
// A side of the level-n boundary carries a word of length n+1.  The first
// symbol names one of the three level-0 sides: 5 for the base, then 1 and 3
// for the remaining sides in counterclockwise order.  Each later symbol picks
// one of the four level-(k+1) pieces replacing a level-k side.  The two bump
// sides are always 1 and 3 in counterclockwise order; the digits of the two
// retained thirds depend on the key, the nearest earlier symbol in {1,3}.
// Words descending from the base with no bump symbol use key 1.

#include <array>
#include <cstddef>
#include <string>

#include "koch/rational.hpp"

namespace koch {

using AddressWord = std::string;

inline bool is_bump_symbol(char c) { return c == '1' || c == '3'; }

inline char third_start_digit(char key) { return key == '1' ? '4' : '2'; }
inline char third_end_digit(char key) { return key == '1' ? '2' : '0'; }

inline char key_of(const AddressWord& w) {
    for (auto it = w.rbegin(); it != w.rend(); ++it)
        if (is_bump_symbol(*it)) return *it;
    if (!w.empty() && w.front() == '5') return '1';
    throw domain_error("key_of: no key in \"" + w + "\"");
}

inline bool is_valid_side_address(const AddressWord& w) {
    if (w.empty()) return false;
    char root = w.front();
    if (root != '5' && root != '1' && root != '3') return false;
    char key = root == '3' ? '3' : '1';
    for (std::size_t i = 1; i < w.size(); ++i) {
        char c = w[i];
        if (!is_bump_symbol(c) && c != third_start_digit(key) && c != third_end_digit(key))
            return false;
        if (is_bump_symbol(c)) key = c;
    }
    return true;
}

struct ChildDigits {
    char start_third;
    char bump_first;
    char bump_second;
    char end_third;

    std::array<char, 4> in_order() const {
        return {start_third, bump_first, bump_second, end_third};
    }
};

inline ChildDigits child_digits(const AddressWord& parent) {
    if (!is_valid_side_address(parent))
        throw domain_error("child_digits: invalid address \"" + parent + "\"");
    return key_of(parent) == '1' ? ChildDigits{'4', '1', '3', '2'}
                                 : ChildDigits{'2', '1', '3', '0'};
}

inline std::array<AddressWord, 4> child_words(const AddressWord& parent) {
    std::array<AddressWord, 4> out;
    auto d = child_digits(parent).in_order();
    for (int i = 0; i < 4; ++i) out[i] = parent + d[i];
    return out;
}

inline AddressWord truncate(const AddressWord& w, std::size_t m) {
    if (m > w.size()) throw domain_error("truncate: length exceeds word");
    return w.substr(0, m);
}

// Rewrites the {1,3}-subsequence to strictly alternate starting from its
// first value.  Whenever one of those symbols is changed, the 0 and 4
// symbols in the gap that follows it are swapped; 2 and 5 are always kept.
// Symbols before the first 1 or 3 are untouched.  Idempotent by
// construction: the output's {1,3}-subsequence already alternates.
inline std::string straighten(const std::string& w) {
    std::string out = w;
    char expected = 0;
    bool swap_gap = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        char c = w[i];
        if (is_bump_symbol(c)) {
            if (expected == 0) expected = c;
            swap_gap = c != expected;
            out[i] = expected;
            expected = expected == '1' ? '3' : '1';
        } else if (expected != 0 && swap_gap) {
            if (c == '0')
                out[i] = '4';
            else if (c == '4')
                out[i] = '0';
        }
    }
    return out;
}

}  // namespace koch
