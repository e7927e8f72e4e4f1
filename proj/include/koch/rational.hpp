// Exact rational arithmetic: the carrier type for all coordinates, plus
// parsing/formatting of the "p/q" wire form and small integer helpers.
#ifndef koch_rational_hpp
#define koch_rational_hpp

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#ifdef KOCH_USE_GMP
#include <boost/multiprecision/gmp.hpp>
#else
#include <boost/multiprecision/cpp_int.hpp>
#endif

namespace koch {

#ifdef KOCH_USE_GMP
using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
#else
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
#endif

// Domain errors: bad inputs (exit code 1 at the CLI).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invariant violations: internal bugs surfaced loudly (exit code 2 at the CLI).
struct invariant_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline BigInt pow_int(BigInt base, unsigned exp) {
    BigInt r = 1;
    while (exp) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

inline BigInt pow3(unsigned n) { return pow_int(3, n); }

inline BigInt floor_div(const BigInt& n, const BigInt& d) {
    BigInt q = n / d;
    if ((n % d) != 0 && ((n < 0) != (d < 0))) --q;
    return q;
}

inline BigInt floor_rational(const Rational& r) {
    return floor_div(numerator(r), denominator(r));
}

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

// Canonical wire form "p/q", reduced, q >= 1, zero as "0/1".
inline std::string format_rational(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "p/q" or a bare integer "p".
inline std::optional<Rational> parse_rational(std::string_view text) {
    auto parse_int = [](std::string_view s, BigInt& out) -> bool {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9') return false;
        out = BigInt(std::string(s));
        return true;
    };
    auto slash = text.find('/');
    BigInt p, q = 1;
    if (slash == std::string_view::npos) {
        if (!parse_int(text, p)) return std::nullopt;
    } else {
        if (!parse_int(text.substr(0, slash), p)) return std::nullopt;
        if (!parse_int(text.substr(slash + 1), q)) return std::nullopt;
        if (q == 0) return std::nullopt;
    }
    return Rational(p, q);
}

}  // namespace koch

#endif
