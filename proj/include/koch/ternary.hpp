// Eventually periodic base-3 expansions over the digit alphabet {l,c,r}
// (serialized 0,1,2), the c-digit counter, the classification of basepoints,
// and the iterated-function-system midpoint sets.
#ifndef koch_ternary_hpp
#define koch_ternary_hpp

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "koch/rational.hpp"

namespace koch {

enum class TernaryDigit : unsigned char { l = 0, c = 1, r = 2 };

using DigitString = std::vector<TernaryDigit>;

inline std::string digits_to_string(const DigitString& d) {
    std::string s;
    s.reserve(d.size());
    for (TernaryDigit x : d) s.push_back(static_cast<char>('0' + static_cast<int>(x)));
    return s;
}

struct TernaryExpansion {
    DigitString prefix;
    DigitString cycle;  // nonempty; for terminating values the cycle is {l}
    bool terminating = false;  // true iff value = p/3^q (prefix is the finite form)
    Rational value;
    // The repeating-2 alias of a terminating value (e.g. 1/3 also reads 0.0(2)).
    std::optional<std::pair<DigitString, DigitString>> zero_two_alias;

    // 1-based digit accessor continuing into the repeating tail.
    TernaryDigit digit_at(std::size_t i) const {
        if (i <= prefix.size()) return prefix[i - 1];
        return cycle[(i - prefix.size() - 1) % cycle.size()];
    }
};

// Exact value of the digit string read as a base-3 integer, by divide and
// conquer so long cycles stay cheap.
inline BigInt digits_as_integer(const DigitString& d, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 32) {
        BigInt v = 0;
        for (std::size_t i = lo; i < hi; ++i) v = v * 3 + static_cast<int>(d[i]);
        return v;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return digits_as_integer(d, lo, mid) * pow3(static_cast<unsigned>(hi - mid)) +
           digits_as_integer(d, mid, hi);
}

// Value of 0.[prefix](cycle) in base 3, reconstructed independently of the
// Rational the expansion came from.
inline Rational reconstruct_value(const DigitString& prefix, const DigitString& cycle) {
    BigInt scale = pow3(static_cast<unsigned>(prefix.size()));
    Rational v(digits_as_integer(prefix, 0, prefix.size()), scale);
    if (!cycle.empty()) {
        BigInt cyc = pow3(static_cast<unsigned>(cycle.size())) - 1;
        v += Rational(digits_as_integer(cycle, 0, cycle.size()), cyc) / Rational(scale);
    }
    return v;
}

// Long division base 3 with remainder-cycle detection; the first repeated
// remainder yields the minimal prefix and minimal cycle.
inline TernaryExpansion expand(const Rational& x) {
    if (x < 0 || x > 1) throw domain_error("expand: value outside [0,1]");
    TernaryExpansion e;
    e.value = x;
    if (x == 1) {
        e.cycle = {TernaryDigit::r};
        return e;
    }

    DigitString digits;
    std::size_t cycle_start = 0;
    bool closed = false;

    BigInt qb = denominator(x);
    if (qb <= BigInt(std::int64_t(1) << 61)) {
        std::int64_t q = qb.convert_to<std::int64_t>();
        std::int64_t cur = numerator(x).convert_to<std::int64_t>();
        std::unordered_map<std::int64_t, std::size_t> seen;
        while (cur != 0) {
            auto [it, fresh] = seen.emplace(cur, digits.size());
            if (!fresh) {
                cycle_start = it->second;
                closed = true;
                break;
            }
            std::int64_t top = cur * 3;
            digits.push_back(static_cast<TernaryDigit>(top / q));
            cur = top % q;
        }
    } else {
        BigInt cur = numerator(x);
        std::map<BigInt, std::size_t> seen;
        while (cur != 0) {
            auto [it, fresh] = seen.emplace(cur, digits.size());
            if (!fresh) {
                cycle_start = it->second;
                closed = true;
                break;
            }
            BigInt top = cur * 3;
            digits.push_back(static_cast<TernaryDigit>((top / qb).convert_to<int>()));
            cur = top % qb;
        }
    }

    if (!closed) {
        e.terminating = true;
        e.prefix = digits;
        e.cycle = {TernaryDigit::l};
        if (!digits.empty()) {
            DigitString alias = digits;
            alias.back() = static_cast<TernaryDigit>(static_cast<int>(alias.back()) - 1);
            e.zero_two_alias = {std::move(alias), DigitString{TernaryDigit::r}};
        }
        return e;
    }
    e.prefix.assign(digits.begin(), digits.begin() + cycle_start);
    e.cycle.assign(digits.begin() + cycle_start, digits.end());
    return e;
}

// Count of digit c among the first n digits.
inline unsigned omega(const Rational& x, unsigned n) {
    if (x <= 0 || x >= 1) throw domain_error("omega: value outside (0,1)");
    TernaryExpansion e = expand(x);
    unsigned count = 0;
    std::size_t head = std::min<std::size_t>(n, e.prefix.size());
    for (std::size_t i = 0; i < head; ++i)
        if (e.prefix[i] == TernaryDigit::c) ++count;
    if (n > e.prefix.size() && !e.terminating) {
        std::size_t tail = n - e.prefix.size();
        unsigned per_cycle = 0;
        for (TernaryDigit d : e.cycle)
            if (d == TernaryDigit::c) ++per_cycle;
        count += static_cast<unsigned>(tail / e.cycle.size()) * per_cycle;
        for (std::size_t i = 0; i < tail % e.cycle.size(); ++i)
            if (e.cycle[i] == TernaryDigit::c) ++count;
    }
    return count;
}

enum class OrbitClassKind { singular_ternary, piecewise_fagnano, stabilizing, generalized_pf };

struct OrbitClass {
    OrbitClassKind kind;
    // PiecewiseFagnano: length of the pre-tail prefix. Stabilizing: 1-based
    // position of the last c digit (0 when there is none).
    std::optional<unsigned> n;
    friend bool operator==(const OrbitClass&, const OrbitClass&) = default;
};

inline const char* orbit_class_name(OrbitClassKind k) {
    switch (k) {
        case OrbitClassKind::singular_ternary: return "SingularTernary";
        case OrbitClassKind::piecewise_fagnano: return "PiecewiseFagnano";
        case OrbitClassKind::stabilizing: return "Stabilizing";
        default: return "GeneralizedPF";
    }
}

inline OrbitClass classify(const Rational& x) {
    if (x <= 0 || x >= 1) throw domain_error("classify: value outside (0,1)");
    TernaryExpansion e = expand(x);
    if (e.terminating) return {OrbitClassKind::singular_ternary, std::nullopt};
    bool cycle_has_c = false, cycle_all_c = true;
    for (TernaryDigit d : e.cycle) {
        if (d == TernaryDigit::c) cycle_has_c = true;
        else cycle_all_c = false;
    }
    if (cycle_all_c)
        return {OrbitClassKind::piecewise_fagnano, static_cast<unsigned>(e.prefix.size())};
    if (!cycle_has_c) {
        unsigned last_c = 0;
        for (std::size_t i = 0; i < e.prefix.size(); ++i)
            if (e.prefix[i] == TernaryDigit::c) last_c = static_cast<unsigned>(i + 1);
        return {OrbitClassKind::stabilizing, last_c};
    }
    return {OrbitClassKind::generalized_pf, std::nullopt};
}

// Orbits of the midpoint 1/2 under the maps x/3, x/3 + 1/3, x/3 + 2/3;
// returns the n-th iterate image, sorted, with 3^n distinct elements.
inline std::vector<Rational> midpoint_set(unsigned n) {
    if (n > 12) throw domain_error("midpoint_set: level beyond budget 12");
    std::vector<Rational> cur = {Rational(1, 2)};
    for (unsigned i = 0; i < n; ++i) {
        std::vector<Rational> next;
        next.reserve(cur.size() * 3);
        for (int branch = 0; branch < 3; ++branch)
            for (const Rational& x : cur)
                next.push_back(x / 3 + Rational(branch, 3));
        cur = std::move(next);
    }
    return cur;
}

struct McRepresentation {
    unsigned n = 0;
    std::vector<int> digits;  // p_{j_1} .. p_{j_N}, each in {0,1,2}
};

// Decomposition x = sum_i p_{j_i}/3^{N-i+1} + 1/(2*3^N), which exists exactly
// for the midpoint-set members; p_{j_1} carries the smallest weight, so the
// digit list is the expansion prefix reversed.
inline std::optional<McRepresentation> mc_representation(const Rational& x) {
    OrbitClass c = classify(x);
    if (c.kind != OrbitClassKind::piecewise_fagnano) return std::nullopt;
    TernaryExpansion e = expand(x);
    McRepresentation rep;
    rep.n = static_cast<unsigned>(e.prefix.size());
    rep.digits.reserve(rep.n);
    for (auto it = e.prefix.rbegin(); it != e.prefix.rend(); ++it)
        rep.digits.push_back(static_cast<int>(*it));
    return rep;
}

// True iff some base-3 expansion of x avoids the digit c entirely.
inline bool is_cantor(const Rational& x) {
    if (x < 0 || x > 1) throw domain_error("is_cantor: value outside [0,1]");
    TernaryExpansion e = expand(x);
    auto c_free = [](const DigitString& d) {
        for (TernaryDigit t : d)
            if (t == TernaryDigit::c) return false;
        return true;
    };
    if (c_free(e.prefix) && c_free(e.cycle)) return true;
    if (e.zero_two_alias)
        return c_free(e.zero_two_alias->first) && c_free(e.zero_two_alias->second);
    return false;
}

// As is_cantor, but additionally demands infinitely many l and infinitely
// many r, which excludes the ternary endpoints.
inline bool is_cantor_nonternary(const Rational& x) {
    if (x < 0 || x > 1) throw domain_error("is_cantor_nonternary: value outside [0,1]");
    TernaryExpansion e = expand(x);
    if (e.terminating || x == 1) return false;
    bool has_l = false, has_r = false;
    for (TernaryDigit d : e.cycle) {
        if (d == TernaryDigit::c) return false;
        if (d == TernaryDigit::l) has_l = true;
        if (d == TernaryDigit::r) has_r = true;
    }
    for (TernaryDigit d : e.prefix)
        if (d == TernaryDigit::c) return false;
    return has_l && has_r;
}

}  // namespace koch

#endif
