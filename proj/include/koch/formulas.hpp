#pragma once

// Closed forms attached to the midpoint orbit family: the base orbit length,
// the period and length predictions, their limit, the surface genus, and a
// study harness that puts predictions and exact simulation side by side.

#include <atomic>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "koch/dynamics.hpp"

namespace koch {

inline Rational fagnano_length() { return Rational(3, 2); }

// Predicted orbit cardinality at level n: 3 doublings per center digit.
inline BigInt period_formula(const Rational& x0, unsigned n) {
    return 3 * pow_int(BigInt(2), omega(x0, n));
}

// Predicted length at level n >= 1, fed by per-level cardinalities (either
// predicted or simulated; periods[i] is the count at level i).
inline Rational length_formula(const Rational& x0, unsigned n,
                               const std::vector<BigInt>& periods) {
    if (n < 1) throw domain_error("length_formula: defined for levels >= 1");
    if (periods.size() < n)
        throw domain_error("length_formula: need counts for every level below n");
    TernaryExpansion e = expand(x0);
    Rational total = 2 * fagnano_length();
    for (unsigned i = 2; i <= n; ++i)
        if (e.digit_at(i) == TernaryDigit::c)
            total += Rational(3 * periods[i - 1], 2 * pow3(i));
    return total;
}

// Limit of the predicted lengths, summed in closed form from the eventually
// periodic expansion: each cycle pass multiplies the center-digit terms by
// 2^(centers per cycle) / 3^(cycle length) < 1.
inline Rational length_limit(const Rational& x0) {
    TernaryExpansion e = expand(x0);
    if (e.terminating) throw domain_error("length_limit: finite ternary expansion");
    std::size_t p = e.prefix.size(), cyc = e.cycle.size();
    unsigned m = 0;
    for (TernaryDigit d : e.cycle)
        if (d == TernaryDigit::c) ++m;

    Rational total = 2 * fagnano_length();
    unsigned centers = 0;  // count over digits seen so far
    auto term = [&](unsigned i) { return Rational(9 * pow_int(BigInt(2), centers), 2 * pow3(i)); };
    for (unsigned i = 1; i <= p + cyc; ++i) {
        TernaryDigit d = e.digit_at(i);
        if (i >= 2 && d == TernaryDigit::c) total += term(i);
        if (d == TernaryDigit::c) ++centers;
    }
    Rational tail = 0;
    for (unsigned i = static_cast<unsigned>(p + cyc) + 1; i <= p + 2 * cyc; ++i) {
        TernaryDigit d = e.digit_at(i);
        if (d == TernaryDigit::c) {
            tail += term(i);
            ++centers;
        }
    }
    Rational ratio(pow_int(BigInt(2), m), pow3(static_cast<unsigned>(cyc)));
    return total + tail / (1 - ratio);
}

// Genus of the reflection surface over the table, from the vertex census:
// each corner of angle p·pi/q contributes (p-1)/q, scaled by half the group
// order 3. Cross-checked against the closed form 3·4^n - 2.
inline BigInt genus(unsigned n) {
    Prefractal p = build_prefractal(n);
    VertexCensus c = p.census();
    Rational corners = Rational(BigInt(c.pi_over_3) * (1 - 1), 3) +
                       Rational(BigInt(c.four_pi_over_3) * (4 - 1), 3);
    Rational g = 1 + Rational(3, 2) * corners;
    if (!is_integer(g)) throw invariant_error("genus: non-integer census sum");
    BigInt got = numerator(g);
    BigInt want = 3 * pow_int(BigInt(4), n) - 2;
    if (got != want) throw invariant_error("genus: census value disagrees with closed form");
    return got;
}

struct FormulaRecord {
    unsigned n = 0;
    unsigned omega = 0;
    BigInt period_predicted;
    std::size_t period_simulated = 0;
    std::optional<Rational> length_predicted;      // predicted-count mode, n >= 1
    std::optional<Rational> length_mixed;          // simulated-count mode, n >= 1
    std::optional<Rational> length_simulated;
    bool agree_period = false;
    std::optional<bool> agree_length;
};

struct FormulaReport {
    Rational x0;
    OrbitClass orbit_class;
    std::vector<FormulaRecord> records;
    std::optional<std::string> diagnostic;
};

inline FormulaReport study_one(const Rational& x0, unsigned n_max,
                               std::size_t budget = kDefaultOrbitBudget) {
    FormulaReport rep;
    rep.x0 = x0;
    rep.orbit_class = classify(x0);
    CompatibleSequence seq = compatible_sequence(x0, n_max, budget);
    rep.diagnostic = seq.diagnostic;

    std::vector<BigInt> predicted, simulated;
    for (unsigned n = 0; n < seq.orbits.size(); ++n) {
        const Orbit& o = seq.orbits[n];
        if (o.status.kind != OrbitStatusKind::periodic) {
            rep.diagnostic = "level " + std::to_string(n) + ": orbit did not close";
            break;
        }
        FormulaRecord rec;
        rec.n = n;
        rec.omega = omega(x0, n);
        rec.period_predicted = period_formula(x0, n);
        rec.period_simulated = o.status.period;
        rec.agree_period = rec.period_predicted == BigInt(o.status.period);
        predicted.push_back(rec.period_predicted);
        simulated.push_back(BigInt(o.status.period));
        if (n >= 1) {
            rec.length_predicted = length_formula(x0, n, predicted);
            rec.length_mixed = length_formula(x0, n, simulated);
            rec.length_simulated = o.length;
            rec.agree_length = o.length && *rec.length_mixed == *o.length;
        } else {
            rec.length_simulated = o.length;
        }
        rep.records.push_back(std::move(rec));
    }
    return rep;
}

inline std::vector<FormulaReport> period_study(const std::vector<Rational>& sample,
                                               unsigned n_max,
                                               std::size_t budget = kDefaultOrbitBudget,
                                               unsigned jobs = 1) {
    std::vector<FormulaReport> out(sample.size());
    if (jobs <= 1 || sample.size() <= 1) {
        for (std::size_t i = 0; i < sample.size(); ++i)
            out[i] = study_one(sample[i], n_max, budget);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < sample.size(); i = next.fetch_add(1))
            out[i] = study_one(sample[i], n_max, budget);
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace koch
