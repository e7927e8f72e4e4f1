#pragma once

// The billiard map on a prefractal table and everything built on top of it:
// orbit computation with exact periodicity and vertex detection, base-point
// transport to finer levels, footprints and their cross-level comparison,
// stabilization, the pair-collapse consistency check, path unfolding, and
// sampling probes for periodic directions.
//
// All state is exact.  A state records the side it sits on (1-based boundary
// index), the position along that side in [0,1], and the outgoing direction
// as a primitive lattice vector.

#include <atomic>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "koch/boundary.hpp"
#include "koch/ternary.hpp"

namespace koch {

struct corner_compatible_error : domain_error {
    using domain_error::domain_error;
};

struct BilliardState {
    std::size_t side = 0;
    Rational position;
    LatticeVector direction;

    friend bool operator==(const BilliardState&, const BilliardState&) = default;
};

inline LatticePoint state_point(const Prefractal& p, const BilliardState& s) {
    LatticePoint a = p.side_start(s.side), b = p.side_end(s.side);
    return LatticePoint{a.a + s.position * (b.a - a.a), a.b + s.position * (b.b - a.b)};
}

inline OrientationClass side_orientation(const Prefractal& p, std::size_t side) {
    switch (p.raw_sides()[side - 1].dir % 3) {
        case 0: return OrientationClass::horizontal;
        case 1: return OrientationClass::up_right;
        default: return OrientationClass::up_left;
    }
}

struct SingularHit {
    LatticePoint vertex;
    Rational t;
};

using StepResult = std::variant<BilliardState, SingularHit>;

inline void validate_state(const Prefractal& p, const BilliardState& s) {
    if (s.side < 1 || s.side > p.side_count())
        throw domain_error("billiard state: side index out of range");
    if (!(s.position > 0 && s.position < 1))
        throw domain_error("billiard state: position must be strictly inside the side");
    const auto& raw = p.raw_sides()[s.side - 1];
    Rational c = Rational(raw.a2 - raw.a1) * s.direction.b -
                 s.direction.a * Rational(raw.b2 - raw.b1);
    if (!(c > 0)) throw domain_error("billiard state: direction does not point inward");
}

inline StepResult billiard_step(const Prefractal& p, const BilliardState& s) {
    if (s.side < 1 || s.side > p.side_count())
        throw domain_error("billiard step: side index out of range");
    if (s.position < 0 || s.position > 1)
        throw domain_error("billiard step: position outside [0,1]");
    LatticeVector dn = normalize_direction(s.direction);
    if (s.position == 0 || s.position == 1) {
        // a flight tangent along an adjacent side ends at that side's far
        // vertex; neighbouring sides always meet at an angle, so the run
        // covers exactly one side
        std::size_t m = p.side_count();
        std::size_t prev = s.side == 1 ? m : s.side - 1;
        std::size_t next = s.side == m ? 1 : s.side + 1;
        Rational t(1, pow3(p.level()));
        if (auto k = direction_index(dn)) {
            int here = p.raw_sides()[s.side - 1].dir;
            if (s.position == 0) {
                if (*k == here) return SingularHit{p.side_end(s.side), t};
                if (*k == (p.raw_sides()[prev - 1].dir + 3) % 6)
                    return SingularHit{p.side_start(prev), t};
            } else {
                if (*k == (here + 3) % 6) return SingularHit{p.side_start(s.side), t};
                if (*k == p.raw_sides()[next - 1].dir) return SingularHit{p.side_end(next), t};
            }
        }
    } else {
        validate_state(p, s);
    }
    FirstHit h = p.first_hit(state_point(p, s), dn);
    if (h.at_vertex) return SingularHit{h.point, h.t};
    return BilliardState{h.side, h.position,
                         reflect_direction(dn, side_orientation(p, h.side))};
}

enum class OrbitStatusKind { periodic, singular, budget_exceeded };

struct OrbitStatus {
    OrbitStatusKind kind = OrbitStatusKind::budget_exceeded;
    std::size_t period = 0;
    std::optional<LatticePoint> forward_vertex;
    std::optional<LatticePoint> backward_vertex;
    bool saddle_connection = false;
};

struct Orbit {
    unsigned level = 0;
    std::vector<BilliardState> states;  // time order; singular orbits include the past
    std::size_t initial_index = 0;
    OrbitStatus status;
    std::optional<Rational> length;     // exact, for unit-direction orbits
    bool unit_family = false;
};

inline constexpr std::size_t kDefaultOrbitBudget = 100000;

inline Orbit compute_orbit(const Prefractal& p, const BilliardState& init,
                           std::size_t budget = kDefaultOrbitBudget) {
    if (budget < 1) throw domain_error("compute_orbit: budget must be at least 1");
    BilliardState start = init;
    start.direction = normalize_direction(init.direction);
    validate_state(p, start);

    Orbit o;
    o.level = p.level();
    o.unit_family = direction_index(start.direction).has_value();
    Rational traveled = 0;

    BilliardState cur = start;
    o.states.push_back(cur);
    for (std::size_t step = 0; step < budget; ++step) {
        FirstHit h = p.first_hit(state_point(p, cur), cur.direction);
        if (h.at_vertex) {
            traveled += h.t;
            o.status.kind = OrbitStatusKind::singular;
            o.status.forward_vertex = h.point;
            break;
        }
        BilliardState next{h.side, h.position,
                           reflect_direction(cur.direction, side_orientation(p, h.side))};
        traveled += h.t;
        if (next == start) {
            o.status.kind = OrbitStatusKind::periodic;
            o.status.period = o.states.size();
            if (o.unit_family) o.length = traveled;
            return o;
        }
        o.states.push_back(next);
        cur = next;
    }
    if (o.status.kind != OrbitStatusKind::singular) {
        o.status.kind = OrbitStatusKind::budget_exceeded;
        if (o.unit_family) o.length = traveled;
        return o;
    }

    // walk the past of the initial state to expose the whole saddle connection
    std::vector<BilliardState> past;
    BilliardState back = start;
    for (std::size_t step = 0; step < budget; ++step) {
        LatticeVector arrival = reflect_direction(back.direction, side_orientation(p, back.side));
        LatticeVector reversed{-arrival.a, -arrival.b};
        FirstHit h = p.first_hit(state_point(p, back), reversed);
        traveled += h.t;
        if (h.at_vertex) {
            o.status.backward_vertex = h.point;
            o.status.saddle_connection = true;
            break;
        }
        past.push_back(BilliardState{h.side, h.position, arrival});
        back = past.back();
    }
    o.initial_index = past.size();
    o.states.insert(o.states.begin(), past.rbegin(), past.rend());
    if (o.unit_family) o.length = traveled;
    return o;
}

struct FootprintEntry {
    AddressWord address;
    Rational position;
    LatticeVector direction;
};

inline std::vector<FootprintEntry> footprint(const Prefractal& p, const Orbit& o) {
    std::vector<FootprintEntry> out;
    out.reserve(o.states.size());
    for (const BilliardState& s : o.states)
        out.push_back({p.address_of(s.side), s.position, s.direction});
    return out;
}

using FootprintKey = std::pair<AddressWord, Rational>;

inline std::set<FootprintKey> footprint_keys(const Prefractal& p, const Orbit& o) {
    std::set<FootprintKey> out;
    for (const BilliardState& s : o.states) out.insert({p.address_of(s.side), s.position});
    return out;
}

// Rewrites a coarse-level boundary point as a point of a finer level.  Each
// extra symbol keeps the third of the side the point lies in; a point inside
// the middle third has no image and the rewrite fails.
inline std::optional<FootprintKey> refine_key(FootprintKey key, std::size_t word_len) {
    while (key.first.size() < word_len) {
        char k = key_of(key.first);
        if (key.second <= Rational(1, 3)) {
            key.first.push_back(third_start_digit(k));
            key.second *= 3;
        } else if (key.second >= Rational(2, 3)) {
            key.first.push_back(third_end_digit(k));
            key.second = 3 * key.second - 2;
        } else {
            return std::nullopt;
        }
    }
    return key;
}

// Set equality of two footprints as boundary point sets, the coarser one
// rewritten to the finer level first.
inline bool same_footprint(const Prefractal& pa, const Orbit& a, const Prefractal& pb,
                           const Orbit& b) {
    const Orbit& fine = a.level >= b.level ? a : b;
    const Orbit& coarse = a.level >= b.level ? b : a;
    const Prefractal& pf = a.level >= b.level ? pa : pb;
    const Prefractal& pc = a.level >= b.level ? pb : pa;
    std::set<FootprintKey> want = footprint_keys(pf, fine);
    std::set<FootprintKey> got;
    for (const FootprintKey& k : footprint_keys(pc, coarse)) {
        auto r = refine_key(k, fine.level + 1);
        if (!r) return false;
        got.insert(*r);
    }
    return got == want;
}

inline BilliardState compatible_basepoint(const Rational& x0, const Prefractal& p) {
    if (!(x0 > 0 && x0 < 1))
        throw domain_error("compatible_basepoint: base point must be strictly inside the base");
    if (classify(x0).kind == OrbitClassKind::singular_ternary)
        throw domain_error("compatible_basepoint: base point has a finite ternary expansion");
    LatticePoint start{x0, Rational(0)};
    Location loc = p.locate(start);
    if (loc.region == Region::boundary)
        return BilliardState{loc.side, loc.position, LatticeVector{0, 1}};
    FirstHit h = p.first_hit(start, LatticeVector{0, -1});
    if (h.at_vertex)
        throw corner_compatible_error("compatible_basepoint: ray exits through a corner at (" +
                                      format_rational(h.point.a) + "," +
                                      format_rational(h.point.b) + ")");
    return BilliardState{h.side, h.position, LatticeVector{0, 1}};
}

struct CompatibleSequence {
    Rational x0;
    unsigned n_max = 0;
    std::vector<Orbit> orbits;                    // level 0 upward, possibly truncated
    std::vector<BilliardState> initial_basepoints;
    std::optional<std::string> diagnostic;
};

inline CompatibleSequence compatible_sequence(const Rational& x0, unsigned n_max,
                                              std::size_t budget = kDefaultOrbitBudget) {
    if (classify(x0).kind == OrbitClassKind::singular_ternary)
        throw domain_error("compatible_sequence: base point has a finite ternary expansion");
    CompatibleSequence seq;
    seq.x0 = x0;
    seq.n_max = n_max;
    for (unsigned n = 0; n <= n_max; ++n) {
        Prefractal p = build_prefractal(n);
        BilliardState s;
        try {
            s = compatible_basepoint(x0, p);
        } catch (const corner_compatible_error& e) {
            seq.diagnostic = "level " + std::to_string(n) + ": " + e.what();
            return seq;
        }
        Orbit o = compute_orbit(p, s, budget);
        seq.initial_basepoints.push_back(s);
        seq.orbits.push_back(std::move(o));
        if (seq.orbits.back().status.kind == OrbitStatusKind::singular) {
            seq.diagnostic = "level " + std::to_string(n) + ": orbit hits a vertex";
            return seq;
        }
    }
    return seq;
}

// The last computed level alone never witnesses stabilization, so a candidate
// must be confirmed by at least one finer orbit.
inline std::optional<unsigned> stabilization_index(const CompatibleSequence& seq) {
    if (seq.orbits.size() < 2) return std::nullopt;
    std::vector<Prefractal> tables;
    for (unsigned n = 0; n < seq.orbits.size(); ++n) tables.push_back(build_prefractal(n));
    for (unsigned cand = 0; cand + 1 < seq.orbits.size(); ++cand) {
        bool ok = true;
        for (unsigned n = cand + 1; n < seq.orbits.size() && ok; ++n)
            ok = same_footprint(tables[cand], seq.orbits[cand], tables[n], seq.orbits[n]);
        if (ok) return cand;
    }
    return std::nullopt;
}

inline bool is_pf_orbit(const Orbit& o, const Prefractal& p_next) {
    if (o.status.kind != OrbitStatusKind::periodic) return false;
    if (o.level + 1 != p_next.level())
        throw domain_error("is_pf_orbit: second argument must be one level finer");
    for (const BilliardState& s : o.states)
        if (s.position != Rational(1, 2)) return false;
    const BilliardState& first = o.states[o.initial_index];
    Cell c = p_next.cell(first.side);
    LatticePoint mid{(c.ghost.segment.start.a + c.ghost.segment.end.a) / 2,
                     (c.ghost.segment.start.b + c.ghost.segment.end.b) / 2};
    Prefractal here = build_prefractal(o.level);
    return state_point(here, first) == mid;
}

struct PairCollapseReport {
    bool doubling = false;
    bool pairing = false;
    bool ghost_midpoints = false;
    bool length_rule = false;
    std::string detail;

    bool passed() const { return doubling && pairing && ghost_midpoints && length_rule; }
};

inline PairCollapseReport pair_collapse_check(const Orbit& o_n, const Orbit& o_prev,
                                              const Prefractal& p) {
    PairCollapseReport r;
    std::ostringstream detail;
    if (o_n.status.kind != OrbitStatusKind::periodic ||
        o_prev.status.kind != OrbitStatusKind::periodic) {
        detail << "both orbits must be periodic; ";
        r.detail = detail.str();
        return r;
    }
    std::size_t pn = o_n.status.period, pp = o_prev.status.period;
    r.doubling = pn == 2 * pp;
    if (!r.doubling) detail << "count " << pn << " is not twice " << pp << "; ";

    std::vector<std::size_t> cells;
    auto try_offset = [&](std::size_t offset) {
        std::vector<std::size_t> found;
        for (std::size_t i = 0; i < pn; i += 2) {
            std::size_t u = o_n.states[(i + offset) % pn].side;
            std::size_t v = o_n.states[(i + 1 + offset) % pn].side;
            if (u > v) std::swap(u, v);
            if (v != u + 1 || u % 4 != 2) return std::vector<std::size_t>{};
            found.push_back(u / 4 + 1);
        }
        return found;
    };
    if (pn % 2 == 0 && pn > 0) {
        cells = try_offset(0);
        if (cells.empty()) cells = try_offset(1);
    }
    r.pairing = !cells.empty();
    if (!r.pairing) detail << "base points do not pair up on cell legs; ";

    if (r.pairing) {
        Prefractal prev = build_prefractal(o_prev.level);
        std::set<std::pair<Rational, Rational>> base_points;
        for (const BilliardState& s : o_prev.states) {
            LatticePoint q = state_point(prev, s);
            base_points.insert({q.a, q.b});
        }
        r.ghost_midpoints = true;
        for (std::size_t c : cells) {
            Segment g = p.cell(c).ghost.segment;
            std::pair<Rational, Rational> mid{(g.start.a + g.end.a) / 2, (g.start.b + g.end.b) / 2};
            if (!base_points.count(mid)) {
                r.ghost_midpoints = false;
                detail << "cell " << c << " ghost midpoint is not a coarse base point; ";
                break;
            }
        }
    }

    if (o_n.length && o_prev.length) {
        Rational want = *o_prev.length + Rational(3 * BigInt(pp), 2 * pow3(o_n.level));
        r.length_rule = *o_n.length == want;
        if (!r.length_rule)
            detail << "length " << format_rational(*o_n.length) << " differs from "
                   << format_rational(want) << "; ";
    } else {
        detail << "lengths unavailable; ";
    }
    r.detail = detail.str();
    return r;
}

struct UnfoldedPath {
    std::vector<LatticePoint> breakpoints;
    LatticeVector direction;
};

namespace detail {

struct Affine {
    Rational m00 = 1, m01 = 0, m10 = 0, m11 = 1, ta = 0, tb = 0;

    LatticePoint apply(const LatticePoint& p) const {
        return LatticePoint{m00 * p.a + m01 * p.b + ta, m10 * p.a + m11 * p.b + tb};
    }

    // this := this ∘ reflection across the line through anchor with the given class
    void fold(const LatticePoint& anchor, OrientationClass o) {
        Rational r00, r01, r10, r11;
        switch (o) {
            case OrientationClass::horizontal: r00 = 1, r01 = 1, r10 = 0, r11 = -1; break;
            case OrientationClass::up_right: r00 = -1, r01 = 0, r10 = 1, r11 = 1; break;
            case OrientationClass::up_left: r00 = 0, r01 = -1, r10 = -1, r11 = 0; break;
        }
        Rational ra = Rational(anchor.a - (r00 * anchor.a + r01 * anchor.b));
        Rational rb = Rational(anchor.b - (r10 * anchor.a + r11 * anchor.b));
        Rational n00 = m00 * r00 + m01 * r10, n01 = m00 * r01 + m01 * r11;
        Rational n10 = m10 * r00 + m11 * r10, n11 = m10 * r01 + m11 * r11;
        ta = m00 * ra + m01 * rb + ta;
        tb = m10 * ra + m11 * rb + tb;
        m00 = n00, m01 = n01, m10 = n10, m11 = n11;
    }
};

}  // namespace detail

inline UnfoldedPath unfold(const Prefractal& p, const Orbit& o) {
    if (o.states.empty()) throw domain_error("unfold: empty orbit");
    bool periodic = o.status.kind == OrbitStatusKind::periodic;

    std::vector<LatticePoint> path;
    if (o.status.backward_vertex) path.push_back(*o.status.backward_vertex);
    for (const BilliardState& s : o.states) path.push_back(state_point(p, s));
    if (periodic) path.push_back(state_point(p, o.states[0]));
    if (o.status.forward_vertex) path.push_back(*o.status.forward_vertex);
    if (path.size() < 2) throw domain_error("unfold: path too short");

    // breakpoint i sits on the side of states[i - lead]; folds happen at
    // interior breakpoints only, never at the two path ends
    std::size_t lead = o.status.backward_vertex ? 1 : 0;
    UnfoldedPath u;
    detail::Affine t;
    u.breakpoints.push_back(t.apply(path[0]));
    for (std::size_t i = 1; i < path.size(); ++i) {
        if (i + 1 < path.size()) {
            std::size_t side = o.states[i - lead].side;
            t.fold(p.side_start(side), side_orientation(p, side));
        }
        u.breakpoints.push_back(t.apply(path[i]));
    }

    u.direction = normalize_direction(LatticeVector{u.breakpoints[1].a - u.breakpoints[0].a,
                                                    u.breakpoints[1].b - u.breakpoints[0].b});
    for (const LatticePoint& q : u.breakpoints) {
        Rational c = Rational(q.a - u.breakpoints[0].a) * u.direction.b -
                     u.direction.a * Rational(q.b - u.breakpoints[0].b);
        if (c != 0) throw invariant_error("unfold: breakpoints are not collinear");
    }
    return u;
}

struct ProbeSample {
    Rational x0;
    OrbitStatusKind coarse_status = OrbitStatusKind::budget_exceeded;
    std::size_t coarse_period = 0;
    OrbitStatusKind fine_status = OrbitStatusKind::budget_exceeded;
    std::size_t fine_period = 0;
};

struct ProbeReport {
    LatticeVector direction;
    unsigned level = 0;
    std::vector<ProbeSample> samples;
    bool all_closed = true;
};

// Starts the flow at the given point; boundary starts take the direction as
// is, interior starts are carried to the first boundary contact.
inline BilliardState entry_state(const Prefractal& p, const LatticePoint& start,
                                 const LatticeVector& d) {
    LatticeVector dn = normalize_direction(d);
    Location loc = p.locate(start);
    if (loc.region == Region::outside) throw domain_error("entry_state: start lies outside");
    if (loc.region == Region::boundary) {
        BilliardState s{loc.side, loc.position, dn};
        validate_state(p, s);
        return s;
    }
    FirstHit h = p.first_hit(start, dn);
    if (h.at_vertex) throw corner_compatible_error("entry_state: ray meets a corner");
    return BilliardState{h.side, h.position,
                         reflect_direction(dn, side_orientation(p, h.side))};
}

inline ProbeReport periodic_direction_probe(const LatticeVector& d, unsigned n,
                                            std::size_t samples,
                                            std::size_t budget = kDefaultOrbitBudget,
                                            std::uint64_t seed = 1, unsigned jobs = 1) {
    LatticeVector dn = normalize_direction(d);
    ProbeReport rep;
    rep.direction = dn;
    rep.level = n;
    Prefractal p0 = build_prefractal(0);
    Prefractal pn = build_prefractal(n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> qd(5, 997), pd(1, 996);

    // sampling stays serial so results do not depend on the worker count
    struct Prepared {
        Rational x0;
        BilliardState coarse, fine;
    };
    std::vector<Prepared> prepared;
    std::size_t attempts = 0;
    while (prepared.size() < samples) {
        if (++attempts > 100 * (samples + 1))
            throw invariant_error("periodic_direction_probe: sampling keeps meeting corners");
        long q = qd(rng);
        if (q % 3 == 0) continue;
        Rational x0(pd(rng) % q, q);
        if (x0 == 0) continue;
        // flows that do not leave the base start inside the table instead
        LatticePoint start{x0, dn.b > 0 ? Rational(0) : Rational(1 - x0) / 2};
        try {
            prepared.push_back({x0, entry_state(p0, start, dn), entry_state(pn, start, dn)});
        } catch (const corner_compatible_error&) {
        }
    }

    rep.samples.resize(prepared.size());
    auto work = [&](std::size_t i) {
        Orbit a = compute_orbit(p0, prepared[i].coarse, budget);
        Orbit b = compute_orbit(pn, prepared[i].fine, budget);
        rep.samples[i] = ProbeSample{prepared[i].x0, a.status.kind, a.status.period,
                                     b.status.kind, b.status.period};
    };
    if (jobs <= 1 || prepared.size() <= 1) {
        for (std::size_t i = 0; i < prepared.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < prepared.size();
                     i = next.fetch_add(1))
                    work(i);
            });
        for (auto& t : pool) t.join();
    }
    for (const ProbeSample& s : rep.samples)
        if (s.coarse_status == OrbitStatusKind::budget_exceeded ||
            s.fine_status == OrbitStatusKind::budget_exceeded)
            rep.all_closed = false;
    return rep;
}

}  // namespace koch
