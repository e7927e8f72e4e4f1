#pragma once

// Prefractal snowflake boundaries.  Level n is built from the level-0
// triangle (0,0),(1,0),(0,1) by n rounds of middle-third replacement, every
// bump pointing away from the interior.  Sides are kept in counterclockwise
// boundary order and stored in coordinates scaled by 3^n, which makes every
// vertex an integer pair and every side a unit step.
//
// All sides lie on lattice lines of the three families b = c, a = c and
// a + b = c.  The spatial index keeps, per family, the sides on each line
// (for walking a general ray line by line) and, per conserved functional,
// the transversal sides over each unit strip (for axis rays, which is the
// common case inside an orbit).

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "koch/addressing.hpp"
#include "koch/lattice.hpp"
#include "koch/rational.hpp"

namespace koch {

enum class AngleClass { pi_over_3, four_pi_over_3 };

struct VertexInfo {
    LatticePoint point;
    AngleClass angle;
};

struct VertexCensus {
    std::size_t pi_over_3 = 0;
    std::size_t four_pi_over_3 = 0;

    friend bool operator==(const VertexCensus&, const VertexCensus&) = default;
};

// Indices handed out by the boundary API are 1-based boundary positions.
struct Side {
    Segment segment;
    unsigned scale = 0;
    std::size_t index = 0;
    AddressWord address;
};

struct Ghost {
    Segment segment;       // open middle third of the parent side
    std::size_t parent_side = 0;
};

struct Cell {
    std::array<LatticePoint, 3> triangle;  // base start, apex, base end
    Ghost ghost;                           // ghost of the replaced side, one level up
    std::size_t index = 0;
    std::size_t first_leg = 0;             // boundary indices of the two bump sides
    std::size_t second_leg = 0;
};

struct FirstHit {
    std::size_t side = 0;
    LatticePoint point;
    Rational t;
    bool at_vertex = false;
    Rational position;     // along the side, from its start, in [0,1]
};

enum class Region { inside, boundary, outside };

struct Location {
    Region region = Region::outside;
    std::size_t side = 0;  // set when on the boundary
    Rational position;
};

class Prefractal {
public:
    struct RawSide {
        std::int64_t a1, b1, a2, b2;
        std::uint8_t dir;
    };

    unsigned level() const { return n_; }
    std::int64_t scale_denominator() const { return scale_; }
    std::size_t side_count() const { return raw_.size(); }
    std::size_t cell_count() const { return n_ == 0 ? 0 : raw_.size() / 4; }
    const std::vector<RawSide>& raw_sides() const { return raw_; }
    const VertexCensus& census() const { return census_; }

    LatticePoint side_start(std::size_t k) const { return unscale(raw_[k - 1].a1, raw_[k - 1].b1); }
    LatticePoint side_end(std::size_t k) const { return unscale(raw_[k - 1].a2, raw_[k - 1].b2); }

    Side side(std::size_t k) const {
        require_index(k, raw_.size());
        return Side{{side_start(k), side_end(k)}, n_, k, address_of(k)};
    }

    AddressWord address_of(std::size_t k) const {
        require_index(k, raw_.size());
        std::size_t j = k - 1;
        std::size_t per_root = raw_.size() / 3;
        AddressWord w(1, std::array<char, 3>{'5', '1', '3'}[j / per_root]);
        std::size_t path = j % per_root;
        for (unsigned i = 0; i < n_; ++i) {
            std::size_t digit = path / pow4(n_ - 1 - i) % 4;
            w.push_back(child_digits(w).in_order()[digit]);
        }
        return w;
    }

    // Boundary position of the side carrying a given address.
    std::size_t index_of(const AddressWord& w) const {
        if (w.size() != n_ + 1 || !is_valid_side_address(w))
            throw domain_error("index_of: invalid address \"" + w + "\" for this level");
        std::size_t root;
        switch (w[0]) {
            case '5': root = 0; break;
            case '1': root = 1; break;
            case '3': root = 2; break;
            default: throw domain_error("index_of: bad root");
        }
        std::size_t j = 0;
        AddressWord prefix(1, w[0]);
        for (unsigned i = 0; i < n_; ++i) {
            auto digits = child_digits(prefix).in_order();
            std::size_t digit = 4;
            for (std::size_t d = 0; d < 4; ++d)
                if (digits[d] == w[i + 1]) digit = d;
            if (digit == 4) throw domain_error("index_of: address off the digit table");
            j = 4 * j + digit;
            prefix.push_back(w[i + 1]);
        }
        return root * (raw_.size() / 3) + j + 1;
    }

    VertexInfo vertex(std::size_t k) const {
        require_index(k, raw_.size());
        std::size_t prev = k == 1 ? raw_.size() : k - 1;
        return VertexInfo{side_start(k), turn_class(raw_[prev - 1].dir, raw_[k - 1].dir)};
    }

    Ghost ghost(std::size_t k) const {
        require_index(k, raw_.size());
        const RawSide& s = raw_[k - 1];
        Rational third(1, 3 * BigInt(scale_));
        LatticePoint p = unscale(s.a1, s.b1);
        LatticeVector d{Rational(s.a2 - s.a1) * third, Rational(s.b2 - s.b1) * third};
        return Ghost{{p + d, p + Rational(2) * d}, k};
    }

    Cell cell(std::size_t k) const {
        if (n_ == 0) throw domain_error("cell: level 0 has no cells");
        require_index(k, cell_count());
        std::size_t leg1 = 4 * (k - 1) + 2, leg2 = leg1 + 1;
        Cell c;
        c.triangle = {side_start(leg1), side_end(leg1), side_end(leg2)};
        c.ghost = Ghost{{c.triangle[0], c.triangle[2]}, k};
        c.index = k;
        c.first_leg = leg1;
        c.second_leg = leg2;
        return c;
    }

    Rational area() const {
        BigInt twice = 0;
        for (const RawSide& s : raw_) twice += BigInt(s.a1) * s.b2 - BigInt(s.a2) * s.b1;
        return Rational(twice, 2 * BigInt(scale_) * scale_);
    }

    Rational perimeter() const {
        return Rational(BigInt(raw_.size()), BigInt(scale_));
    }

    Location locate(const LatticePoint& p) const;
    FirstHit first_hit(const LatticePoint& origin, const LatticeVector& d) const;

private:
    friend Prefractal build_prefractal(unsigned n, unsigned budget);

    static std::int64_t pow4(unsigned e) { return std::int64_t(1) << (2 * e); }

    static void require_index(std::size_t k, std::size_t count) {
        if (k < 1 || k > count) throw domain_error("side index out of range");
    }

    static AngleClass turn_class(std::uint8_t dir_in, std::uint8_t dir_out) {
        unsigned turn = (dir_out + 6u - dir_in) % 6u;
        if (turn == 2) return AngleClass::pi_over_3;
        if (turn == 5) return AngleClass::four_pi_over_3;
        throw invariant_error("boundary turn is neither +120 nor -60 degrees");
    }

    LatticePoint unscale(std::int64_t a, std::int64_t b) const {
        return LatticePoint{Rational(a, BigInt(scale_)), Rational(b, BigInt(scale_))};
    }

    // Functional families: 0 keeps b, 1 keeps a, 2 keeps a+b.
    static std::int64_t functional(int f, std::int64_t a, std::int64_t b) {
        return f == 0 ? b : f == 1 ? a : a + b;
    }
    static std::int64_t free_coord(int f, std::int64_t a, std::int64_t b) {
        return f == 1 ? b : a;
    }
    static int family_of_dir(unsigned dir) { return dir % 3 == 0 ? 0 : dir % 3 == 1 ? 1 : 2; }

    Rational functional_rat(int f, const LatticePoint& p) const {
        Rational v = f == 0 ? p.b : f == 1 ? p.a : Rational(p.a + p.b);
        return Rational(v * scale_);
    }

    std::optional<std::pair<std::size_t, Rational>> boundary_side_at(const LatticePoint& p) const;
    bool inward_at(std::size_t j0, const Rational& u, const LatticeVector& d) const;
    std::optional<FirstHit> best_hit_among(const std::vector<std::uint32_t>& candidates,
                                           const LatticePoint& origin, const LatticeVector& d,
                                           std::optional<FirstHit> best) const;
    std::optional<FirstHit> axis_first_hit(const LatticePoint& origin, const LatticeVector& d,
                                           int conserved) const;
    std::optional<FirstHit> scan_first_hit(const LatticePoint& origin,
                                           const LatticeVector& d) const;

    unsigned n_ = 0;
    std::int64_t scale_ = 1;
    std::vector<RawSide> raw_;
    VertexCensus census_;

    struct FamilyIndex {
        // own-family sides by line constant, sorted by free coordinate
        std::unordered_map<std::int64_t, std::vector<std::uint32_t>> lines;
        // transversal sides by the unit strip of this family's functional
        std::unordered_map<std::int64_t, std::vector<std::uint32_t>> buckets;
    };
    std::array<FamilyIndex, 3> index_;
    std::array<std::int64_t, 3> functional_min_{}, functional_max_{};
};

inline Prefractal build_prefractal(unsigned n, unsigned budget = 10) {
    if (n > budget)
        throw domain_error("build_prefractal: level " + std::to_string(n) +
                           " exceeds budget " + std::to_string(budget));
    Prefractal p;
    p.n_ = n;
    p.scale_ = pow3(n).convert_to<std::int64_t>();
    std::int64_t s = p.scale_;
    using RawSide = Prefractal::RawSide;
    std::vector<RawSide> sides = {
        {0, 0, s, 0, 0}, {s, 0, 0, s, 2}, {0, s, 0, 0, 4}};
    for (unsigned round = 1; round <= n; ++round) {
        std::vector<RawSide> next;
        next.reserve(sides.size() * 4);
        for (const RawSide& sd : sides) {
            std::int64_t da = (sd.a2 - sd.a1) / 3, db = (sd.b2 - sd.b1) / 3;
            std::int64_t ea = da + db, eb = -da;  // bump leg, 60 degrees clockwise
            std::int64_t xa = sd.a1 + da, xb = sd.b1 + db;
            std::int64_t ya = sd.a1 + 2 * da, yb = sd.b1 + 2 * db;
            std::uint8_t d = sd.dir;
            next.push_back({sd.a1, sd.b1, xa, xb, d});
            next.push_back({xa, xb, xa + ea, xb + eb, static_cast<std::uint8_t>((d + 5) % 6)});
            next.push_back({xa + ea, xb + eb, ya, yb, static_cast<std::uint8_t>((d + 1) % 6)});
            next.push_back({ya, yb, sd.a2, sd.b2, d});
        }
        sides = std::move(next);
    }
    p.raw_ = std::move(sides);

    for (std::size_t j = 0; j < p.raw_.size(); ++j) {
        std::size_t prev = j == 0 ? p.raw_.size() - 1 : j - 1;
        if (Prefractal::turn_class(p.raw_[prev].dir, p.raw_[j].dir) == AngleClass::pi_over_3)
            ++p.census_.pi_over_3;
        else
            ++p.census_.four_pi_over_3;
    }

    for (int f = 0; f < 3; ++f) {
        p.functional_min_[f] = std::numeric_limits<std::int64_t>::max();
        p.functional_max_[f] = std::numeric_limits<std::int64_t>::min();
    }
    for (std::size_t j = 0; j < p.raw_.size(); ++j) {
        const RawSide& sd = p.raw_[j];
        int own = Prefractal::family_of_dir(sd.dir);
        for (int f = 0; f < 3; ++f) {
            std::int64_t v1 = Prefractal::functional(f, sd.a1, sd.b1);
            std::int64_t v2 = Prefractal::functional(f, sd.a2, sd.b2);
            p.functional_min_[f] = std::min({p.functional_min_[f], v1, v2});
            p.functional_max_[f] = std::max({p.functional_max_[f], v1, v2});
            if (f == own)
                p.index_[f].lines[v1].push_back(static_cast<std::uint32_t>(j));
            else
                p.index_[f].buckets[std::min(v1, v2)].push_back(static_cast<std::uint32_t>(j));
        }
    }
    for (int f = 0; f < 3; ++f) {
        for (auto& entry : p.index_[f].lines) {
            std::sort(entry.second.begin(), entry.second.end(), [&](auto x, auto y) {
                const RawSide &sx = p.raw_[x], &sy = p.raw_[y];
                return std::min(Prefractal::free_coord(f, sx.a1, sx.b1),
                                Prefractal::free_coord(f, sx.a2, sx.b2)) <
                       std::min(Prefractal::free_coord(f, sy.a1, sy.b1),
                                Prefractal::free_coord(f, sy.a2, sy.b2));
            });
        }
    }
    return p;
}

inline std::optional<std::pair<std::size_t, Rational>> Prefractal::boundary_side_at(
    const LatticePoint& p) const {
    for (int f = 0; f < 3; ++f) {
        Rational fv = functional_rat(f, p);
        if (!is_integer(fv)) continue;
        BigInt cb = numerator(fv);
        if (cb < functional_min_[f] || cb > functional_max_[f]) continue;
        auto it = index_[f].lines.find(cb.convert_to<std::int64_t>());
        if (it == index_[f].lines.end()) continue;
        Rational free = f == 1 ? Rational(p.b * scale_) : Rational(p.a * scale_);
        for (std::uint32_t j : it->second) {
            const RawSide& sd = raw_[j];
            std::int64_t lo = std::min(free_coord(f, sd.a1, sd.b1), free_coord(f, sd.a2, sd.b2));
            if (free < lo) break;
            if (free > lo + 1) continue;
            std::int64_t start = free_coord(f, sd.a1, sd.b1);
            Rational u = start == lo ? Rational(free - lo) : Rational(lo + 1 - free);
            return std::make_pair(j + 1, u);
        }
    }
    return std::nullopt;
}

inline bool Prefractal::inward_at(std::size_t j0, const Rational& u,
                                  const LatticeVector& d) const {
    auto side_dir = [&](std::size_t j) {
        const RawSide& sd = raw_[j];
        return std::pair<std::int64_t, std::int64_t>{sd.a2 - sd.a1, sd.b2 - sd.b1};
    };
    auto cross_with = [&](std::pair<std::int64_t, std::int64_t> v) {
        return Rational(v.first * d.b - d.a * v.second);
    };
    if (u > 0 && u < 1) return cross_with(side_dir(j0)) > 0;
    std::size_t in_side, out_side;
    if (u == 0) {
        in_side = j0 == 0 ? raw_.size() - 1 : j0 - 1;
        out_side = j0;
    } else {
        in_side = j0;
        out_side = j0 + 1 == raw_.size() ? 0 : j0 + 1;
    }
    Rational ci = cross_with(side_dir(in_side));
    Rational co = cross_with(side_dir(out_side));
    if (turn_class(raw_[in_side].dir, raw_[out_side].dir) == AngleClass::pi_over_3)
        return ci > 0 && co > 0;
    return ci > 0 || co > 0;
}

inline std::optional<FirstHit> Prefractal::best_hit_among(
    const std::vector<std::uint32_t>& candidates, const LatticePoint& origin,
    const LatticeVector& d, std::optional<FirstHit> best) const {
    for (std::uint32_t j : candidates) {
        const RawSide& sd = raw_[j];
        Segment seg{unscale(sd.a1, sd.b1), unscale(sd.a2, sd.b2)};
        std::optional<RayHit> h;
        try {
            h = ray_hit(origin, d, seg);
        } catch (const domain_error&) {
            continue;  // collinear through the origin: endpoints found via transversal sides
        }
        if (!h) continue;
        if (!best || h->t < best->t)
            best = FirstHit{j + 1, h->point, h->t, h->at_vertex, h->position};
        else if (h->t == best->t && h->at_vertex)
            best->at_vertex = true;
    }
    return best;
}

inline std::optional<FirstHit> Prefractal::axis_first_hit(const LatticePoint& origin,
                                                          const LatticeVector& d,
                                                          int conserved) const {
    Rational g0 = functional_rat(conserved, origin);
    BigInt k = floor_rational(g0);
    std::optional<FirstHit> best;
    auto try_bucket = [&](BigInt key) {
        if (key < functional_min_[conserved] || key >= functional_max_[conserved]) return;
        auto it = index_[conserved].buckets.find(key.convert_to<std::int64_t>());
        if (it != index_[conserved].buckets.end())
            best = best_hit_among(it->second, origin, d, std::move(best));
    };
    try_bucket(k);
    if (g0 == Rational(k)) try_bucket(k - 1);
    return best;
}

inline std::optional<FirstHit> Prefractal::scan_first_hit(const LatticePoint& origin,
                                                          const LatticeVector& d) const {
    std::array<Rational, 3> f0, fd;
    for (int f = 0; f < 3; ++f) {
        f0[f] = functional_rat(f, origin);
        fd[f] = f == 0 ? Rational(d.b * scale_) : f == 1 ? Rational(d.a * scale_)
                                                         : Rational((d.a + d.b) * scale_);
        if (fd[f] == 0) throw invariant_error("line scan requires a non-axis direction");
    }
    struct Walker {
        BigInt c;
        int step;
    };
    std::array<Walker, 3> w;
    for (int f = 0; f < 3; ++f) {
        if (fd[f] > 0) {
            w[f].step = 1;
            w[f].c = floor_rational(f0[f]) + 1;
        } else {
            w[f].step = -1;
            w[f].c = f0[f] == Rational(floor_rational(f0[f])) ? floor_rational(f0[f]) - 1
                                                              : floor_rational(f0[f]);
        }
    }
    auto in_range = [&](int f) {
        return w[f].c >= functional_min_[f] && w[f].c <= functional_max_[f];
    };
    auto live = [&](int f) {
        return w[f].step > 0 ? w[f].c <= functional_max_[f] : w[f].c >= functional_min_[f];
    };
    while (live(0) || live(1) || live(2)) {
        int pick = -1;
        Rational t_pick;
        for (int f = 0; f < 3; ++f) {
            if (!live(f)) continue;
            Rational t = Rational(Rational(w[f].c) - f0[f]) / fd[f];
            if (pick < 0 || t < t_pick) {
                pick = f;
                t_pick = t;
            }
        }
        if (pick < 0) break;
        if (in_range(pick)) {
            auto it = index_[pick].lines.find(w[pick].c.convert_to<std::int64_t>());
            if (it != index_[pick].lines.end()) {
                Rational free = pick == 1 ? Rational((origin.b + t_pick * d.b) * scale_)
                                          : Rational((origin.a + t_pick * d.a) * scale_);
                for (std::uint32_t j : it->second) {
                    const RawSide& sd = raw_[j];
                    std::int64_t lo =
                        std::min(free_coord(pick, sd.a1, sd.b1), free_coord(pick, sd.a2, sd.b2));
                    if (free < lo) break;
                    if (free > lo + 1) continue;
                    std::int64_t start = free_coord(pick, sd.a1, sd.b1);
                    Rational u = start == lo ? Rational(free - lo) : Rational(lo + 1 - free);
                    LatticePoint hit{origin.a + t_pick * d.a, origin.b + t_pick * d.b};
                    return FirstHit{j + 1, hit, t_pick, u == 0 || u == 1, u};
                }
            }
        }
        w[pick].c += w[pick].step;
    }
    return std::nullopt;
}

inline FirstHit Prefractal::first_hit(const LatticePoint& origin, const LatticeVector& d) const {
    LatticeVector dn = normalize_direction(d);
    if (auto at = boundary_side_at(origin)) {
        if (!inward_at(at->first - 1, at->second, dn))
            throw domain_error("first_hit: direction does not point into the table");
    }
    std::optional<FirstHit> best;
    if (auto k = direction_index(dn))
        best = axis_first_hit(origin, d, family_of_dir(*k));
    else
        best = scan_first_hit(origin, d);
    if (!best) {
        if (locate(origin).region == Region::outside)
            throw domain_error("first_hit: origin lies outside the table");
        throw invariant_error("first_hit: interior ray found no boundary side");
    }
    return *best;
}

inline Location Prefractal::locate(const LatticePoint& p) const {
    if (auto at = boundary_side_at(p))
        return Location{Region::boundary, at->first, at->second};
    Rational pa(p.a * scale_), pb(p.b * scale_);
    bool small = false;
    std::int64_t pan = 0, pad = 1, pbn = 0, pbd = 1;
    if (numerator(pa) <= INT32_MAX && numerator(pa) >= INT32_MIN &&
        denominator(pa) <= INT32_MAX && numerator(pb) <= INT32_MAX &&
        numerator(pb) >= INT32_MIN && denominator(pb) <= INT32_MAX) {
        small = true;
        pan = numerator(pa).convert_to<std::int64_t>();
        pad = denominator(pa).convert_to<std::int64_t>();
        pbn = numerator(pb).convert_to<std::int64_t>();
        pbd = denominator(pb).convert_to<std::int64_t>();
    }
    std::size_t crossings = 0;
    for (const RawSide& sd : raw_) {
        if (sd.b1 == sd.b2) continue;
        if (small) {
            bool above1 = sd.b1 * pbd > pbn, above2 = sd.b2 * pbd > pbn;
            if (above1 == above2) continue;
            // a at the crossing, compared with pa; side deltas are unit steps
            __int128 lhs = (__int128)(sd.a1 * (sd.b2 - sd.b1) * pbd + (pbn - sd.b1 * pbd) * (sd.a2 - sd.a1)) * pad;
            __int128 rhs = (__int128)pan * pbd * (sd.b2 - sd.b1);
            if (sd.b2 < sd.b1) std::swap(lhs, rhs);
            if (lhs > rhs) ++crossings;
        } else {
            bool above1 = Rational(sd.b1) > pb, above2 = Rational(sd.b2) > pb;
            if (above1 == above2) continue;
            Rational across = Rational(sd.a1) + Rational(pb - sd.b1) * (sd.a2 - sd.a1) / (sd.b2 - sd.b1);
            if (across > pa) ++crossings;
        }
    }
    return Location{crossings % 2 == 1 ? Region::inside : Region::outside, 0, Rational(0)};
}

inline VertexCensus vertex_census(const Prefractal& p) { return p.census(); }

inline FirstHit first_hit(const Prefractal& p, const LatticePoint& origin,
                          const LatticeVector& d) {
    return p.first_hit(origin, d);
}

inline AddressWord side_address(const Prefractal& p, std::size_t k) { return p.address_of(k); }

inline BigInt triangle_count(const Prefractal& p, unsigned k) {
    if (k < p.level()) throw domain_error("triangle_count: tile scale is coarser than the level");
    Rational c = Rational(2) * p.area() * pow_int(9, k);
    if (!is_integer(c)) throw invariant_error("triangle_count: non-integer tile count");
    return numerator(c);
}

inline BigInt triangle_count(unsigned n, unsigned k) {
    return triangle_count(build_prefractal(n), k);
}

}  // namespace koch
