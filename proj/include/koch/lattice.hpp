// Exact plane geometry in the triangular-lattice basis e1 = (1,0),
// e2 = (1/2, sqrt(3)/2): points, directions, the three mirror orientations,
// specular reflection, ray/segment intersection, and the shoelace area.
#ifndef koch_lattice_hpp
#define koch_lattice_hpp

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "koch/rational.hpp"

namespace koch {

struct LatticePoint {
    Rational a, b;
    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

struct LatticeVector {
    Rational a, b;
    friend bool operator==(const LatticeVector&, const LatticeVector&) = default;
};

inline LatticeVector operator-(const LatticePoint& p, const LatticePoint& q) {
    return {p.a - q.a, p.b - q.b};
}
inline LatticePoint operator+(const LatticePoint& p, const LatticeVector& v) {
    return {p.a + v.a, p.b + v.b};
}
inline LatticeVector operator*(const Rational& t, const LatticeVector& v) {
    return {t * v.a, t * v.b};
}

inline bool is_zero(const LatticeVector& v) { return v.a == 0 && v.b == 0; }

// Determinant in lattice coordinates; its sign equals the sign of the
// Cartesian cross product (the basis change has positive determinant).
inline Rational cross(const LatticeVector& u, const LatticeVector& v) {
    return u.a * v.b - u.b * v.a;
}

// Quadratic form of the basis: |a*e1 + b*e2|^2 = a^2 + ab + b^2.
inline Rational squared_length(const LatticeVector& v) {
    return v.a * v.a + v.a * v.b + v.b * v.b;
}

inline std::pair<double, double> to_cartesian(const LatticePoint& p) {
    static const double root3_half = std::sqrt(3.0) / 2.0;
    double a = p.a.convert_to<double>();
    double b = p.b.convert_to<double>();
    return {a + b / 2.0, b * root3_half};
}

// The six unit directions of the pi/3 family, indexed so direction k points
// at angle k*60 degrees.
inline const std::array<LatticeVector, 6>& unit_directions() {
    static const std::array<LatticeVector, 6> dirs = {{
        {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1},
    }};
    return dirs;
}

inline std::optional<int> direction_index(const LatticeVector& v) {
    const auto& dirs = unit_directions();
    for (int k = 0; k < 6; ++k)
        if (v == dirs[k]) return k;
    return std::nullopt;
}

// Scales a nonzero rational vector to its canonical primitive integer form
// (integer components with gcd 1, orientation preserved).
inline LatticeVector normalize_direction(const LatticeVector& v) {
    if (is_zero(v)) throw domain_error("normalize_direction: zero vector");
    BigInt lcm_den = lcm(denominator(v.a), denominator(v.b));
    BigInt na = numerator(v.a) * (lcm_den / denominator(v.a));
    BigInt nb = numerator(v.b) * (lcm_den / denominator(v.b));
    BigInt g = gcd(abs(na), abs(nb));
    return {Rational(na / g), Rational(nb / g)};
}

// Index of the pi/3-family ray parallel to v (positive multiple), if any.
inline std::optional<int> family_index(const LatticeVector& v) {
    if (is_zero(v)) return std::nullopt;
    return direction_index(normalize_direction(v));
}

enum class OrientationClass { horizontal, up_right, up_left };

// Lines of the three orientations are the level sets of b, a, and a+b.
inline Rational line_functional(OrientationClass o, const Rational& a, const Rational& b) {
    switch (o) {
        case OrientationClass::horizontal: return b;
        case OrientationClass::up_right: return a;
        default: return a + b;
    }
}
inline Rational line_functional(OrientationClass o, const LatticePoint& p) {
    return line_functional(o, p.a, p.b);
}
inline Rational line_functional(OrientationClass o, const LatticeVector& v) {
    return line_functional(o, v.a, v.b);
}

inline std::optional<OrientationClass> orientation_class(const LatticeVector& v) {
    if (is_zero(v)) return std::nullopt;
    if (v.b == 0) return OrientationClass::horizontal;
    if (v.a == 0) return OrientationClass::up_right;
    if (v.a + v.b == 0) return OrientationClass::up_left;
    return std::nullopt;
}

struct Segment {
    LatticePoint start, end;
    friend bool operator==(const Segment&, const Segment&) = default;
};

inline OrientationClass segment_orientation(const Segment& s) {
    auto o = orientation_class(s.end - s.start);
    if (!o) throw domain_error("segment_orientation: segment not in the pi/3 family");
    return *o;
}

inline LatticeVector reflect_direction(const LatticeVector& d, OrientationClass o) {
    if (is_zero(d)) throw domain_error("reflect_direction: zero vector");
    switch (o) {
        case OrientationClass::horizontal: return {d.a + d.b, -d.b};
        case OrientationClass::up_right: return {-d.a, d.a + d.b};
        default: return {-d.b, -d.a};
    }
}

// Mirror orientation m*60 degrees sends direction index k to (2m - k) mod 6.
inline int reflect_direction_index(int k, OrientationClass o) {
    int m = o == OrientationClass::horizontal ? 0 : o == OrientationClass::up_right ? 1 : 2;
    return ((2 * m - k) % 6 + 6) % 6;
}

inline LatticePoint reflect_point(const LatticePoint& p, const Segment& s) {
    OrientationClass o = segment_orientation(s);
    LatticeVector r = reflect_direction(p - s.start, o);
    return s.start + r;
}

struct RayHit {
    Rational t;
    LatticePoint point;
    bool at_vertex;
    Rational position;  // parameter along the segment, 0 at start, 1 at end
};

// First forward intersection (t > 0) of the ray origin + t*d with segment s.
// A ray lying in the segment's own line hits at the nearest forward endpoint;
// launching such a ray from strictly inside the segment is rejected.
inline std::optional<RayHit> ray_hit(const LatticePoint& origin, const LatticeVector& d,
                                     const Segment& s) {
    if (is_zero(d)) throw domain_error("ray_hit: zero direction");
    OrientationClass o = segment_orientation(s);
    Rational line_c = line_functional(o, s.start);
    Rational v0 = line_functional(o, origin);
    Rational dv = line_functional(o, d);

    // Coordinate that varies along the segment's line.
    auto free_coord = [&](const Rational& a, const Rational& b) {
        return o == OrientationClass::up_right ? b : a;
    };
    Rational f_start = free_coord(s.start.a, s.start.b);
    Rational f_end = free_coord(s.end.a, s.end.b);
    Rational f_len = f_end - f_start;

    if (dv == 0) {
        if (v0 != line_c) return std::nullopt;
        Rational f_origin = free_coord(origin.a, origin.b);
        Rational u_origin = (f_origin - f_start) / f_len;
        if (u_origin > 0 && u_origin < 1)
            throw domain_error("ray_hit: ray lies in the segment's line from inside it");
        Rational f_d = free_coord(d.a, d.b);
        std::optional<RayHit> best;
        for (const Rational& u : {Rational(0), Rational(1)}) {
            Rational f_target = f_start + u * f_len;
            Rational t = (f_target - f_origin) / f_d;
            if (t <= 0) continue;
            if (!best || t < best->t)
                best = RayHit{t, origin + t * d, true, u};
        }
        return best;
    }

    Rational t = (line_c - v0) / dv;
    if (t <= 0) return std::nullopt;
    LatticePoint hit = origin + t * d;
    Rational u = (free_coord(hit.a, hit.b) - f_start) / f_len;
    if (u < 0 || u > 1) return std::nullopt;
    return RayHit{t, hit, u == 0 || u == 1, u};
}

// Shoelace area in lattice coordinates; the area unit is the basis
// parallelogram, so the unit equilateral triangle measures 1/2.
inline Rational polygon_lattice_area(const std::vector<LatticePoint>& vertices) {
    if (vertices.size() < 3) throw domain_error("polygon_lattice_area: fewer than 3 vertices");
    Rational twice = 0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const LatticePoint& p = vertices[i];
        const LatticePoint& q = vertices[(i + 1) % vertices.size()];
        twice += p.a * q.b - q.a * p.b;
    }
    return twice / 2;
}

}  // namespace koch

#endif
