#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "koch/dynamics.hpp"

using namespace koch;

namespace {

BilliardState state_at(const Prefractal& p, const std::string& addr, const Rational& pos,
                       int da, int db) {
    return BilliardState{p.index_of(addr), pos, LatticeVector{da, db}};
}

std::vector<std::string> side_addresses(const Prefractal& p, const Orbit& o) {
    std::vector<std::string> out;
    for (const auto& s : o.states) out.push_back(p.address_of(s.side));
    return out;
}

}  // namespace

TEST_CASE("single reflection steps on the triangle") {
    Prefractal p0 = build_prefractal(0);

    auto r1 = billiard_step(p0, state_at(p0, "5", Rational(1, 2), 0, 1));
    auto* s1 = std::get_if<BilliardState>(&r1);
    REQUIRE(s1 != nullptr);
    CHECK(p0.address_of(s1->side) == "1");
    CHECK(s1->position == Rational(1, 2));
    CHECK(s1->direction == LatticeVector{-1, 0});

    auto r2 = billiard_step(p0, state_at(p0, "5", Rational(1, 4), 0, 1));
    auto* s2 = std::get_if<BilliardState>(&r2);
    REQUIRE(s2 != nullptr);
    CHECK(p0.address_of(s2->side) == "1");
    CHECK(s2->position == Rational(3, 4));
    CHECK(s2->direction == LatticeVector{-1, 0});

    // flight from the corner straight along the left side ends at the apex
    auto r3 = billiard_step(p0, state_at(p0, "5", Rational(0), 0, 1));
    auto* v3 = std::get_if<SingularHit>(&r3);
    REQUIRE(v3 != nullptr);
    CHECK(v3->vertex == LatticePoint{Rational(0), Rational(1)});
    CHECK(v3->t == Rational(1));

    // corner start with a direction into the interior is a plain step
    auto r4 = billiard_step(p0, state_at(p0, "5", Rational(0), 1, 1));
    auto* s4 = std::get_if<BilliardState>(&r4);
    REQUIRE(s4 != nullptr);
    CHECK(p0.address_of(s4->side) == "1");
    CHECK(s4->position == Rational(1, 2));
    CHECK(s4->direction == LatticeVector{-1, -1});

    CHECK_THROWS_AS(billiard_step(p0, BilliardState{0, Rational(1, 2), {0, 1}}), domain_error);
    CHECK_THROWS_AS(billiard_step(p0, state_at(p0, "5", Rational(3, 2), 0, 1)), domain_error);
    CHECK_THROWS_AS(billiard_step(p0, state_at(p0, "5", Rational(1, 2), 0, -1)), domain_error);
}

TEST_CASE("triangle orbits: midpoint closes in three bounces, quarter point in six") {
    Prefractal p0 = build_prefractal(0);

    Orbit fag = compute_orbit(p0, state_at(p0, "5", Rational(1, 2), 0, 1));
    REQUIRE(fag.status.kind == OrbitStatusKind::periodic);
    CHECK(fag.status.period == 3);
    CHECK(fag.states.size() == 3);
    REQUIRE(fag.length.has_value());
    CHECK(*fag.length == Rational(3, 2));
    CHECK(fag.unit_family);
    CHECK(side_addresses(p0, fag) == std::vector<std::string>{"5", "1", "3"});
    for (const auto& s : fag.states) CHECK(s.position == Rational(1, 2));
    CHECK(fag.states[1].direction == LatticeVector{-1, 0});
    CHECK(fag.states[2].direction == LatticeVector{1, -1});

    Orbit hex = compute_orbit(p0, state_at(p0, "5", Rational(1, 4), 0, 1));
    REQUIRE(hex.status.kind == OrbitStatusKind::periodic);
    CHECK(hex.status.period == 6);
    REQUIRE(hex.length.has_value());
    CHECK(*hex.length == Rational(3));
    CHECK(side_addresses(p0, hex) ==
          std::vector<std::string>{"5", "1", "3", "5", "1", "3"});
    std::vector<Rational> want_pos{Rational(1, 4), Rational(3, 4), Rational(1, 4),
                                   Rational(3, 4), Rational(1, 4), Rational(3, 4)};
    for (std::size_t i = 0; i < 6; ++i) CHECK(hex.states[i].position == want_pos[i]);

    // the same shape exists through every non-corner base point; 1/3 works too
    Orbit third = compute_orbit(p0, state_at(p0, "5", Rational(1, 3), 0, 1));
    REQUIRE(third.status.kind == OrbitStatusKind::periodic);
    CHECK(third.status.period == 6);
    CHECK(*third.length == Rational(3));
}

TEST_CASE("budget handling") {
    Prefractal p0 = build_prefractal(0);
    BilliardState init = state_at(p0, "5", Rational(1, 2), 0, 1);

    Orbit cut = compute_orbit(p0, init, 2);
    CHECK(cut.status.kind == OrbitStatusKind::budget_exceeded);
    CHECK(cut.states.size() == 3);

    Orbit fit = compute_orbit(p0, init, 3);
    CHECK(fit.status.kind == OrbitStatusKind::periodic);
    CHECK(fit.status.period == 3);

    CHECK_THROWS_AS(compute_orbit(p0, init, 0), domain_error);
}

TEST_CASE("orbits that run into a corner walk their past as well") {
    Prefractal p0 = build_prefractal(0);
    Orbit apex = compute_orbit(p0, state_at(p0, "5", Rational(1, 2), -1, 2));
    REQUIRE(apex.status.kind == OrbitStatusKind::singular);
    REQUIRE(apex.status.forward_vertex.has_value());
    CHECK(*apex.status.forward_vertex == LatticePoint{Rational(0), Rational(1)});
    REQUIRE(apex.status.backward_vertex.has_value());
    CHECK(*apex.status.backward_vertex == LatticePoint{Rational(0), Rational(1)});
    CHECK(apex.status.saddle_connection);
    CHECK(apex.states.size() == 1);
    CHECK(apex.initial_index == 0);
    CHECK_FALSE(apex.unit_family);
    CHECK_FALSE(apex.length.has_value());

    // perpendicular wall bounce whose flight line passes through a corner
    Prefractal p1 = build_prefractal(1);
    Orbit perp = compute_orbit(p1, state_at(p1, "30", Rational(1, 2), 2, -1));
    REQUIRE(perp.status.kind == OrbitStatusKind::singular);
    CHECK(*perp.status.forward_vertex == LatticePoint{Rational(1, 3), Rational(0)});
    CHECK(*perp.status.backward_vertex == LatticePoint{Rational(1, 3), Rational(0)});
    CHECK(perp.status.saddle_connection);
    CHECK(perp.states.size() == 1);
}

TEST_CASE("base points carried to the boundary below") {
    Prefractal p1 = build_prefractal(1);

    BilliardState mid = compatible_basepoint(Rational(1, 2), p1);
    CHECK(p1.address_of(mid.side) == "51");
    CHECK(mid.position == Rational(1, 2));
    CHECK(mid.direction == LatticeVector{0, 1});

    BilliardState seven = compatible_basepoint(Rational(7, 12), p1);
    CHECK(p1.address_of(seven.side) == "51");
    CHECK(seven.position == Rational(3, 4));
    CHECK(state_point(p1, seven) == LatticePoint{Rational(7, 12), Rational(-1, 4)});

    BilliardState five = compatible_basepoint(Rational(5, 12), p1);
    CHECK(p1.address_of(five.side) == "51");
    CHECK(five.position == Rational(1, 4));

    for (unsigned n = 0; n <= 3; ++n) {
        Prefractal p = build_prefractal(n);
        BilliardState q = compatible_basepoint(Rational(1, 4), p);
        CHECK(state_point(p, q) == LatticePoint{Rational(1, 4), Rational(0)});
        CHECK(q.direction == LatticeVector{0, 1});
    }

    CHECK_THROWS_AS(compatible_basepoint(Rational(1, 3), p1), domain_error);
    CHECK_THROWS_AS(compatible_basepoint(Rational(0), p1), domain_error);
    CHECK_THROWS_AS(compatible_basepoint(Rational(1), p1), domain_error);
}

TEST_CASE("level one orbit of the midpoint family") {
    Prefractal p1 = build_prefractal(1);
    Orbit o = compute_orbit(p1, compatible_basepoint(Rational(1, 2), p1));
    REQUIRE(o.status.kind == OrbitStatusKind::periodic);
    CHECK(o.status.period == 6);
    REQUIRE(o.length.has_value());
    CHECK(*o.length == Rational(3));
    CHECK(side_addresses(p1, o) ==
          std::vector<std::string>{"51", "13", "11", "33", "31", "53"});
    for (const auto& s : o.states) CHECK(s.position == Rational(1, 2));
    std::vector<LatticeVector> dirs{{0, 1}, {1, -1}, {-1, 0}, {0, 1}, {1, -1}, {-1, 0}};
    for (std::size_t i = 0; i < 6; ++i) CHECK(o.states[i].direction == dirs[i]);
}

TEST_CASE("compatible sequences of the classic base points") {
    CompatibleSequence mid = compatible_sequence(Rational(1, 2), 2);
    REQUIRE(mid.orbits.size() == 3);
    CHECK_FALSE(mid.diagnostic.has_value());
    CHECK(mid.orbits[0].status.period == 3);
    CHECK(mid.orbits[1].status.period == 6);
    CHECK(mid.orbits[2].status.period == 12);
    CHECK(*mid.orbits[0].length == Rational(3, 2));
    CHECK(*mid.orbits[1].length == Rational(3));
    CHECK(*mid.orbits[2].length == Rational(4));

    CompatibleSequence seven = compatible_sequence(Rational(7, 12), 4);
    REQUIRE(seven.orbits.size() == 5);
    for (unsigned n = 1; n <= 4; ++n) CHECK(seven.orbits[n].status.period == 6);
    Prefractal p1 = build_prefractal(1);
    for (unsigned n = 2; n <= 4; ++n) {
        Prefractal pn = build_prefractal(n);
        CHECK(same_footprint(p1, seven.orbits[1], pn, seven.orbits[n]));
    }

    CompatibleSequence quarter = compatible_sequence(Rational(1, 4), 3);
    REQUIRE(quarter.orbits.size() == 4);
    Prefractal p0 = build_prefractal(0);
    for (unsigned n = 0; n <= 3; ++n) {
        CHECK(quarter.orbits[n].status.period == 6);
        Prefractal pn = build_prefractal(n);
        CHECK(same_footprint(p0, quarter.orbits[0], pn, quarter.orbits[n]));
    }

    CHECK_THROWS_AS(compatible_sequence(Rational(1, 3), 2), domain_error);
}

TEST_CASE("stabilization levels") {
    CHECK(stabilization_index(compatible_sequence(Rational(7, 12), 4)) == 1u);
    CHECK(stabilization_index(compatible_sequence(Rational(5, 12), 4)) == 1u);
    CHECK(stabilization_index(compatible_sequence(Rational(1, 4), 3)) == 0u);
    CHECK_FALSE(stabilization_index(compatible_sequence(Rational(1, 2), 3)).has_value());

    // the level where the expansion sheds its last center digit
    OrbitClass c7 = classify(Rational(7, 12));
    REQUIRE(c7.kind == OrbitClassKind::stabilizing);
    CHECK(*c7.n == 1);
    OrbitClass c4 = classify(Rational(1, 4));
    REQUIRE(c4.kind == OrbitClassKind::stabilizing);
    CHECK(*c4.n == 0);
}

TEST_CASE("midpoint orbits are recognized") {
    Prefractal p1 = build_prefractal(1);
    Prefractal p2 = build_prefractal(2);
    Prefractal p0 = build_prefractal(0);

    Orbit fag = compute_orbit(p0, state_at(p0, "5", Rational(1, 2), 0, 1));
    CHECK(is_pf_orbit(fag, p1));

    Orbit ppf1 = compute_orbit(p1, compatible_basepoint(Rational(1, 2), p1));
    CHECK(is_pf_orbit(ppf1, p2));

    Orbit quarter1 = compute_orbit(p1, compatible_basepoint(Rational(1, 4), p1));
    CHECK_FALSE(is_pf_orbit(quarter1, p2));

    CHECK_THROWS_AS(is_pf_orbit(fag, p2), domain_error);
}

TEST_CASE("collapse of midpoint orbits onto the coarser level") {
    CompatibleSequence mid = compatible_sequence(Rational(1, 2), 2);
    Prefractal p1 = build_prefractal(1);
    Prefractal p2 = build_prefractal(2);

    PairCollapseReport r1 = pair_collapse_check(mid.orbits[1], mid.orbits[0], p1);
    CHECK(r1.doubling);
    CHECK(r1.pairing);
    CHECK(r1.ghost_midpoints);
    CHECK(r1.length_rule);
    CHECK(r1.passed());

    PairCollapseReport r2 = pair_collapse_check(mid.orbits[2], mid.orbits[1], p2);
    CHECK(r2.passed());

    CompatibleSequence quarter = compatible_sequence(Rational(1, 4), 1);
    PairCollapseReport bad =
        pair_collapse_check(quarter.orbits[1], quarter.orbits[0], p1);
    CHECK_FALSE(bad.doubling);
    CHECK_FALSE(bad.passed());
    CHECK_FALSE(bad.detail.empty());
}

TEST_CASE("unfolded paths are straight") {
    Prefractal p0 = build_prefractal(0);

    Orbit fag = compute_orbit(p0, state_at(p0, "5", Rational(1, 2), 0, 1));
    UnfoldedPath uf = unfold(p0, fag);
    std::vector<LatticePoint> want{{Rational(1, 2), Rational(0)},
                                   {Rational(1, 2), Rational(1, 2)},
                                   {Rational(1, 2), Rational(1)},
                                   {Rational(1, 2), Rational(3, 2)}};
    CHECK(uf.breakpoints == want);
    CHECK(uf.direction == LatticeVector{0, 1});

    Orbit hex = compute_orbit(p0, state_at(p0, "5", Rational(1, 4), 0, 1));
    UnfoldedPath uh = unfold(p0, hex);
    REQUIRE(uh.breakpoints.size() == 7);
    CHECK(uh.breakpoints.back() ==
          LatticePoint{Rational(1, 4), Rational(3)});

    // one flight only: nothing to straighten
    Orbit one = compute_orbit(p0, state_at(p0, "5", Rational(1, 2), 0, 1), 1);
    CHECK(unfold(p0, one).breakpoints.size() == 2);

    // a saddle connection unfolds into a straight chord as well
    Prefractal p1 = build_prefractal(1);
    Orbit perp = compute_orbit(p1, state_at(p1, "30", Rational(1, 2), 2, -1));
    UnfoldedPath up = unfold(p1, perp);
    REQUIRE(up.breakpoints.size() == 3);
    CHECK(up.breakpoints.front() == LatticePoint{Rational(1, 3), Rational(0)});
    CHECK(up.breakpoints.back() == LatticePoint{Rational(-1, 3), Rational(1, 3)});
}

TEST_CASE("map properties: determinism, exact recurrence, reversibility, conservation") {
    Prefractal p1 = build_prefractal(1);
    BilliardState init = compatible_basepoint(Rational(1, 2), p1);

    Orbit a = compute_orbit(p1, init);
    Orbit b = compute_orbit(p1, init);
    CHECK(a.states == b.states);

    // running the map on past the period reproduces the states exactly
    BilliardState cur = init;
    for (std::size_t round = 0; round < 2; ++round) {
        for (std::size_t i = 0; i < a.status.period; ++i) {
            CHECK(cur == a.states[i]);
            auto r = billiard_step(p1, cur);
            REQUIRE(std::holds_alternative<BilliardState>(r));
            cur = std::get<BilliardState>(r);
        }
    }
    CHECK(cur == init);

    for (std::size_t i = 0; i + 1 < a.states.size(); ++i) {
        const BilliardState& from = a.states[i];
        const BilliardState& to = a.states[i + 1];

        // backward cast from the later state recovers the earlier one
        LatticeVector arrival = reflect_direction(to.direction, side_orientation(p1, to.side));
        FirstHit back = p1.first_hit(state_point(p1, to),
                                     LatticeVector{-arrival.a, -arrival.b});
        CHECK(back.side == from.side);
        CHECK(back.position == from.position);
        CHECK(arrival == from.direction);

        CHECK(squared_length(to.direction) == 1);
        int m = static_cast<int>(side_orientation(p1, to.side));
        int kin = *direction_index(from.direction);
        int kout = *direction_index(to.direction);
        CHECK(kout == ((2 * m - kin) % 6 + 6) % 6);
    }
}

TEST_CASE("period ratios along a sequence stay within doubling") {
    for (const Rational& x0 : {Rational(1, 2), Rational(7, 12), Rational(5, 12),
                               Rational(1, 4), Rational(1, 6), Rational(1, 8),
                               Rational(7, 18)}) {
        CompatibleSequence seq = compatible_sequence(x0, 6);
        REQUIRE(seq.orbits.size() == 7);
        for (unsigned n = 1; n < seq.orbits.size(); ++n) {
            REQUIRE(seq.orbits[n].status.kind == OrbitStatusKind::periodic);
            std::size_t prev = seq.orbits[n - 1].status.period;
            std::size_t here = seq.orbits[n].status.period;
            bool ok = here == prev || here == 2 * prev;
            CHECK(ok);
        }
    }
}

TEST_CASE("levels whose digit misses the center keep the footprint") {
    for (const Rational& x0 :
         {Rational(7, 12), Rational(5, 12), Rational(1, 4), Rational(1, 6),
          Rational(7, 18), Rational(1, 2)}) {
        CompatibleSequence seq = compatible_sequence(x0, 6);
        TernaryExpansion e = expand(x0);
        for (unsigned n = 1; n < seq.orbits.size(); ++n) {
            if (e.digit_at(n) == TernaryDigit::c) continue;
            Prefractal pa = build_prefractal(n - 1);
            Prefractal pb = build_prefractal(n);
            CHECK(same_footprint(pa, seq.orbits[n - 1], pb, seq.orbits[n]));
        }
    }
}

TEST_CASE("midpoint sequence footprints nest under truncation") {
    CompatibleSequence mid = compatible_sequence(Rational(1, 2), 4);
    for (unsigned n = 1; n <= 4; ++n) {
        Prefractal pa = build_prefractal(n - 1);
        Prefractal pb = build_prefractal(n);
        std::set<std::string> coarse;
        for (const auto& s : mid.orbits[n - 1].states) coarse.insert(pa.address_of(s.side));
        std::set<std::string> shadow;
        for (const auto& s : mid.orbits[n].states)
            shadow.insert(koch::truncate(pb.address_of(s.side), n));
        CHECK(shadow == coarse);
    }
}

TEST_CASE("interior starts and corner-bound rays") {
    Prefractal p1 = build_prefractal(1);
    CHECK_THROWS_AS(
        entry_state(p1, LatticePoint{Rational(1, 6), Rational(1, 6)}, LatticeVector{1, -1}),
        corner_compatible_error);
    CHECK_THROWS_AS(
        entry_state(p1, LatticePoint{Rational(-1), Rational(-1)}, LatticeVector{0, 1}),
        domain_error);

    BilliardState s =
        entry_state(p1, LatticePoint{Rational(1, 2), Rational(0)}, LatticeVector{0, 1});
    CHECK(p1.address_of(s.side) == "13");
    CHECK(s.direction == LatticeVector{1, -1});
}

TEST_CASE("direction probes close up") {
    ProbeReport vertical = periodic_direction_probe(LatticeVector{0, 1}, 2, 6);
    CHECK(vertical.samples.size() == 6);
    CHECK(vertical.all_closed);
    for (const auto& s : vertical.samples) {
        CHECK(s.coarse_status == OrbitStatusKind::periodic);
        CHECK(s.fine_status == OrbitStatusKind::periodic);
        CHECK(s.fine_period % s.coarse_period == 0);
    }

    ProbeReport skew = periodic_direction_probe(LatticeVector{1, 2}, 1, 4);
    CHECK(skew.all_closed);
    for (const auto& s : skew.samples) {
        CHECK(s.coarse_status != OrbitStatusKind::budget_exceeded);
        CHECK(s.fine_status != OrbitStatusKind::budget_exceeded);
    }

    ProbeReport flat = periodic_direction_probe(LatticeVector{1, 0}, 0, 3);
    CHECK(flat.all_closed);
    for (const auto& s : flat.samples)
        CHECK(s.coarse_status == OrbitStatusKind::periodic);
}
