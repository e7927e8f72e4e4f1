#pragma once

// Command-line front end and file emitters (JSON, CSV, SVG).  Rationals
// cross this boundary as "p/q" strings in both directions; floats appear
// only inside SVG documents.  Identical invocations produce byte-identical
// output, so everything here is deterministic: ordered JSON, fixed column
// orders, seeded sampling.

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "koch/addressing.hpp"
#include "koch/boundary.hpp"
#include "koch/dynamics.hpp"
#include "koch/formulas.hpp"
#include "koch/svg.hpp"
#include "koch/ternary.hpp"

namespace koch {

using Json = nlohmann::ordered_json;

inline Json rational_json(const Rational& x) { return format_rational(x); }

inline Json point_json(const LatticePoint& p) {
    return Json::array({rational_json(p.a), rational_json(p.b)});
}

inline Json vector_json(const LatticeVector& v) {
    return Json::array({rational_json(v.a), rational_json(v.b)});
}

inline const char* status_name(OrbitStatusKind k) {
    switch (k) {
        case OrbitStatusKind::periodic: return "Periodic";
        case OrbitStatusKind::singular: return "Singular";
        default: return "BudgetExceeded";
    }
}

inline Json class_json(const OrbitClass& c) {
    Json j;
    j["kind"] = orbit_class_name(c.kind);
    j["n"] = c.n ? Json(*c.n) : Json(nullptr);
    return j;
}

inline Json expansion_json(const TernaryExpansion& e) {
    Json j;
    j["prefix"] = digits_to_string(e.prefix);
    j["cycle"] = digits_to_string(e.cycle);
    j["terminating"] = e.terminating;
    if (e.zero_two_alias) {
        Json a;
        a["prefix"] = digits_to_string(e.zero_two_alias->first);
        a["cycle"] = digits_to_string(e.zero_two_alias->second);
        j["repeating_alias"] = a;
    } else {
        j["repeating_alias"] = nullptr;
    }
    return j;
}

inline Json state_json(const Prefractal& p, const BilliardState& s) {
    Json j;
    j["side"] = s.side;
    j["address"] = p.address_of(s.side);
    j["position"] = rational_json(s.position);
    j["direction"] = vector_json(s.direction);
    j["point"] = point_json(state_point(p, s));
    return j;
}

inline Json footprint_json(const Prefractal& p, const Orbit& o) {
    Json arr = Json::array();
    for (const FootprintKey& k : footprint_keys(p, o)) {
        Json e;
        e["address"] = k.first;
        e["position"] = rational_json(k.second);
        arr.push_back(e);
    }
    return arr;
}

inline Json orbit_json(const Prefractal& p, const Orbit& o) {
    Json j;
    j["level"] = o.level;
    j["status"] = status_name(o.status.kind);
    j["period"] =
        o.status.kind == OrbitStatusKind::periodic ? Json(o.status.period) : Json(nullptr);
    j["length"] = o.length ? rational_json(*o.length) : Json(nullptr);
    j["unit_family"] = o.unit_family;
    j["initial_index"] = o.initial_index;
    if (o.status.kind == OrbitStatusKind::singular) {
        Json s;
        s["saddle_connection"] = o.status.saddle_connection;
        s["forward_vertex"] =
            o.status.forward_vertex ? point_json(*o.status.forward_vertex) : Json(nullptr);
        s["backward_vertex"] =
            o.status.backward_vertex ? point_json(*o.status.backward_vertex) : Json(nullptr);
        j["singular"] = s;
    } else {
        j["singular"] = nullptr;
    }
    Json states = Json::array();
    for (const BilliardState& s : o.states) states.push_back(state_json(p, s));
    j["states"] = states;
    return j;
}

inline Json make_doc(const std::string& sub) {
    Json j;
    j["schema"] = "kochbill/" + sub + "/v1";
    return j;
}

// Exact column order; the two formula-side length columns stay empty at
// level 0 where the length formula does not apply.
inline std::string study_csv(const std::vector<FormulaReport>& reports) {
    std::ostringstream os;
    os << "x0,class,n,omega,period_formula,period_sim,"
          "length_formula_sim_periods,length_sim,agree_period,agree_length\n";
    for (const FormulaReport& rep : reports) {
        for (const FormulaRecord& rec : rep.records) {
            os << format_rational(rep.x0) << ',' << orbit_class_name(rep.orbit_class.kind)
               << ',' << rec.n << ',' << rec.omega << ',' << rec.period_predicted << ','
               << rec.period_simulated << ','
               << (rec.length_mixed ? format_rational(*rec.length_mixed) : "") << ','
               << (rec.length_simulated ? format_rational(*rec.length_simulated) : "") << ','
               << (rec.agree_period ? '1' : '0') << ','
               << (rec.agree_length ? (*rec.agree_length ? "1" : "0") : "") << '\n';
        }
    }
    return os.str();
}

inline Json study_json(const std::vector<FormulaReport>& reports) {
    Json arr = Json::array();
    for (const FormulaReport& rep : reports) {
        Json r;
        r["x0"] = rational_json(rep.x0);
        r["class"] = class_json(rep.orbit_class);
        r["diagnostic"] = rep.diagnostic ? Json(*rep.diagnostic) : Json(nullptr);
        Json recs = Json::array();
        for (const FormulaRecord& rec : rep.records) {
            Json e;
            e["n"] = rec.n;
            e["omega"] = rec.omega;
            e["period_formula"] = rec.period_predicted.convert_to<long long>();
            e["period_sim"] = rec.period_simulated;
            e["length_formula_sim_periods"] =
                rec.length_mixed ? rational_json(*rec.length_mixed) : Json(nullptr);
            e["length_sim"] =
                rec.length_simulated ? rational_json(*rec.length_simulated) : Json(nullptr);
            e["agree_period"] = rec.agree_period;
            e["agree_length"] = rec.agree_length ? Json(*rec.agree_length) : Json(nullptr);
            recs.push_back(e);
        }
        r["records"] = recs;
        arr.push_back(r);
    }
    return arr;
}

// Distinct rationals in (0,1) with denominator at most qmax and an infinite
// ternary expansion, drawn reproducibly from the seed.
inline std::vector<Rational> random_rationals(std::size_t count, long qmax,
                                              std::uint64_t seed) {
    if (qmax < 3) throw domain_error("random_rationals: denominator bound below 3");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> qd(2, qmax);
    std::vector<Rational> out;
    std::set<Rational> seen;
    std::size_t attempts = 0, cap = 200 * (count + 1);
    while (out.size() < count) {
        if (++attempts > cap) throw invariant_error("random_rationals: sampling stalled");
        long q = qd(rng);
        std::uniform_int_distribution<long> pd(1, q - 1);
        Rational x(pd(rng), q);
        if (classify(x).kind == OrbitClassKind::singular_ternary) continue;
        if (seen.insert(x).second) out.push_back(x);
    }
    return out;
}

// Sample specs: an explicit rational "p/q", the midpoint family "M:n", or
// "random:COUNT:QMAX".  Duplicates across specs are dropped, order kept.
inline std::vector<Rational> expand_sample_specs(const std::vector<std::string>& specs,
                                                 std::uint64_t seed) {
    std::vector<Rational> out;
    std::set<Rational> seen;
    auto push = [&](const Rational& x) {
        if (seen.insert(x).second) out.push_back(x);
    };
    for (const std::string& spec : specs) {
        if (spec.rfind("M:", 0) == 0) {
            unsigned n = 0;
            try {
                n = static_cast<unsigned>(std::stoul(spec.substr(2)));
            } catch (const std::exception&) {
                throw domain_error("bad sample spec: " + spec);
            }
            for (const Rational& m : midpoint_set(n)) push(m);
        } else if (spec.rfind("random:", 0) == 0) {
            std::size_t colon = spec.find(':', 7);
            if (colon == std::string::npos) throw domain_error("bad sample spec: " + spec);
            std::size_t count = 0;
            long qmax = 0;
            try {
                count = std::stoul(spec.substr(7, colon - 7));
                qmax = std::stol(spec.substr(colon + 1));
            } catch (const std::exception&) {
                throw domain_error("bad sample spec: " + spec);
            }
            for (const Rational& x : random_rationals(count, qmax, seed)) push(x);
        } else {
            auto x = parse_rational(spec);
            if (!x) throw domain_error("bad sample spec: " + spec);
            push(*x);
        }
    }
    return out;
}

namespace detail {

inline Rational cli_rational(const std::string& s) {
    auto x = parse_rational(s);
    if (!x) throw domain_error("not a rational: \"" + s + "\" (expected p/q)");
    return *x;
}

inline LatticeVector cli_direction(const std::string& s) {
    std::size_t comma = s.find(',');
    if (comma != std::string::npos) {
        auto a = parse_rational(s.substr(0, comma));
        auto b = parse_rational(s.substr(comma + 1));
        if (a && b) return LatticeVector{*a, *b};
    }
    throw domain_error("not a direction: \"" + s + "\" (expected a,b)");
}

inline void deliver(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw domain_error("cannot open output file: " + path);
    f << text;
}

inline void check_level(unsigned level, unsigned max_level) {
    if (level > max_level)
        throw domain_error("level " + std::to_string(level) +
                           " exceeds the configured maximum " + std::to_string(max_level));
}

inline std::optional<OrbitClass> try_classify(const Rational& x) {
    try {
        return classify(x);
    } catch (const domain_error&) {
        return std::nullopt;
    }
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact billiards on Koch snowflake prefractals"};
    app.require_subcommand(1);

    unsigned n_max = 3, max_level = 8, jobs = 1;
    int width = 800;
    std::size_t budget = kDefaultOrbitBudget, samples = 20;
    std::uint64_t seed = 1;
    std::string x0_str, dir_str, out_path, word;
    std::vector<std::string> sample_specs;
    bool no_ghosts = false, no_cells = false, no_footprint = false;

    // One slot per subcommand: CLI11 leaves unparsed options at their
    // registration-time value, so defaults must not be shared.
    struct { unsigned boundary = 0, orbit = 0, footprint = 0, address = 1,
                      probe = 1, genus = 0, render = 0; } level;
    struct { std::string boundary = "json", footprint = "json", study = "csv"; } fmt;

    auto add_level = [&](CLI::App* c, unsigned& slot) {
        c->add_option("--level", slot, "prefractal level")->capture_default_str();
        c->add_option("--max-level", max_level, "largest level this run accepts")
            ->capture_default_str();
    };
    auto add_out = [&](CLI::App* c) {
        c->add_option("--out", out_path, "write to this file instead of stdout");
    };
    auto add_format = [&](CLI::App* c, std::string& slot,
                          const std::vector<std::string>& allowed) {
        c->add_option("--format", slot, "output format")
            ->check(CLI::IsMember(allowed))
            ->capture_default_str();
    };
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--budget", budget, "bounce budget per orbit")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    CLI::App* c_boundary = app.add_subcommand("boundary", "prefractal boundary data");
    add_level(c_boundary, level.boundary);
    add_format(c_boundary, fmt.boundary, {"json", "csv"});
    add_out(c_boundary);

    CLI::App* c_classify =
        app.add_subcommand("classify", "ternary expansion and orbit class of a rational");
    c_classify->add_option("--x0", x0_str, "base point in (0,1), as p/q")->required();
    add_out(c_classify);

    CLI::App* c_orbit = app.add_subcommand("orbit", "compute one billiard orbit");
    add_level(c_orbit, level.orbit);
    c_orbit->add_option("--x0", x0_str, "base abscissa, as p/q")->required();
    c_orbit->add_option("--dir", dir_str,
                        "launch direction a,b (default: the compatible construction)");
    add_budget(c_orbit);
    add_out(c_orbit);

    CLI::App* c_sequence =
        app.add_subcommand("sequence", "compatible orbit sequence across levels");
    c_sequence->add_option("--x0", x0_str, "base abscissa, as p/q")->required();
    c_sequence->add_option("--n-max", n_max, "deepest level")->capture_default_str();
    c_sequence->add_option("--max-level", max_level, "largest level this run accepts")
        ->capture_default_str();
    add_budget(c_sequence);
    add_out(c_sequence);

    CLI::App* c_footprint = app.add_subcommand("footprint", "orbit footprint on the boundary");
    add_level(c_footprint, level.footprint);
    c_footprint->add_option("--x0", x0_str, "base abscissa, as p/q")->required();
    add_budget(c_footprint);
    add_format(c_footprint, fmt.footprint, {"json", "csv"});
    add_out(c_footprint);

    CLI::App* c_straighten = app.add_subcommand("straighten", "normalize an address word");
    c_straighten->add_option("word", word, "word over the digits 0-5")->required();
    add_out(c_straighten);

    CLI::App* c_address = app.add_subcommand("address", "address arithmetic");
    c_address->add_option("--word", word, "side address word to inspect");
    c_address->add_option("--x0", x0_str, "base abscissa, as p/q");
    add_level(c_address, level.address);
    add_out(c_address);

    CLI::App* c_probe =
        app.add_subcommand("probe", "sample random base points for one direction");
    c_probe->add_option("--dir", dir_str, "direction a,b")->required();
    add_level(c_probe, level.probe);
    c_probe->add_option("--sample", samples, "number of base points")->capture_default_str();
    add_budget(c_probe);
    c_probe->add_option("--seed", seed, "RNG seed")->capture_default_str();
    c_probe->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    add_out(c_probe);

    CLI::App* c_study = app.add_subcommand("study", "period and length formulas vs simulation");
    c_study->add_option("--sample", sample_specs, "sample spec: p/q, M:n, or random:COUNT:QMAX")
        ->required();
    c_study->add_option("--n-max", n_max, "deepest level")->capture_default_str();
    c_study->add_option("--max-level", max_level, "largest level this run accepts")
        ->capture_default_str();
    add_budget(c_study);
    c_study->add_option("--seed", seed, "RNG seed for random specs")->capture_default_str();
    c_study->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    add_format(c_study, fmt.study, {"csv", "json"});
    add_out(c_study);

    CLI::App* c_genus = app.add_subcommand("genus", "genus of the invariant surface");
    add_level(c_genus, level.genus);
    add_out(c_genus);

    CLI::App* c_render = app.add_subcommand("render", "SVG picture of a prefractal or orbit");
    add_level(c_render, level.render);
    c_render->add_option("--x0", x0_str, "base abscissa of an orbit to draw, as p/q");
    c_render->add_option("--dir", dir_str,
                         "launch direction a,b (default: the compatible construction)");
    add_budget(c_render);
    c_render->add_option("--width", width, "image width in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_render->add_flag("--no-ghosts", no_ghosts, "omit the dashed ghost sides");
    c_render->add_flag("--no-cells", no_cells, "omit the cell triangles");
    c_render->add_flag("--no-footprint", no_footprint, "omit the footprint dots");
    add_out(c_render);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 64;
    }

    try {
        using detail::check_level;
        using detail::cli_direction;
        using detail::cli_rational;
        using detail::deliver;

        if (app.got_subcommand(c_boundary)) {
            check_level(level.boundary, max_level);
            Prefractal p = build_prefractal(level.boundary);
            if (fmt.boundary == "csv") {
                std::ostringstream os;
                os << "index,address,start_a,start_b,end_a,end_b,dir\n";
                for (std::size_t k = 1; k <= p.side_count(); ++k) {
                    LatticePoint a = p.side_start(k), b = p.side_end(k);
                    os << k << ',' << p.address_of(k) << ',' << format_rational(a.a) << ','
                       << format_rational(a.b) << ',' << format_rational(b.a) << ','
                       << format_rational(b.b) << ',' << int(p.raw_sides()[k - 1].dir)
                       << '\n';
                }
                deliver(os.str(), out_path, out);
            } else {
                Json j = make_doc("boundary");
                j["level"] = level.boundary;
                j["sides"] = p.side_count();
                j["census"] = {{"pi_over_3", p.census().pi_over_3},
                               {"four_pi_over_3", p.census().four_pi_over_3}};
                j["area"] = rational_json(p.area());
                j["perimeter"] = rational_json(p.perimeter());
                Json sides = Json::array();
                for (std::size_t k = 1; k <= p.side_count(); ++k) {
                    Json s;
                    s["index"] = k;
                    s["address"] = p.address_of(k);
                    s["start"] = point_json(p.side_start(k));
                    s["end"] = point_json(p.side_end(k));
                    s["dir"] = p.raw_sides()[k - 1].dir;
                    sides.push_back(s);
                }
                j["sides_list"] = sides;
                deliver(j.dump(2) + "\n", out_path, out);
            }
        } else if (app.got_subcommand(c_classify)) {
            Rational x0 = cli_rational(x0_str);
            Json j = make_doc("classify");
            j["x0"] = rational_json(x0);
            j["class"] = class_json(classify(x0));
            j["expansion"] = expansion_json(expand(x0));
            if (auto mc = mc_representation(x0)) {
                j["mc"] = {{"n", mc->n}, {"digits", mc->digits}};
            } else {
                j["mc"] = nullptr;
            }
            deliver(j.dump(2) + "\n", out_path, out);
        } else if (app.got_subcommand(c_orbit)) {
            check_level(level.orbit, max_level);
            Rational x0 = cli_rational(x0_str);
            Prefractal p = build_prefractal(level.orbit);
            BilliardState init = dir_str.empty()
                                     ? compatible_basepoint(x0, p)
                                     : entry_state(p, LatticePoint{x0, 0},
                                                   cli_direction(dir_str));
            Orbit o = compute_orbit(p, init, budget);
            Json j = make_doc("orbit");
            j["x0"] = rational_json(x0);
            auto cls = detail::try_classify(x0);
            j["class"] = cls ? class_json(*cls) : Json(nullptr);
            j["orbit"] = orbit_json(p, o);
            j["footprint"] = footprint_json(p, o);
            deliver(j.dump(2) + "\n", out_path, out);
        } else if (app.got_subcommand(c_sequence)) {
            check_level(n_max, max_level);
            Rational x0 = cli_rational(x0_str);
            CompatibleSequence seq = compatible_sequence(x0, n_max, budget);
            Json j = make_doc("sequence");
            j["x0"] = rational_json(x0);
            j["class"] = class_json(classify(x0));
            j["n_max"] = n_max;
            auto stab = stabilization_index(seq);
            j["stabilization_level"] = stab ? Json(*stab) : Json(nullptr);
            j["diagnostic"] = seq.diagnostic ? Json(*seq.diagnostic) : Json(nullptr);
            Json levels = Json::array();
            for (unsigned n = 0; n < seq.orbits.size(); ++n) {
                Prefractal p = build_prefractal(n);
                const Orbit& o = seq.orbits[n];
                Json e;
                e["level"] = n;
                e["status"] = status_name(o.status.kind);
                e["period"] = o.status.kind == OrbitStatusKind::periodic
                                  ? Json(o.status.period)
                                  : Json(nullptr);
                e["length"] = o.length ? rational_json(*o.length) : Json(nullptr);
                e["basepoint"] = state_json(p, seq.initial_basepoints[n]);
                e["footprint"] = footprint_json(p, o);
                levels.push_back(e);
            }
            j["levels"] = levels;
            deliver(j.dump(2) + "\n", out_path, out);
        } else if (app.got_subcommand(c_footprint)) {
            check_level(level.footprint, max_level);
            Rational x0 = cli_rational(x0_str);
            Prefractal p = build_prefractal(level.footprint);
            Orbit o = compute_orbit(p, compatible_basepoint(x0, p), budget);
            if (fmt.footprint == "csv") {
                std::ostringstream os;
                os << "address,position\n";
                for (const FootprintKey& k : footprint_keys(p, o))
                    os << k.first << ',' << format_rational(k.second) << '\n';
                deliver(os.str(), out_path, out);
            } else {
                Json j = make_doc("footprint");
                j["x0"] = rational_json(x0);
                j["level"] = level.footprint;
                j["status"] = status_name(o.status.kind);
                j["entries"] = footprint_json(p, o);
                deliver(j.dump(2) + "\n", out_path, out);
            }
        } else if (app.got_subcommand(c_straighten)) {
            for (char c : word)
                if (c < '0' || c > '5')
                    throw domain_error("word must use only the digits 0-5");
            deliver(straighten(word) + "\n", out_path, out);
        } else if (app.got_subcommand(c_address)) {
            if (word.empty() == x0_str.empty())
                throw domain_error("address: give exactly one of --word or --x0");
            Json j = make_doc("address");
            if (!word.empty()) {
                j["word"] = word;
                bool valid = is_valid_side_address(word);
                j["valid"] = valid;
                j["key"] = valid ? Json(std::string(1, key_of(word))) : Json(nullptr);
                j["straightened"] = straighten(word);
            } else {
                check_level(level.address, max_level);
                Rational x0 = cli_rational(x0_str);
                Prefractal p = build_prefractal(level.address);
                BilliardState s = compatible_basepoint(x0, p);
                j["x0"] = rational_json(x0);
                j["level"] = level.address;
                j["address"] = p.address_of(s.side);
                j["position"] = rational_json(s.position);
                j["point"] = point_json(state_point(p, s));
            }
            deliver(j.dump(2) + "\n", out_path, out);
        } else if (app.got_subcommand(c_probe)) {
            check_level(level.probe, max_level);
            ProbeReport rep = periodic_direction_probe(cli_direction(dir_str), level.probe,
                                                       samples, budget, seed, jobs);
            Json j = make_doc("probe");
            j["direction"] = vector_json(rep.direction);
            j["level"] = rep.level;
            j["seed"] = seed;
            Json arr = Json::array();
            for (const ProbeSample& s : rep.samples) {
                Json e;
                e["x0"] = rational_json(s.x0);
                e["coarse_status"] = status_name(s.coarse_status);
                e["coarse_period"] = s.coarse_status == OrbitStatusKind::periodic
                                         ? Json(s.coarse_period)
                                         : Json(nullptr);
                e["fine_status"] = status_name(s.fine_status);
                e["fine_period"] = s.fine_status == OrbitStatusKind::periodic
                                       ? Json(s.fine_period)
                                       : Json(nullptr);
                arr.push_back(e);
            }
            j["samples"] = arr;
            j["all_closed"] = rep.all_closed;
            deliver(j.dump(2) + "\n", out_path, out);
        } else if (app.got_subcommand(c_study)) {
            check_level(n_max, max_level);
            std::vector<Rational> xs = expand_sample_specs(sample_specs, seed);
            std::vector<FormulaReport> reports = period_study(xs, n_max, budget, jobs);
            if (fmt.study == "json") {
                Json j = make_doc("study");
                j["n_max"] = n_max;
                j["reports"] = study_json(reports);
                deliver(j.dump(2) + "\n", out_path, out);
            } else {
                deliver(study_csv(reports), out_path, out);
            }
        } else if (app.got_subcommand(c_genus)) {
            check_level(level.genus, max_level);
            Json j = make_doc("genus");
            j["level"] = level.genus;
            j["genus"] = genus(level.genus).convert_to<long long>();
            deliver(j.dump(2) + "\n", out_path, out);
        } else if (app.got_subcommand(c_render)) {
            check_level(level.render, max_level);
            Prefractal p = build_prefractal(level.render);
            std::optional<Orbit> o;
            if (!x0_str.empty()) {
                Rational x0 = cli_rational(x0_str);
                BilliardState init = dir_str.empty()
                                         ? compatible_basepoint(x0, p)
                                         : entry_state(p, LatticePoint{x0, 0},
                                                       cli_direction(dir_str));
                o = compute_orbit(p, init, budget);
            }
            SvgStyle style;
            style.width = width;
            style.ghosts = !no_ghosts;
            style.cells = !no_cells;
            style.footprint = !no_footprint;
            deliver(render_svg(p, o ? &*o : nullptr, style), out_path, out);
        }
        return 0;
    } catch (const invariant_error& e) {
        err << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace koch
