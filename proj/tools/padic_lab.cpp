// padic-lab: batch front end over the workbench library. Every subcommand
// prints one JSON object (or CSV rows with --format csv) and exits 0 on
// success, 1 on a failed verification, 2 on bad flags or invalid parameters
// with a machine-readable error object on stderr.

#include <algorithm>
#include <atomic>
#include <complex>
#include <ctime>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "padiclab/distance.hpp"
#include "padiclab/hensel.hpp"
#include "padiclab/ring.hpp"
#include "padiclab/rotations.hpp"
#include "padiclab/spectral.hpp"
#include "padiclab/varieties.hpp"
#include "padiclab/verify.hpp"

namespace {

using json = nlohmann::ordered_json;
using cd = std::complex<double>;
using namespace padic;

struct Opts {
    std::int64_t p = 3;
    int r = 1;
    int n = 2;
    std::int64_t j = 1;
    std::uint64_t seed = 2024;
    std::string format = "json";
    bool oracle = false;
    bool no_meta = false;
    bool points = false;
    std::string coeffs, exps;

    std::string m, x, poly, densities, example;
    std::string kind = "complete";
    std::string shape = "star";
    std::string path = "conv";
    std::int64_t s = 0, a = 1, m0 = 0, c = 2;
    int k = 2, l = 1, trials = 100, spheres = 40, jobs = 1;
    double delta = 0.5, delta2 = -1, kappa = -1;
    bool distinct = false, full = false, list = false;
    std::vector<std::string> ids;
};

std::vector<std::int64_t> parse_ints(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoll(item));
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_exponents(const std::string& s) {
    std::vector<int> out;
    for (std::int64_t v : parse_ints(s)) out.push_back(int(v));
    return out;
}

DiagonalForm make_form(const Opts& o) {
    if (o.coeffs.empty() && o.exps.empty()) return DiagonalForm::distance(o.n);
    std::vector<std::int64_t> a = o.coeffs.empty() ? std::vector<std::int64_t>()
                                                   : parse_ints(o.coeffs);
    std::vector<int> k = o.exps.empty() ? std::vector<int>() : parse_exponents(o.exps);
    if (a.empty()) a.assign(k.size(), 1);
    if (k.empty()) k.assign(a.size(), 2);
    if (int(a.size()) != o.n)
        fail(Errc::ArityMismatch, "form has " + std::to_string(a.size()) +
                                      " coefficients but n = " + std::to_string(o.n));
    return DiagonalForm{std::move(a), std::move(k)};
}

json complex_json(cd z) {
    json out;
    out["re"] = z.real();
    out["im"] = z.imag();
    out["abs"] = std::abs(z);
    return out;
}

json base_params(const Opts& o, bool with_n = true, bool with_j = false) {
    json p;
    p["p"] = o.p;
    p["r"] = o.r;
    if (with_n) p["n"] = o.n;
    if (with_j) p["j"] = o.j;
    return p;
}

void add_meta(json& out, const Opts& o) {
    if (o.no_meta) return;
    json m;
    m["tool"] = "padic-lab";
    m["version"] = "0.1.0";
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    m["generated"] = buf;
    out["meta"] = m;
}

int emit(json out, const Opts& o, const std::function<std::string()>& csv = {}) {
    if (o.format == "csv" && csv) {
        std::cout << csv();
    } else {
        add_meta(out, o);
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

// Either a seeded random subset, the full domain, or one of the two
// sharpness families; census/configs/fiber all share this source.
struct BuiltSet {
    std::optional<PointSet> e;
    DiagonalForm form;
    json extra = json::object();
};

BuiltSet build_set(const Opts& o) {
    BuiltSet out;
    Modulus mod = Modulus::make(o.p, o.r);
    if (o.example == "odd") {
        SharpnessSet ss = sharpness_example_odd(o.p, o.n, o.k, o.l, o.r);
        out.form = ss.form;
        out.extra["example"] = "odd";
        out.extra["parameter"] = ss.parameter;
        out.extra["claimed_bound"] = ss.claimed_bound;
        out.e = std::move(ss.set);
    } else if (o.example == "even") {
        SharpnessSet ss = sharpness_example_even(o.p, o.n, o.c, o.r);
        out.form = ss.form;
        out.extra["example"] = "even";
        out.extra["parameter"] = ss.parameter;
        out.extra["claimed_bound"] = ss.claimed_bound;
        out.e = std::move(ss.set);
    } else if (!o.example.empty()) {
        fail(Errc::BadArgument, "unknown example family '" + o.example + "'");
    } else if (o.full) {
        check_budget(domain_size(mod, o.n), "full-domain set");
        PointSet e(mod, o.n);
        for (std::uint64_t enc = 0; enc < domain_size(mod, o.n); ++enc) e.insert_encoded(enc);
        out.form = make_form(o);
        out.e = std::move(e);
        out.extra["source"] = "full";
    } else {
        out.form = make_form(o);
        out.e = random_subset(mod, o.n, o.delta, o.seed);
        out.extra["source"] = "random";
        out.extra["delta"] = o.delta;
        out.extra["seed"] = o.seed;
    }
    return out;
}

// ------------------------------------------------------------------- sphere

int cmd_sphere(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    SphereSpec spec(make_form(o), mod, o.j);
    PointSet pts = sphere_points(spec, o.oracle);
    json out;
    out["command"] = "sphere";
    out["params"] = base_params(o, true, true);
    out["size"] = pts.size();
    if (o.n == 2 && spec.form.is_distance_form())
        out["formula"] = circle_cardinality_formula(o.p, o.r, o.j);
    if (o.points) out["points"] = json::parse(pts.to_json());
    return emit(std::move(out), o, [&] { return pts.to_csv(); });
}

// ------------------------------------------------------------------ fourier

int cmd_fourier(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    SphereSpec spec(make_form(o), mod, o.j);
    Vec m(o.n, 0);
    if (!o.m.empty()) {
        m = parse_ints(o.m);
        if (int(m.size()) != o.n) fail(Errc::ArityMismatch, "--m needs n coordinates");
    }
    cd direct = sphere_fourier(spec, m, SpherePath::Direct);
    json out;
    out["command"] = "fourier";
    out["params"] = base_params(o, true, true);
    out["params"]["m"] = m;
    out["direct"] = complex_json(direct);
    if (spec.unit_radius() && spec.form.smooth_for(mod)) {
        cd reduced = sphere_fourier(spec, m, SpherePath::Reduced);
        out["reduced"] = complex_json(reduced);
        out["difference"] = std::abs(direct - reduced);
    } else {
        out["reduced"] = nullptr;
    }
    return emit(std::move(out), o);
}

// ------------------------------------------------------------------- bounds

int cmd_bounds(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    SphereSpec spec(make_form(o), mod, o.j);
    double kappa = o.kappa < 0 ? default_kappa(o.n) : o.kappa;
    BoundProfile prof = fourier_bound_profile(spec, kappa);
    json out;
    out["command"] = "bounds";
    out["params"] = base_params(o, true, true);
    out["kappa"] = prof.kappa;
    out["c2_effective"] = prof.c2_effective;
    out["c3_effective"] = prof.c3_effective;
    json strata = json::array();
    for (const StratumStat& st : prof.strata) {
        json row;
        row["nu"] = st.nu;
        row["max"] = st.max_mag;
        row["argmax"] = st.argmax;
        strata.push_back(std::move(row));
    }
    out["strata"] = std::move(strata);
    return emit(std::move(out), o, [&] {
        std::string s = "nu,max\n";
        for (const StratumStat& st : prof.strata)
            s += std::to_string(st.nu) + "," + std::to_string(st.max_mag) + "\n";
        return s;
    });
}

// --------------------------------------------------------------------- sums

int cmd_sums(const Opts& o) {
    json out;
    out["command"] = "sums";
    out["kind"] = o.kind;
    if (o.kind == "complete") {
        Modulus mod = Modulus::make(o.p, o.r);
        DiagonalForm f = make_form(o);
        Vec m(o.n, 0);
        if (!o.m.empty()) {
            m = parse_ints(o.m);
            if (int(m.size()) != o.n) fail(Errc::ArityMismatch, "--m needs n coordinates");
        }
        out["params"] = base_params(o);
        out["params"]["m"] = m;
        out["params"]["s"] = o.s;
        cd direct = complete_sum(f, mod, m, o.s);
        cd reduced = complete_sum_reduced(f, mod, m, o.s);
        out["direct"] = complex_json(direct);
        out["reduced"] = complex_json(reduced);
        out["difference"] = std::abs(direct - reduced);
    } else if (o.kind == "weil") {
        if (o.poly.empty()) fail(Errc::BadArgument, "weil sums need --poly c0,c1,...");
        std::vector<std::int64_t> coeffs = parse_ints(o.poly);
        WeilReport w = weil_sum(coeffs, o.p);
        out["params"] = json{{"p", o.p}, {"poly", coeffs}};
        out["value"] = complex_json(w.value);
        out["degree"] = w.degree;
        out["bound"] = w.bound;
        out["within"] = w.within;
    } else if (o.kind == "moment") {
        Modulus mod = Modulus::make(o.p, o.r);
        double val = second_moment_one_var(o.a, o.k, o.m0, mod);
        std::int64_t cut = o.r - (o.r + o.k - 1) / o.k;
        bool deep = mod.ord(o.m0) >= cut;
        double cap = deep ? std::pow(double(o.p), (3.0 - 2.0 / o.k) * o.r)
                          : std::pow(double(o.p), 2.0 * o.r);
        out["params"] = json{{"p", o.p}, {"r", o.r}, {"a", o.a}, {"k", o.k}, {"m", o.m0}};
        out["value"] = val;
        out["branch"] = deep ? "deep" : "shallow";
        out["cap"] = cap;
        out["ratio"] = val / cap;
    } else {
        fail(Errc::BadArgument, "unknown sums kind '" + o.kind + "'");
    }
    return emit(std::move(out), o);
}

// -------------------------------------------------------------------- orbit

int cmd_orbit(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    Vec x = o.x.empty() ? Vec{1, 0} : parse_ints(o.x);
    if (x.size() != 2) fail(Errc::WrongArity, "rotations act on the plane; --x needs 2 coordinates");
    RotationGroup g = RotationGroup::build(mod);
    PointSet orb = orbit(x, g);
    std::size_t stab = stabilizer(x, g).size();
    SplitVec sv = split(x, mod);
    json out;
    out["command"] = "orbit";
    out["params"] = base_params(o, false, false);
    out["params"]["x"] = x;
    out["group_order"] = g.size();
    out["expected_order"] = g.expected_order();
    out["orbit_size"] = orb.size();
    out["stabilizer_size"] = stab;
    out["v_x"] = sv.v;
    out["product_ok"] = orb.size() * stab == g.size();
    if (o.points) out["points"] = json::parse(orb.to_json());
    return emit(std::move(out), o, [&] { return orb.to_csv(); });
}

// ------------------------------------------------------------------- energy

int cmd_energy(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    json out;
    out["command"] = "energy";
    out["params"] = base_params(o, false, false);
    std::optional<PointSet> v;
    json bound = nullptr;
    if (!o.x.empty()) {
        Vec x = parse_ints(o.x);
        if (x.size() != 2) fail(Errc::WrongArity, "--x needs 2 coordinates");
        RotationGroup g = RotationGroup::build(mod);
        v = orbit(x, g);
        SplitVec sv = split(x, mod);
        out["params"]["x"] = x;
        out["set"] = "orbit";
        bool unit_norm = sv.reduced.is_unit(
            DiagonalForm::distance(2).eval(sv.reduced, sv.unit_part));
        if (o.p % 4 == 3 || unit_norm)
            bound = 2.0 * std::pow(double(o.p), double(o.r - sv.v - 1));
    } else {
        out["params"]["j"] = o.j;
        out["set"] = "circle";
        v = sphere_points(SphereSpec(DiagonalForm::distance(2), mod, o.j), o.oracle);
        if (mod.is_unit(o.j)) bound = 2.0 * std::pow(double(o.p), double(o.r - 1));
    }
    EnergyReport er = energy_fiber_max(*v);
    out["set_size"] = v->size();
    out["max_fiber"] = er.max_fiber;
    out["argmax"] = er.argmax;
    out["bound"] = bound;
    if (!bound.is_null()) out["within"] = double(er.max_fiber) <= bound.get<double>();
    return emit(std::move(out), o);
}

// ---------------------------------------------------------------- extension

int cmd_extension(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    json out;
    out["command"] = "extension";
    out["params"] = base_params(o, false, false);
    out["params"]["seed"] = o.seed;
    out["params"]["trials"] = o.trials;

    std::optional<PointSet> v;
    Vec x;
    if (!o.x.empty()) {
        x = parse_ints(o.x);
        if (x.size() != 2) fail(Errc::WrongArity, "--x needs 2 coordinates");
        RotationGroup g = RotationGroup::build(mod);
        v = orbit(x, g);
        out["params"]["x"] = x;
        out["set"] = "orbit";
    } else {
        v = sphere_points(SphereSpec(DiagonalForm::distance(2), mod, o.j), o.oracle);
        out["params"]["j"] = o.j;
        out["set"] = "circle";
    }
    auto ratio_of = [&](std::span<const cd> w) {
        return o.x.empty() ? extension_ratio_circle(*v, o.j, w)
                           : extension_ratio_orbit(*v, x, w);
    };
    std::vector<cd> w(v->size(), cd(1, 0));
    ExtensionReport base = ratio_of(w);
    double max_ratio = base.ratio;
    std::mt19937_64 rng(o.seed);
    for (int t = 0; t < o.trials; ++t) {
        for (auto& z : w)
            z = cd(2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0,
                   2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0);
        max_ratio = std::max(max_ratio, ratio_of(w).ratio);
    }
    out["set_size"] = v->size();
    out["constant_f"] = json{{"lhs", base.lhs}, {"rhs", base.rhs}, {"ratio", base.ratio}};
    out["max_ratio"] = max_ratio;
    return emit(std::move(out), o);
}

// ------------------------------------------------------------------- census

int cmd_census(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    BuiltSet src = build_set(o);
    PointSet e1 = std::move(*src.e);
    std::optional<PointSet> e2;
    if (src.extra.contains("source") && src.extra["source"] == "random") {
        double d2 = o.delta2 < 0 ? o.delta : o.delta2;
        e2 = random_subset(mod, o.n, d2, o.seed + 1);
    } else {
        e2 = e1;  // census of an example family runs within the set
    }
    CensusPath path = (o.oracle || o.path == "loop") ? CensusPath::Loop : CensusPath::Convolution;
    DistanceCensus dc = distance_census(src.form, e1, *e2, path);
    json out;
    out["command"] = "census";
    out["params"] = base_params(o);
    out["params"]["seed"] = o.seed;
    out["params"].update(src.extra);
    out["sizes"] = json::array({e1.size(), e2->size()});
    out["pairs"] = dc.pairs;
    out["density"] = dc.density();
    out["support"] = dc.support();
    out["units_covered"] = dc.units_covered();
    out["counts"] = dc.counts;
    if (src.extra.contains("claimed_bound")) {
        std::uint64_t bound = src.extra["claimed_bound"].get<std::uint64_t>();
        bool strict = src.extra["example"] == "odd";
        std::uint64_t support = dc.support().size();
        out["delta_size"] = support;
        out["within_claimed_bound"] = strict ? support < bound : support <= bound;
    }
    return emit(std::move(out), o, [&] {
        std::string s = "j,count\n";
        for (std::size_t j = 0; j < dc.counts.size(); ++j)
            s += std::to_string(j) + "," + std::to_string(dc.counts[j]) + "\n";
        return s;
    });
}

// ---------------------------------------------------------------- incidence

int cmd_incidence(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    DiagonalForm f = make_form(o);
    PointSet pts = random_subset(mod, o.n, o.delta, o.seed);
    std::mt19937_64 rng(o.seed + 1);
    std::vector<SphereInstance> spheres;
    for (int t = 0; t < o.spheres; ++t) {
        SphereInstance s;
        s.center.resize(std::size_t(o.n));
        for (auto& c : s.center) c = std::int64_t(rng() % std::uint64_t(mod.q));
        do {
            s.radius = std::int64_t(rng() % std::uint64_t(mod.q));
        } while (!mod.is_unit(s.radius));
        spheres.push_back(std::move(s));
    }
    IncidenceReport ir = incidences(f, pts, spheres);
    json out;
    out["command"] = "incidence";
    out["params"] = base_params(o);
    out["params"]["seed"] = o.seed;
    out["params"]["delta"] = o.delta;
    out["points"] = pts.size();
    out["spheres"] = spheres.size();
    out["incidences"] = ir.incidences;
    out["mean_term"] = ir.mean_term;
    out["excess"] = ir.excess;
    out["coefficient"] = ir.coefficient;
    return emit(std::move(out), o);
}

// ------------------------------------------------------------------ configs

int cmd_configs(const Opts& o) {
    BuiltSet src = build_set(o);
    const PointSet& e = *src.e;
    const DiagonalForm& f = src.form;
    json out;
    out["command"] = "configs";
    out["kind"] = o.kind;
    out["params"] = base_params(o, true, true);
    out["params"]["seed"] = o.seed;
    out["params"].update(src.extra);
    out["set_size"] = e.size();
    out["convention"] = "ordered tuples";
    if (o.kind == "rectangles") {
        // The form acts on each half of the ambient space, so it has arity n/2.
        if (o.n % 2 != 0)
            fail(Errc::OddArity, "rectangles need an even ambient arity");
        Opts half = o;
        half.n = o.n / 2;
        DiagonalForm hf = make_form(half);
        std::uint64_t fast = count_rectangles(hf, e, o.j);
        out["count"] = fast;
        if (o.oracle) {
            std::uint64_t slow = count_rectangles_oracle(hf, e, o.j);
            out["oracle_count"] = slow;
            out["agree"] = fast == slow;
        }
    } else if (o.kind == "cycles4") {
        std::uint64_t fast = count_cycles4(f, e, o.j, o.distinct);
        out["params"]["distinct"] = o.distinct;
        out["count"] = fast;
        if (o.oracle) {
            std::uint64_t slow = count_cycles4_oracle(f, e, o.j, o.distinct);
            out["oracle_count"] = slow;
            out["agree"] = fast == slow;
        }
    } else if (o.kind == "chains") {
        std::uint64_t fast = count_chains(f, e, o.j, o.k);
        out["params"]["k"] = o.k;
        out["count"] = fast;
        if (o.oracle) {
            std::uint64_t slow = count_chains_oracle(f, e, o.j, o.k);
            out["oracle_count"] = slow;
            out["agree"] = fast == slow;
        }
    } else if (o.kind == "trees") {
        TreeShape shape = o.shape == "path" ? TreeShape::path(o.k) : TreeShape::star(o.k);
        Vec x(std::size_t(o.n), 0);
        if (!o.x.empty()) {
            x = parse_ints(o.x);
        } else if (!e.empty() && !e.contains(x)) {
            x = e.decode(e.sorted_encoded().front());
        }
        PinnedTreeCount tc = count_pinned_trees(f, e, shape, x);
        out["params"]["shape"] = o.shape;
        out["params"]["k"] = o.k;
        out["params"]["x"] = x;
        out["embeddings"] = tc.embeddings;
        out["distinct_vectors"] = tc.distinct_vectors;
    } else {
        fail(Errc::BadArgument, "unknown configuration kind '" + o.kind + "'");
    }
    return emit(std::move(out), o);
}

// -------------------------------------------------------------------- fiber

int cmd_fiber(const Opts& o) {
    BuiltSet src = build_set(o);
    FiberReport fr = fiber_condition(*src.e);
    json out;
    out["command"] = "fiber";
    out["params"] = base_params(o);
    out["params"]["seed"] = o.seed;
    out["params"].update(src.extra);
    out["set_size"] = src.e->size();
    out["pair_count"] = fr.pair_count;
    out["max_fiber"] = fr.max_fiber;
    out["threshold"] = fr.threshold;
    out["satisfied"] = fr.satisfied;
    return emit(std::move(out), o);
}

// -------------------------------------------------------------------- sweep

int cmd_sweep(const Opts& o) {
    Modulus mod = Modulus::make(o.p, o.r);
    DiagonalForm f = make_form(o);
    std::vector<double> dens =
        o.densities.empty() ? std::vector<double>{0.1, 0.25, 0.5, 0.75, 1.0}
                            : parse_doubles(o.densities);
    std::vector<ThresholdRow> rows = threshold_experiment(f, mod, o.n, dens, o.trials, o.seed);
    json out;
    out["command"] = "sweep";
    out["params"] = base_params(o);
    out["params"]["seed"] = o.seed;
    out["params"]["trials"] = o.trials;
    json jrows = json::array();
    for (const ThresholdRow& row : rows) {
        json jr;
        jr["density"] = row.density;
        jr["mean_size"] = row.mean_size;
        jr["mean_distinct_over_q"] = row.mean_distinct_over_q;
        jr["min_unit_coverage"] = row.min_unit_coverage;
        jr["always_covers_units"] = row.always_covers_units;
        jrows.push_back(std::move(jr));
    }
    out["rows"] = std::move(jrows);
    return emit(std::move(out), o, [&] {
        std::ostringstream s;
        s << "density,mean_size,mean_distinct_over_q,min_unit_coverage,always_covers_units\n";
        for (const ThresholdRow& row : rows)
            s << row.density << "," << row.mean_size << "," << row.mean_distinct_over_q << ","
              << row.min_unit_coverage << "," << (row.always_covers_units ? 1 : 0) << "\n";
        return s.str();
    });
}

// ------------------------------------------------------------------ example

int cmd_example(const Opts& o) {
    SharpnessSet ss = o.kind == "even" ? sharpness_example_even(o.p, o.n, o.c, o.r)
                                       : sharpness_example_odd(o.p, o.n, o.k, o.l, o.r);
    DistanceCensus dc = distance_census(ss.form, ss.set, ss.set, CensusPath::Convolution);
    std::uint64_t support = dc.support().size();
    json out;
    out["command"] = "example";
    out["family"] = o.kind;
    out["params"] = base_params(o);
    if (o.kind == "even")
        out["params"]["C"] = o.c;
    else {
        out["params"]["k"] = o.k;
        out["params"]["l"] = o.l;
    }
    out["size"] = ss.set.size();
    out["parameter"] = ss.parameter;
    out["claimed_bound"] = ss.claimed_bound;
    out["distance_set_size"] = support;
    out["within"] = o.kind == "odd" ? support < ss.claimed_bound : support <= ss.claimed_bound;
    out["support"] = dc.support();
    if (o.points) out["points"] = json::parse(ss.set.to_json());
    return emit(std::move(out), o, [&] { return ss.set.to_csv(); });
}

// ------------------------------------------------------------------- verify

int cmd_verify(const Opts& o, const CLI::App* sc) {
    if (o.list) {
        json out;
        out["ids"] = verify_ids();
        return emit(std::move(out), o);
    }
    std::vector<std::string> ids = o.ids;
    if (ids.size() == 1 && ids[0] == "all") ids = verify_ids();
    if (ids.empty()) fail(Errc::BadArgument, "give a verification id, a list of ids, or 'all'");
    for (const std::string& id : ids)
        if (!is_verify_id(id)) fail(Errc::BadArgument, "unknown verification id '" + id + "'");

    VerifyOptions vo;
    if (sc->count("--p")) vo.p = o.p;
    if (sc->count("--r")) vo.r = o.r;
    if (sc->count("--n")) vo.n = o.n;
    if (sc->count("--j")) vo.j = o.j;
    vo.seed = o.seed;
    vo.oracle = o.oracle;

    std::vector<VerifyReport> reports(ids.size());
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::atomic<std::size_t> next{0};
    int jobs = std::clamp(o.jobs, 1, 16);
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < ids.size(); i = next.fetch_add(1)) {
            try {
                reports[i] = run_verify(ids[i], vo);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    if (jobs == 1 || ids.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    bool all_pass = true;
    for (const VerifyReport& rep : reports) all_pass = all_pass && rep.pass;

    if (o.format == "csv") {
        std::cout << "lemma,name,lhs,rhs,pass\n";
        for (const VerifyReport& rep : reports)
            for (const auto& a : rep.assertions)
                std::cout << rep.lemma << ",\"" << a.at("name").get<std::string>() << "\","
                          << a.at("lhs").dump() << "," << a.at("rhs").dump() << ","
                          << (a.at("pass").get<bool>() ? 1 : 0) << "\n";
    } else if (reports.size() == 1) {
        json out = reports[0].to_json();
        add_meta(out, o);
        std::cout << out.dump(2) << "\n";
    } else {
        json out;
        json arr = json::array();
        for (const VerifyReport& rep : reports) arr.push_back(rep.to_json());
        out["reports"] = std::move(arr);
        out["pass"] = all_pass;
        add_meta(out, o);
        std::cout << out.dump(2) << "\n";
    }
    return all_pass ? 0 : 1;
}

void add_common(CLI::App* sc, Opts& o, bool with_n = true, bool with_j = false) {
    sc->add_option("--p", o.p, "odd prime p");
    sc->add_option("--r", o.r, "level r in q = p^r");
    if (with_n) sc->add_option("--n", o.n, "number of variables");
    if (with_j) sc->add_option("--j", o.j, "radius j mod q");
    sc->add_option("--seed", o.seed, "RNG seed");
    sc->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    sc->add_flag("--oracle", o.oracle, "force brute-force reference paths");
    sc->add_flag("--no-meta", o.no_meta, "omit the meta block (timestamps)");
    sc->add_option("--coeffs", o.coeffs, "form coefficients a1,a2,...");
    sc->add_option("--exps", o.exps, "form exponents k1,k2,...");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification workbench for distance problems over Z/p^rZ"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI config file");
    Opts o;

    CLI::App* sphere = app.add_subcommand("sphere", "build a sphere S_{r,j}");
    add_common(sphere, o, true, true);
    sphere->add_flag("--points", o.points, "include the point list");

    CLI::App* fourier = app.add_subcommand("fourier", "evaluate the sphere transform at m");
    add_common(fourier, o, true, true);
    fourier->add_option("--m", o.m, "frequency vector m1,m2,...");

    CLI::App* bounds = app.add_subcommand("bounds", "stratified sphere-transform bounds");
    add_common(bounds, o, true, true);
    bounds->add_option("--kappa", o.kappa, "gradient exponent kappa (default (n-1)/2)");

    CLI::App* sums = app.add_subcommand("sums", "complete, Weil, and second-moment sums");
    add_common(sums, o);
    sums->add_option("--kind", o.kind, "complete | weil | moment")
        ->check(CLI::IsMember({"complete", "weil", "moment"}));
    sums->add_option("--m", o.m, "frequency vector (complete)");
    sums->add_option("--s", o.s, "dual scalar s (complete)");
    sums->add_option("--poly", o.poly, "polynomial c0,c1,... (weil)");
    sums->add_option("--a", o.a, "coefficient a (moment)");
    sums->add_option("--k", o.k, "exponent k (moment)");
    sums->add_option("--m0", o.m0, "scalar frequency m (moment)");

    CLI::App* orb = app.add_subcommand("orbit", "rotation orbit and stabilizer of x");
    add_common(orb, o, false, false);
    orb->add_option("--x", o.x, "base point x1,x2");
    orb->add_flag("--points", o.points, "include the point list");

    CLI::App* energy = app.add_subcommand("energy", "difference-fiber energy of a circle or orbit");
    add_common(energy, o, false, true);
    energy->add_option("--x", o.x, "orbit base point (otherwise circle of radius j)");

    CLI::App* ext = app.add_subcommand("extension", "L2 -> L4 extension ratio over a circle or orbit");
    add_common(ext, o, false, true);
    ext->add_option("--x", o.x, "orbit base point (otherwise circle of radius j)");
    ext->add_option("--trials", o.trials, "random weight draws");

    CLI::App* census = app.add_subcommand("census", "distance census N_{r,j} over set pairs");
    add_common(census, o);
    census->add_option("--delta", o.delta, "density of E1 (and E2 unless --delta2)");
    census->add_option("--delta2", o.delta2, "density of E2");
    census->add_flag("--full", o.full, "use the full domain");
    census->add_option("--example", o.example, "odd | even sharpness family as the set");
    census->add_option("--k", o.k, "exponent k (odd family)");
    census->add_option("--l", o.l, "slab count l (odd family)");
    census->add_option("--c", o.c, "subgroup index C (even family)");
    census->add_option("--path", o.path, "loop | conv")
        ->check(CLI::IsMember({"loop", "conv"}));

    CLI::App* inc = app.add_subcommand("incidence", "point-sphere incidences");
    add_common(inc, o);
    inc->add_option("--delta", o.delta, "point-set density");
    inc->add_option("--spheres", o.spheres, "number of random unit spheres");

    CLI::App* configs = app.add_subcommand("configs", "rectangles, 4-cycles, chains, pinned trees");
    configs->add_option("kind", o.kind, "rectangles | cycles4 | chains | trees")
        ->required()
        ->check(CLI::IsMember({"rectangles", "cycles4", "chains", "trees"}));
    add_common(configs, o, true, true);
    configs->add_option("--delta", o.delta, "set density");
    configs->add_flag("--full", o.full, "use the full domain");
    configs->add_option("--example", o.example, "odd | even sharpness family as the set");
    configs->add_option("--l", o.l, "slab count l (odd family)");
    configs->add_option("--c", o.c, "subgroup index C (even family)");
    configs->add_option("--k", o.k, "chain length / star arms / path length");
    configs->add_flag("--distinct", o.distinct, "require pairwise distinct cycle vertices");
    configs->add_option("--shape", o.shape, "star | path (trees)")
        ->check(CLI::IsMember({"star", "path"}));
    configs->add_option("--x", o.x, "tree pin (defaults to a set member)");

    CLI::App* fiber = app.add_subcommand("fiber", "mod-p fiber pair condition");
    add_common(fiber, o);
    fiber->add_option("--delta", o.delta, "set density");
    fiber->add_flag("--full", o.full, "use the full domain");
    fiber->add_option("--example", o.example, "odd | even sharpness family as the set");
    fiber->add_option("--k", o.k, "exponent k (odd family)");
    fiber->add_option("--l", o.l, "slab count l (odd family)");
    fiber->add_option("--c", o.c, "subgroup index C (even family)");

    CLI::App* sweep = app.add_subcommand("sweep", "density sweep of distance-set coverage");
    add_common(sweep, o);
    sweep->add_option("--densities", o.densities, "comma list of densities");
    sweep->add_option("--trials", o.trials, "trials per density");

    CLI::App* example = app.add_subcommand("example", "sharpness families with measured census");
    example->add_option("family", o.kind, "odd | even")
        ->required()
        ->check(CLI::IsMember({"odd", "even"}));
    add_common(example, o);
    example->add_option("--k", o.k, "exponent k (odd family)");
    example->add_option("--l", o.l, "slab count l (odd family)");
    example->add_option("--c", o.c, "subgroup index C (even family)");
    example->add_flag("--points", o.points, "include the point list");

    CLI::App* verify = app.add_subcommand("verify", "run named verification bundles");
    verify->add_option("ids", o.ids, "verification ids, or 'all'");
    add_common(verify, o, true, true);
    verify->add_option("--jobs", o.jobs, "run ids concurrently");
    verify->add_flag("--list", o.list, "list the registered ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        json err;
        err["error"] = json{{"code", "BadFlags"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    if (sweep->parsed() && !sweep->count("--trials")) o.trials = 5;

    try {
        if (sphere->parsed()) return cmd_sphere(o);
        if (fourier->parsed()) return cmd_fourier(o);
        if (bounds->parsed()) return cmd_bounds(o);
        if (sums->parsed()) return cmd_sums(o);
        if (orb->parsed()) return cmd_orbit(o);
        if (energy->parsed()) return cmd_energy(o);
        if (ext->parsed()) return cmd_extension(o);
        if (census->parsed()) return cmd_census(o);
        if (inc->parsed()) return cmd_incidence(o);
        if (configs->parsed()) return cmd_configs(o);
        if (fiber->parsed()) return cmd_fiber(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (example->parsed()) return cmd_example(o);
        if (verify->parsed()) return cmd_verify(o, verify);
    } catch (const padic::Error& e) {
        json err;
        err["error"] = json{{"code", errc_name(e.code())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = json{{"code", "Internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 0;
}
