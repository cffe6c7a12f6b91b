#include "padiclab/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <unordered_set>

#include "padiclab/distance.hpp"
#include "padiclab/hensel.hpp"
#include "padiclab/ring.hpp"
#include "padiclab/rotations.hpp"
#include "padiclab/spectral.hpp"
#include "padiclab/varieties.hpp"

namespace padic {

nlohmann::ordered_json VerifyReport::to_json() const {
    nlohmann::ordered_json out;
    out["lemma"] = lemma;
    out["params"] = params;
    out["assertions"] = assertions;
    out["constants"] = constants;
    out["pass"] = pass;
    return out;
}

namespace {

using cd = std::complex<double>;

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

cd random_weight(std::mt19937_64& rng) {
    return cd(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
}

void note(VerifyReport& rep, const std::string& name, double lhs, double rhs, bool ok) {
    nlohmann::ordered_json a;
    a["name"] = name;
    a["lhs"] = lhs;
    a["rhs"] = rhs;
    a["pass"] = ok;
    rep.assertions.push_back(std::move(a));
    rep.pass = rep.pass && ok;
}

void check_eq(VerifyReport& rep, const std::string& name, double lhs, double rhs) {
    note(rep, name, lhs, rhs, lhs == rhs);
}

void check_close(VerifyReport& rep, const std::string& name, double lhs, double rhs, double tol) {
    note(rep, name, lhs, rhs, std::abs(lhs - rhs) <= tol);
}

void check_le(VerifyReport& rep, const std::string& name, double lhs, double rhs,
              double slack = 0) {
    note(rep, name, lhs, rhs, lhs <= rhs + slack);
}

void check_ge(VerifyReport& rep, const std::string& name, double lhs, double rhs) {
    note(rep, name, lhs, rhs, lhs >= rhs);
}

struct Defaults {
    std::int64_t p = 3;
    int r = 2;
    int n = 2;
    std::int64_t j = 1;
};

struct Resolved {
    std::int64_t p;
    int r;
    int n;
    std::int64_t j;
    std::uint64_t seed;
    bool oracle;
};

Resolved resolve(const VerifyOptions& opt, const Defaults& d) {
    Resolved v{};
    v.p = opt.p.value_or(d.p);
    v.r = opt.r.value_or(d.r);
    v.n = opt.n.value_or(d.n);
    v.j = opt.j.value_or(d.j);
    v.seed = opt.seed;
    v.oracle = opt.oracle;
    return v;
}

void stamp(VerifyReport& rep, const Resolved& v, bool with_n = true, bool with_j = false) {
    rep.params["p"] = v.p;
    rep.params["r"] = v.r;
    if (with_n) rep.params["n"] = v.n;
    if (with_j) rep.params["j"] = v.j;
    rep.params["seed"] = v.seed;
}

void require_mod4(std::int64_t p, int want) {
    if (p % 4 != want)
        fail(Errc::WrongResidueClass,
             "this statement needs p = " + std::to_string(want) + " (mod 4), got p = " +
                 std::to_string(p));
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t out = 1;
    while (e-- > 0) out *= b;
    return out;
}

// ---------------------------------------------------------------- hensel-2.1

void run_hensel(VerifyReport& rep, const Resolved& v) {
    if (v.r < 2) fail(Errc::BadArgument, "hensel-2.1 needs r >= 2 so there is a level to lift to");
    Modulus mod = Modulus::make(v.p, v.r);
    DiagonalForm f = DiagonalForm::distance(2);
    PolySystem sys = PolySystem::equation(f, 1);

    std::vector<Vec> bases;
    for (std::int64_t x = 0; x < v.p; ++x)
        for (std::int64_t y = 0; y < v.p; ++y)
            if ((x * x + y * y) % v.p == 1) bases.push_back({x, y});
    SolutionCountReport base_count = mod_p_solution_count(f, v.p, 1);
    check_eq(rep, "base solutions mod p agree with the residue count", double(bases.size()),
             double(base_count.count));

    const double formula = double(ipow(v.p, v.r - 1));  // p^{k(n-m)}, n=2 vars, m=1 equation
    std::uint64_t lo = ~0ull, hi = 0, total = 0;
    int rank = -1;
    for (const Vec& b : bases) {
        LiftResult lr = lift(sys, v.p, b, 1, v.r - 1, false);
        lo = std::min(lo, lr.count);
        hi = std::max(hi, lr.count);
        total += lr.count;
        rank = lr.jacobian_rank;
    }
    check_eq(rep, "smallest smooth fibre equals p^{k(n-m)}", double(lo), formula);
    check_eq(rep, "largest smooth fibre equals p^{k(n-m)}", double(hi), formula);

    PointSet sphere = solve_system(sys, mod);
    check_eq(rep, "lift tree total equals the full solution set", double(total),
             double(sphere.size()));
    std::vector<std::uint64_t> hist = radius_histogram(f, mod);
    check_eq(rep, "solver agrees with the exhaustive histogram", double(sphere.size()),
             double(hist[1]));

    // Singular base: x^2 + y^2 = 0 at the origin has Jacobian rank 0, so only
    // the trivial bound p^{k(n-R)} applies.
    PolySystem sys0 = PolySystem::equation(f, 0);
    Vec origin{0, 0};
    int rank0 = jacobian_rank_mod_p(sys0, origin, v.p);
    LiftResult lr0 = lift(sys0, v.p, origin, 1, v.r - 1, false);
    check_le(rep, "singular fibre inside the rank bound", double(lr0.count),
             double(ipow(v.p, (v.r - 1) * (2 - rank0))));

    rep.constants["smooth_fibre"] = formula;
    rep.constants["smooth_jacobian_rank"] = rank;
    rep.constants["singular_jacobian_rank"] = rank0;
    rep.constants["singular_fibre"] = lr0.count;
}

// ------------------------------------------------------------------ weil-2.2

void run_weil(VerifyReport& rep, const Resolved& v) {
    std::mt19937_64 rng(v.seed);
    const int trials = 200;
    for (int k : {2, 3, 4}) {
        if (k % v.p == 0) continue;
        double worst = 0, bound = 0;
        bool all_within = true;
        for (int t = 0; t < trials; ++t) {
            std::vector<std::int64_t> coeffs(std::size_t(k) + 1);
            for (auto& c : coeffs) c = std::int64_t(rng() % std::uint64_t(v.p));
            coeffs[std::size_t(k)] = 1 + std::int64_t(rng() % std::uint64_t(v.p - 1));
            WeilReport w = weil_sum(coeffs, v.p);
            worst = std::max(worst, w.magnitude);
            bound = w.bound;
            all_within = all_within && w.within;
        }
        note(rep, "degree " + std::to_string(k) + " sums within (k-1) sqrt(p)", worst, bound,
             all_within && worst <= bound + 1e-9);
        rep.constants["max_ratio_deg" + std::to_string(k)] = bound > 0 ? worst / bound : 0.0;
    }
    rep.params.erase("r");
    rep.params.erase("n");
}

// ----------------------------------------------------------------- count-2.3

void run_count(VerifyReport& rep, const Resolved& v) {
    if (v.n < 2) fail(Errc::BadArgument, "count-2.3 needs n >= 2; one variable has no main term");
    std::vector<std::pair<std::string, DiagonalForm>> forms;
    forms.emplace_back("k=2", DiagonalForm::distance(v.n));
    if (v.p != 3) {
        std::vector<std::int64_t> coeffs;
        std::vector<int> exps;
        for (int i = 0; i < v.n; ++i) {
            coeffs.push_back(1 + i % 2);
            exps.push_back(3);
        }
        forms.emplace_back("k=3", DiagonalForm{coeffs, exps});
    }
    for (auto& [label, f] : forms) {
        double worst = 0;
        std::uint64_t total = 0;
        for (std::int64_t j = 0; j < v.p; ++j) {
            SolutionCountReport rc = mod_p_solution_count(f, v.p, j);
            total += std::uint64_t(rc.count);
            if (j % v.p != 0) worst = std::max(worst, rc.deviation);
        }
        check_eq(rep, label + " counts partition the domain", double(total),
                 double(ipow(v.p, v.n)));
        note(rep, label + " relative deviation stays below one", worst, 1.0, worst < 1.0);
        rep.constants["c1_" + label] = worst;
    }
    rep.params.erase("r");
}

// --------------------------------------------------------------- fourier-2.5

void run_fourier(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    if (!mod.is_unit(v.j)) fail(Errc::NonUnitRadius, "fourier-2.5 needs a unit radius j");
    SphereSpec spec(DiagonalForm::distance(v.n), mod, v.j);
    PointSet sphere = sphere_points(spec, v.oracle);

    const std::uint64_t dom = domain_size(mod, v.n);
    double worst = 0;
    std::mt19937_64 rng(v.seed);
    auto probe = [&](const Vec& m) {
        cd a = sphere_fourier(spec, m, SpherePath::Direct, &sphere);
        cd b = sphere_fourier(spec, m, SpherePath::Reduced);
        worst = std::max(worst, std::abs(a - b));
    };
    if (dom <= 4096) {
        for (std::uint64_t enc = 0; enc < dom; ++enc) probe(sphere.decode(enc));
    } else {
        for (int t = 0; t < 512; ++t) {
            Vec m(v.n);
            for (auto& c : m) c = std::int64_t(rng() % std::uint64_t(mod.q));
            probe(m);
        }
    }
    check_le(rep, "reduced evaluation matches the direct transform", worst, 1e-9);

    if (dom <= (1u << 20)) {
        SpectrumTable ind(mod, v.n);
        for (std::uint64_t enc : sphere.sorted_encoded()) ind.v[enc] = 1.0;
        SpectrumTable hat = fourier(ind);
        double power = 0;
        for (const cd& z : hat.v) power += std::norm(z);
        check_close(rep, "Parseval power equals |S|/q^n", power,
                    double(sphere.size()) / double(dom), 1e-9);
    }

    BoundProfile prof = fourier_bound_profile(spec, default_kappa(v.n));
    SphereSpec level1(spec.form, Modulus::make(v.p, 1), v.j % v.p);
    double c2_base = deep_stratum_constant(level1);
    check_le(rep, "deep constant stays within twice its level-1 value", prof.c2_effective,
             2.0 * c2_base, 1e-9);

    rep.constants["c2_effective"] = prof.c2_effective;
    rep.constants["c3_effective"] = prof.c3_effective;
    rep.constants["c2_level1"] = c2_base;
    rep.constants["kappa"] = prof.kappa;
    rep.constants["sphere_size"] = sphere.size();
    rep.params["j"] = v.j;
}

// ------------------------------------------------------------------ sums-2.6

void run_sums(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    DiagonalForm f = DiagonalForm::distance(v.n);
    const std::uint64_t dom = domain_size(mod, v.n);

    // Level-1 hypothesis constants: c1 normalizes |G_1| by p^{n/2}; c2 counts
    // solutions of s grad F(x) + m = 0 (mod p) over nonzero frequency pairs.
    Modulus modp = Modulus::make(v.p, 1);
    double c1_level1 = 0;
    std::uint64_t c2_gradient = 0;
    {
        const std::uint64_t dom1 = domain_size(modp, v.n);
        std::vector<std::uint64_t> grad_hits(dom1 * std::uint64_t(v.p), 0);
        PointSet codec(modp, v.n);
        Vec m(v.n);
        for (std::uint64_t ex = 0; ex < dom1; ++ex) {
            Vec x = codec.decode(ex);
            Vec grad(v.n);
            for (int i = 0; i < v.n; ++i) grad[i] = modp.reduce(f.partial(modp, i, x[i]));
            for (std::int64_t s = 0; s < v.p; ++s) {
                for (int i = 0; i < v.n; ++i) m[i] = modp.reduce(-s * grad[i]);
                grad_hits[codec.encode(m) * std::uint64_t(v.p) + std::uint64_t(s)] += 1;
            }
        }
        for (std::uint64_t em = 0; em < dom1; ++em) {
            Vec mm = codec.decode(em);
            for (std::int64_t s = 0; s < v.p; ++s) {
                if (em == 0 && s == 0) continue;
                cd g = complete_sum(f, modp, mm, s);
                c1_level1 = std::max(c1_level1, std::abs(g) / std::pow(double(v.p), v.n / 2.0));
                c2_gradient = std::max(
                    c2_gradient, grad_hits[em * std::uint64_t(v.p) + std::uint64_t(s)]);
            }
        }
    }

    double worst_identity = 0, deep_r = 0, shallow_max = 0;
    bool sampled = dom * std::uint64_t(mod.q) > (1u << 22);
    std::mt19937_64 rng(v.seed);
    PointSet codec(mod, v.n);
    auto visit = [&](const Vec& m, std::int64_t s) {
        int nu = std::min(vec_valuation(m, mod), mod.ord(s));
        if (nu >= v.r) return;  // (0, 0)
        cd direct = complete_sum(f, mod, m, s);
        if (nu >= 1) {
            cd reduced = complete_sum_reduced(f, mod, m, s);
            worst_identity = std::max(worst_identity, std::abs(direct - reduced));
        }
        if (nu == v.r - 1)
            deep_r = std::max(deep_r,
                              std::abs(direct) / std::pow(double(v.p), (v.r - 0.5) * v.n));
        else
            shallow_max = std::max(shallow_max, std::abs(direct));
    };
    if (!sampled) {
        for (std::uint64_t em = 0; em < dom; ++em) {
            Vec m = codec.decode(em);
            for (std::int64_t s = 0; s < mod.q; ++s) visit(m, s);
        }
    } else {
        Vec m(v.n);
        for (int t = 0; t < 4096; ++t) {
            for (auto& c : m) c = std::int64_t(rng() % std::uint64_t(mod.q));
            visit(m, std::int64_t(rng() % std::uint64_t(mod.q)));
        }
    }

    check_le(rep, "depth reduction identity holds across the sweep", worst_identity, 1e-6);
    check_le(rep, "deep stratum constant at level r within level 1", deep_r, c1_level1, 1e-9);
    if (v.r >= 2)
        check_le(rep, "shallow strata inside the gradient-count bound", shallow_max,
                 double(c2_gradient) * std::pow(double(v.p), (v.r - 1) * v.n), 1e-6);

    rep.constants["c1_level1"] = c1_level1;
    rep.constants["c1_level_r"] = deep_r;
    rep.constants["c2_gradient"] = double(c2_gradient);
    rep.constants["kappa"] = 0.0;
    rep.constants["sweep"] = sampled ? "sampled" : "full";
}

// ---------------------------------------------------------------- moment-2.7

void run_moment(VerifyReport& rep, const Resolved& v) {
    for (int k : {2, 3, 4}) {
        if (k % v.p == 0) continue;
        std::array<double, 4> deep{}, shallow{};
        for (int r = 1; r <= 3; ++r) {
            Modulus mod = Modulus::make(v.p, r);
            std::int64_t cut = r - (r + k - 1) / k;  // shallow when ord(m) < r - ceil(r/k)
            for (std::int64_t m = 0; m < mod.q; ++m) {
                double s = second_moment_one_var(1, k, m, mod);
                if (mod.ord(m) < cut)
                    shallow[std::size_t(r)] =
                        std::max(shallow[std::size_t(r)], s / std::pow(double(v.p), 2.0 * r));
                else
                    deep[std::size_t(r)] = std::max(
                        deep[std::size_t(r)], s / std::pow(double(v.p), (3.0 - 2.0 / k) * r));
            }
        }
        std::string tag = "k=" + std::to_string(k);
        for (int r = 2; r <= 3; ++r) {
            check_le(rep, tag + " deep ratio at r=" + std::to_string(r) + " within twice r=1",
                     deep[std::size_t(r)], 2.0 * deep[1], 1e-9);
            if (shallow[std::size_t(r)] > 0 && shallow[2] > 0 && r >= 3)
                check_le(rep, tag + " shallow ratio at r=3 within twice r=2", shallow[3],
                         2.0 * shallow[2], 1e-9);
        }
        rep.constants[tag + "_deep"] = {deep[1], deep[2], deep[3]};
        rep.constants[tag + "_shallow"] = {shallow[1], shallow[2], shallow[3]};
    }
    if (v.p == 3) {
        double frozen = second_moment_one_var(1, 2, 0, Modulus::make(3, 1));
        check_close(rep, "frozen example k=2 p=3 r=1 m=0", frozen, 15.0, 1e-9);
    }
    rep.params.erase("r");
    rep.params.erase("n");
}

// ----------------------------------------------------------------- group-4.1

void run_group(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    RotationGroup g = RotationGroup::build(mod);
    check_eq(rep, "group order matches the split formula", double(g.size()),
             double(g.expected_order()));

    std::unordered_set<std::int64_t> keys;
    keys.reserve(g.size() * 2);
    for (const Rotation& s : g.elements()) keys.insert(s.a + mod.q * s.b);

    std::uint64_t closure_bad = 0, inverse_bad = 0;
    const std::uint64_t nn = std::uint64_t(g.size()) * g.size();
    if (nn <= 250000) {
        for (const Rotation& s : g.elements())
            for (const Rotation& t : g.elements()) {
                Rotation u = compose(s, t, mod);
                if (!keys.count(u.a + mod.q * u.b)) ++closure_bad;
            }
    } else {
        std::mt19937_64 rng(v.seed);
        for (int t = 0; t < 4000; ++t) {
            const Rotation& a = g.elements()[rng() % g.size()];
            const Rotation& b = g.elements()[rng() % g.size()];
            Rotation u = compose(a, b, mod);
            if (!keys.count(u.a + mod.q * u.b)) ++closure_bad;
        }
    }
    for (const Rotation& s : g.elements()) {
        Rotation inv = inverse_rot(s, mod);
        Rotation id = compose(s, inv, mod);
        if (!keys.count(inv.a + mod.q * inv.b) || id.a != 1 || id.b != 0) ++inverse_bad;
    }
    check_eq(rep, "closure violations", double(closure_bad), 0.0);
    check_eq(rep, "inverse violations", double(inverse_bad), 0.0);
    rep.constants["order"] = g.size();
    rep.params.erase("n");
}

// ----------------------------------------------------------------- orbit-4.2

void run_orbit(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    RotationGroup g = RotationGroup::build(mod);
    DiagonalForm f = DiagonalForm::distance(2);
    PointSet codec(mod, 2);

    std::map<std::pair<int, std::int64_t>, PointSet> circles;
    auto circle_at = [&](int level, std::int64_t jr) -> const PointSet& {
        auto key = std::make_pair(level, jr);
        auto it = circles.find(key);
        if (it == circles.end()) {
            SphereSpec spec(f, Modulus::make(v.p, level), jr);
            it = circles.emplace(key, sphere_points(spec)).first;
        }
        return it->second;
    };

    std::uint64_t product_bad = 0, stab_bad = 0, set_bad = 0, isotropic = 0;
    const std::uint64_t dom = domain_size(mod, 2);
    for (std::uint64_t enc = 1; enc < dom; ++enc) {
        Vec x = codec.decode(enc);
        PointSet orb = orbit(x, g);
        std::size_t stab = stabilizer(x, g).size();
        if (orb.size() * stab != g.size()) ++product_bad;

        SplitVec sv = split(x, mod);
        const Modulus& core = sv.reduced;
        std::int64_t jr = core.reduce(f.eval(core, sv.unit_part));
        bool unit_norm = core.is_unit(jr);
        if (v.p % 4 == 1 && !unit_norm) {
            ++isotropic;
            continue;
        }
        if (stab != std::uint64_t(ipow(v.p, sv.v))) ++stab_bad;

        const PointSet& c = circle_at(v.r - sv.v, jr);
        bool same = orb.size() == c.size();
        if (same) {
            const std::int64_t scale = ipow(v.p, sv.v);
            Vec w(2);
            for (std::uint64_t ec : c.sorted_encoded()) {
                Vec z = c.decode(ec);
                for (int i = 0; i < 2; ++i) w[i] = mod.reduce(z[i] * scale);
                if (!orb.contains(w)) {
                    same = false;
                    break;
                }
            }
        }
        if (!same) ++set_bad;
    }
    check_eq(rep, "orbit-stabilizer product equals the group order", double(product_bad), 0.0);
    check_eq(rep, "stabilizer order is p^{v_x}", double(stab_bad), 0.0);
    check_eq(rep, "orbit equals the scaled circle", double(set_bad), 0.0);
    rep.constants["group_order"] = g.size();
    rep.constants["points_checked"] = dom - 1 - isotropic;
    if (v.p % 4 == 1) rep.constants["isotropic_skipped"] = isotropic;
    rep.params.erase("n");
}

// ------------------------------------------------------- circle-4.4 and 4.9

void run_circle(VerifyReport& rep, const Resolved& v, int klass) {
    require_mod4(v.p, klass);
    Modulus mod = Modulus::make(v.p, v.r);
    std::vector<std::uint64_t> hist = radius_histogram(DiagonalForm::distance(2), mod);
    std::uint64_t formula_bad = 0, total = 0, decomp_bad = 0;
    for (std::int64_t j = 0; j < mod.q; ++j) {
        total += hist[std::size_t(j)];
        if (circle_cardinality_formula(v.p, v.r, j) != std::int64_t(hist[std::size_t(j)]))
            ++formula_bad;
        if (klass == 3) {
            CircleDecomposition dec = circle_decomposition(mod, j);
            if (dec.predicted_cardinality() != std::int64_t(hist[std::size_t(j)])) ++decomp_bad;
            if (dec.materialize().size() != hist[std::size_t(j)]) ++decomp_bad;
        }
    }
    check_eq(rep, "formula matches the exhaustive count for every radius", double(formula_bad),
             0.0);
    check_eq(rep, "circle sizes partition the plane", double(total), double(mod.q) * double(mod.q));
    if (klass == 3)
        check_eq(rep, "layer decomposition reproduces every circle", double(decomp_bad), 0.0);
    rep.constants["unit_circle"] = hist[1];
    rep.params.erase("n");
}

// ------------------------------------------------------- energy-4.5 / 4.10

void run_energy_circle(VerifyReport& rep, const Resolved& v, int klass) {
    require_mod4(v.p, klass);
    Modulus mod = Modulus::make(v.p, v.r);
    DiagonalForm f = DiagonalForm::distance(2);
    double worst = 0;
    std::int64_t arg = 0;
    for (std::int64_t j = 1; j < mod.q; ++j) {
        if (!mod.is_unit(j)) continue;
        PointSet circle = sphere_points(SphereSpec(f, mod, j), v.oracle);
        EnergyReport er = energy_fiber_max(circle);
        if (double(er.max_fiber) > worst) {
            worst = double(er.max_fiber);
            arg = j;
        }
    }
    check_le(rep, "difference fibres stay within 2 p^{r-1}", worst,
             2.0 * double(ipow(v.p, v.r - 1)));
    rep.constants["max_fiber"] = worst;
    rep.constants["argmax_radius"] = arg;
    rep.params.erase("n");
}

// ------------------------------------------------------- energy-4.6 / 4.11

void run_energy_orbit(VerifyReport& rep, const Resolved& v, int klass) {
    require_mod4(v.p, klass);
    Modulus mod = Modulus::make(v.p, v.r);
    RotationGroup g = RotationGroup::build(mod);
    DiagonalForm f = DiagonalForm::distance(2);
    PointSet codec(mod, 2);
    const std::uint64_t dom = domain_size(mod, 2);
    std::vector<bool> seen(dom, false);
    double worst_ratio = 0;
    std::uint64_t bad = 0, isotropic = 0;
    for (std::uint64_t enc = 1; enc < dom; ++enc) {
        if (seen[enc]) continue;
        Vec m = codec.decode(enc);
        SplitVec sv = split(m, mod);
        bool unit_norm = sv.reduced.is_unit(f.eval(sv.reduced, sv.unit_part));
        PointSet orb = orbit(m, g);
        for (std::uint64_t eo : orb.sorted_encoded()) seen[eo] = true;
        if (klass == 1 && !unit_norm) {
            ++isotropic;
            continue;
        }
        EnergyReport er = energy_fiber_max(orb);
        double cap = double(ipow(v.p, v.r - sv.v - 1));
        worst_ratio = std::max(worst_ratio, double(er.max_fiber) / cap);
        if (double(er.max_fiber) > 2.0 * cap) ++bad;
    }
    check_eq(rep, "orbit fibres stay within 2 p^{r-v-1}", double(bad), 0.0);
    rep.constants["max_fiber_over_p_pow"] = worst_ratio;
    if (klass == 1) rep.constants["isotropic_skipped"] = isotropic;
    rep.params.erase("n");
}

// ----------------------------------------------------------------- ext-4.1T

void run_ext_circle(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    if (!mod.is_unit(v.j)) fail(Errc::NonUnitRadius, "ext-4.1T needs a unit radius j");
    DiagonalForm f = DiagonalForm::distance(2);

    auto max_ratio = [&](int level, std::int64_t jr, std::uint64_t seed) {
        PointSet circle = sphere_points(SphereSpec(f, Modulus::make(v.p, level), jr));
        std::mt19937_64 rng(seed);
        std::vector<cd> w(circle.size(), cd(1, 0));
        double best = extension_ratio_circle(circle, jr, w).ratio;
        for (int t = 0; t < 100; ++t) {
            for (auto& z : w) z = random_weight(rng);
            best = std::max(best, extension_ratio_circle(circle, jr, w).ratio);
        }
        return best;
    };

    double at_r = max_ratio(v.r, v.j, v.seed);
    double at_1 = max_ratio(1, v.j % v.p, v.seed + 1);
    check_le(rep, "extension ratio within twice its level-1 value", at_r, 2.0 * at_1, 1e-9);

    {
        PointSet circle = sphere_points(SphereSpec(f, mod, v.j));
        std::mt19937_64 rng(v.seed + 2);
        std::vector<cd> w(circle.size());
        for (auto& z : w) z = random_weight(rng);
        double fast = extension_lhs(circle, w);
        double direct = extension_lhs_direct(circle, w);
        check_close(rep, "fourth moment histogram path matches the direct sum", fast, direct,
                     1e-9);
    }

    if (v.p == 3 && v.j % 3 == 1) {
        PointSet c1 = sphere_points(SphereSpec(f, Modulus::make(3, 1), 1));
        std::vector<cd> ones(c1.size(), cd(1, 0));
        ExtensionReport er = extension_ratio_circle(c1, 1, ones);
        check_close(rep, "closed form lhs 9/8 at p=3 r=1 f=1", er.lhs, 9.0 / 8.0, 1e-12);
        check_close(rep, "closed form rhs 4/3 at p=3 r=1 f=1", er.rhs, 4.0 / 3.0, 1e-12);
    }

    rep.constants["max_ratio_level_r"] = at_r;
    rep.constants["max_ratio_level_1"] = at_1;
    rep.params["j"] = v.j;
    rep.params.erase("n");
}

// ------------------------------------------------------- ext-4.2T / ext-4.3T

void run_ext_orbit(VerifyReport& rep, const Resolved& v, int klass) {
    require_mod4(v.p, klass);
    DiagonalForm f = DiagonalForm::distance(2);

    auto level_max = [&](int level, std::uint64_t seed) {
        Modulus mod = Modulus::make(v.p, level);
        RotationGroup g = RotationGroup::build(mod);
        std::mt19937_64 rng(seed);
        double best = 0;
        for (int vv = 0; vv < level; ++vv) {
            for (const Vec& base : {Vec{1, 0}, Vec{1, 1}}) {
                Vec x{base[0] * ipow(v.p, vv), base[1] * ipow(v.p, vv)};
                PointSet orb = orbit(x, g);
                std::vector<cd> w(orb.size(), cd(1, 0));
                best = std::max(best, extension_ratio_orbit(orb, x, w).ratio);
                for (int t = 0; t < 50; ++t) {
                    for (auto& z : w) z = random_weight(rng);
                    best = std::max(best, extension_ratio_orbit(orb, x, w).ratio);
                }
            }
        }
        return best;
    };

    double at_r = level_max(v.r, v.seed);
    double at_1 = level_max(1, v.seed + 1);
    check_le(rep, "orbit extension ratio within twice its level-1 value", at_r, 2.0 * at_1, 1e-9);
    rep.constants["max_ratio_level_r"] = at_r;
    rep.constants["max_ratio_level_1"] = at_1;
    rep.params.erase("n");
}

// ----------------------------------------------------------------- decomp-3

void run_decomp(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    DiagonalForm f = DiagonalForm::distance(v.n);
    if (!mod.is_unit(v.j)) fail(Errc::NonUnitRadius, "decomp-3 needs a unit radius j");
    BoundProfile prof = fourier_bound_profile(SphereSpec(f, mod, v.j), default_kappa(v.n));

    std::uint64_t outside = 0;
    double worst = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        PointSet e1 = random_subset(mod, v.n, 1.0 / 3.0, v.seed + 2 * std::uint64_t(t));
        PointSet e2 = random_subset(mod, v.n, 1.0 / 3.0, v.seed + 2 * std::uint64_t(t) + 1);
        if (e1.empty() || e2.empty()) continue;
        ErrorDecomposition dec = error_decomposition(f, e1, e2, v.j, prof);
        if (!dec.within) ++outside;
        if (dec.bound > 0) worst = std::max(worst, std::abs(dec.error) / dec.bound);
    }
    check_eq(rep, "error term within the spectral bound on every trial", double(outside), 0.0);

    PointSet e1 = random_subset(mod, v.n, 1.0 / 3.0, v.seed);
    PointSet e2 = random_subset(mod, v.n, 1.0 / 3.0, v.seed + 1);
    DistanceCensus a = distance_census(f, e1, e2, CensusPath::Loop);
    DistanceCensus b = distance_census(f, e1, e2, CensusPath::Convolution);
    std::uint64_t mismatch = 0, total = 0;
    for (std::int64_t j = 0; j < mod.q; ++j) {
        if (a.counts[std::size_t(j)] != b.counts[std::size_t(j)]) ++mismatch;
        total += a.counts[std::size_t(j)];
    }
    check_eq(rep, "census paths agree at every radius", double(mismatch), 0.0);
    check_eq(rep, "census counts conserve |E1||E2|", double(total), double(a.pairs));

    rep.constants["max_error_over_bound"] = worst;
    rep.constants["c2"] = prof.c2_effective;
    rep.constants["c3"] = prof.c3_effective;
    rep.constants["trials"] = trials;
    rep.params["j"] = v.j;
}

// ---------------------------------------------------------------- pinned-6.2

void run_pinned(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    DiagonalForm f = DiagonalForm::distance(v.n);
    const double q = double(mod.q);
    PointSet e1 = random_subset(mod, v.n, 0.5, v.seed);
    PointSet e2 = random_subset(mod, v.n, 0.5, v.seed + 1);
    if (e1.empty() || e2.empty()) fail(Errc::BadArgument, "seeded sets came out empty; change seed");

    std::uint64_t good = 0, aggregate = 0;
    for (std::uint64_t enc : e1.sorted_encoded()) {
        Vec x = e1.decode(enc);
        PinnedDistances pd = pinned_distance_set(f, e2, x);
        aggregate += pd.unit_count;
        if (double(pd.unit_count) >= q / 32.0) ++good;
    }
    check_ge(rep, "pins seeing at least q/32 unit distances exceed |E1|/32", double(good),
             double(e1.size()) / 32.0);
    check_ge(rep, "aggregate pinned unit distances exceed |E1| q / 8", double(aggregate),
             double(e1.size()) * q / 8.0);

    BoundProfile prof =
        fourier_bound_profile(SphereSpec(f, mod, 1), default_kappa(v.n));
    double c = std::max(prof.c2_effective, prof.c3_effective);
    double threshold = 8.0 * c * c * std::pow(double(mod.q), 2.0 * v.n) /
                       std::pow(double(v.p), double(v.n - 1));
    rep.constants["size_product"] = double(e1.size()) * double(e2.size());
    rep.constants["hypothesis_threshold"] = threshold;
    rep.constants["good_pins"] = good;
    rep.constants["e1_size"] = e1.size();
}

// ------------------------------------------------------------- incidence-6.3

void run_incidence(VerifyReport& rep, const Resolved& v) {
    Modulus mod = Modulus::make(v.p, v.r);
    DiagonalForm f = DiagonalForm::distance(v.n);
    PointSet pts = random_subset(mod, v.n, 0.4, v.seed);
    if (pts.empty()) fail(Errc::BadArgument, "seeded point set came out empty; change seed");

    std::mt19937_64 rng(v.seed + 1);
    std::vector<SphereInstance> spheres;
    for (int t = 0; t < 40; ++t) {
        SphereInstance s;
        s.center.resize(v.n);
        for (auto& c : s.center) c = std::int64_t(rng() % std::uint64_t(mod.q));
        do {
            s.radius = std::int64_t(rng() % std::uint64_t(mod.q));
        } while (!mod.is_unit(s.radius));
        spheres.push_back(std::move(s));
    }

    IncidenceReport ir = incidences(f, pts, spheres);

    // Membership oracle: walk each sphere once and probe center - d in P.
    std::map<std::int64_t, PointSet> cache;
    std::uint64_t brute = 0;
    Vec y(v.n);
    for (const SphereInstance& s : spheres) {
        auto it = cache.find(s.radius);
        if (it == cache.end())
            it = cache.emplace(s.radius, sphere_points(SphereSpec(f, mod, s.radius))).first;
        const PointSet& sp = it->second;
        for (std::uint64_t enc : sp.sorted_encoded()) {
            Vec d = sp.decode(enc);
            for (int i = 0; i < v.n; ++i) y[i] = mod.reduce(s.center[i] - d[i]);
            if (pts.contains(y)) ++brute;
        }
    }
    check_eq(rep, "incidence count matches the membership oracle", double(ir.incidences),
             double(brute));
    check_le(rep, "incidence excess within the frozen constant", ir.coefficient, 2.0);

    rep.constants["incidences"] = ir.incidences;
    rep.constants["mean_term"] = ir.mean_term;
    rep.constants["coefficient"] = ir.coefficient;
    rep.constants["spheres"] = spheres.size();
}

struct Entry {
    Defaults defaults;
    std::function<void(VerifyReport&, const Resolved&)> run;
    bool with_n = true;
    bool with_j = false;
};

const std::map<std::string, Entry>& registry() {
    static const std::map<std::string, Entry> reg = [] {
        std::map<std::string, Entry> m;
        m["hensel-2.1"] = {{3, 3, 2, 1}, run_hensel, false, false};
        m["weil-2.2"] = {{7, 1, 1, 1}, run_weil, false, false};
        m["count-2.3"] = {{7, 1, 2, 1}, run_count, true, false};
        m["fourier-2.5"] = {{5, 2, 2, 1}, run_fourier, true, false};
        m["sums-2.6"] = {{3, 2, 2, 1}, run_sums, true, false};
        m["moment-2.7"] = {{3, 1, 1, 1}, run_moment, false, false};
        m["group-4.1"] = {{3, 2, 2, 1}, run_group, true, false};
        m["orbit-4.2"] = {{3, 2, 2, 1}, run_orbit, true, false};
        m["circle-4.4"] = {{3, 3, 2, 1},
                           [](VerifyReport& r, const Resolved& v) { run_circle(r, v, 3); }};
        m["energy-4.5"] = {{3, 2, 2, 1},
                           [](VerifyReport& r, const Resolved& v) { run_energy_circle(r, v, 3); }};
        m["energy-4.6"] = {{3, 2, 2, 1},
                           [](VerifyReport& r, const Resolved& v) { run_energy_orbit(r, v, 3); }};
        m["ext-4.1T"] = {{3, 2, 2, 1}, run_ext_circle, true, true};
        m["ext-4.2T"] = {{3, 2, 2, 1},
                         [](VerifyReport& r, const Resolved& v) { run_ext_orbit(r, v, 3); }};
        m["ext-4.3T"] = {{5, 2, 2, 1},
                         [](VerifyReport& r, const Resolved& v) { run_ext_orbit(r, v, 1); }};
        m["circle-4.9"] = {{5, 3, 2, 1},
                           [](VerifyReport& r, const Resolved& v) { run_circle(r, v, 1); }};
        m["energy-4.10"] = {{5, 2, 2, 1},
                            [](VerifyReport& r, const Resolved& v) { run_energy_circle(r, v, 1); }};
        m["energy-4.11"] = {{5, 2, 2, 1},
                            [](VerifyReport& r, const Resolved& v) { run_energy_orbit(r, v, 1); }};
        m["decomp-3"] = {{3, 2, 2, 1}, run_decomp, true, true};
        m["pinned-6.2"] = {{7, 2, 2, 1}, run_pinned, true, false};
        m["incidence-6.3"] = {{7, 2, 2, 1}, run_incidence, true, false};
        return m;
    }();
    return reg;
}

}  // namespace

const std::vector<std::string>& verify_ids() {
    static const std::vector<std::string> ids = {
        "hensel-2.1", "weil-2.2",   "count-2.3",  "fourier-2.5", "sums-2.6",
        "moment-2.7", "group-4.1",  "orbit-4.2",  "circle-4.4",  "energy-4.5",
        "energy-4.6", "ext-4.1T",   "ext-4.2T",   "ext-4.3T",    "circle-4.9",
        "energy-4.10", "energy-4.11", "decomp-3", "pinned-6.2",  "incidence-6.3",
    };
    return ids;
}

bool is_verify_id(const std::string& id) { return registry().count(id) > 0; }

VerifyReport run_verify(const std::string& id, const VerifyOptions& opt) {
    auto it = registry().find(id);
    if (it == registry().end())
        fail(Errc::BadArgument, "unknown verification id '" + id + "'; see `verify --list`");
    const Entry& e = it->second;
    Resolved v = resolve(opt, e.defaults);
    VerifyReport rep;
    rep.lemma = id;
    stamp(rep, v, e.with_n, e.with_j);
    e.run(rep, v);
    return rep;
}

}  // namespace padic
