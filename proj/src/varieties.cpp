#include "padiclab/varieties.hpp"

#include <numeric>

namespace padic {

namespace {

// Walks all of (Z/qZ)^n keeping F(x) updated incrementally through
// per-coordinate value tables.
template <typename Fn>
void exhaustive_form_scan(const DiagonalForm& f, const Modulus& mod, Fn&& fn) {
    int n = f.arity();
    check_budget(([&] {
        unsigned __int128 d = 1;
        for (int i = 0; i < n; ++i) d *= (unsigned __int128)mod.q;
        return d;
    })(), "exhaustive sphere scan");
    std::vector<Vec> table(n, Vec(mod.q));
    for (int i = 0; i < n; ++i) {
        std::int64_t a = mod.reduce(f.coeffs[i]);
        for (std::int64_t x = 0; x < mod.q; ++x)
            table[i][x] = mod.mul(a, mod.pow(x, f.exps[i]));
    }
    Vec x(n, 0);
    // Depth-first odometer carrying the partial sum of the settled coordinates.
    std::function<void(int, std::int64_t)> rec = [&](int coord, std::int64_t acc) {
        if (coord < 0) {
            fn(std::span<const std::int64_t>(x), acc);
            return;
        }
        for (std::int64_t v = 0; v < mod.q; ++v) {
            x[coord] = v;
            rec(coord - 1, mod.add(acc, table[coord][v]));
        }
    };
    rec(n - 1, 0);
}

}  // namespace

void visit_sphere(const SphereSpec& spec,
                  const std::function<void(std::span<const std::int64_t>)>& fn) {
    if (!spec.unit_radius())
        fail(Errc::SmoothnessViolated, "streamed sphere enumeration needs a unit radius");
    if (!spec.form.smooth_for(spec.mod))
        fail(Errc::SmoothnessViolated, "p divides some a_i k_i");
    int n = spec.arity();
    const Modulus& mod = spec.mod;
    unsigned __int128 base_space = 1;
    for (int i = 0; i < n; ++i) base_space *= (unsigned __int128)mod.p;
    check_budget(base_space, "mod-p sphere base search");
    Modulus mp = mod.lower(1);
    std::int64_t jp = spec.radius % mod.p;
    PolySystem sys = PolySystem::equation(spec.form, spec.radius);
    std::uint64_t total = std::uint64_t(base_space);
    Vec x(n, 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t t = idx;
        for (int i = 0; i < n; ++i) {
            x[i] = std::int64_t(t % std::uint64_t(mod.p));
            t /= std::uint64_t(mod.p);
        }
        if (spec.form.eval(mp, x) != jp) continue;
        if (mod.r == 1)
            fn(x);
        else
            lift_visit(sys, mod.p, x, 1, mod.r - 1, fn);
    }
}

PointSet sphere_points(const SphereSpec& spec, bool force_oracle) {
    int n = spec.arity();
    const Modulus& mod = spec.mod;
    if (!force_oracle && spec.unit_radius() && spec.form.smooth_for(mod)) {
        PointSet out(mod, n);
        visit_sphere(spec, [&](std::span<const std::int64_t> pt) { out.insert(pt); });
        return out;
    }
    if (!force_oracle && spec.form.is_distance_form() && n == 2 && mod.p % 4 == 3) {
        return circle_decomposition(mod, spec.radius).materialize();
    }
    PointSet out(mod, n);
    exhaustive_form_scan(spec.form, mod, [&](std::span<const std::int64_t> pt, std::int64_t val) {
        if (val == spec.radius) out.insert(pt);
    });
    return out;
}

std::vector<std::uint64_t> radius_histogram(const DiagonalForm& f, const Modulus& mod) {
    std::vector<std::uint64_t> hist(mod.q, 0);
    exhaustive_form_scan(f, mod, [&](std::span<const std::int64_t>, std::int64_t val) {
        ++hist[val];
    });
    return hist;
}

std::int64_t circle_cardinality_formula(std::int64_t p, int r, std::int64_t j) {
    Modulus mod = Modulus::make(p, r);
    int v = mod.ord(mod.reduce(j));
    if (p % 4 == 3) {
        if (v == r) return mod.p_pow(2 * (r / 2));
        if (v % 2 == 0) return mod.p_pow(r - 1) * (p + 1);
        return 0;
    }
    if (v == r) return (std::int64_t(r) * p + p - r) * mod.p_pow(r - 1);
    return (v + 1) * mod.p_pow(r - 1) * (p - 1);
}

std::int64_t CircleDecomposition::predicted_cardinality() const {
    switch (kind) {
        case Kind::Empty: return 0;
        case Kind::ZeroRadius: return mod.p_pow(2 * (mod.r / 2));
        case Kind::Layered: return mod.p_pow(mod.r - 1) * (mod.p + 1);
    }
    return 0;
}

PointSet CircleDecomposition::materialize() const {
    PointSet out(mod, 2);
    if (kind == Kind::Empty) return out;
    if (kind == Kind::ZeroRadius) {
        std::int64_t ph = mod.p_pow((mod.r + 1) / 2);  // p^{ceil(r/2)}
        std::int64_t side = mod.p_pow(mod.r / 2);
        Vec pt(2);
        for (std::int64_t w1 = 0; w1 < side; ++w1)
            for (std::int64_t w2 = 0; w2 < side; ++w2) {
                pt[0] = mod.reduce(ph * w1);
                pt[1] = mod.reduce(ph * w2);
                out.insert(pt);
            }
        return out;
    }
    SphereSpec core(DiagonalForm::distance(2), core_mod, core_radius);
    PointSet core_pts = sphere_points(core);
    std::int64_t pu = mod.p_pow(u);
    std::int64_t pru = mod.p_pow(mod.r - u);
    Vec pt(2);
    for (std::uint64_t e : core_pts.sorted_encoded()) {
        Vec z = core_pts.decode(e);
        for (std::int64_t w1 = 0; w1 < pu; ++w1)
            for (std::int64_t w2 = 0; w2 < pu; ++w2) {
                pt[0] = mod.reduce(pu * z[0] + pru * w1);
                pt[1] = mod.reduce(pu * z[1] + pru * w2);
                out.insert(pt);
            }
    }
    return out;
}

CircleDecomposition circle_decomposition(const Modulus& mod, std::int64_t j) {
    if (mod.p % 4 != 3)
        fail(Errc::WrongResidueClass, "layered circle decomposition needs p = 3 (mod 4)");
    CircleDecomposition d;
    d.mod = mod;
    d.radius = mod.reduce(j);
    int v = mod.ord(d.radius);
    if (v == mod.r) {
        d.kind = CircleDecomposition::Kind::ZeroRadius;
        return d;
    }
    if (v % 2 != 0) {
        d.kind = CircleDecomposition::Kind::Empty;
        return d;
    }
    d.kind = CircleDecomposition::Kind::Layered;
    d.u = v / 2;
    d.core_mod = mod.lower(mod.r - v);
    d.core_radius = (d.radius / mod.p_pow(v)) % d.core_mod.q;
    return d;
}

SolutionCountReport mod_p_solution_count(const DiagonalForm& f, std::int64_t p, std::int64_t j) {
    Modulus mp = Modulus::make(p, 1);
    f.check_binding(mp);
    std::int64_t target = mp.reduce(j);
    SolutionCountReport rep;
    exhaustive_form_scan(f, mp, [&](std::span<const std::int64_t>, std::int64_t val) {
        if (val == target) ++rep.count;
    });
    rep.expected = 1;
    for (int i = 1; i < f.arity(); ++i) rep.expected *= p;
    rep.dev_num = std::llabs(rep.count - rep.expected);
    rep.dev_den = rep.expected;
    std::int64_t g = std::gcd(rep.dev_num, rep.dev_den);
    if (g > 1) {
        rep.dev_num /= g;
        rep.dev_den /= g;
    }
    rep.deviation = double(rep.dev_num) / double(rep.dev_den);
    return rep;
}

}  // namespace padic
