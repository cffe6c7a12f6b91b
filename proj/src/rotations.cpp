#include "padiclab/rotations.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "padiclab/hensel.hpp"
#include "padiclab/spectral.hpp"

namespace padic {

RotationGroup RotationGroup::build(const Modulus& mod) {
    DiagonalForm unit_circle = DiagonalForm::distance(2);
    PolySystem sys = PolySystem::equation(unit_circle, 1);
    PointSet pts = solve_system(sys, mod);
    RotationGroup g(mod);
    g.elems_.reserve(pts.size());
    for (std::uint64_t e : pts.sorted_encoded()) {
        Vec ab = pts.decode(e);
        g.elems_.push_back(Rotation{ab[0], ab[1]});
    }
    return g;
}

std::int64_t RotationGroup::expected_order() const {
    std::int64_t side = mod_.p % 4 == 3 ? mod_.p + 1 : mod_.p - 1;
    return mod_.p_pow(mod_.r - 1) * side;
}

Rotation compose(const Rotation& s, const Rotation& t, const Modulus& mod) {
    Rotation out;
    out.a = mod.sub(mod.mul(s.a, t.a), mod.mul(s.b, t.b));
    out.b = mod.add(mod.mul(s.a, t.b), mod.mul(s.b, t.a));
    return out;
}

Rotation inverse_rot(const Rotation& s, const Modulus& mod) {
    return Rotation{s.a, mod.sub(0, s.b)};
}

Vec apply(const Rotation& s, std::span<const std::int64_t> x, const Modulus& mod) {
    if (x.size() != 2) fail(Errc::WrongArity, "rotations act on pairs");
    Vec y(2);
    y[0] = mod.sub(mod.mul(s.a, x[0]), mod.mul(s.b, x[1]));
    y[1] = mod.add(mod.mul(s.b, x[0]), mod.mul(s.a, x[1]));
    return y;
}

PointSet orbit(std::span<const std::int64_t> x, const RotationGroup& g) {
    const Modulus& mod = g.modulus();
    PointSet out(mod, 2);
    for (const Rotation& s : g.elements()) out.insert(apply(s, x, mod));
    return out;
}

std::vector<Rotation> stabilizer(std::span<const std::int64_t> x, const RotationGroup& g) {
    const Modulus& mod = g.modulus();
    if (x.size() != 2) fail(Errc::WrongArity, "rotations act on pairs");
    Vec xc = {mod.reduce(x[0]), mod.reduce(x[1])};
    std::vector<Rotation> out;
    for (const Rotation& s : g.elements()) {
        Vec y = apply(s, xc, mod);
        if (y[0] == xc[0] && y[1] == xc[1]) out.push_back(s);
    }
    return out;
}

EnergyReport energy_fiber_max(const PointSet& v) {
    const Modulus& mod = v.modulus();
    int n = v.arity();
    check_budget((unsigned __int128)v.size() * v.size(), "difference-fiber histogram");
    const auto& pts = v.sorted_encoded();
    std::vector<Vec> dec;
    dec.reserve(pts.size());
    for (std::uint64_t e : pts) dec.push_back(v.decode(e));
    std::unordered_map<std::uint64_t, std::uint64_t> hist;
    hist.reserve(std::min<std::size_t>(pts.size() * pts.size(), std::size_t(1) << 20));
    PointSet codec(mod, n);
    Vec d(n);
    for (const Vec& a : dec)
        for (const Vec& b : dec) {
            bool zero = true;
            for (int i = 0; i < n; ++i) {
                d[i] = mod.sub(a[i], b[i]);
                if (d[i] != 0) zero = false;
            }
            if (zero) continue;
            ++hist[codec.encode(d)];
        }
    EnergyReport rep;
    std::uint64_t arg = 0;
    for (const auto& [enc, cnt] : hist) {
        if (cnt > rep.max_fiber || (cnt == rep.max_fiber && enc < arg)) {
            rep.max_fiber = cnt;
            arg = enc;
        }
    }
    if (rep.max_fiber) rep.argmax = codec.decode(arg);
    return rep;
}

double extension_lhs(const PointSet& v, std::span<const std::complex<double>> f) {
    const Modulus& mod = v.modulus();
    int n = v.arity();
    if (f.size() != v.size()) fail(Errc::SizeMismatch, "one weight per carrier point");
    if (v.empty()) return 0;
    std::uint64_t dom = v.domain_size();
    check_budget(dom, "difference table");
    check_budget((unsigned __int128)v.size() * v.size(), "difference table fill");
    const auto& pts = v.sorted_encoded();
    std::vector<Vec> dec;
    dec.reserve(pts.size());
    for (std::uint64_t e : pts) dec.push_back(v.decode(e));
    std::vector<cd> diff(dom, cd(0, 0));
    PointSet codec(mod, n);
    Vec d(n);
    double inv = 1.0 / double(v.size());
    for (std::size_t i = 0; i < dec.size(); ++i)
        for (std::size_t j = 0; j < dec.size(); ++j) {
            for (int c = 0; c < n; ++c) d[c] = mod.sub(dec[i][c], dec[j][c]);
            diff[codec.encode(d)] += (f[i] * inv) * std::conj(f[j] * inv);
        }
    // sum_m |(f dsigma)^(m)|^4 = q^n sum_z |sum_{x-y=z} g(x) conj g(y)|^2.
    double qn = 1;
    for (int i = 0; i < n; ++i) qn *= double(mod.q);
    double s = 0;
    for (const cd& z : diff) s += std::norm(z);
    return std::sqrt(qn * s);
}

double extension_lhs_direct(const PointSet& v, std::span<const std::complex<double>> f) {
    const Modulus& mod = v.modulus();
    int n = v.arity();
    if (f.size() != v.size()) fail(Errc::SizeMismatch, "one weight per carrier point");
    if (v.empty()) return 0;
    std::uint64_t dom = v.domain_size();
    check_budget((unsigned __int128)dom * v.size(), "direct fourth moment");
    const auto& pts = v.sorted_encoded();
    std::vector<Vec> dec;
    dec.reserve(pts.size());
    for (std::uint64_t e : pts) dec.push_back(v.decode(e));
    Twiddles tw(mod.q);
    PointSet codec(mod, n);
    double total = 0;
    double inv = 1.0 / double(v.size());
    for (std::uint64_t me = 0; me < dom; ++me) {
        Vec m = codec.decode(me);
        cd acc(0, 0);
        for (std::size_t i = 0; i < dec.size(); ++i) {
            std::int64_t dot = 0;
            for (int c = 0; c < n; ++c) dot = mod.add(dot, mod.mul(m[c], dec[i][c]));
            acc += f[i] * tw.at(dot);
        }
        double a2 = std::norm(acc * inv);
        total += a2 * a2;
    }
    return std::sqrt(total);
}

namespace {

ExtensionReport finish_ratio(double lhs, double rhs_scale,
                             std::span<const std::complex<double>> f) {
    double l2 = 0;
    for (const cd& z : f) l2 += std::norm(z);
    ExtensionReport rep;
    rep.lhs = lhs;
    rep.rhs = rhs_scale * l2;
    rep.ratio = rep.rhs == 0 ? 0 : rep.lhs / rep.rhs;
    return rep;
}

}  // namespace

ExtensionReport extension_ratio_circle(const PointSet& circle, std::int64_t j,
                                       std::span<const std::complex<double>> f) {
    const Modulus& mod = circle.modulus();
    if (!mod.is_unit(mod.reduce(j)))
        fail(Errc::NonUnitRadius, "circle extension estimate needs a unit radius");
    double scale = std::pow(double(mod.p), -(mod.r + 1) / 2.0);
    return finish_ratio(extension_lhs(circle, f), scale, f);
}

ExtensionReport extension_ratio_orbit(const PointSet& orb, std::span<const std::int64_t> x,
                                      std::span<const std::complex<double>> f) {
    const Modulus& mod = orb.modulus();
    SplitVec sv = split(x, mod);  // ZeroVector for x = 0
    if (mod.p % 4 == 1) {
        DiagonalForm dist = DiagonalForm::distance(2);
        std::int64_t norm = dist.eval(sv.reduced, sv.unit_part);
        if (!sv.reduced.is_unit(norm))
            fail(Errc::IsotropicOrbit, "orbit extension needs a unit reduced norm");
    }
    double scale = std::pow(double(mod.p), -(mod.r - 3 * sv.v + 1) / 2.0);
    return finish_ratio(extension_lhs(orb, f), scale, f);
}

}  // namespace padic
