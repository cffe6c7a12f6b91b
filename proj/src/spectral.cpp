#include "padiclab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace padic {

Twiddles::Twiddles(std::int64_t q_) : q(q_), w(std::size_t(q_)) {
    for (std::int64_t t = 0; t < q; ++t) {
        double arg = 2.0 * std::numbers::pi * double(t) / double(q);
        w[std::size_t(t)] = cd(std::cos(arg), std::sin(arg));
    }
}

SpectrumTable::SpectrumTable(const Modulus& m, int arity) : mod(m), n(arity) {
    std::uint64_t d = domain_size(m, arity);
    check_budget(d, "spectrum table");
    v.assign(d, cd(0, 0));
}

namespace {

// One-dimensional DFT of length q = p^r on a contiguous buffer.
// X[k] = sum_j x[j] e_q(sign j k). `scale` maps local twiddle indices into
// the global q-length table: e_{q_local}(t) = tw[t * scale].
struct LineDft {
    const Twiddles& tw;
    std::int64_t p;
    int sign;

    std::size_t tw_index(std::int64_t t) const {
        std::int64_t i = t % tw.q;
        if (i < 0) i += tw.q;
        if (sign < 0 && i != 0) i = tw.q - i;
        return std::size_t(i);
    }

    void direct(cd* x, std::int64_t q, std::int64_t scale, cd* scratch) const {
        for (std::int64_t k = 0; k < q; ++k) {
            cd acc(0, 0);
            for (std::int64_t j = 0; j < q; ++j)
                acc += x[j] * tw.w[tw_index(j * k % q * scale)];
            scratch[k] = acc;
        }
        std::copy(scratch, scratch + q, x);
    }

    void run(cd* x, std::int64_t q, std::int64_t scale, cd* scratch) const {
        if (q == 1) return;
        if (q <= 64 || q == p) {
            direct(x, q, scale, scratch);
            return;
        }
        std::int64_t h = q / p;
        // Decimate by residue mod p, recurse, then combine with twiddles.
        for (std::int64_t j0 = 0; j0 < p; ++j0)
            for (std::int64_t j1 = 0; j1 < h; ++j1)
                scratch[j0 * h + j1] = x[j0 + p * j1];
        for (std::int64_t j0 = 0; j0 < p; ++j0)
            run(scratch + j0 * h, h, scale * p, x);
        for (std::int64_t k1 = 0; k1 < h; ++k1) {
            for (std::int64_t t = 0; t < p; ++t) {
                std::int64_t k = k1 + t * h;
                cd acc(0, 0);
                for (std::int64_t j0 = 0; j0 < p; ++j0)
                    acc += scratch[j0 * h + k1] * tw.w[tw_index(j0 * k % q * scale)];
                x[k] = acc;
            }
        }
    }
};

}  // namespace

void dft_in_place(SpectrumTable& t, int sign) {
    const std::int64_t q = t.mod.q;
    Twiddles tw(q);
    LineDft line{tw, t.mod.p, sign};
    std::vector<cd> buf(static_cast<std::size_t>(q)), scratch(static_cast<std::size_t>(q));
    std::uint64_t total = t.size();
    std::uint64_t stride = 1;
    for (int axis = 0; axis < t.n; ++axis) {
        std::uint64_t block = stride * std::uint64_t(q);
        for (std::uint64_t base = 0; base < total; base += block) {
            for (std::uint64_t off = 0; off < stride; ++off) {
                cd* start = t.v.data() + base + off;
                for (std::int64_t j = 0; j < q; ++j) buf[std::size_t(j)] = start[stride * std::uint64_t(j)];
                line.run(buf.data(), q, 1, scratch.data());
                for (std::int64_t j = 0; j < q; ++j) start[stride * std::uint64_t(j)] = buf[std::size_t(j)];
            }
        }
        stride = block;
    }
}

SpectrumTable fourier(const SpectrumTable& f) {
    SpectrumTable out = f;
    dft_in_place(out, -1);
    double norm = 1.0;
    for (int i = 0; i < f.n; ++i) norm /= double(f.mod.q);
    for (cd& z : out.v) z *= norm;
    return out;
}

SpectrumTable inverse(const SpectrumTable& fhat) {
    SpectrumTable out = fhat;
    dft_in_place(out, +1);
    return out;
}

SpectrumTable convolve(const SpectrumTable& f, const SpectrumTable& g) {
    if (!(f.mod == g.mod) || f.n != g.n)
        fail(Errc::SizeMismatch, "convolution needs matching tables");
    SpectrumTable a = fourier(f);
    SpectrumTable b = fourier(g);
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] *= b.v[i];
    return inverse(a);
}

cd character_sum(const PointSet& s, std::span<const std::int64_t> m) {
    const Modulus& mod = s.modulus();
    if (int(m.size()) != s.arity()) fail(Errc::ArityMismatch, "frequency arity mismatch");
    Twiddles tw(mod.q);
    cd acc(0, 0);
    for (std::uint64_t e : s.sorted_encoded()) {
        std::uint64_t t = e;
        std::int64_t dot = 0;
        for (int i = 0; i < s.arity(); ++i) {
            dot = mod.add(dot, mod.mul(m[i], std::int64_t(t % std::uint64_t(mod.q))));
            t /= std::uint64_t(mod.q);
        }
        acc += tw.at(mod.q - dot);
    }
    return acc;
}

cd sphere_fourier(const SphereSpec& spec, std::span<const std::int64_t> m, SpherePath path,
                  const PointSet* cached) {
    const Modulus& mod = spec.mod;
    int n = spec.arity();
    if (int(m.size()) != n) fail(Errc::ArityMismatch, "frequency arity mismatch");
    Vec mm(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) mm[i] = mod.reduce(m[i]);
    double qn = 1;
    for (int i = 0; i < n; ++i) qn *= double(mod.q);

    if (path == SpherePath::Direct) {
        if (cached) return character_sum(*cached, mm) / qn;
        if (spec.unit_radius() && spec.form.smooth_for(mod)) {
            Twiddles tw(mod.q);
            cd acc(0, 0);
            visit_sphere(spec, [&](std::span<const std::int64_t> y) {
                std::int64_t dot = 0;
                for (int i = 0; i < n; ++i) dot = mod.add(dot, mod.mul(mm[i], y[i]));
                acc += tw.at(mod.q - dot);
            });
            return acc / qn;
        }
        PointSet s = sphere_points(spec);
        return character_sum(s, mm) / qn;
    }

    if (!spec.unit_radius() || !spec.form.smooth_for(mod))
        fail(Errc::SmoothnessViolated, "the reduced path needs a smooth unit-radius sphere");
    bool zero = true;
    for (std::int64_t c : mm)
        if (c != 0) { zero = false; break; }
    if (zero) {
        std::uint64_t count = 0;
        visit_sphere(spec, [&](std::span<const std::int64_t>) { ++count; });
        return cd(double(count) / qn, 0);
    }
    int nu = vec_valuation(mm, mod);
    int gamma = mod.r - nu;
    Modulus core = mod.lower(gamma);
    std::int64_t pnu = mod.p_pow(nu);
    Vec mt(mm.size());
    for (std::size_t i = 0; i < mm.size(); ++i) mt[i] = (mm[i] / pnu) % core.q;
    SphereSpec core_spec(spec.form, core, spec.radius % core.q);
    Twiddles tw(core.q);
    cd acc(0, 0);
    visit_sphere(core_spec, [&](std::span<const std::int64_t> y) {
        std::int64_t dot = 0;
        for (int i = 0; i < n; ++i) dot = core.add(dot, core.mul(mt[i], y[i]));
        acc += tw.at(core.q - dot);
    });
    // p^{-rn + nu(n-1)} times the core character sum.
    double scalefac = std::pow(double(mod.p), double(-mod.r * n + nu * (n - 1)));
    return acc * scalefac;
}

double default_kappa(int n) { return n == 1 ? 0.0 : (n - 1) / 2.0; }

BoundProfile fourier_bound_profile(const SphereSpec& spec, double kappa) {
    const Modulus& mod = spec.mod;
    int n = spec.arity();
    BoundProfile prof;
    prof.kappa = kappa;
    double pd = double(mod.p);
    for (int nu = mod.r - 1; nu >= 0; --nu) {
        int gamma = mod.r - nu;
        Modulus core = mod.lower(gamma);
        SphereSpec core_spec(spec.form, core, spec.radius % core.q);
        SpectrumTable ind(core, n);
        if (spec.unit_radius() && spec.form.smooth_for(mod)) {
            PointSet pts(core, n);
            visit_sphere(core_spec, [&](std::span<const std::int64_t> y) { pts.insert(y); });
            for (std::uint64_t e : pts.sorted_encoded()) ind.v[e] = cd(1, 0);
        } else {
            PointSet pts = sphere_points(core_spec);
            for (std::uint64_t e : pts.sorted_encoded()) ind.v[e] = cd(1, 0);
        }
        dft_in_place(ind, -1);  // entry m~ holds T_gamma(m~) = sum_y e(-m~.y)
        StratumStat st;
        st.nu = nu;
        double amp = std::pow(pd, double(-mod.r * n + nu * (n - 1)));
        PointSet dec(core, n);
        std::uint64_t dsz = ind.size();
        for (std::uint64_t e = 1; e < dsz; ++e) {
            Vec m = dec.decode(e);
            if (vec_valuation(m, core) != 0) continue;  // not primitive at this depth
            double mag = std::abs(ind.v[e]) * amp;
            if (mag > st.max_mag) {
                st.max_mag = mag;
                st.argmax.assign(n, 0);
                std::int64_t pnu = mod.p_pow(nu);
                for (int i = 0; i < n; ++i) st.argmax[i] = pnu * m[i];
            }
        }
        prof.strata.push_back(st);
        if (nu == mod.r - 1) {
            prof.c2_effective = st.max_mag * std::pow(pd, mod.r + (n - 1) / 2.0);
        } else {
            prof.has_shallow = true;
            prof.c3_effective = std::max(
                prof.c3_effective, st.max_mag * std::pow(pd, mod.r + n - 1 - kappa));
        }
    }
    std::reverse(prof.strata.begin(), prof.strata.end());
    return prof;
}

double deep_stratum_constant(const SphereSpec& spec) {
    const Modulus& mod = spec.mod;
    int n = spec.arity();
    unsigned __int128 cells = 1;
    for (int i = 0; i < n; ++i) cells *= (unsigned __int128)mod.p;
    check_budget(cells, "deep stratum residue histogram");
    std::vector<std::uint64_t> hist(std::size_t(cells), 0);
    // Group the full sphere mod p: e_q(-p^{r-1} m . y) only sees y mod p.
    auto bucket = [&](std::span<const std::int64_t> y) {
        std::uint64_t idx = 0, scale = 1;
        for (int i = 0; i < n; ++i) {
            idx += std::uint64_t(y[i] % mod.p) * scale;
            scale *= std::uint64_t(mod.p);
        }
        ++hist[idx];
    };
    if (spec.unit_radius() && spec.form.smooth_for(mod)) {
        visit_sphere(spec, bucket);
    } else {
        PointSet s = sphere_points(spec);
        for (std::uint64_t e : s.sorted_encoded()) {
            Vec y = s.decode(e);
            bucket(y);
        }
    }
    Twiddles tw(mod.p);
    Modulus mp = mod.lower(1);
    double qn = std::pow(double(mod.p), double(mod.r * n));
    double best = 0;
    std::uint64_t cellcount = std::uint64_t(cells);
    Vec m(n), w(n);
    for (std::uint64_t me = 1; me < cellcount; ++me) {
        std::uint64_t t = me;
        for (int i = 0; i < n; ++i) {
            m[i] = std::int64_t(t % std::uint64_t(mod.p));
            t /= std::uint64_t(mod.p);
        }
        cd acc(0, 0);
        for (std::uint64_t we = 0; we < cellcount; ++we) {
            if (!hist[we]) continue;
            std::uint64_t u = we;
            std::int64_t dot = 0;
            for (int i = 0; i < n; ++i) {
                dot = mp.add(dot, mp.mul(m[i], std::int64_t(u % std::uint64_t(mod.p))));
                u /= std::uint64_t(mod.p);
            }
            acc += double(hist[we]) * tw.at(mod.p - dot);
        }
        best = std::max(best, std::abs(acc) / qn);
    }
    return best * std::pow(double(mod.p), mod.r + (n - 1) / 2.0);
}

WeilReport weil_sum(std::span<const std::int64_t> coeffs, std::int64_t p) {
    Modulus mp = Modulus::make(p, 1);
    Vec red(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) red[i] = mp.reduce(coeffs[i]);
    int deg = 0;
    for (std::size_t i = 1; i < red.size(); ++i)
        if (red[i] != 0) deg = int(i);
    if (deg == 0) fail(Errc::BadArgument, "polynomial is constant mod p");
    if (deg % p == 0) fail(Errc::DegreeDivisibleByP, "degree shares a factor with p");
    Twiddles tw(p);
    WeilReport rep;
    rep.degree = deg;
    cd acc(0, 0);
    for (std::int64_t x = 0; x < p; ++x) {
        std::int64_t val = 0;
        for (std::size_t i = red.size(); i-- > 0;) val = (val * x + red[i]) % p;
        acc += tw.at(val);
    }
    rep.value = acc;
    rep.magnitude = std::abs(acc);
    rep.bound = double(deg - 1) * std::sqrt(double(p));
    rep.within = rep.magnitude <= rep.bound + 1e-9;
    return rep;
}

cd complete_sum(const DiagonalForm& f, const Modulus& mod, std::span<const std::int64_t> m,
                std::int64_t s) {
    int n = f.arity();
    if (int(m.size()) != n) fail(Errc::ArityMismatch, "frequency arity mismatch");
    s = mod.reduce(s);
    bool zero = (s == 0);
    for (std::int64_t c : m)
        if (mod.reduce(c) != 0) { zero = false; break; }
    if (zero) fail(Errc::ZeroFrequencyPair, "(m, s) vanishes mod p^r");
    Twiddles tw(mod.q);
    cd prod(1, 0);
    for (int i = 0; i < n; ++i) {
        std::int64_t sa = mod.mul(s, mod.reduce(f.coeffs[i]));
        std::int64_t mi = mod.reduce(m[i]);
        cd acc(0, 0);
        for (std::int64_t x = 0; x < mod.q; ++x)
            acc += tw.at(mod.add(mod.mul(sa, mod.pow(x, f.exps[i])), mod.mul(mi, x)));
        prod *= acc;
    }
    return prod;
}

cd complete_sum_reduced(const DiagonalForm& f, const Modulus& mod,
                        std::span<const std::int64_t> m, std::int64_t s) {
    int n = f.arity();
    if (int(m.size()) != n) fail(Errc::ArityMismatch, "frequency arity mismatch");
    s = mod.reduce(s);
    Vec mm(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) mm[i] = mod.reduce(m[i]);
    int nu = mod.ord(s);
    for (std::int64_t c : mm) nu = std::min(nu, mod.ord(c));
    if (nu >= mod.r) fail(Errc::ZeroFrequencyPair, "(m, s) vanishes mod p^r");
    if (nu == 0) return complete_sum(f, mod, mm, s);
    Modulus low = mod.lower(mod.r - nu);
    std::int64_t pnu = mod.p_pow(nu);
    Vec mt(mm.size());
    for (std::size_t i = 0; i < mm.size(); ++i) mt[i] = (mm[i] / pnu) % low.q;
    double scalefac = std::pow(double(mod.p), double(nu) * n);
    return complete_sum(f, low, mt, (s / pnu) % low.q) * scalefac;
}

double second_moment_one_var(std::int64_t a, int k, std::int64_t m, const Modulus& mod) {
    if (k < 2) fail(Errc::BadArgument, "exponent k must be >= 2");
    Twiddles tw(mod.q);
    Vec vals(std::size_t(mod.q));
    std::int64_t ar = mod.reduce(a);
    for (std::int64_t x = 0; x < mod.q; ++x)
        vals[std::size_t(x)] = mod.mul(ar, mod.pow(x, k));
    std::int64_t mr = mod.reduce(m);
    double total = 0;
    for (std::int64_t s = 0; s < mod.q; ++s) {
        cd acc(0, 0);
        for (std::int64_t x = 0; x < mod.q; ++x) {
            std::int64_t t = mod.sub(mod.mul(s, vals[std::size_t(x)]), mod.mul(mr, x));
            acc += tw.at(t);
        }
        total += std::norm(acc);
    }
    return total;
}

CayleySpectrum cayley_spectrum(const PointSet& s) {
    const Modulus& mod = s.modulus();
    SpectrumTable t(mod, s.arity());
    for (std::uint64_t e : s.sorted_encoded()) t.v[e] = cd(1, 0);
    dft_in_place(t, +1);  // entry m holds sum_{x in S} e_q(m.x)
    CayleySpectrum spec;
    spec.lambda = std::move(t.v);
    spec.degree = double(s.size());
    spec.symmetric = true;
    Vec neg(s.arity());
    for (std::uint64_t e : s.sorted_encoded()) {
        Vec x = s.decode(e);
        for (int i = 0; i < s.arity(); ++i) neg[i] = mod.sub(0, x[i]);
        if (!s.contains(neg)) { spec.symmetric = false; break; }
    }
    for (std::size_t i = 1; i < spec.lambda.size(); ++i)
        spec.max_nontrivial = std::max(spec.max_nontrivial, std::abs(spec.lambda[i]));
    return spec;
}

}  // namespace padic
