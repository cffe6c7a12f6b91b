#include "padiclab/distance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <unordered_map>

#include "padiclab/rotations.hpp"

namespace padic {

namespace {

unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
    while (b != 0) {
        unsigned __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// table[i][x] = a_i x^{k_i} mod q, so a difference evaluates with n adds.
std::vector<std::vector<std::int64_t>> form_tables(const DiagonalForm& f, const Modulus& mod) {
    std::vector<std::vector<std::int64_t>> t(static_cast<std::size_t>(f.arity()));
    for (int i = 0; i < f.arity(); ++i) {
        t[std::size_t(i)].resize(std::size_t(mod.q));
        for (std::int64_t x = 0; x < mod.q; ++x)
            t[std::size_t(i)][std::size_t(x)] =
                mod.mul(mod.reduce(f.coeffs[std::size_t(i)]), mod.pow(x, f.exps[std::size_t(i)]));
    }
    return t;
}

std::int64_t eval_diff(const std::vector<std::vector<std::int64_t>>& tables, const Modulus& mod,
                       const std::int64_t* a, const std::int64_t* b, int n) {
    std::int64_t acc = 0;
    for (int i = 0; i < n; ++i)
        acc = mod.add(acc, tables[std::size_t(i)][std::size_t(mod.sub(a[i], b[i]))]);
    return acc;
}

// Members decoded once into a flat row-major array of coordinates.
std::vector<std::int64_t> decode_members(const PointSet& s) {
    const auto& enc = s.sorted_encoded();
    const int n = s.arity();
    std::vector<std::int64_t> out;
    out.reserve(enc.size() * std::size_t(n));
    for (std::uint64_t e : enc) {
        Vec pt = s.decode(e);
        out.insert(out.end(), pt.begin(), pt.end());
    }
    return out;
}

void check_compatible(const DiagonalForm& f, const PointSet& e1, const PointSet& e2,
                      const char* what) {
    if (!(e1.modulus() == e2.modulus()))
        fail(Errc::ModulusMismatch, std::string(what) + ": sets live over different moduli");
    if (e1.arity() != e2.arity() || f.arity() != e1.arity())
        fail(Errc::ArityMismatch, std::string(what) + ": form and set arities disagree");
}

// The fiber {d : F(d) = j} over the full domain; streams through the sphere
// machinery when the form binds, otherwise scans the domain directly.
PointSet radius_fiber(const DiagonalForm& f, const Modulus& mod, int n, std::int64_t j) {
    bool binding = true;
    for (std::int64_t a : f.coeffs)
        if (mod.reduce(a) % mod.p == 0) binding = false;
    if (binding) return sphere_points(SphereSpec(f, mod, j));

    check_budget(domain_size(mod, n), "radius fiber scan");
    PointSet out(mod, n);
    auto tables = form_tables(f, mod);
    Vec x(std::size_t(n), 0);
    std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t acc) {
        if (i == n) {
            if (acc == j) out.insert(x);
            return;
        }
        for (std::int64_t v = 0; v < mod.q; ++v) {
            x[std::size_t(i)] = v;
            rec(i + 1, mod.add(acc, tables[std::size_t(i)][std::size_t(v)]));
        }
    };
    rec(0, 0);
    return out;
}

std::vector<std::uint32_t> intersect_sorted(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(std::min(a.size(), b.size()));
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

std::vector<std::int64_t> DistanceCensus::support() const {
    std::vector<std::int64_t> out;
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] > 0) out.push_back(std::int64_t(j));
    return out;
}

std::uint64_t DistanceCensus::units_covered() const {
    std::uint64_t c = 0;
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] > 0 && std::int64_t(j) % mod.p != 0) ++c;
    return c;
}

double DistanceCensus::density() const {
    return std::sqrt(double(size1) * double(size2)) / double(domain);
}

DistanceCensus distance_census(const DiagonalForm& f, const PointSet& e1, const PointSet& e2,
                               CensusPath path) {
    check_compatible(f, e1, e2, "distance census");
    const Modulus mod = e1.modulus();
    const int n = e1.arity();
    check_budget((unsigned __int128)e1.size() * e2.size(), "distance census");

    DistanceCensus out;
    out.mod = mod;
    out.counts.assign(std::size_t(mod.q), 0);
    out.size1 = e1.size();
    out.size2 = e2.size();
    out.domain = domain_size(mod, n);
    out.pairs = std::uint64_t(e1.size()) * std::uint64_t(e2.size());

    auto tables = form_tables(f, mod);
    auto c1 = decode_members(e1);
    auto c2 = decode_members(e2);
    const std::size_t s1 = e1.size(), s2 = e2.size();

    if (path == CensusPath::Loop) {
        for (std::size_t i = 0; i < s1; ++i) {
            const std::int64_t* a = c1.data() + i * std::size_t(n);
            for (std::size_t k = 0; k < s2; ++k)
                ++out.counts[std::size_t(
                    eval_diff(tables, mod, a, c2.data() + k * std::size_t(n), n))];
        }
        return out;
    }

    // Difference histogram first, one form evaluation per distinct difference.
    const std::uint64_t dom = out.domain;
    std::vector<std::uint64_t> weights;   // base-q encodings of coordinates
    // encode x - y little-endian base q
    auto enc_diff = [&](const std::int64_t* a, const std::int64_t* b) {
        std::uint64_t idx = 0, mult = 1;
        for (int i = 0; i < n; ++i) {
            idx += std::uint64_t(mod.sub(a[i], b[i])) * mult;
            mult *= std::uint64_t(mod.q);
        }
        return idx;
    };
    constexpr std::uint64_t kFlatLimit = std::uint64_t(1) << 24;
    if (dom <= kFlatLimit) {
        std::vector<std::uint32_t> hist(dom, 0);
        for (std::size_t i = 0; i < s1; ++i) {
            const std::int64_t* a = c1.data() + i * std::size_t(n);
            for (std::size_t k = 0; k < s2; ++k)
                ++hist[enc_diff(a, c2.data() + k * std::size_t(n))];
        }
        Vec d(static_cast<std::size_t>(n));
        for (std::uint64_t idx = 0; idx < dom; ++idx) {
            if (hist[idx] == 0) continue;
            std::uint64_t t = idx;
            std::int64_t acc = 0;
            for (int i = 0; i < n; ++i) {
                acc = mod.add(acc, tables[std::size_t(i)][std::size_t(t % std::uint64_t(mod.q))]);
                t /= std::uint64_t(mod.q);
            }
            out.counts[std::size_t(acc)] += hist[idx];
        }
    } else {
        std::unordered_map<std::uint64_t, std::uint64_t> hist;
        for (std::size_t i = 0; i < s1; ++i) {
            const std::int64_t* a = c1.data() + i * std::size_t(n);
            for (std::size_t k = 0; k < s2; ++k)
                ++hist[enc_diff(a, c2.data() + k * std::size_t(n))];
        }
        for (const auto& [idx, cnt] : hist) {
            std::uint64_t t = idx;
            std::int64_t acc = 0;
            for (int i = 0; i < n; ++i) {
                acc = mod.add(acc, tables[std::size_t(i)][std::size_t(t % std::uint64_t(mod.q))]);
                t /= std::uint64_t(mod.q);
            }
            out.counts[std::size_t(acc)] += cnt;
        }
    }
    return out;
}

std::uint64_t distance_count_at(const DiagonalForm& f, const PointSet& e1, const PointSet& e2,
                                const PointSet& sphere) {
    check_compatible(f, e1, e2, "distance count");
    if (!(sphere.modulus() == e1.modulus()) || sphere.arity() != e1.arity())
        fail(Errc::ModulusMismatch, "distance count: sphere over a different domain");
    const Modulus mod = e1.modulus();
    const int n = e1.arity();
    check_budget((unsigned __int128)e1.size() * sphere.size(), "distance count probes");

    // F(x - y) = j iff y = x - d for a sphere point d.
    auto c1 = decode_members(e1);
    auto cs = decode_members(sphere);
    std::uint64_t cnt = 0;
    Vec tmp(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < e1.size(); ++i) {
        const std::int64_t* a = c1.data() + i * std::size_t(n);
        for (std::size_t k = 0; k < sphere.size(); ++k) {
            const std::int64_t* d = cs.data() + k * std::size_t(n);
            for (int t = 0; t < n; ++t) tmp[std::size_t(t)] = mod.sub(a[t], d[t]);
            if (e2.contains(tmp)) ++cnt;
        }
    }
    return cnt;
}

ErrorDecomposition error_decomposition(const DiagonalForm& f, const PointSet& e1,
                                       const PointSet& e2, std::int64_t j,
                                       const BoundProfile& profile) {
    check_compatible(f, e1, e2, "error decomposition");
    const Modulus mod = e1.modulus();
    const int n = e1.arity();
    const std::int64_t jj = mod.reduce(j);
    if (!mod.is_unit(jj)) fail(Errc::NonUnitRadius, "error decomposition needs a unit radius");

    PointSet sphere = sphere_points(SphereSpec(f, mod, jj));

    ErrorDecomposition out;
    if (e2.size() <= sphere.size()) {
        check_budget((unsigned __int128)e1.size() * e2.size(), "error decomposition census");
        auto tables = form_tables(f, mod);
        auto c1 = decode_members(e1);
        auto c2 = decode_members(e2);
        for (std::size_t i = 0; i < e1.size(); ++i) {
            const std::int64_t* a = c1.data() + i * std::size_t(n);
            for (std::size_t k = 0; k < e2.size(); ++k)
                if (eval_diff(tables, mod, a, c2.data() + k * std::size_t(n), n) == jj)
                    ++out.count;
        }
    } else {
        out.count = distance_count_at(f, e1, e2, sphere);
    }

    const std::uint64_t dom = domain_size(mod, n);
    unsigned __int128 num =
        (unsigned __int128)e1.size() * e2.size() * (unsigned __int128)sphere.size();
    unsigned __int128 den = dom;
    unsigned __int128 g = gcd128(num, den);
    num /= g;
    den /= g;
    out.main_num = __int128(num);
    out.main_den = std::int64_t(den);
    out.main_term = double((long double)(num) / (long double)(den));
    out.error = double(out.count) - out.main_term;
    out.c2 = profile.c2_effective;
    out.c3 = profile.has_shallow ? profile.c3_effective : 0.0;
    double c = std::max(out.c2, out.c3);
    out.bound = c * std::sqrt(double(e1.size()) * double(e2.size())) *
                std::pow(double(mod.q), n - 1) * std::pow(double(mod.p), -(n - 1) / 2.0);
    out.within = std::abs(out.error) <= out.bound * (1.0 + 1e-9) + 1e-9;
    return out;
}

ErrorDecomposition error_decomposition(const DiagonalForm& f, const PointSet& e1,
                                       const PointSet& e2, std::int64_t j) {
    SphereSpec spec(f, e1.modulus(), j);
    BoundProfile profile = fourier_bound_profile(spec, default_kappa(e1.arity()));
    return error_decomposition(f, e1, e2, j, profile);
}

PinnedDistances pinned_distance_set(const DiagonalForm& f, const PointSet& e,
                                    std::span<const std::int64_t> x) {
    const Modulus mod = e.modulus();
    const int n = e.arity();
    if (f.arity() != n || int(x.size()) != n)
        fail(Errc::ArityMismatch, "pinned distances: arity mismatch");
    auto tables = form_tables(f, mod);
    auto c = decode_members(e);
    std::vector<char> seen(std::size_t(mod.q), 0);
    Vec xr(x.begin(), x.end());
    for (auto& v : xr) v = mod.reduce(v);
    for (std::size_t i = 0; i < e.size(); ++i)
        seen[std::size_t(eval_diff(tables, mod, xr.data(), c.data() + i * std::size_t(n), n))] = 1;
    PinnedDistances out;
    for (std::int64_t j = 0; j < mod.q; ++j)
        if (seen[std::size_t(j)]) {
            out.values.push_back(j);
            if (mod.is_unit(j)) ++out.unit_count;
        }
    return out;
}

IncidenceReport incidences(const DiagonalForm& f, const PointSet& pts,
                           std::span<const SphereInstance> spheres) {
    const Modulus mod = pts.modulus();
    const int n = pts.arity();
    if (f.arity() != n) fail(Errc::ArityMismatch, "incidences: form arity mismatch");
    for (const auto& s : spheres) {
        if (int(s.center.size()) != n) fail(Errc::ArityMismatch, "incidences: bad center arity");
        if (!mod.is_unit(mod.reduce(s.radius)))
            fail(Errc::NonUnitRadius, "incidences: radii must be units");
    }
    check_budget((unsigned __int128)pts.size() * (spheres.empty() ? 1 : spheres.size()),
                 "incidence count");

    auto tables = form_tables(f, mod);
    auto c = decode_members(pts);
    IncidenceReport out;
    Vec center(static_cast<std::size_t>(n));
    for (const auto& s : spheres) {
        for (int i = 0; i < n; ++i) center[std::size_t(i)] = mod.reduce(s.center[std::size_t(i)]);
        const std::int64_t jj = mod.reduce(s.radius);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (eval_diff(tables, mod, center.data(), c.data() + i * std::size_t(n), n) == jj)
                ++out.incidences;
    }
    const double sz = double(pts.size()) * double(spheres.size());
    out.mean_term = sz / double(mod.q);
    out.excess = double(out.incidences) - out.mean_term;
    const double denom = std::pow(double(mod.q), n - 0.5) *
                         std::pow(double(mod.p), -(n - 1) / 2.0) * std::sqrt(sz);
    out.coefficient = denom > 0 ? out.excess / denom : 0.0;
    return out;
}

std::uint64_t count_rectangles(const DiagonalForm& f, const PointSet& e, std::int64_t j) {
    const int n2 = e.arity();
    if (n2 % 2 != 0) fail(Errc::OddArity, "rectangles need an even ambient arity");
    const int n = n2 / 2;
    if (f.arity() != n) fail(Errc::ArityMismatch, "rectangles: form must act on each half");
    const Modulus mod = e.modulus();
    const std::int64_t jj = mod.reduce(j);

    // Group members (u, v) by the u half; a rectangle is an ordered pair of
    // u's at distance j together with an ordered pair from the common v-list,
    // also at distance j.
    std::unordered_map<std::uint64_t, std::uint32_t> umap, vmap;
    std::vector<std::uint64_t> u_enc, v_enc;
    std::vector<std::vector<std::uint32_t>> lists;
    Vec half(static_cast<std::size_t>(n));
    auto enc_half = [&](const Vec& w, int off) {
        std::uint64_t idx = 0, mult = 1;
        for (int i = 0; i < n; ++i) {
            idx += std::uint64_t(w[std::size_t(off + i)]) * mult;
            mult *= std::uint64_t(mod.q);
        }
        return idx;
    };
    for (std::uint64_t m : e.sorted_encoded()) {
        Vec w = e.decode(m);
        std::uint64_t ue = enc_half(w, 0), ve = enc_half(w, n);
        auto [uit, unew] = umap.try_emplace(ue, std::uint32_t(u_enc.size()));
        if (unew) {
            u_enc.push_back(ue);
            lists.emplace_back();
        }
        auto [vit, vnew] = vmap.try_emplace(ve, std::uint32_t(v_enc.size()));
        if (vnew) v_enc.push_back(ve);
        lists[uit->second].push_back(vit->second);
    }
    for (auto& l : lists) std::sort(l.begin(), l.end());

    auto decode_enc = [&](const std::vector<std::uint64_t>& encs) {
        std::vector<std::int64_t> out(encs.size() * std::size_t(n));
        for (std::size_t i = 0; i < encs.size(); ++i) {
            std::uint64_t t = encs[i];
            for (int k = 0; k < n; ++k) {
                out[i * std::size_t(n) + std::size_t(k)] = std::int64_t(t % std::uint64_t(mod.q));
                t /= std::uint64_t(mod.q);
            }
        }
        return out;
    };
    auto ucoords = decode_enc(u_enc);
    auto vcoords = decode_enc(v_enc);
    auto tables = form_tables(f, mod);

    std::size_t max_list = 0;
    for (const auto& l : lists) max_list = std::max(max_list, l.size());
    check_budget((unsigned __int128)u_enc.size() * u_enc.size() *
                     (unsigned __int128)(max_list * max_list + 1),
                 "rectangle count");

    std::uint64_t cnt = 0;
    for (std::size_t a = 0; a < u_enc.size(); ++a)
        for (std::size_t b = 0; b < u_enc.size(); ++b) {
            if (eval_diff(tables, mod, ucoords.data() + a * std::size_t(n),
                          ucoords.data() + b * std::size_t(n), n) != jj)
                continue;
            auto common = intersect_sorted(lists[a], lists[b]);
            for (std::uint32_t v1 : common)
                for (std::uint32_t v2 : common)
                    if (eval_diff(tables, mod, vcoords.data() + v1 * std::size_t(n),
                                  vcoords.data() + v2 * std::size_t(n), n) == jj)
                        ++cnt;
        }
    return cnt;
}

std::uint64_t count_rectangles_oracle(const DiagonalForm& f, const PointSet& e, std::int64_t j) {
    const int n2 = e.arity();
    if (n2 % 2 != 0) fail(Errc::OddArity, "rectangles need an even ambient arity");
    const int n = n2 / 2;
    if (f.arity() != n) fail(Errc::ArityMismatch, "rectangles: form must act on each half");
    const Modulus mod = e.modulus();
    const std::int64_t jj = mod.reduce(j);
    check_budget((unsigned __int128)e.size() * e.size(), "rectangle oracle");

    // Members (u1, v1) and (u2, v2) propose the tuple; the two crossed
    // points must also lie in E.
    auto c = decode_members(e);
    auto tables = form_tables(f, mod);
    Vec cross1(static_cast<std::size_t>(n2)), cross2(static_cast<std::size_t>(n2));
    std::uint64_t cnt = 0;
    for (std::size_t a = 0; a < e.size(); ++a) {
        const std::int64_t* pa = c.data() + a * std::size_t(n2);
        for (std::size_t b = 0; b < e.size(); ++b) {
            const std::int64_t* pb = c.data() + b * std::size_t(n2);
            if (eval_diff(tables, mod, pa, pb, n) != jj) continue;
            if (eval_diff(tables, mod, pa + n, pb + n, n) != jj) continue;
            for (int i = 0; i < n; ++i) {
                cross1[std::size_t(i)] = pa[i];
                cross1[std::size_t(n + i)] = pb[n + i];
                cross2[std::size_t(i)] = pb[i];
                cross2[std::size_t(n + i)] = pa[n + i];
            }
            if (e.contains(cross1) && e.contains(cross2)) ++cnt;
        }
    }
    return cnt;
}

namespace {

struct Adjacency {
    std::vector<std::vector<std::uint32_t>> out;  // u -> w with F(u - w) = j
    std::vector<std::vector<std::uint32_t>> in;   // u -> w with F(w - u) = j
};

Adjacency build_adjacency(const DiagonalForm& f, const PointSet& e, std::int64_t j) {
    const Modulus mod = e.modulus();
    const int n = e.arity();
    PointSet sphere = radius_fiber(f, mod, n, mod.reduce(j));
    check_budget((unsigned __int128)e.size() * sphere.size() * 2, "adjacency lists");

    const auto& enc = e.sorted_encoded();
    std::unordered_map<std::uint64_t, std::uint32_t> idx;
    idx.reserve(enc.size() * 2);
    for (std::size_t i = 0; i < enc.size(); ++i) idx.emplace(enc[i], std::uint32_t(i));

    auto c = decode_members(e);
    auto cs = decode_members(sphere);
    Adjacency adj;
    adj.out.resize(e.size());
    adj.in.resize(e.size());
    Vec tmp(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < e.size(); ++i) {
        const std::int64_t* x = c.data() + i * std::size_t(n);
        for (std::size_t k = 0; k < sphere.size(); ++k) {
            const std::int64_t* d = cs.data() + k * std::size_t(n);
            for (int t = 0; t < n; ++t) tmp[std::size_t(t)] = mod.sub(x[t], d[t]);
            auto it = idx.find(e.encode(tmp));
            if (it != idx.end()) adj.out[i].push_back(it->second);
            for (int t = 0; t < n; ++t) tmp[std::size_t(t)] = mod.add(x[t], d[t]);
            it = idx.find(e.encode(tmp));
            if (it != idx.end()) adj.in[i].push_back(it->second);
        }
    }
    for (auto& l : adj.out) std::sort(l.begin(), l.end());
    for (auto& l : adj.in) std::sort(l.begin(), l.end());
    return adj;
}

std::size_t drop_two(std::vector<std::uint32_t>& v, std::uint32_t a, std::uint32_t b) {
    std::size_t removed = 0;
    auto it = std::lower_bound(v.begin(), v.end(), std::min(a, b));
    if (it != v.end() && *it == std::min(a, b)) {
        v.erase(it);
        ++removed;
    }
    it = std::lower_bound(v.begin(), v.end(), std::max(a, b));
    if (it != v.end() && *it == std::max(a, b)) {
        v.erase(it);
        ++removed;
    }
    return removed;
}

}  // namespace

std::uint64_t count_cycles4(const DiagonalForm& f, const PointSet& e, std::int64_t j,
                            bool distinct) {
    if (f.arity() != e.arity()) fail(Errc::ArityMismatch, "cycles: form arity mismatch");
    if (e.empty()) return 0;
    Adjacency adj = build_adjacency(f, e, j);
    std::size_t maxdeg = 0;
    for (const auto& l : adj.out) maxdeg = std::max(maxdeg, l.size());
    check_budget((unsigned __int128)e.size() * e.size() * (maxdeg + 1), "cycle count");

    // (u1, u2, u3, u4): u2 runs over out(u1) cap in(u3), u4 over out(u3) cap in(u1).
    std::uint64_t cnt = 0;
    for (std::uint32_t u1 = 0; u1 < e.size(); ++u1)
        for (std::uint32_t u3 = 0; u3 < e.size(); ++u3) {
            if (distinct && u1 == u3) continue;
            auto a = intersect_sorted(adj.out[u1], adj.in[u3]);
            if (a.empty()) continue;
            auto b = intersect_sorted(adj.out[u3], adj.in[u1]);
            if (b.empty()) continue;
            if (!distinct) {
                cnt += std::uint64_t(a.size()) * b.size();
                continue;
            }
            drop_two(a, u1, u3);
            drop_two(b, u1, u3);
            auto both = intersect_sorted(a, b);
            cnt += std::uint64_t(a.size()) * b.size() - both.size();
        }
    return cnt;
}

std::uint64_t count_cycles4_oracle(const DiagonalForm& f, const PointSet& e, std::int64_t j,
                                   bool distinct) {
    if (f.arity() != e.arity()) fail(Errc::ArityMismatch, "cycles: form arity mismatch");
    const Modulus mod = e.modulus();
    const int n = e.arity();
    const std::int64_t jj = mod.reduce(j);
    check_budget((unsigned __int128)e.size() * e.size() * e.size() * e.size(), "cycle oracle");
    auto c = decode_members(e);
    auto tables = form_tables(f, mod);
    auto row = [&](std::size_t i) { return c.data() + i * std::size_t(n); };
    std::uint64_t cnt = 0;
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = 0; b < e.size(); ++b) {
            if (eval_diff(tables, mod, row(a), row(b), n) != jj) continue;
            for (std::size_t d = 0; d < e.size(); ++d) {
                if (eval_diff(tables, mod, row(d), row(a), n) != jj) continue;
                for (std::size_t g = 0; g < e.size(); ++g) {
                    if (eval_diff(tables, mod, row(b), row(g), n) != jj) continue;
                    if (eval_diff(tables, mod, row(g), row(d), n) != jj) continue;
                    if (distinct) {
                        if (a == b || a == g || a == d || b == g || b == d || g == d) continue;
                    }
                    ++cnt;
                }
            }
        }
    return cnt;
}

std::uint64_t count_chains(const DiagonalForm& f, const PointSet& e, std::int64_t j, int k) {
    if (k < 1) fail(Errc::BadArgument, "chains need at least one edge");
    if (f.arity() != e.arity()) fail(Errc::ArityMismatch, "chains: form arity mismatch");
    if (e.empty()) return 0;
    const Modulus mod = e.modulus();
    const int n = e.arity();
    PointSet sphere = radius_fiber(f, mod, n, mod.reduce(j));
    check_budget((unsigned __int128)e.size() * sphere.size() * (unsigned __int128)k,
                 "chain dynamic program");

    const auto& enc = e.sorted_encoded();
    std::unordered_map<std::uint64_t, std::uint32_t> idx;
    idx.reserve(enc.size() * 2);
    for (std::size_t i = 0; i < enc.size(); ++i) idx.emplace(enc[i], std::uint32_t(i));
    auto c = decode_members(e);
    auto cs = decode_members(sphere);

    // t[w] = number of chains (u_1, ..., u_i) ending at w; the edge u -> w
    // with F(u - w) = j scatters along w = u - d.
    std::vector<unsigned __int128> t(e.size(), 1), next(e.size());
    Vec tmp(static_cast<std::size_t>(n));
    for (int step = 0; step < k; ++step) {
        std::fill(next.begin(), next.end(), (unsigned __int128)0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (t[i] == 0) continue;
            const std::int64_t* x = c.data() + i * std::size_t(n);
            for (std::size_t s = 0; s < sphere.size(); ++s) {
                const std::int64_t* d = cs.data() + s * std::size_t(n);
                for (int v = 0; v < n; ++v) tmp[std::size_t(v)] = mod.sub(x[v], d[v]);
                auto it = idx.find(e.encode(tmp));
                if (it != idx.end()) next[it->second] += t[i];
            }
        }
        t.swap(next);
    }
    unsigned __int128 total = 0;
    for (auto v : t) total += v;
    if (total > (unsigned __int128)UINT64_MAX) fail(Errc::Overflow, "chain count exceeds 64 bits");
    return std::uint64_t(total);
}

std::uint64_t count_chains_oracle(const DiagonalForm& f, const PointSet& e, std::int64_t j,
                                  int k) {
    if (k < 1) fail(Errc::BadArgument, "chains need at least one edge");
    if (f.arity() != e.arity()) fail(Errc::ArityMismatch, "chains: form arity mismatch");
    const Modulus mod = e.modulus();
    const int n = e.arity();
    const std::int64_t jj = mod.reduce(j);
    unsigned __int128 space = 1;
    for (int i = 0; i <= k; ++i) {
        space *= (e.size() == 0 ? 1 : e.size());
        if (space > (unsigned __int128)1 << 62) break;
    }
    check_budget(space, "chain oracle");
    auto c = decode_members(e);
    auto tables = form_tables(f, mod);
    std::uint64_t cnt = 0;
    std::function<void(std::size_t, int)> rec = [&](std::size_t prev, int depth) {
        if (depth == k + 1) {
            ++cnt;
            return;
        }
        for (std::size_t i = 0; i < e.size(); ++i)
            if (eval_diff(tables, mod, c.data() + prev * std::size_t(n),
                          c.data() + i * std::size_t(n), n) == jj)
                rec(i, depth + 1);
    };
    for (std::size_t i = 0; i < e.size(); ++i) rec(i, 1);
    return cnt;
}

TreeShape TreeShape::star(int k) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= k; ++i) edges.emplace_back(0, i);
    return make(k + 1, std::move(edges), 0);
}

TreeShape TreeShape::path(int k) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < k; ++i) edges.emplace_back(i, i + 1);
    return make(k + 1, std::move(edges), 0);
}

TreeShape TreeShape::make(int vertices, std::vector<std::pair<int, int>> edges, int pin) {
    if (vertices < 2 || int(edges.size()) != vertices - 1)
        fail(Errc::BadArgument, "a tree on v vertices has v-1 edges");
    if (pin < 0 || pin >= vertices) fail(Errc::BadArgument, "pin outside the vertex range");
    std::vector<int> root(static_cast<std::size_t>(vertices));
    for (int i = 0; i < vertices; ++i) root[std::size_t(i)] = i;
    std::function<int(int)> find = [&](int v) {
        while (root[std::size_t(v)] != v) {
            root[std::size_t(v)] = root[std::size_t(root[std::size_t(v)])];
            v = root[std::size_t(v)];
        }
        return v;
    };
    for (auto& [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= vertices || b >= vertices)
            fail(Errc::BadArgument, "edge endpoints out of range");
        if (a > b) std::swap(a, b);
        int ra = find(a), rb = find(b);
        if (ra == rb) fail(Errc::BadArgument, "edge list contains a cycle");
        root[std::size_t(ra)] = rb;
    }
    std::sort(edges.begin(), edges.end());
    TreeShape t;
    t.vertices = vertices;
    t.edges = std::move(edges);
    t.pin = pin;
    return t;
}

PinnedTreeCount count_pinned_trees(const DiagonalForm& f, const PointSet& e,
                                   const TreeShape& shape, std::span<const std::int64_t> x) {
    const Modulus mod = e.modulus();
    const int n = e.arity();
    if (f.arity() != n || int(x.size()) != n)
        fail(Errc::ArityMismatch, "pinned trees: arity mismatch");
    Vec xr(x.begin(), x.end());
    for (auto& v : xr) v = mod.reduce(v);
    if (!e.contains(xr)) fail(Errc::PinNotInSet, "pin must belong to the set");
    if (e.empty() || shape.vertices < 2) return {};

    unsigned __int128 space = 1;
    for (int i = 1; i < shape.vertices; ++i) {
        space *= e.size();
        if (space > (unsigned __int128)1 << 80) break;
    }
    check_budget(space, "pinned tree enumeration");

    // Placement order: breadth-first from the pin, so every new vertex closes
    // exactly one edge against an already placed endpoint.
    const int v = shape.vertices;
    std::vector<std::vector<std::pair<int, int>>> touching(static_cast<std::size_t>(v));  // (edge, other)
    for (std::size_t ei = 0; ei < shape.edges.size(); ++ei) {
        auto [a, b] = shape.edges[ei];
        touching[std::size_t(a)].emplace_back(int(ei), b);
        touching[std::size_t(b)].emplace_back(int(ei), a);
    }
    std::vector<int> order{shape.pin};
    std::vector<int> edge_of(std::size_t(v), -1);   // edge closed when this vertex is placed
    std::vector<char> placed(std::size_t(v), 0);
    placed[std::size_t(shape.pin)] = 1;
    for (std::size_t head = 0; head < order.size(); ++head)
        for (auto [ei, other] : touching[std::size_t(order[head])])
            if (!placed[std::size_t(other)]) {
                placed[std::size_t(other)] = 1;
                edge_of[std::size_t(other)] = ei;
                order.push_back(other);
            }

    auto tables = form_tables(f, mod);
    auto c = decode_members(e);
    std::vector<const std::int64_t*> phi(std::size_t(v), nullptr);
    phi[std::size_t(shape.pin)] = xr.data();
    Vec lengths(shape.edges.size(), 0);
    std::set<Vec> vectors;
    PinnedTreeCount out;

    std::function<void(std::size_t)> place = [&](std::size_t pos) {
        if (pos == order.size()) {
            ++out.embeddings;
            vectors.insert(lengths);
            return;
        }
        const int vert = order[pos];
        const int ei = edge_of[std::size_t(vert)];
        const auto [ea, eb] = shape.edges[std::size_t(ei)];
        for (std::size_t i = 0; i < e.size(); ++i) {
            phi[std::size_t(vert)] = c.data() + i * std::size_t(n);
            lengths[std::size_t(ei)] =
                eval_diff(tables, mod, phi[std::size_t(ea)], phi[std::size_t(eb)], n);
            place(pos + 1);
        }
    };
    place(1);
    out.distinct_vectors = vectors.size();
    return out;
}

FiberReport fiber_condition(const PointSet& e) {
    if (e.arity() != 2) fail(Errc::WrongArity, "fiber condition is a two-dimensional statement");
    const Modulus mod = e.modulus();
    std::vector<std::uint64_t> cnt(std::size_t(mod.p * mod.p), 0);
    for (std::uint64_t m : e.sorted_encoded()) {
        Vec w = e.decode(m);
        ++cnt[std::size_t((w[0] % mod.p) + mod.p * (w[1] % mod.p))];
    }
    FiberReport out;
    for (std::uint64_t v : cnt) {
        out.pair_count += v * v;
        out.max_fiber = std::max(out.max_fiber, v);
    }
    out.threshold = std::pow(double(mod.p), (6.0 * mod.r - 7.0) / 3.0) * double(e.size());
    out.satisfied = double(out.pair_count) <= out.threshold;
    return out;
}

ProjectionDensity projection_density(const PointSet& e, int gamma) {
    if (e.arity() != 2) fail(Errc::WrongArity, "projection density is two-dimensional");
    const Modulus mod = e.modulus();
    if (gamma < 1 || gamma > mod.r) fail(Errc::BadLevel, "gamma must lie in [1, r]");
    const std::int64_t pg = mod.p_pow(gamma);
    ProjectionDensity out;
    out.gamma = gamma;
    out.counts.assign(std::size_t(pg * pg), 0);
    for (std::uint64_t m : e.sorted_encoded()) {
        Vec w = e.decode(m);
        ++out.counts[std::size_t((w[0] % pg) + pg * (w[1] % pg))];
    }
    const std::int64_t side = mod.p_pow(mod.r - gamma);
    out.denominator = std::uint64_t(side) * std::uint64_t(side);
    for (std::uint64_t v : out.counts)
        out.max_density = std::max(out.max_density, double(v) / double(out.denominator));
    return out;
}

namespace {

// E_1 + p (Z/p^{r-1})^n, the lift shared by both example families.
PointSet lift_base_set(const std::vector<Vec>& base, const Modulus& mod, int n) {
    const std::int64_t layers = mod.p_pow(mod.r - 1);
    unsigned __int128 work = base.size();
    for (int i = 0; i < n; ++i) work *= (unsigned __int128)layers;
    check_budget(work, "example lift");
    PointSet out(mod, n);
    Vec pt(static_cast<std::size_t>(n));
    for (const Vec& b : base) {
        Vec y(std::size_t(n), 0);
        while (true) {
            for (int i = 0; i < n; ++i)
                pt[std::size_t(i)] = mod.reduce(b[std::size_t(i)] + mod.p * y[std::size_t(i)]);
            out.insert(pt);
            int i = 0;
            while (i < n && ++y[std::size_t(i)] == layers) y[std::size_t(i++)] = 0;
            if (i == n) break;
        }
    }
    return out;
}

}  // namespace

SharpnessSet sharpness_example_odd(std::int64_t p, int n, int k, int l, int r) {
    Modulus mod = Modulus::make(p, r);
    if (n < 3 || n % 2 == 0) fail(Errc::BadArgument, "the odd family needs odd arity >= 3");
    if (k < 2) fail(Errc::BadArgument, "exponent must be at least 2");
    if (l < 1 || 2 * l >= p) fail(Errc::BadL, "l must satisfy 1 <= l < p/2");

    Modulus modp = Modulus::make(p, 1);
    std::int64_t xi = 0;
    for (std::int64_t t = 1; t < p; ++t)
        if (modp.pow(t, k) == p - 1) {
            xi = t;
            break;
        }
    if (xi == 0) fail(Errc::NoKthRootOfMinusOne, "-1 has no k-th root mod p");

    // x_1 in {1..l}, then (n-1)/2 blocks (u, xi u); every difference has
    // block contributions (u-u')^k (1 + xi^k) = 0, so F only sees x_1.
    const int blocks = (n - 1) / 2;
    std::vector<Vec> base;
    Vec b(static_cast<std::size_t>(n));
    std::vector<std::int64_t> u(std::size_t(blocks), 0);
    for (std::int64_t x1 = 1; x1 <= l; ++x1) {
        std::fill(u.begin(), u.end(), 0);
        while (true) {
            b[0] = x1;
            for (int i = 0; i < blocks; ++i) {
                b[std::size_t(1 + 2 * i)] = u[std::size_t(i)];
                b[std::size_t(2 + 2 * i)] = (xi * u[std::size_t(i)]) % p;
            }
            base.push_back(b);
            int i = 0;
            while (i < blocks && ++u[std::size_t(i)] == p) u[std::size_t(i++)] = 0;
            if (i == blocks) break;
        }
    }

    SharpnessSet out{PointSet(mod, n), DiagonalForm(std::vector<std::int64_t>(std::size_t(n), 1),
                                                    std::vector<int>(std::size_t(n), k)),
                     xi, std::uint64_t(2 * l) * std::uint64_t(mod.p_pow(r - 1))};
    out.set = lift_base_set(base, mod, n);
    return out;
}

SharpnessSet sharpness_example_even(std::int64_t p, int n, std::int64_t c, int r) {
    Modulus mod = Modulus::make(p, r);
    if (n < 2 || n % 2 != 0)
        fail(Errc::UnsupportedBranch, "the even family needs even arity >= 2");
    if (c < 1 || (p + 1) % c != 0) fail(Errc::DivisibilityFailed, "C must divide p + 1");

    std::vector<Vec> base;
    std::int64_t parameter = 0;

    if (p % 4 == 1) {
        // Isotropic lines (u, xi u) with xi^2 = -1 make every block distance 0.
        Modulus modp = Modulus::make(p, 1);
        std::int64_t xi = 0;
        for (std::int64_t t = 1; t < p; ++t)
            if (modp.mul(t, t) == p - 1) {
                xi = t;
                break;
            }
        parameter = xi;
        const int blocks = n / 2;
        Vec b(static_cast<std::size_t>(n));
        std::vector<std::int64_t> u(std::size_t(blocks), 0);
        while (true) {
            for (int i = 0; i < blocks; ++i) {
                b[std::size_t(2 * i)] = u[std::size_t(i)];
                b[std::size_t(2 * i + 1)] = (xi * u[std::size_t(i)]) % p;
            }
            base.push_back(b);
            int i = 0;
            while (i < blocks && ++u[std::size_t(i)] == p) u[std::size_t(i++)] = 0;
            if (i == blocks) break;
        }
    } else {
        // Isotropic planes span{(1,0,u,v),(0,1,-v,u)} with 1 + u^2 + v^2 = 0
        // cover arity multiples of 4; an n = 2 (mod 4) remainder takes the
        // orbit of (1,0) under the index-C subgroup of the cyclic group G_1.
        Modulus modp = Modulus::make(p, 1);
        const bool has_orbit = (n % 4) == 2;
        const int planes = has_orbit ? (n - 2) / 4 : n / 4;

        std::vector<Vec> orbit_pts;
        if (has_orbit) {
            RotationGroup g1 = RotationGroup::build(modp);
            Rotation theta{1, 0};
            bool found = false;
            for (const Rotation& cand : g1.elements()) {
                Rotation pow{1, 0};
                std::int64_t ord = 0;
                do {
                    pow = compose(pow, cand, modp);
                    ++ord;
                } while (!(pow.a == 1 && pow.b == 0));
                if (ord == p + 1) {
                    theta = cand;
                    found = true;
                    break;
                }
            }
            if (!found) fail(Errc::BadArgument, "rotation group is not cyclic of order p+1");
            parameter = theta.a + p * theta.b;
            Rotation step{1, 0};
            for (std::int64_t i = 0; i < c; ++i) step = compose(step, theta, modp);
            Vec cur{1, 0};
            const std::int64_t m = (p + 1) / c;
            for (std::int64_t i = 0; i < m; ++i) {
                orbit_pts.push_back(cur);
                cur = apply(step, cur, modp);
            }
        }

        std::int64_t pu = 0, pv = 0;
        if (planes > 0) {
            bool found = false;
            for (std::int64_t u0 = 0; u0 < p && !found; ++u0)
                for (std::int64_t v0 = 0; v0 < p && !found; ++v0)
                    if ((1 + u0 * u0 + v0 * v0) % p == 0) {
                        pu = u0;
                        pv = v0;
                        found = true;
                    }
            if (!has_orbit) parameter = pu + p * pv;
        }

        // Odometer over the orbit choice and the (s, t) pair of every plane.
        const std::size_t orbit_n = has_orbit ? orbit_pts.size() : 1;
        std::vector<std::int64_t> st(std::size_t(2 * planes), 0);
        for (std::size_t oi = 0; oi < orbit_n; ++oi) {
            std::fill(st.begin(), st.end(), 0);
            while (true) {
                Vec b;
                b.reserve(std::size_t(n));
                if (has_orbit) {
                    b.push_back(orbit_pts[oi][0]);
                    b.push_back(orbit_pts[oi][1]);
                }
                for (int i = 0; i < planes; ++i) {
                    std::int64_t s = st[std::size_t(2 * i)], t = st[std::size_t(2 * i + 1)];
                    b.push_back(s);
                    b.push_back(t);
                    b.push_back(modp.reduce(s * pu - t * pv));
                    b.push_back(modp.reduce(s * pv + t * pu));
                }
                base.push_back(std::move(b));
                std::size_t i = 0;
                while (i < st.size() && ++st[i] == p) st[i++] = 0;
                if (i == st.size()) break;
            }
        }
    }

    SharpnessSet out{PointSet(mod, n), DiagonalForm::distance(n), parameter,
                     std::uint64_t(mod.p_pow(r - 1)) * std::uint64_t((p + 1) / c)};
    out.set = lift_base_set(base, mod, n);
    return out;
}

PointSet random_subset(const Modulus& mod, int n, double delta, std::uint64_t seed) {
    const std::uint64_t dom = domain_size(mod, n);
    check_budget(dom, "random subset");
    std::mt19937_64 rng(seed);
    PointSet out(mod, n);
    // (raw >> 11) / 2^53 is uniform in [0,1) and identical on every platform.
    for (std::uint64_t i = 0; i < dom; ++i)
        if (double(rng() >> 11) * 0x1p-53 < delta) out.insert_encoded(i);
    return out;
}

std::vector<ThresholdRow> threshold_experiment(const DiagonalForm& f, const Modulus& mod, int n,
                                               std::span<const double> densities, int trials,
                                               std::uint64_t seed) {
    if (f.arity() != n) fail(Errc::ArityMismatch, "threshold experiment: arity mismatch");
    if (trials < 1) fail(Errc::BadArgument, "need at least one trial");
    const std::uint64_t dom = domain_size(mod, n);
    check_budget(dom, "threshold experiment domain");

    // Spheres enumerated once per radius and shared by all trials.
    std::vector<std::vector<std::int64_t>> sphere_coords(static_cast<std::size_t>(mod.q));
    {
        auto tables = form_tables(f, mod);
        Vec x(std::size_t(n), 0);
        for (std::uint64_t idx = 0; idx < dom; ++idx) {
            std::uint64_t t = idx;
            std::int64_t acc = 0;
            for (int i = 0; i < n; ++i) {
                x[std::size_t(i)] = std::int64_t(t % std::uint64_t(mod.q));
                acc = mod.add(acc, tables[std::size_t(i)][std::size_t(x[std::size_t(i)])]);
                t /= std::uint64_t(mod.q);
            }
            sphere_coords[std::size_t(acc)].insert(sphere_coords[std::size_t(acc)].end(),
                                                   x.begin(), x.end());
        }
    }

    const std::uint64_t units = std::uint64_t(mod.q - mod.q / mod.p);
    std::vector<double> grid(densities.begin(), densities.end());
    std::sort(grid.begin(), grid.end());

    std::vector<ThresholdRow> rows;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        ThresholdRow row;
        row.density = grid[gi];
        row.min_unit_coverage = 1.0;
        row.always_covers_units = true;
        double sum_size = 0, sum_distinct = 0;
        for (int trial = 0; trial < trials; ++trial) {
            // One independent stream per (density, trial) cell.
            PointSet e = random_subset(mod, n, grid[gi],
                                       seed ^ (0x517cc1b727220a95ull * std::uint64_t(gi + 1)) ^
                                           (0x2545f4914f6cdd1dull * std::uint64_t(trial + 1)));
            sum_size += double(e.size());
            std::uint64_t distinct = 0, unit_hits = 0;
            if ((unsigned __int128)e.size() * e.size() <= ((unsigned __int128)1 << 22)) {
                auto c = decode_members(e);
                auto tables = form_tables(f, mod);
                std::vector<char> seen(std::size_t(mod.q), 0);
                for (std::size_t i = 0; i < e.size(); ++i)
                    for (std::size_t k = 0; k < e.size(); ++k)
                        seen[std::size_t(eval_diff(tables, mod, c.data() + i * std::size_t(n),
                                                   c.data() + k * std::size_t(n), n))] = 1;
                for (std::int64_t j = 0; j < mod.q; ++j)
                    if (seen[std::size_t(j)]) {
                        ++distinct;
                        if (mod.is_unit(j)) ++unit_hits;
                    }
            } else {
                // j is realized iff some sphere offset d has E meeting E + d.
                auto c = decode_members(e);
                Vec tmp(static_cast<std::size_t>(n));
                for (std::int64_t j = 0; j < mod.q; ++j) {
                    bool hit = false;
                    const auto& sc = sphere_coords[std::size_t(j)];
                    const std::size_t cnt = sc.size() / std::size_t(n);
                    for (std::size_t s = 0; s < cnt && !hit; ++s) {
                        const std::int64_t* d = sc.data() + s * std::size_t(n);
                        for (std::size_t i = 0; i < e.size() && !hit; ++i) {
                            const std::int64_t* a = c.data() + i * std::size_t(n);
                            for (int v = 0; v < n; ++v) tmp[std::size_t(v)] = mod.sub(a[v], d[v]);
                            hit = e.contains(tmp);
                        }
                    }
                    if (hit) {
                        ++distinct;
                        if (mod.is_unit(j)) ++unit_hits;
                    }
                }
            }
            sum_distinct += double(distinct);
            const double cov = units == 0 ? 1.0 : double(unit_hits) / double(units);
            row.min_unit_coverage = std::min(row.min_unit_coverage, cov);
            if (unit_hits < units) row.always_covers_units = false;
        }
        row.mean_size = sum_size / trials;
        row.mean_distinct_over_q = sum_distinct / trials / double(mod.q);
        rows.push_back(row);
    }
    return rows;
}

std::string rational_to_string(__int128 num, std::int64_t den) {
    bool neg = num < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-num) : (unsigned __int128)num;
    std::string digits;
    do {
        digits.push_back(char('0' + int(u % 10)));
        u /= 10;
    } while (u != 0);
    if (neg) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    if (den != 1) digits += "/" + std::to_string(den);
    return digits;
}

}  // namespace padic
