#include "padiclab/hensel.hpp"

#include <algorithm>
#include <random>

namespace padic {

SparsePoly::SparsePoly(int nvars, std::vector<Monomial> terms)
    : nvars_(nvars), terms_(std::move(terms)) {
    if (nvars < 1) fail(Errc::BadArgument, "polynomial needs at least one variable");
    for (const Monomial& m : terms_) {
        if (int(m.exps.size()) != nvars)
            fail(Errc::ArityMismatch, "monomial exponent vector has wrong length");
        for (int e : m.exps)
            if (e < 0) fail(Errc::BadArgument, "negative exponent");
    }
}

SparsePoly SparsePoly::constant(int nvars, std::int64_t c) {
    Monomial m;
    m.coef = c;
    m.exps.assign(nvars, 0);
    return SparsePoly(nvars, {m});
}

std::int64_t SparsePoly::eval(const Modulus& mod, std::span<const std::int64_t> x) const {
    if (int(x.size()) != nvars_) fail(Errc::ArityMismatch, "evaluation point has wrong arity");
    std::int64_t acc = 0;
    for (const Monomial& m : terms_) {
        std::int64_t t = mod.reduce(m.coef);
        for (int i = 0; i < nvars_; ++i)
            if (m.exps[i] > 0) t = mod.mul(t, mod.pow(x[i], m.exps[i]));
        acc = mod.add(acc, t);
    }
    return acc;
}

SparsePoly SparsePoly::derivative(int var) const {
    std::vector<Monomial> out;
    for (const Monomial& m : terms_) {
        if (m.exps[var] == 0) continue;
        Monomial d = m;
        d.coef = m.coef * m.exps[var];
        d.exps[var] -= 1;
        out.push_back(std::move(d));
    }
    return SparsePoly(nvars_, std::move(out));
}

namespace {

// The derivative table must satisfy G(y + p z) = G(y) + p J(y) z (mod p^2)
// identically; spot-check with random points at a prime unrelated to any
// caller's modulus.
void validate_jacobian(const std::vector<SparsePoly>& comps,
                       const std::vector<std::vector<SparsePoly>>& jac) {
    const std::int64_t p = 101;
    Modulus m2 = Modulus::make(p, 2);
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    int n = comps[0].nvars();
    for (int trial = 0; trial < 4; ++trial) {
        Vec y(n), z(n), ypz(n);
        for (int i = 0; i < n; ++i) {
            y[i] = std::int64_t(rng() % std::uint64_t(p));
            z[i] = std::int64_t(rng() % std::uint64_t(p));
            ypz[i] = m2.reduce(y[i] + p * z[i]);
        }
        for (std::size_t c = 0; c < comps.size(); ++c) {
            std::int64_t lhs = comps[c].eval(m2, ypz);
            std::int64_t jz = 0;
            for (int i = 0; i < n; ++i)
                jz = m2.add(jz, m2.mul(jac[c][i].eval(m2, y), z[i]));
            std::int64_t rhs = m2.add(comps[c].eval(m2, y), m2.mul(m2.reduce(p), jz));
            if (lhs != rhs)
                fail(Errc::BadArgument, "derivative table inconsistent with system");
        }
    }
}

}  // namespace

PolySystem::PolySystem(std::vector<SparsePoly> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) fail(Errc::BadArgument, "empty polynomial system");
    nvars_ = comps_[0].nvars();
    for (const SparsePoly& c : comps_)
        if (c.nvars() != nvars_) fail(Errc::ArityMismatch, "components disagree on arity");
    jac_.reserve(comps_.size());
    for (const SparsePoly& c : comps_) {
        std::vector<SparsePoly> row;
        row.reserve(nvars_);
        for (int i = 0; i < nvars_; ++i) row.push_back(c.derivative(i));
        jac_.push_back(std::move(row));
    }
    validate_jacobian(comps_, jac_);
}

PolySystem PolySystem::equation(const DiagonalForm& f, std::int64_t j) {
    int n = f.arity();
    std::vector<Monomial> terms;
    for (int i = 0; i < n; ++i) {
        Monomial m;
        m.coef = f.coeffs[i];
        m.exps.assign(n, 0);
        m.exps[i] = f.exps[i];
        terms.push_back(std::move(m));
    }
    Monomial c;
    c.coef = -j;
    c.exps.assign(n, 0);
    terms.push_back(std::move(c));
    return PolySystem({SparsePoly(n, std::move(terms))});
}

Vec PolySystem::eval(const Modulus& mod, std::span<const std::int64_t> y) const {
    Vec out;
    out.reserve(comps_.size());
    for (const SparsePoly& c : comps_) out.push_back(c.eval(mod, y));
    return out;
}

std::vector<Vec> PolySystem::jacobian_mod_p(std::int64_t p, std::span<const std::int64_t> y) const {
    Modulus mp = Modulus::make(p, 1);
    Vec yp(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yp[i] = mp.reduce(y[i]);
    std::vector<Vec> rows;
    rows.reserve(comps_.size());
    for (const auto& jrow : jac_) {
        Vec row;
        row.reserve(nvars_);
        for (const SparsePoly& d : jrow) row.push_back(d.eval(mp, yp));
        rows.push_back(std::move(row));
    }
    return rows;
}

int jacobian_rank_mod_p(const PolySystem& sys, std::span<const std::int64_t> y, std::int64_t p) {
    auto rows = sys.jacobian_mod_p(p, y);
    Vec zero(rows.size(), 0);
    return solve_linear_mod_p(rows, zero, p).rank;
}

LinearSolutions solve_linear_mod_p(const std::vector<Vec>& rows, std::span<const std::int64_t> rhs,
                                   std::int64_t p) {
    Modulus mp = Modulus::make(p, 1);
    std::size_t m = rows.size(), n = m ? rows[0].size() : 0;
    if (rhs.size() != m) fail(Errc::SizeMismatch, "rhs length does not match row count");
    // Augmented matrix [A | b], reduced in place.
    std::vector<Vec> a(m, Vec(n + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t jc = 0; jc < n; ++jc) a[i][jc] = mp.reduce(rows[i][jc]);
        a[i][n] = mp.reduce(rhs[i]);
    }
    std::vector<int> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t piv = row;
        while (piv < m && a[piv][col] == 0) ++piv;
        if (piv == m) continue;
        std::swap(a[piv], a[row]);
        std::int64_t inv = unit_inverse(a[row][col], mp);
        for (std::size_t jc = col; jc <= n; ++jc) a[row][jc] = mp.mul(a[row][jc], inv);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row || a[i][col] == 0) continue;
            std::int64_t f = a[i][col];
            for (std::size_t jc = col; jc <= n; ++jc)
                a[i][jc] = mp.sub(a[i][jc], mp.mul(f, a[row][jc]));
        }
        pivot_col.push_back(int(col));
        ++row;
    }
    LinearSolutions out;
    out.rank = int(row);
    for (std::size_t i = row; i < m; ++i)
        if (a[i][n] != 0) return out;  // inconsistent
    out.consistent = true;
    out.particular.assign(n, 0);
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
        out.particular[pivot_col[i]] = a[i][n];
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    for (std::size_t col = 0; col < n; ++col) {
        if (is_pivot[col]) continue;
        Vec basis(n, 0);
        basis[col] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            basis[pivot_col[i]] = mp.sub(0, a[i][col]);
        out.kernel.push_back(std::move(basis));
    }
    return out;
}

namespace {

struct LiftWalker {
    const PolySystem& sys;
    Modulus big;    // Z/p^{l+k}Z
    int l, k, n;
    std::vector<Vec> jac_rows;
    std::function<void(std::span<const std::int64_t>, std::span<const std::int64_t>)> leaf;

    // cur = y + p^l (accumulated z), z_acc canonical mod p^{level}.
    void walk(Vec& cur, Vec& z_acc, int level) {
        if (level == k) {
            leaf(cur, z_acc);
            return;
        }
        std::int64_t pl = big.p_pow(l + level);
        Vec g = sys.eval(big, cur);
        Vec b(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            // g_i is divisible by p^{l+level} along every surviving branch.
            b[i] = (big.p - (g[i] / pl) % big.p) % big.p;
        }
        LinearSolutions sol = solve_linear_mod_p(jac_rows, b, big.p);
        if (!sol.consistent) return;
        std::uint64_t combos = 1;
        for (std::size_t i = 0; i < sol.kernel.size(); ++i) combos *= std::uint64_t(big.p);
        Vec z(n);
        std::int64_t zlayer = big.p_pow(level);
        for (std::uint64_t c = 0; c < combos; ++c) {
            std::uint64_t t = c;
            z = sol.particular;
            for (const Vec& kb : sol.kernel) {
                std::int64_t w = std::int64_t(t % std::uint64_t(big.p));
                t /= std::uint64_t(big.p);
                if (w)
                    for (int i = 0; i < n; ++i) z[i] = (z[i] + w * kb[i]) % big.p;
            }
            Vec next = cur, znext = z_acc;
            for (int i = 0; i < n; ++i) {
                next[i] = big.add(next[i], big.reduce(pl * z[i] % big.q));
                znext[i] += zlayer * z[i];
            }
            // G(cur + p^{l+level} z) = G(cur) + p^{l+level} J z (mod p^{l+level+1}),
            // so solutions of the linear system are exactly the live branches.
            walk(next, znext, level + 1);
        }
    }
};

}  // namespace

void lift_visit(const PolySystem& sys, std::int64_t p, std::span<const std::int64_t> y, int l,
                int k, const std::function<void(std::span<const std::int64_t>)>& emit) {
    if (l < 1 || k < 1) fail(Errc::BadLevel, "lift needs l >= 1 and k >= 1");
    Modulus big = Modulus::make(p, l + k);
    if (int(y.size()) != sys.nvars()) fail(Errc::ArityMismatch, "base point arity mismatch");
    Vec base(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) base[i] = big.reduce(y[i]);
    std::int64_t pl = big.p_pow(l);
    for (std::int64_t g : sys.eval(big, base))
        if (g % pl != 0)
            fail(Errc::BaseNotASolution, "base point does not solve the system mod p^l");
    LiftWalker w{sys, big, l, k, sys.nvars(), sys.jacobian_mod_p(p, base), {}};
    w.leaf = [&](std::span<const std::int64_t> cur, std::span<const std::int64_t>) {
        emit(cur);
    };
    Vec cur = base, z_acc(sys.nvars(), 0);
    w.walk(cur, z_acc, 0);
}

LiftResult lift(const PolySystem& sys, std::int64_t p, std::span<const std::int64_t> y, int l,
                int k, bool enumerate) {
    if (l < 1 || k < 1) fail(Errc::BadLevel, "lift needs l >= 1 and k >= 1");
    Modulus big = Modulus::make(p, l + k);
    if (int(y.size()) != sys.nvars()) fail(Errc::ArityMismatch, "base point arity mismatch");
    Vec base(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) base[i] = big.reduce(y[i]);
    std::int64_t pl = big.p_pow(l);
    for (std::int64_t g : sys.eval(big, base))
        if (g % pl != 0)
            fail(Errc::BaseNotASolution, "base point does not solve the system mod p^l");
    LiftResult res;
    res.jacobian_rank = jacobian_rank_mod_p(sys, base, p);
    LiftWalker w{sys, big, l, k, sys.nvars(), sys.jacobian_mod_p(p, base), {}};
    std::int64_t pk = big.p_pow(k);
    w.leaf = [&](std::span<const std::int64_t>, std::span<const std::int64_t> z) {
        ++res.count;
        if (enumerate) {
            Vec zred(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) zred[i] = z[i] % pk;
            res.points.push_back(std::move(zred));
        }
    };
    Vec cur = base, z_acc(sys.nvars(), 0);
    w.walk(cur, z_acc, 0);
    return res;
}

PointSet solve_system(const PolySystem& sys, const Modulus& mod) {
    int n = sys.nvars();
    unsigned __int128 space = 1;
    for (int i = 0; i < n; ++i) space *= (unsigned __int128)mod.p;
    if (space > (unsigned __int128)search_budget())
        fail(Errc::SearchSpaceTooLarge, "mod-p base search exceeds the budget");
    Modulus mp = mod.lower(1);
    PointSet out(mod, n);
    Vec x(n, 0);
    std::uint64_t total = std::uint64_t(space);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t t = idx;
        for (int i = 0; i < n; ++i) {
            x[i] = std::int64_t(t % std::uint64_t(mod.p));
            t /= std::uint64_t(mod.p);
        }
        bool root = true;
        for (std::int64_t g : sys.eval(mp, x))
            if (g != 0) { root = false; break; }
        if (!root) continue;
        if (mod.r == 1) {
            out.insert(x);
        } else {
            lift_visit(sys, mod.p, x, 1, mod.r - 1,
                       [&](std::span<const std::int64_t> pt) { out.insert(pt); });
        }
    }
    return out;
}

}  // namespace padic
