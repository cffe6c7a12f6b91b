#include <doctest.h>

#include <cstdint>
#include <set>
#include <vector>

#include "padiclab/hensel.hpp"
#include "padiclab/varieties.hpp"

using namespace padic;

namespace {

// Brute-force count of solutions x = y + p^l z (mod p^{l+k}) of sys = 0,
// looping over every offset z in (Z/p^kZ)^n.
std::uint64_t lift_oracle(const PolySystem& sys, std::int64_t p, const Vec& y, int l, int k) {
    Modulus big = Modulus::make(p, l + k);
    std::int64_t pl = 1;
    for (int i = 0; i < l; ++i) pl *= p;
    std::int64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    int n = sys.nvars();
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= std::uint64_t(pk);
    std::uint64_t hits = 0;
    Vec x(std::size_t(n), 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        std::uint64_t t = idx;
        for (int i = 0; i < n; ++i) {
            x[std::size_t(i)] = big.reduce(y[std::size_t(i)] + pl * std::int64_t(t % std::uint64_t(pk)));
            t /= std::uint64_t(pk);
        }
        Vec vals = sys.eval(big, x);
        bool ok = true;
        for (std::int64_t v : vals) ok = ok && v == 0;
        if (ok) ++hits;
    }
    return hits;
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t v = 1;
    while (e-- > 0) v *= b;
    return v;
}

}  // namespace

TEST_CASE("sparse polynomials evaluate and differentiate") {
    // f(x, y) = 3 x^2 y + 2 y^3 + 5
    SparsePoly f(2, {Monomial{3, {2, 1}}, Monomial{2, {0, 3}}, Monomial{5, {0, 0}}});
    Modulus m = Modulus::make(7, 2);
    for (std::int64_t x = 0; x < 10; ++x)
        for (std::int64_t y = 0; y < 10; ++y)
            CHECK(f.eval(m, Vec{x, y}) == m.reduce(3 * x * x * y + 2 * y * y * y + 5));

    SparsePoly fx = f.derivative(0);  // 6 x y
    SparsePoly fy = f.derivative(1);  // 3 x^2 + 6 y^2
    for (std::int64_t x = 0; x < 7; ++x)
        for (std::int64_t y = 0; y < 7; ++y) {
            CHECK(fx.eval(m, Vec{x, y}) == m.reduce(6 * x * y));
            CHECK(fy.eval(m, Vec{x, y}) == m.reduce(3 * x * x + 6 * y * y));
        }

    CHECK(SparsePoly::constant(3, 4).eval(m, Vec{1, 2, 3}) == 4);
    CHECK_THROWS_AS(SparsePoly(0, {}), Error);
    CHECK_THROWS_AS(SparsePoly(2, {Monomial{1, {1}}}), Error);        // arity mismatch
    CHECK_THROWS_AS(SparsePoly(1, {Monomial{1, {-1}}}), Error);       // negative exponent
    CHECK_THROWS_AS(f.eval(m, Vec{1}), Error);
}

TEST_CASE("equation systems wrap diagonal forms") {
    DiagonalForm dist = DiagonalForm::distance(2);
    PolySystem sys = PolySystem::equation(dist, 5);
    CHECK(sys.nvars() == 2);
    CHECK(sys.size() == 1);
    Modulus m = Modulus::make(3, 2);
    for (std::int64_t x = 0; x < 9; ++x)
        for (std::int64_t y = 0; y < 9; ++y)
            CHECK(sys.eval(m, Vec{x, y})[0] == m.reduce(x * x + y * y - 5));
    CHECK_THROWS_AS(PolySystem({}), Error);
}

TEST_CASE("jacobian rank distinguishes smooth from singular points") {
    DiagonalForm dist = DiagonalForm::distance(2);
    PolySystem unit = PolySystem::equation(dist, 1);
    // grad = (2x, 2y): rank 1 away from the origin mod p, rank 0 at it.
    CHECK(jacobian_rank_mod_p(unit, Vec{1, 0}, 3) == 1);
    CHECK(jacobian_rank_mod_p(unit, Vec{0, 2}, 5) == 1);
    PolySystem zero = PolySystem::equation(dist, 0);
    CHECK(jacobian_rank_mod_p(zero, Vec{0, 0}, 3) == 0);
    CHECK(jacobian_rank_mod_p(zero, Vec{3, 6}, 3) == 0);

    // Rank-2 system: (x^2 - 1, y^2 - 1) at (1, 1).
    SparsePoly g1(2, {Monomial{1, {2, 0}}, Monomial{-1, {0, 0}}});
    SparsePoly g2(2, {Monomial{1, {0, 2}}, Monomial{-1, {0, 0}}});
    PolySystem two({g1, g2});
    CHECK(jacobian_rank_mod_p(two, Vec{1, 1}, 5) == 2);
}

TEST_CASE("linear mod-p solver produces particular plus kernel") {
    // Invertible: x + 2y = 1, y = 2 over F_5.
    LinearSolutions inv = solve_linear_mod_p({Vec{1, 2}, Vec{0, 1}}, Vec{1, 2}, 5);
    REQUIRE(inv.consistent);
    CHECK(inv.rank == 2);
    CHECK(inv.kernel.empty());
    CHECK(inv.particular == Vec{2, 2});

    // Rank 1, consistent: x + y = 3 (single row, two unknowns).
    LinearSolutions under = solve_linear_mod_p({Vec{1, 1}}, Vec{3}, 5);
    REQUIRE(under.consistent);
    CHECK(under.rank == 1);
    CHECK(under.kernel.size() == 1);
    CHECK((under.particular[0] + under.particular[1]) % 5 == 3);
    const Vec& k = under.kernel[0];
    CHECK((k[0] + k[1]) % 5 == 0);
    CHECK((k[0] != 0 || k[1] != 0));

    // Inconsistent: x + y = 1 and x + y = 2.
    LinearSolutions bad = solve_linear_mod_p({Vec{1, 1}, Vec{1, 1}}, Vec{1, 2}, 5);
    CHECK_FALSE(bad.consistent);

    CHECK_THROWS_AS(solve_linear_mod_p({Vec{1, 1}}, Vec{1, 2}, 5), Error);
}

TEST_CASE("smooth lift counts equal p^{k(n-m)} and match brute force") {
    for (std::int64_t p : {3, 5, 7}) {
        Modulus mp = Modulus::make(p, 1);
        DiagonalForm dist = DiagonalForm::distance(2);
        for (std::int64_t j = 1; j < p; ++j) {
            PolySystem sys = PolySystem::equation(dist, j);
            for (std::int64_t x = 0; x < p; ++x) {
                for (std::int64_t y = 0; y < p; ++y) {
                    if (mp.reduce(x * x + y * y - j) != 0) continue;
                    Vec base{x, y};
                    // Unit-radius circle points are smooth: gradient nonzero.
                    REQUIRE(jacobian_rank_mod_p(sys, base, p) == 1);
                    for (int k = 1; k <= 2; ++k) {
                        LiftResult res = lift(sys, p, base, 1, k);
                        CHECK(res.count == std::uint64_t(ipow(p, k * (2 - 1))));
                        CHECK(res.count == lift_oracle(sys, p, base, 1, k));
                        CHECK(res.jacobian_rank == 1);
                        CHECK(res.points.size() == res.count);
                    }
                }
            }
        }
    }
}

TEST_CASE("lifted points solve the congruence at the higher level") {
    std::int64_t p = 3;
    DiagonalForm dist = DiagonalForm::distance(2);
    PolySystem sys = PolySystem::equation(dist, 1);
    Vec base{1, 0};
    int l = 1, k = 2;
    Modulus big = Modulus::make(p, l + k);
    std::int64_t pl = ipow(p, l);

    LiftResult res = lift(sys, p, base, l, k);
    std::set<Vec> streamed;
    lift_visit(sys, p, base, l, k, [&](std::span<const std::int64_t> pt) {
        streamed.insert(Vec(pt.begin(), pt.end()));
    });
    CHECK(streamed.size() == res.count);

    std::set<Vec> from_offsets;
    for (const Vec& z : res.points) {
        Vec pt{big.reduce(base[0] + pl * z[0]), big.reduce(base[1] + pl * z[1])};
        CHECK(sys.eval(big, pt)[0] == 0);
        // Stratification: the lift reduces to the base mod p^l.
        CHECK(pt[0] % pl == base[0] % pl);
        CHECK(pt[1] % pl == base[1] % pl);
        from_offsets.insert(pt);
    }
    CHECK(from_offsets == streamed);

    // Counting mode carries no points.
    LiftResult counted = lift(sys, p, base, l, k, false);
    CHECK(counted.count == res.count);
    CHECK(counted.points.empty());
}

TEST_CASE("singular base points stay within the rank bound") {
    DiagonalForm dist = DiagonalForm::distance(2);
    for (std::int64_t p : {3, 5, 7}) {
        PolySystem sys = PolySystem::equation(dist, 0);
        Modulus mp = Modulus::make(p, 1);
        for (std::int64_t x = 0; x < p; ++x) {
            for (std::int64_t y = 0; y < p; ++y) {
                if (mp.reduce(x * x + y * y) != 0) continue;
                Vec base{x, y};
                int rank = jacobian_rank_mod_p(sys, base, p);
                for (int k = 1; k <= 2; ++k) {
                    LiftResult res = lift(sys, p, base, 1, k);
                    CHECK(res.count == lift_oracle(sys, p, base, 1, k));
                    CHECK(res.count <= std::uint64_t(ipow(p, k * (2 - rank))));
                    if (rank == 1) CHECK(res.count == std::uint64_t(ipow(p, k)));
                }
            }
        }
    }
}

TEST_CASE("lift validates its arguments") {
    DiagonalForm dist = DiagonalForm::distance(2);
    PolySystem sys = PolySystem::equation(dist, 1);
    try {
        lift(sys, 3, Vec{1, 0}, 0, 1);
        FAIL("expected BadLevel");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BadLevel);
    }
    try {
        lift(sys, 3, Vec{1, 0}, 1, 0);
        FAIL("expected BadLevel");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BadLevel);
    }
    try {
        lift(sys, 3, Vec{1, 1}, 1, 1);  // 1 + 1 = 2 is not 1 mod 3
        FAIL("expected BaseNotASolution");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BaseNotASolution);
    }
    CHECK_THROWS_AS(lift(sys, 3, Vec{1}, 1, 1), Error);
}

TEST_CASE("solve_system agrees with the exhaustive histogram") {
    for (std::int64_t p : {3, 5}) {
        for (int r = 1; r <= 2; ++r) {
            Modulus m = Modulus::make(p, r);
            DiagonalForm dist = DiagonalForm::distance(2);
            std::vector<std::uint64_t> hist = radius_histogram(dist, m);
            for (std::int64_t j = 0; j < m.q; ++j) {
                PointSet sols = solve_system(PolySystem::equation(dist, j), m);
                CHECK(sols.size() == hist[std::size_t(j)]);
                for (std::uint64_t enc : sols.sorted_encoded()) {
                    Vec pt = sols.decode(enc);
                    CHECK(dist.eval(m, pt) == j);
                }
            }
        }
    }
    // Cubic form away from p = 3.
    Modulus m5 = Modulus::make(5, 2);
    DiagonalForm cubic({1, 2}, {3, 3});
    std::vector<std::uint64_t> hist = radius_histogram(cubic, m5);
    for (std::int64_t j : {0, 1, 7, 24}) {
        PointSet sols = solve_system(PolySystem::equation(cubic, j), m5);
        CHECK(sols.size() == hist[std::size_t(j)]);
    }
}
