#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "padiclab/ring.hpp"

using namespace padic;

namespace {

// Plain integer reference for modular reduction into [0, q).
std::int64_t norm(std::int64_t v, std::int64_t q) {
    std::int64_t t = v % q;
    return t < 0 ? t + q : t;
}

}  // namespace

TEST_CASE("modulus construction validates its arguments") {
    Modulus m = Modulus::make(3, 2);
    CHECK(m.p == 3);
    CHECK(m.r == 2);
    CHECK(m.q == 9);

    CHECK_THROWS_WITH_AS(Modulus::make(2, 1), doctest::Contains("p = 2"), Error);
    CHECK_THROWS_AS(Modulus::make(9, 1), Error);
    CHECK_THROWS_AS(Modulus::make(1, 1), Error);
    CHECK_THROWS_AS(Modulus::make(-7, 1), Error);
    CHECK_THROWS_AS(Modulus::make(3, 0), Error);
    CHECK_THROWS_AS(Modulus::make(3, -1), Error);

    try {
        Modulus::make(4, 1);
        FAIL("expected NotPrime");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotPrime);
    }
    try {
        Modulus::make(3, 60);
        FAIL("expected Overflow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Overflow);
    }
}

TEST_CASE("is_prime agrees with a sieve up to 200") {
    std::vector<bool> sieve(201, true);
    sieve[0] = sieve[1] = false;
    for (int i = 2; i <= 200; ++i)
        if (sieve[i])
            for (int j = 2 * i; j <= 200; j += i) sieve[j] = false;
    for (int v = 0; v <= 200; ++v) CHECK(is_prime(v) == sieve[v]);
    CHECK_FALSE(is_prime(-3));
}

TEST_CASE("modular arithmetic matches plain integer arithmetic") {
    Modulus m = Modulus::make(7, 2);
    for (std::int64_t a = -5; a < 55; a += 7) {
        for (std::int64_t b = -3; b < 52; b += 5) {
            CHECK(m.add(norm(a, 49), norm(b, 49)) == norm(a + b, 49));
            CHECK(m.sub(norm(a, 49), norm(b, 49)) == norm(a - b, 49));
            CHECK(m.mul(norm(a, 49), norm(b, 49)) == norm(a * b, 49));
        }
    }
    CHECK(m.reduce(-1) == 48);
    CHECK(m.reduce(49) == 0);
    CHECK(m.reduce(50) == 1);

    // pow via repeated multiplication.
    std::int64_t acc = 1;
    for (int e = 0; e < 12; ++e) {
        CHECK(m.pow(3, e) == acc);
        acc = m.mul(acc, 3);
    }
    CHECK(m.pow(0, 0) == 1);
}

TEST_CASE("ord_p reports valuations with ord(0) = r") {
    Modulus m = Modulus::make(3, 3);
    CHECK(m.ord(0) == 3);
    CHECK(m.ord(1) == 0);
    CHECK(m.ord(2) == 0);
    CHECK(m.ord(3) == 1);
    CHECK(m.ord(6) == 1);
    CHECK(m.ord(9) == 2);
    CHECK(m.ord(18) == 2);
    CHECK(m.ord(26) == 0);
    // Valuation only sees the residue mod 27.
    CHECK(m.ord(27) == 3);
    CHECK(m.is_unit(1));
    CHECK(m.is_unit(26));
    CHECK_FALSE(m.is_unit(3));
    CHECK_FALSE(m.is_unit(0));
}

TEST_CASE("p_pow and lower slice the modulus tower") {
    Modulus m = Modulus::make(5, 3);
    CHECK(m.p_pow(0) == 1);
    CHECK(m.p_pow(1) == 5);
    CHECK(m.p_pow(2) == 25);
    CHECK(m.p_pow(3) == 125);
    Modulus low = m.lower(1);
    CHECK(low.p == 5);
    CHECK(low.r == 1);
    CHECK(low.q == 5);
    CHECK(m.lower(3) == m);
    CHECK_THROWS_AS(m.lower(0), Error);
    CHECK_THROWS_AS(m.lower(4), Error);
}

TEST_CASE("unit_inverse inverts every unit") {
    for (int r = 1; r <= 2; ++r) {
        Modulus m = Modulus::make(7, r);
        for (std::int64_t x = 0; x < m.q; ++x) {
            if (!m.is_unit(x)) continue;
            std::int64_t y = unit_inverse(x, m);
            CHECK(m.mul(x, y) == 1);
        }
    }
    Modulus m = Modulus::make(3, 2);
    try {
        unit_inverse(3, m);
        FAIL("expected NotAUnit");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotAUnit);
    }
}

TEST_CASE("vector valuation and split recover z = p^v z~") {
    Modulus m = Modulus::make(3, 3);
    CHECK(vec_valuation(Vec{1, 3}, m) == 0);
    CHECK(vec_valuation(Vec{9, 3}, m) == 1);
    CHECK(vec_valuation(Vec{9, 18}, m) == 2);
    CHECK(vec_valuation(Vec{0, 0}, m) == 3);
    CHECK_THROWS_AS(vec_valuation(Vec{}, m), Error);

    for (std::int64_t a = 0; a < 27; ++a) {
        for (std::int64_t b = 0; b < 27; ++b) {
            if (a == 0 && b == 0) continue;
            Vec z{a, b};
            SplitVec s = split(z, m);
            CHECK(s.v == vec_valuation(z, m));
            CHECK(s.reduced.r == m.r - s.v);
            CHECK(vec_valuation(s.unit_part, s.reduced) == 0);
            std::int64_t pv = m.p_pow(s.v);
            for (std::size_t i = 0; i < z.size(); ++i)
                CHECK(m.reduce(pv * s.unit_part[i]) == m.reduce(z[i]));
        }
    }

    try {
        split(Vec{0, 0}, m);
        FAIL("expected ZeroVector");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ZeroVector);
    }
}

TEST_CASE("diagonal forms evaluate coordinatewise") {
    Modulus m = Modulus::make(5, 2);
    DiagonalForm dist = DiagonalForm::distance(3);
    CHECK(dist.arity() == 3);
    CHECK(dist.min_exponent() == 2);
    CHECK(dist.is_distance_form());
    CHECK(dist.eval(m, Vec{1, 2, 3}) == 14);
    CHECK(dist.eval(m, Vec{24, 0, 0}) == m.reduce(24 * 24));

    DiagonalForm f({1, 2}, {2, 3});
    CHECK_FALSE(f.is_distance_form());
    CHECK(f.min_exponent() == 2);
    for (std::int64_t x = 0; x < 25; ++x) {
        for (std::int64_t y = 0; y < 25; ++y) {
            std::int64_t want = norm(x * x + 2 * y * y * y, 25);
            CHECK(f.eval(m, Vec{x, y}) == want);
            CHECK(f.partial(m, 0, x) == norm(2 * x, 25));
            CHECK(f.partial(m, 1, y) == norm(6 * y * y, 25));
        }
    }

    CHECK_THROWS_AS(f.eval(m, Vec{1}), Error);
    CHECK_THROWS_AS(DiagonalForm({1}, {1}), Error);   // exponent below 2
    CHECK_THROWS_AS(DiagonalForm({0}, {2}), Error);   // zero coefficient
    CHECK_THROWS_AS(DiagonalForm({}, {}), Error);
    CHECK_THROWS_AS(DiagonalForm::distance(0), Error);
    CHECK(f.describe().size() > 0);
}

TEST_CASE("smoothness check tracks p | a_i k_i") {
    Modulus m3 = Modulus::make(3, 2);
    Modulus m5 = Modulus::make(5, 2);
    DiagonalForm cubic({1, 2}, {3, 3});
    CHECK_FALSE(cubic.smooth_for(m3));  // 3 | k_i
    CHECK(cubic.smooth_for(m5));
    DiagonalForm scaled({5, 1}, {2, 2});
    CHECK(scaled.smooth_for(m3));
    CHECK_FALSE(scaled.smooth_for(m5));  // 5 | a_1
    CHECK(DiagonalForm::distance(2).smooth_for(m3));

    // Binding rejects vanishing coefficients; exponents are smooth_for's job.
    CHECK_NOTHROW(cubic.check_binding(m3));
    CHECK_NOTHROW(cubic.check_binding(m5));
    try {
        scaled.check_binding(m5);
        FAIL("expected NotAUnit");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotAUnit);
    }
}

TEST_CASE("point sets round-trip the little-endian base-q codec") {
    Modulus m = Modulus::make(3, 2);
    PointSet s(m, 2);
    CHECK(s.domain_size() == 81);
    CHECK(domain_size(m, 2) == 81);
    CHECK(s.empty());

    for (std::uint64_t enc = 0; enc < 81; ++enc) {
        Vec pt = s.decode(enc);
        CHECK(pt.size() == 2);
        CHECK(s.encode(pt) == enc);
    }
    // Encoding reduces coordinates first.
    CHECK(s.encode(Vec{-1, 9}) == s.encode(Vec{8, 0}));

    s.insert(Vec{1, 2});
    s.insert(Vec{1, 2});
    s.insert(Vec{0, 0});
    CHECK(s.size() == 2);
    CHECK(s.contains(Vec{1, 2}));
    CHECK_FALSE(s.contains(Vec{2, 1}));
    const auto& enc = s.sorted_encoded();
    CHECK(enc.size() == 2);
    CHECK(std::is_sorted(enc.begin(), enc.end()));

    PointSet t(m, 2);
    t.insert(Vec{0, 0});
    t.insert(Vec{1, 2});
    CHECK(s.same_set(t));
    t.insert(Vec{5, 5});
    CHECK_FALSE(s.same_set(t));

    CHECK_THROWS_AS(s.encode(Vec{1}), Error);
    CHECK_THROWS_AS(s.insert_encoded(81), Error);
    CHECK_THROWS_AS(PointSet(m, 0), Error);
}

TEST_CASE("point set serialization is sorted and parseable") {
    Modulus m = Modulus::make(3, 1);
    PointSet s(m, 2);
    s.insert(Vec{2, 1});
    s.insert(Vec{0, 1});
    std::string csv = s.to_csv();
    CHECK(csv == "0,1\n2,1\n");
    std::string js = s.to_json();
    CHECK(js == "[[0,1],[2,1]]");
}

TEST_CASE("budget guard rejects astronomically large searches") {
    CHECK(search_budget() >= (std::uint64_t(1) << 20));
    try {
        check_budget((unsigned __int128)1 << 120, "test probe");
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::BudgetExceeded);
    }
    CHECK_NOTHROW(check_budget(16, "tiny probe"));
}

TEST_CASE("errc names are stable strings") {
    CHECK(std::string(errc_name(Errc::NotPrime)) == "NotPrime");
    CHECK(std::string(errc_name(Errc::BudgetExceeded)) == "BudgetExceeded");
    CHECK(std::string(errc_name(Errc::WrongResidueClass)) == "WrongResidueClass");
}
