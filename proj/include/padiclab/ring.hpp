#pragma once

// Exact arithmetic in Z/p^rZ and (Z/p^rZ)^n: canonical residues, valuations,
// vectors, diagonal forms, and encoded point sets.

#include <cstdint>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace padic {

enum class Errc {
    NotPrime,
    EvenPrimeRejected,
    Overflow,
    ZeroVector,
    ArityMismatch,
    NotAUnit,
    BaseNotASolution,
    SearchSpaceTooLarge,
    SizeMismatch,
    SmoothnessViolated,
    NonUnitRadius,
    ZeroFrequencyPair,
    DegreeDivisibleByP,
    WrongResidueClass,
    ModulusMismatch,
    OddArity,
    PinNotInSet,
    WrongArity,
    BadLevel,
    NoKthRootOfMinusOne,
    BadL,
    DivisibilityFailed,
    UnsupportedBranch,
    IsotropicOrbit,
    BudgetExceeded,
    BadArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& msg)
        : std::runtime_error(msg), code_(c) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) {
    throw Error(c, msg);
}

bool is_prime(std::int64_t v);

// Search-space cap, overridable through PADIC_LAB_BUDGET.
std::uint64_t search_budget();
void check_budget(unsigned __int128 work, const char* what);

// The pair (p, r) defining Z/p^rZ, with q = p^r precomputed. Residues are
// canonical in [0, q); products go through a 128-bit intermediate so any
// q below 2^62 is safe, but the default cap keeps q below 2^31.
struct Modulus {
    std::int64_t p = 0;
    int r = 0;
    std::int64_t q = 0;

    static constexpr std::int64_t kDefaultCap = std::int64_t(1) << 31;

    static Modulus make(std::int64_t p, int r, std::int64_t cap = kDefaultCap);

    std::int64_t reduce(std::int64_t v) const {
        std::int64_t t = v % q;
        return t < 0 ? t + q : t;
    }
    std::int64_t add(std::int64_t a, std::int64_t b) const {
        std::int64_t s = a + b;
        return s >= q ? s - q : s;
    }
    std::int64_t sub(std::int64_t a, std::int64_t b) const {
        std::int64_t s = a - b;
        return s < 0 ? s + q : s;
    }
    std::int64_t mul(std::int64_t a, std::int64_t b) const {
        return std::int64_t((unsigned __int128)(a) * (unsigned __int128)(b) % (unsigned __int128)(q));
    }
    std::int64_t pow(std::int64_t base, std::int64_t e) const;

    // ord_p(x) for canonical x, with ord_p(0) = r.
    int ord(std::int64_t x) const;

    // p^g for 0 <= g <= r.
    std::int64_t p_pow(int g) const;

    // Z/p^gZ with the same p.
    Modulus lower(int g) const;

    bool is_unit(std::int64_t x) const { return x % p != 0; }

    bool operator==(const Modulus& o) const { return p == o.p && r == o.r; }
};

// x * result = 1 (mod p^r); requires gcd(x, p) = 1.
std::int64_t unit_inverse(std::int64_t x, const Modulus& mod);

using Vec = std::vector<std::int64_t>;

// v_z = min over coordinates of ord_p.
int vec_valuation(std::span<const std::int64_t> z, const Modulus& mod);

struct SplitVec {
    int v = 0;           // v_z
    Modulus reduced;     // Z/p^{r-v}Z
    Vec unit_part;       // z~ with v_{z~} = 0 and p^v z~ = z (mod p^r)
};

SplitVec split(std::span<const std::int64_t> z, const Modulus& mod);

// F(x) = sum a_i x_i^{k_i} with every k_i >= 2 and a_i a nonzero integer.
struct DiagonalForm {
    std::vector<std::int64_t> coeffs;
    std::vector<int> exps;

    DiagonalForm() = default;
    DiagonalForm(std::vector<std::int64_t> a, std::vector<int> k);

    static DiagonalForm distance(int n);  // sum x_i^2

    int arity() const { return int(coeffs.size()); }
    int min_exponent() const;  // k_*

    // Every a_i must be a unit mod p.
    void check_binding(const Modulus& mod) const;

    // True when the unit-radius smoothness condition p | a_i k_i fails nowhere.
    bool smooth_for(const Modulus& mod) const;

    bool is_distance_form() const;

    std::int64_t eval(const Modulus& mod, std::span<const std::int64_t> z) const;

    // Partial derivative value k_i a_i z_i^{k_i - 1} mod q.
    std::int64_t partial(const Modulus& mod, int i, std::int64_t zi) const;

    std::string describe() const;
};

// A finite subset of (Z/p^rZ)^n with O(1) membership. Points are stored
// encoded little-endian base q: index = sum x_i q^i. Membership uses a flat
// bitmap when q^n is small enough and a hash set otherwise.
class PointSet {
public:
    static constexpr std::uint64_t kBitmapThreshold = std::uint64_t(1) << 26;

    PointSet(const Modulus& mod, int n,
             std::uint64_t bitmap_threshold = kBitmapThreshold);

    const Modulus& modulus() const { return mod_; }
    int arity() const { return n_; }
    std::uint64_t domain_size() const { return domain_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    std::uint64_t encode(std::span<const std::int64_t> pt) const;
    Vec decode(std::uint64_t idx) const;

    void insert(std::span<const std::int64_t> pt) { insert_encoded(encode(pt)); }
    void insert_encoded(std::uint64_t idx);
    bool contains(std::span<const std::int64_t> pt) const { return contains_encoded(encode(pt)); }
    bool contains_encoded(std::uint64_t idx) const;

    // Encoded members sorted ascending.
    const std::vector<std::uint64_t>& sorted_encoded() const;

    std::string to_csv() const;   // one "x_1,...,x_n" row per line
    std::string to_json() const;  // sorted list of coordinate tuples

    bool same_set(const PointSet& other) const;

private:
    Modulus mod_;
    int n_;
    std::uint64_t domain_;
    bool use_bitmap_;
    std::vector<std::uint64_t> bitmap_;
    std::unordered_set<std::uint64_t> hash_;
    mutable std::vector<std::uint64_t> members_;
    mutable bool sorted_ = true;
};

// Full domain (Z/qZ)^n as q^n, guarded against encoding overflow.
std::uint64_t domain_size(const Modulus& mod, int n);

}  // namespace padic
