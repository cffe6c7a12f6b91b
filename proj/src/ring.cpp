#include "padiclab/ring.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace padic {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::NotPrime: return "NotPrime";
        case Errc::EvenPrimeRejected: return "EvenPrimeRejected";
        case Errc::Overflow: return "Overflow";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::ArityMismatch: return "ArityMismatch";
        case Errc::NotAUnit: return "NotAUnit";
        case Errc::BaseNotASolution: return "BaseNotASolution";
        case Errc::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
        case Errc::SizeMismatch: return "SizeMismatch";
        case Errc::SmoothnessViolated: return "SmoothnessViolated";
        case Errc::NonUnitRadius: return "NonUnitRadius";
        case Errc::ZeroFrequencyPair: return "ZeroFrequencyPair";
        case Errc::DegreeDivisibleByP: return "DegreeDivisibleByP";
        case Errc::WrongResidueClass: return "WrongResidueClass";
        case Errc::ModulusMismatch: return "ModulusMismatch";
        case Errc::OddArity: return "OddArity";
        case Errc::PinNotInSet: return "PinNotInSet";
        case Errc::WrongArity: return "WrongArity";
        case Errc::BadLevel: return "BadLevel";
        case Errc::NoKthRootOfMinusOne: return "NoKthRootOfMinusOne";
        case Errc::BadL: return "BadL";
        case Errc::DivisibilityFailed: return "DivisibilityFailed";
        case Errc::UnsupportedBranch: return "UnsupportedBranch";
        case Errc::IsotropicOrbit: return "IsotropicOrbit";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::BadArgument: return "BadArgument";
    }
    return "Unknown";
}

bool is_prime(std::int64_t v) {
    if (v < 2) return false;
    if (v % 2 == 0) return v == 2;
    for (std::int64_t d = 3; d * d <= v; d += 2)
        if (v % d == 0) return false;
    return true;
}

std::uint64_t search_budget() {
    static std::uint64_t cached = [] {
        if (const char* s = std::getenv("PADIC_LAB_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(s, &end, 10);
            if (end != s && v > 0) return std::uint64_t(v);
        }
        return std::uint64_t(1) << 26;
    }();
    return cached;
}

void check_budget(unsigned __int128 work, const char* what) {
    if (work > (unsigned __int128)search_budget())
        fail(Errc::BudgetExceeded, std::string(what) + " exceeds PADIC_LAB_BUDGET");
}

Modulus Modulus::make(std::int64_t p, int r, std::int64_t cap) {
    if (p == 2) fail(Errc::EvenPrimeRejected, "p = 2 is outside the odd-prime setting");
    if (!is_prime(p)) fail(Errc::NotPrime, "p = " + std::to_string(p) + " is not prime");
    if (r < 1) fail(Errc::BadArgument, "exponent r must be >= 1");
    if (cap > (std::int64_t(1) << 62)) cap = std::int64_t(1) << 62;
    unsigned __int128 q = 1;
    for (int i = 0; i < r; ++i) {
        q *= (unsigned __int128)p;
        if (q >= (unsigned __int128)cap)
            fail(Errc::Overflow, "p^r exceeds the modulus cap");
    }
    Modulus m;
    m.p = p;
    m.r = r;
    m.q = std::int64_t(q);
    return m;
}

std::int64_t Modulus::pow(std::int64_t base, std::int64_t e) const {
    std::int64_t acc = 1 % q, b = reduce(base);
    while (e > 0) {
        if (e & 1) acc = mul(acc, b);
        b = mul(b, b);
        e >>= 1;
    }
    return acc;
}

int Modulus::ord(std::int64_t x) const {
    if (x == 0) return r;
    int v = 0;
    while (v < r && x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

std::int64_t Modulus::p_pow(int g) const {
    std::int64_t t = 1;
    for (int i = 0; i < g; ++i) t *= p;
    return t;
}

Modulus Modulus::lower(int g) const {
    if (g < 1 || g > r) fail(Errc::BadLevel, "lowered exponent out of range");
    Modulus m;
    m.p = p;
    m.r = g;
    m.q = p_pow(g);
    return m;
}

std::int64_t unit_inverse(std::int64_t x, const Modulus& mod) {
    x = mod.reduce(x);
    if (x % mod.p == 0)
        fail(Errc::NotAUnit, std::to_string(x) + " is not a unit mod " + std::to_string(mod.q));
    // Extended Euclid on (x, q); gcd is 1 because x is a unit.
    std::int64_t a = x, b = mod.q, u = 1, v = 0;
    while (b != 0) {
        std::int64_t t = a / b;
        a -= t * b;
        std::swap(a, b);
        u -= t * v;
        std::swap(u, v);
    }
    return mod.reduce(u);
}

int vec_valuation(std::span<const std::int64_t> z, const Modulus& mod) {
    if (z.empty()) fail(Errc::ArityMismatch, "valuation of an empty vector");
    int v = mod.r;
    for (std::int64_t c : z) v = std::min(v, mod.ord(c));
    return v;
}

SplitVec split(std::span<const std::int64_t> z, const Modulus& mod) {
    int v = vec_valuation(z, mod);
    if (v == mod.r) fail(Errc::ZeroVector, "split of the zero vector");
    SplitVec s;
    s.v = v;
    s.reduced = mod.lower(mod.r - v);
    std::int64_t pv = mod.p_pow(v);
    s.unit_part.reserve(z.size());
    for (std::int64_t c : z) s.unit_part.push_back((c / pv) % s.reduced.q);
    return s;
}

DiagonalForm::DiagonalForm(std::vector<std::int64_t> a, std::vector<int> k)
    : coeffs(std::move(a)), exps(std::move(k)) {
    if (coeffs.empty() || coeffs.size() != exps.size())
        fail(Errc::ArityMismatch, "coefficient and exponent lists must agree and be nonempty");
    for (std::int64_t c : coeffs)
        if (c == 0) fail(Errc::BadArgument, "zero coefficient in diagonal form");
    for (int e : exps)
        if (e < 2) fail(Errc::BadArgument, "exponents must be >= 2");
}

DiagonalForm DiagonalForm::distance(int n) {
    if (n < 1) fail(Errc::BadArgument, "arity must be >= 1");
    return DiagonalForm(std::vector<std::int64_t>(n, 1), std::vector<int>(n, 2));
}

int DiagonalForm::min_exponent() const {
    return *std::min_element(exps.begin(), exps.end());
}

void DiagonalForm::check_binding(const Modulus& mod) const {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        std::int64_t c = coeffs[i] % mod.p;
        if (c == 0)
            fail(Errc::NotAUnit, "coefficient a_" + std::to_string(i + 1) + " vanishes mod p");
    }
}

bool DiagonalForm::smooth_for(const Modulus& mod) const {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] % mod.p == 0) return false;
        if (exps[i] % mod.p == 0) return false;
    }
    return true;
}

bool DiagonalForm::is_distance_form() const {
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        if (coeffs[i] != 1 || exps[i] != 2) return false;
    return true;
}

std::int64_t DiagonalForm::eval(const Modulus& mod, std::span<const std::int64_t> z) const {
    if (int(z.size()) != arity())
        fail(Errc::ArityMismatch, "point arity does not match the form");
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        std::int64_t a = mod.reduce(coeffs[i]);
        acc = mod.add(acc, mod.mul(a, mod.pow(z[i], exps[i])));
    }
    return acc;
}

std::int64_t DiagonalForm::partial(const Modulus& mod, int i, std::int64_t zi) const {
    std::int64_t a = mod.mul(mod.reduce(coeffs[i]), mod.reduce(exps[i]));
    return mod.mul(a, mod.pow(zi, exps[i] - 1));
}

std::string DiagonalForm::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i) os << " + ";
        if (coeffs[i] != 1) os << coeffs[i] << "*";
        os << "x" << (i + 1) << "^" << exps[i];
    }
    return os.str();
}

std::uint64_t domain_size(const Modulus& mod, int n) {
    unsigned __int128 d = 1;
    for (int i = 0; i < n; ++i) {
        d *= (unsigned __int128)mod.q;
        if (d > (unsigned __int128)1 << 62)
            fail(Errc::SearchSpaceTooLarge, "q^n does not fit the point encoding");
    }
    return std::uint64_t(d);
}

PointSet::PointSet(const Modulus& mod, int n, std::uint64_t bitmap_threshold)
    : mod_(mod), n_(n) {
    if (n < 1) fail(Errc::ArityMismatch, "point set arity must be >= 1");
    domain_ = padic::domain_size(mod, n);
    use_bitmap_ = domain_ <= bitmap_threshold;
    if (use_bitmap_) bitmap_.assign((domain_ + 63) / 64, 0);
}

std::uint64_t PointSet::encode(std::span<const std::int64_t> pt) const {
    if (int(pt.size()) != n_) fail(Errc::ArityMismatch, "point arity mismatch");
    std::uint64_t idx = 0, scale = 1;
    for (int i = 0; i < n_; ++i) {
        idx += std::uint64_t(mod_.reduce(pt[i])) * scale;
        scale *= std::uint64_t(mod_.q);
    }
    return idx;
}

Vec PointSet::decode(std::uint64_t idx) const {
    Vec pt(n_);
    for (int i = 0; i < n_; ++i) {
        pt[i] = std::int64_t(idx % std::uint64_t(mod_.q));
        idx /= std::uint64_t(mod_.q);
    }
    return pt;
}

void PointSet::insert_encoded(std::uint64_t idx) {
    if (idx >= domain_) fail(Errc::BadArgument, "encoded index out of domain");
    if (use_bitmap_) {
        std::uint64_t& w = bitmap_[idx >> 6];
        std::uint64_t bit = std::uint64_t(1) << (idx & 63);
        if (w & bit) return;
        w |= bit;
    } else {
        if (!hash_.insert(idx).second) return;
    }
    if (!members_.empty() && idx < members_.back()) sorted_ = false;
    members_.push_back(idx);
}

bool PointSet::contains_encoded(std::uint64_t idx) const {
    if (idx >= domain_) return false;
    if (use_bitmap_) return (bitmap_[idx >> 6] >> (idx & 63)) & 1;
    return hash_.count(idx) != 0;
}

const std::vector<std::uint64_t>& PointSet::sorted_encoded() const {
    if (!sorted_) {
        std::sort(members_.begin(), members_.end());
        sorted_ = true;
    }
    return members_;
}

std::string PointSet::to_csv() const {
    std::vector<Vec> pts;
    pts.reserve(size());
    for (std::uint64_t e : sorted_encoded()) pts.push_back(decode(e));
    std::sort(pts.begin(), pts.end());
    std::ostringstream os;
    for (const Vec& pt : pts) {
        for (std::size_t i = 0; i < pt.size(); ++i) {
            if (i) os << ',';
            os << pt[i];
        }
        os << '\n';
    }
    return os.str();
}

std::string PointSet::to_json() const {
    std::vector<Vec> pts;
    pts.reserve(size());
    for (std::uint64_t e : sorted_encoded()) pts.push_back(decode(e));
    std::sort(pts.begin(), pts.end());
    std::ostringstream os;
    os << '[';
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k) os << ',';
        os << '[';
        for (std::size_t i = 0; i < pts[k].size(); ++i) {
            if (i) os << ',';
            os << pts[k][i];
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

bool PointSet::same_set(const PointSet& other) const {
    if (!(mod_ == other.mod_) || n_ != other.n_) return false;
    return sorted_encoded() == other.sorted_encoded();
}

}  // namespace padic
