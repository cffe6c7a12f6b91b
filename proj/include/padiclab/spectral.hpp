#pragma once

// Fourier analysis on (Z/p^rZ)^n with the normalization
//   f^(m) = q^{-n} sum_x f(x) e_q(-m.x),   e_q(t) = exp(2 pi i t / q),
// plus the exponential sums of the two-stratum bounds: sphere coefficients,
// complete sums G_r(m, s) = sum_x e_q(s F(x) + m.x), Weil sums mod p, and
// the one-variable second moment in s.

#include <complex>
#include <cstdint>
#include <vector>

#include "padiclab/ring.hpp"
#include "padiclab/varieties.hpp"

namespace padic {

using cd = std::complex<double>;

// e_q(t) table; t is reduced mod q, negatives allowed.
struct Twiddles {
    std::int64_t q;
    std::vector<cd> w;

    explicit Twiddles(std::int64_t q);
    const cd& at(std::int64_t t) const {
        std::int64_t i = t % q;
        return w[std::size_t(i < 0 ? i + q : i)];
    }
};

// A complex function table over (Z/qZ)^n, indexed little-endian base q.
// The same layout serves functions and their spectra.
struct SpectrumTable {
    Modulus mod;
    int n = 0;
    std::vector<cd> v;

    SpectrumTable() = default;
    SpectrumTable(const Modulus& m, int arity);
    std::uint64_t size() const { return v.size(); }
};

SpectrumTable fourier(const SpectrumTable& f);
SpectrumTable inverse(const SpectrumTable& fhat);
SpectrumTable convolve(const SpectrumTable& f, const SpectrumTable& g);

// Unnormalized multidimensional DFT, sign = -1 or +1; used by the three
// wrappers above and exposed for spectra that want no normalization.
void dft_in_place(SpectrumTable& t, int sign);

// sum_{y in S} e_q(-m.y).
cd character_sum(const PointSet& s, std::span<const std::int64_t> m);

enum class SpherePath { Direct, Reduced };

// 1^_{S_{r,j}}(m). The reduced path rewrites the coefficient at depth
// nu = v_m through the sphere mod p^{r-nu}; it requires a unit radius and
// a smooth form. `cached` skips re-enumeration on the direct path.
cd sphere_fourier(const SphereSpec& spec, std::span<const std::int64_t> m, SpherePath path,
                  const PointSet* cached = nullptr);

struct StratumStat {
    int nu = 0;          // v_{m'} on the stratum
    double max_mag = 0;  // max |1^_S(m')|
    Vec argmax;
};

struct BoundProfile {
    double kappa = 0;
    std::vector<StratumStat> strata;  // nu = 0 .. r-1
    double c2_effective = 0;          // deepest stratum vs p^{-r-(n-1)/2}
    double c3_effective = 0;          // shallow strata vs p^{-r-n+1+kappa}
    bool has_shallow = false;
};

double default_kappa(int n);

BoundProfile fourier_bound_profile(const SphereSpec& spec, double kappa);

// Deep-stratum effective constant computed on the direct path: the full
// sphere mod p^r is streamed once and grouped by residue mod p.
double deep_stratum_constant(const SphereSpec& spec);

struct WeilReport {
    cd value;
    double magnitude = 0;
    int degree = 0;
    double bound = 0;  // (k-1) sqrt(p)
    bool within = false;
};

// sum_{x mod p} e_p(f(x)) for f given by coefficients c[0] + c[1] x + ...
WeilReport weil_sum(std::span<const std::int64_t> coeffs, std::int64_t p);

// G_r(m, s) = sum_{x mod p^r} e_q(s F(x) + m.x), evaluated factor by factor.
cd complete_sum(const DiagonalForm& f, const Modulus& mod, std::span<const std::int64_t> m,
                std::int64_t s);

// Same value through the depth reduction G_r(p^nu m, p^nu s) = p^{nu n} G_{r-nu}(m, s).
cd complete_sum_reduced(const DiagonalForm& f, const Modulus& mod,
                        std::span<const std::int64_t> m, std::int64_t s);

// sum_{s mod p^r} | sum_{x mod p^r} e_q(-m x + s a x^k) |^2 (a real number).
double second_moment_one_var(std::int64_t a, int k, std::int64_t m, const Modulus& mod);

struct CayleySpectrum {
    std::vector<cd> lambda;  // lambda_m = sum_{s in S} e_q(m.s)
    bool symmetric = false;
    double degree = 0;           // lambda_0 = |S|
    double max_nontrivial = 0;   // max_{m != 0} |lambda_m|
};

CayleySpectrum cayley_spectrum(const PointSet& s);

}  // namespace padic
