#pragma once

// The rotation group G_r = { (a, b) : a^2 + b^2 = 1 (mod p^r) } acting on
// (Z/p^rZ)^2 by (x, y) -> (ax - by, bx + ay), with orbit/stabilizer counts,
// difference-fiber energy, and the L2 -> L4 extension ratio over circles
// and orbits.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "padiclab/ring.hpp"

namespace padic {

struct Rotation {
    std::int64_t a = 1;
    std::int64_t b = 0;
};

class RotationGroup {
public:
    static RotationGroup build(const Modulus& mod);

    const Modulus& modulus() const { return mod_; }
    std::size_t size() const { return elems_.size(); }
    const std::vector<Rotation>& elements() const { return elems_; }

    // p^{r-1}(p+1) for p = 3 (mod 4), p^{r-1}(p-1) for p = 1 (mod 4).
    std::int64_t expected_order() const;

private:
    explicit RotationGroup(const Modulus& mod) : mod_(mod) {}
    Modulus mod_;
    std::vector<Rotation> elems_;
};

Rotation compose(const Rotation& s, const Rotation& t, const Modulus& mod);
Rotation inverse_rot(const Rotation& s, const Modulus& mod);
Vec apply(const Rotation& s, std::span<const std::int64_t> x, const Modulus& mod);

PointSet orbit(std::span<const std::int64_t> x, const RotationGroup& g);
std::vector<Rotation> stabilizer(std::span<const std::int64_t> x, const RotationGroup& g);

struct EnergyReport {
    std::uint64_t max_fiber = 0;  // max over z != 0 of #{(x,y) in V^2 : x - y = z}
    Vec argmax;
};

EnergyReport energy_fiber_max(const PointSet& v);

struct ExtensionReport {
    double lhs = 0;    // ( sum_m |(f dsigma)^(m)|^4 )^{1/2}
    double rhs = 0;    // p^{-e/2} sum_{x in V} |f(x)|^2
    double ratio = 0;  // 0 when f = 0
};

// (f dsigma)^(m) = |V|^{-1} sum_{x in V} f(x) e_q(m.x); the fourth-moment
// sum is folded through the difference histogram of V, which is exact.
double extension_lhs(const PointSet& v, std::span<const std::complex<double>> f);

// Reference evaluation summing over every m; quadratic in the domain size.
double extension_lhs_direct(const PointSet& v, std::span<const std::complex<double>> f);

// rhs = p^{-(r+1)/2} sum |f|^2; the radius j must be a unit.
ExtensionReport extension_ratio_circle(const PointSet& circle, std::int64_t j,
                                       std::span<const std::complex<double>> f);

// rhs = p^{-(r-3v+1)/2} sum |f|^2 with v = v_x; for p = 1 (mod 4) the
// reduced base point must have unit norm.
ExtensionReport extension_ratio_orbit(const PointSet& orb, std::span<const std::int64_t> x,
                                      std::span<const std::complex<double>> f);

}  // namespace padic
