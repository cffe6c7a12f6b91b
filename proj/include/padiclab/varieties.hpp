#pragma once

// Spheres S_{r,j} = { z in (Z/p^rZ)^n : F(z) = j } for diagonal forms F,
// and the two-dimensional circles of the distance form, with their exact
// cardinality formulas and the layered decomposition at non-unit radius.

#include <cstdint>
#include <functional>
#include <vector>

#include "padiclab/hensel.hpp"
#include "padiclab/ring.hpp"

namespace padic {

struct SphereSpec {
    DiagonalForm form;
    Modulus mod;
    std::int64_t radius = 0;

    SphereSpec(DiagonalForm f, Modulus m, std::int64_t j)
        : form(std::move(f)), mod(m), radius(m.reduce(j)) {
        form.check_binding(mod);
    }
    int arity() const { return form.arity(); }
    bool unit_radius() const { return mod.is_unit(radius); }
};

// Streams every sphere point once, via mod-p roots plus Hensel lifting.
// Requires a unit radius and a smooth form (p divides no a_i k_i).
void visit_sphere(const SphereSpec& spec,
                  const std::function<void(std::span<const std::int64_t>)>& fn);

// force_oracle replays the exhaustive q^n search used as the reference path.
PointSet sphere_points(const SphereSpec& spec, bool force_oracle = false);

// Counts of F(x) = j for every j mod q in one exhaustive pass.
std::vector<std::uint64_t> radius_histogram(const DiagonalForm& f, const Modulus& mod);

// |C_{r,j}| for x^2 + y^2, split on p mod 4:
//   p = 3 (mod 4): p^{r-1}(p+1) for even v < r, p^{2 floor(r/2)} for j = 0, else 0
//   p = 1 (mod 4): (v+1) p^{r-1}(p-1) for v < r, (rp + p - r) p^{r-1} for j = 0
// where v = ord_p(j).
std::int64_t circle_cardinality_formula(std::int64_t p, int r, std::int64_t j);

// C_{r, p^{2u} t} = { p^u z + p^{r-u} w : z in C_{r-2u, t}, w in (Z/p^uZ)^2 }
// for p = 3 (mod 4); radius zero collapses to the lattice p^{ceil(r/2)} w.
struct CircleDecomposition {
    enum class Kind { Layered, ZeroRadius, Empty };

    Kind kind = Kind::Empty;
    Modulus mod;
    std::int64_t radius = 0;
    int u = 0;                    // layered only: j = p^{2u} core_radius
    Modulus core_mod;             // layered only: Z/p^{r-2u}Z
    std::int64_t core_radius = 0; // layered only, a unit mod p

    std::int64_t predicted_cardinality() const;
    PointSet materialize() const;
};

CircleDecomposition circle_decomposition(const Modulus& mod, std::int64_t j);

struct SolutionCountReport {
    std::int64_t count = 0;     // #{x mod p : F(x) = j}
    std::int64_t expected = 0;  // p^{n-1}
    std::int64_t dev_num = 0;   // |count - expected| / expected, reduced
    std::int64_t dev_den = 1;
    double deviation = 0.0;
};

SolutionCountReport mod_p_solution_count(const DiagonalForm& f, std::int64_t p, std::int64_t j);

}  // namespace padic
