#pragma once

// Polynomial systems over Z and level-by-level Hensel lifting: for a base
// point y with G(y) = 0 (mod p^l), the solutions z mod p^k of
// G(y + p^l z) = 0 (mod p^{l+k}) form a tree of affine spaces, one linear
// system mod p per level. When the Jacobian has full rank m at y the count
// is exactly p^{k(n-m)}; in general it is at most p^{k(n-R)}.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "padiclab/ring.hpp"

namespace padic {

struct Monomial {
    std::int64_t coef = 0;
    std::vector<int> exps;  // one exponent per variable
};

class SparsePoly {
public:
    SparsePoly(int nvars, std::vector<Monomial> terms);

    static SparsePoly constant(int nvars, std::int64_t c);

    int nvars() const { return nvars_; }
    const std::vector<Monomial>& terms() const { return terms_; }

    std::int64_t eval(const Modulus& mod, std::span<const std::int64_t> x) const;
    SparsePoly derivative(int var) const;

private:
    int nvars_;
    std::vector<Monomial> terms_;
};

class PolySystem {
public:
    explicit PolySystem(std::vector<SparsePoly> comps);

    // F(x) - j as a one-component system.
    static PolySystem equation(const DiagonalForm& f, std::int64_t j);

    int nvars() const { return nvars_; }
    int size() const { return int(comps_.size()); }
    const SparsePoly& component(int i) const { return comps_[i]; }

    Vec eval(const Modulus& mod, std::span<const std::int64_t> y) const;

    // m x n Jacobian evaluated at y, entries mod p.
    std::vector<Vec> jacobian_mod_p(std::int64_t p, std::span<const std::int64_t> y) const;

private:
    int nvars_;
    std::vector<SparsePoly> comps_;
    std::vector<std::vector<SparsePoly>> jac_;
};

int jacobian_rank_mod_p(const PolySystem& sys, std::span<const std::int64_t> y, std::int64_t p);

// Solutions of A z = b over F_p as particular + kernel basis.
struct LinearSolutions {
    bool consistent = false;
    Vec particular;
    std::vector<Vec> kernel;
    int rank = 0;
};

LinearSolutions solve_linear_mod_p(const std::vector<Vec>& rows, std::span<const std::int64_t> rhs,
                                   std::int64_t p);

struct LiftResult {
    std::uint64_t count = 0;
    std::vector<Vec> points;  // the z offsets mod p^k (enumerate mode only)
    int jacobian_rank = 0;
};

// mode enumerate=false only counts leaves.
LiftResult lift(const PolySystem& sys, std::int64_t p, std::span<const std::int64_t> y, int l,
                int k, bool enumerate = true);

// Streams the lifted points y + p^l z (mod p^{l+k}) without materializing.
void lift_visit(const PolySystem& sys, std::int64_t p, std::span<const std::int64_t> y, int l,
                int k, const std::function<void(std::span<const std::int64_t>)>& emit);

// All roots of the system in (Z/p^rZ)^n: exhaustive search mod p, then lift.
PointSet solve_system(const PolySystem& sys, const Modulus& mod);

}  // namespace padic
