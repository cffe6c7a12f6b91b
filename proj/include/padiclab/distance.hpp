#pragma once

// The distance workbench: censuses N_{r,j} = #{(x,y) in E1 x E2 : F(x-y) = j},
// the main-term/error split against the sphere spectrum, pinned distance
// sets, point-sphere incidences, configuration counts (rectangles, cycles,
// chains, pinned trees), fiber and projection diagnostics, the two sharp
// example families, and the density threshold experiment.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padiclab/ring.hpp"
#include "padiclab/spectral.hpp"
#include "padiclab/varieties.hpp"

namespace padic {

struct DistanceCensus {
    Modulus mod;
    std::vector<std::uint64_t> counts;  // counts[j] = N_{r,j}
    std::uint64_t pairs = 0;            // |E1| |E2|
    std::uint64_t size1 = 0, size2 = 0;
    std::uint64_t domain = 1;  // q^n

    std::vector<std::int64_t> support() const;
    std::uint64_t units_covered() const;  // #{unit j : counts[j] > 0}
    // delta_{E1,E2} = sqrt(|E1||E2|) / q^n
    double density() const;
};

enum class CensusPath { Loop, Convolution };

DistanceCensus distance_census(const DiagonalForm& f, const PointSet& e1, const PointSet& e2,
                               CensusPath path);

// N_{r,j} for the radius carried by the sphere, probing x - d over sphere
// points d; exact and cheaper than a full census when |S_j| < |E2|.
std::uint64_t distance_count_at(const DiagonalForm& f, const PointSet& e1, const PointSet& e2,
                                const PointSet& sphere);

struct ErrorDecomposition {
    std::uint64_t count = 0;       // N_{r,j}
    __int128 main_num = 0;         // M = |E1||E2||S_{r,j}| / q^n, reduced
    std::int64_t main_den = 1;
    double main_term = 0;
    double error = 0;              // N - M
    double bound = 0;              // max{c2,c3} sqrt(|E1||E2|) q^{n-1} p^{-(n-1)/2}
    bool within = false;
    double c2 = 0, c3 = 0;
};

ErrorDecomposition error_decomposition(const DiagonalForm& f, const PointSet& e1,
                                       const PointSet& e2, std::int64_t j,
                                       const BoundProfile& profile);
ErrorDecomposition error_decomposition(const DiagonalForm& f, const PointSet& e1,
                                       const PointSet& e2, std::int64_t j);

struct PinnedDistances {
    std::vector<std::int64_t> values;  // sorted distinct F(x - y), y in E
    std::uint64_t unit_count = 0;      // values coprime to p
};

PinnedDistances pinned_distance_set(const DiagonalForm& f, const PointSet& e,
                                    std::span<const std::int64_t> x);

struct SphereInstance {
    Vec center;
    std::int64_t radius = 0;
};

struct IncidenceReport {
    std::uint64_t incidences = 0;
    double mean_term = 0;    // |P| |S| / q
    double excess = 0;       // I - mean
    double coefficient = 0;  // excess / (q^{n-1/2} p^{-(n-1)/2} sqrt(|P||S|))
};

IncidenceReport incidences(const DiagonalForm& f, const PointSet& pts,
                           std::span<const SphereInstance> spheres);

// Ordered tuples (u1, u2, v1, v2) with the four mixed pairs in E and
// F(u1-u2) = F(v1-v2) = j; E has arity 2n.
std::uint64_t count_rectangles(const DiagonalForm& f, const PointSet& e, std::int64_t j);
std::uint64_t count_rectangles_oracle(const DiagonalForm& f, const PointSet& e, std::int64_t j);

// Ordered 4-cycles (u1, u2, u3, u4) with F(u_i - u_{i+1}) = j cyclically.
std::uint64_t count_cycles4(const DiagonalForm& f, const PointSet& e, std::int64_t j,
                            bool distinct);
std::uint64_t count_cycles4_oracle(const DiagonalForm& f, const PointSet& e, std::int64_t j,
                                   bool distinct);

// Ordered chains (u_1, ..., u_{k+1}) with F(u_i - u_{i+1}) = j.
std::uint64_t count_chains(const DiagonalForm& f, const PointSet& e, std::int64_t j, int k);
std::uint64_t count_chains_oracle(const DiagonalForm& f, const PointSet& e, std::int64_t j, int k);

struct TreeShape {
    int vertices = 0;                        // k + 1
    std::vector<std::pair<int, int>> edges;  // canonical (min, max), sorted
    int pin = 0;

    static TreeShape star(int k);
    static TreeShape path(int k);
    static TreeShape make(int vertices, std::vector<std::pair<int, int>> edges, int pin);
};

struct PinnedTreeCount {
    std::uint64_t embeddings = 0;        // maps V(T) -> E with the pin at x
    std::uint64_t distinct_vectors = 0;  // distinct edge-length vectors
};

PinnedTreeCount count_pinned_trees(const DiagonalForm& f, const PointSet& e,
                                   const TreeShape& shape, std::span<const std::int64_t> x);

struct FiberReport {
    std::uint64_t pair_count = 0;  // #{(x1,x2) in E^2 : x1 = x2 (mod p)}
    std::uint64_t max_fiber = 0;   // largest single mod-p class
    double threshold = 0;          // p^{2r - 7/3} |E|
    bool satisfied = false;
};

FiberReport fiber_condition(const PointSet& e);

struct ProjectionDensity {
    int gamma = 0;
    std::vector<std::uint64_t> counts;  // per class in (Z/p^gamma)^2
    std::uint64_t denominator = 1;      // p^{2(r-gamma)}
    double max_density = 0;
};

ProjectionDensity projection_density(const PointSet& e, int gamma);

struct SharpnessSet {
    PointSet set;
    DiagonalForm form;
    std::int64_t parameter = 0;     // xi (odd family) or theta encoded (even family)
    std::uint64_t claimed_bound = 0;
};

// Odd arity n, x_1 in {1..l} and (n-1)/2 blocks (u, xi u) with xi^k = -1,
// lifted by p * (Z/p^{r-1})^n; distance set smaller than 2 l p^{r-1}.
SharpnessSet sharpness_example_odd(std::int64_t p, int n, int k, int l, int r);

// Even arity n; subgroup-orbit or isotropic-plane construction, lifted the
// same way; distance set at most p^{r-1}(p+1)/C.
SharpnessSet sharpness_example_even(std::int64_t p, int n, std::int64_t c, int r);

// E sampled by independent inclusion with probability delta.
PointSet random_subset(const Modulus& mod, int n, double delta, std::uint64_t seed);

struct ThresholdRow {
    double density = 0;
    double mean_size = 0;
    double mean_distinct_over_q = 0;
    double min_unit_coverage = 0;  // min over trials of |Delta cap U_r| / |U_r|
    bool always_covers_units = false;
};

std::vector<ThresholdRow> threshold_experiment(const DiagonalForm& f, const Modulus& mod, int n,
                                               std::span<const double> densities, int trials,
                                               std::uint64_t seed);

std::string rational_to_string(__int128 num, std::int64_t den);

}  // namespace padic
