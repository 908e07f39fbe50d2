#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "merodim/family.hpp"
#include "merodim/types.hpp"

namespace merodim {

// Axis-aligned closed rectangle [x0, x1] x [y0, y1].
struct Rect {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;

    Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diameter() const;
    bool contains(Complex z, double margin = 0.0) const;
    // Distance from z to the boundary curve.
    double boundary_distance(Complex z) const;
};

// One solution z_n(a) of f(z) = a.
struct Preimage {
    Complex point;
    Complex target;
    double residual = 0.0;
    double modulus = 0.0;
};

// N(r) = #{n : |z_n(a)| <= r}.
struct CountingSample {
    double radius = 0.0;
    std::size_t count = 0;
};

struct SolverOptions {
    double leaf_diameter = 0.1;
    double newton_tolerance = 1e-12;
    double boundary_clearance = 1e-6;
    int max_retries = 5;
    std::uint64_t seed = 42;
    unsigned threads = 1;
};

// Number of solutions of f(z) = a inside rect, counted with multiplicity:
// the winding number of f - a along the boundary plus the catalogued poles
// inside. Throws BoundaryCollision when a pole or a solution lies within
// clearance of the boundary, QuadratureNotConverged when the winding
// estimate does not settle within 0.25 of an integer.
int count_zeros_in_rectangle(const FamilySpec& f, Complex a, const Rect& rect, double clearance = 1e-6);

struct PreimageSearch {
    std::vector<Preimage> preimages;
    // Argument-principle count on the enclosing region.
    int enclosing_count = 0;
    // Sum of the counts of the leaf cells that produced roots.
    int leaf_count_sum = 0;
    std::size_t cells_examined = 0;
    // Subdivision retries caused by boundary collisions or count mismatches.
    std::size_t retries = 0;
};

// All solutions inside rect (no radius filter), sorted by modulus then
// argument. enclosing_count == leaf_count_sum == preimages.size() on return.
PreimageSearch find_preimages_in_rect(const FamilySpec& f, Complex a, const Rect& rect,
                                      const SolverOptions& options = {});

// All solutions with |z| <= radius, with the certificate of the enclosing
// square search (whose enclosing_count may exceed preimages.size()).
PreimageSearch search_preimages(const FamilySpec& f, Complex a, double radius, const SolverOptions& options = {});

std::vector<Preimage> find_preimages(const FamilySpec& f, Complex a, double radius, const SolverOptions& options = {});

std::vector<CountingSample> counting_function(std::span<const Preimage> preimages, std::span<const double> radii);

// Least-squares slope of log N(r) against log r over the upper half of the
// samples with N(r) >= 1.
double estimate_order_of_growth(std::span<const CountingSample> samples);

void write_preimages_csv(std::ostream& os, std::span<const Preimage> preimages);

} // namespace merodim
