#pragma once

#include <array>
#include <optional>
#include <vector>

#include "merodim/types.hpp"

namespace merodim {

// A period lattice omega1*Z + omega2*Z together with its invariants g2, g3.
//
// The generators are stored with Im(omega1/omega2) > 0; a pair given in the
// other orientation spans the same lattice and is swapped on construction.
//
// Evaluation of the Weierstrass function goes through a reduced basis
// (e1, e2) with tau = e2/e1 in the modular fundamental domain, so the
// nome q = exp(2 pi i tau) satisfies |q| <= exp(-pi sqrt 3) and the
// q-expansions below converge in a handful of terms.
class Lattice {
public:
    Lattice(Complex omega1, Complex omega2);

    // omega1 = 1, omega2 = i (stored as omega1 = i, omega2 = 1).
    static Lattice square();

    Complex omega1() const { return omega1_; }
    Complex omega2() const { return omega2_; }
    Complex g2() const { return g2_; }
    Complex g3() const { return g3_; }

    // Area of a fundamental parallelogram.
    double area() const { return area_; }

    // Length of the shortest nonzero lattice vector.
    double min_period() const { return std::abs(e1_); }

    Complex nearest_point(Complex z) const;

    // Lattice points in the closed disk, in no particular order.
    std::vector<Complex> points_in_disk(Complex center, double radius) const;

    // The three half periods e1/2, e2/2, (e1+e2)/2 of the reduced basis.
    std::array<Complex, 3> half_periods() const;

    // The values e_k = wp(half period k).
    std::array<Complex, 3> half_period_values() const;

    // wp and wp' at z; empty when z is within pole_exclusion of a lattice
    // point. Throws SeriesNotConverged if the q-series fails to converge.
    std::optional<Jet> wp(Complex z, double pole_exclusion = 1e-12) const;

    // Representatives (modulo the lattice) of the solutions of wp(u) = c.
    // Generically two points; a single point when c is a half-period value.
    std::vector<Complex> solve_wp(Complex c) const;

private:
    Complex omega1_;
    Complex omega2_;
    Complex e1_;
    Complex e2_;
    Complex tau_;
    Complex q_;
    Complex constant_term_;
    Complex g2_;
    Complex g3_;
    double area_ = 0.0;

    // Coordinates (a, b) of z = a*e1 + b*e2.
    std::pair<double, double> coordinates(Complex z) const;
};

} // namespace merodim
