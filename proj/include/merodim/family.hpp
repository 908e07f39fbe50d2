#pragma once

#include <string>
#include <variant>
#include <vector>

#include "merodim/polynomial.hpp"
#include "merodim/types.hpp"
#include "merodim/weierstrass.hpp"

namespace merodim {

// One pole b with local form f(z) = g(z) / (z - b)^q, g(b) = leading_coefficient.
struct PoleData {
    Complex location;
    int multiplicity = 1;
    Complex leading_coefficient;
};

// lambda * tan(z)^m
struct TanPower {
    Complex lambda;
    int m = 1;
};

struct WeierstrassP {
    Lattice lattice;
};

// wp(P(z))
struct EllipticComposePoly {
    Lattice lattice;
    Polynomial poly;
};

// lambda * (1 + wp(z)/d)^d
struct ExpElliptic {
    Complex lambda;
    int d = 1;
    Lattice lattice;
    // Solutions of wp(u) = -d modulo the lattice (zeros of the base).
    std::vector<Complex> zero_representatives;
};

class FamilySpec {
public:
    using Variant = std::variant<TanPower, WeierstrassP, EllipticComposePoly, ExpElliptic>;

    static FamilySpec tan_power(Complex lambda, int m);
    static FamilySpec weierstrass(Lattice lattice);
    static FamilySpec elliptic_compose_poly(Lattice lattice, Polynomial poly);
    static FamilySpec exp_elliptic(Complex lambda, int d, Lattice lattice);

    const Variant& variant() const { return variant_; }

    // Order of growth rho.
    double order() const { return order_; }
    // Exponent in |f'(z)| <= K |z|^alpha1 on f^{-1}(D).
    double alpha1() const { return alpha1_; }
    int max_pole_multiplicity() const { return max_pole_multiplicity_; }

    double pole_exclusion_radius() const { return pole_exclusion_; }
    FamilySpec with_pole_exclusion_radius(double radius) const;

    // Short variant name ("tan", "weierstrass", "elliptic-poly", "exp-elliptic").
    std::string kind() const;
    // Human-readable label with parameters.
    std::string label() const;

private:
    explicit FamilySpec(Variant v);

    Variant variant_;
    double order_ = 0.0;
    double alpha1_ = 0.0;
    int max_pole_multiplicity_ = 1;
    double pole_exclusion_ = 1e-12;
};

EvalResult eval(const FamilySpec& f, Complex z);
EvalResult deriv(const FamilySpec& f, Complex z);

// Value and derivative together; empty at a pole.
std::optional<Jet> jet(const FamilySpec& f, Complex z);

// Poles with |location| <= radius, sorted by modulus then argument.
std::vector<PoleData> poles_in_disk(const FamilySpec& f, double radius);
// Poles with |location - center| <= radius, same ordering (relative to 0).
std::vector<PoleData> poles_in_disk(const FamilySpec& f, Complex center, double radius);

// Distance from z to the nearest catalogued pole. For wp(P(z)) this is
// the first-order estimate |P(z) - omega| / |P'(z)|.
double distance_to_nearest_pole(const FamilySpec& f, Complex z);

// Critical points (zeros of f') in the closed disk.
std::vector<Complex> critical_points_in_disk(const FamilySpec& f, Complex center, double radius);

// Finite singular values: critical values and finite asymptotic values.
std::vector<Complex> singular_values(const FamilySpec& f);

// Least-squares slope of log|f'| against log|f| along b + eps * u with eps
// log-spaced in [1e-6, 1e-2]; close to 1 + 1/q.
double near_pole_scaling_exponent(const FamilySpec& f, const PoleData& pole, int samples);

} // namespace merodim
