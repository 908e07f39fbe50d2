#pragma once

#include <vector>

#include "merodim/types.hpp"

namespace merodim {

// Complex polynomial, coefficients lowest degree first. The leading
// coefficient is nonzero, so degree() == coefficients().size() - 1.
class Polynomial {
public:
    explicit Polynomial(std::vector<Complex> coefficients);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coefficients() const { return coeffs_; }

    Complex operator()(Complex z) const;
    Jet jet(Complex z) const;
    Polynomial derivative() const;

    // Same polynomial minus a constant.
    Polynomial shifted(Complex c) const;

    // All complex roots with multiplicity (Aberth-Ehrlich iteration followed
    // by a Newton polish). Empty for constant polynomials.
    std::vector<Complex> roots() const;

    // Bound on max |p(z) - p(center)| over |z - center| <= radius.
    double variation_bound(Complex center, double radius) const;

private:
    std::vector<Complex> coeffs_;
};

} // namespace merodim
