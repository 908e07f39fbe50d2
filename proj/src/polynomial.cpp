#include "merodim/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace merodim {

Polynomial::Polynomial(std::vector<Complex> coefficients) : coeffs_(std::move(coefficients))
{
    if (coeffs_.empty()) {
        throw std::invalid_argument("polynomial needs at least one coefficient");
    }
    if (coeffs_.back() == Complex{}) {
        throw std::invalid_argument("polynomial leading coefficient must be nonzero");
    }
}

Complex Polynomial::operator()(Complex z) const
{
    Complex acc{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

Jet Polynomial::jet(Complex z) const
{
    Complex p{};
    Complex dp{};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    return {p, dp};
}

Polynomial Polynomial::derivative() const
{
    if (coeffs_.size() == 1) {
        throw std::logic_error("derivative of a constant polynomial is not representable");
    }
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
        d[k - 1] = static_cast<double>(k) * coeffs_[k];
    }
    return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(Complex c) const
{
    auto out = coeffs_;
    out[0] -= c;
    return Polynomial(std::move(out));
}

std::vector<Complex> Polynomial::roots() const
{
    const int n = degree();
    if (n < 1) {
        return {};
    }
    const Complex lead = coeffs_.back();

    // Initial guesses on a circle of the Cauchy-bound radius, rotated off
    // the real axis.
    double cauchy = 0.0;
    for (int k = 0; k < n; ++k) {
        cauchy = std::max(cauchy, std::abs(coeffs_[k] / lead));
    }
    const double radius = 0.5 * (1.0 + cauchy);
    std::vector<Complex> z(n);
    for (int k = 0; k < n; ++k) {
        z[k] = std::polar(radius, 2.0 * pi * k / n + 0.4);
    }

    for (int iter = 0; iter < 500; ++iter) {
        double max_step = 0.0;
        for (int k = 0; k < n; ++k) {
            const Jet j = jet(z[k]);
            if (j.value == Complex{}) {
                continue;
            }
            const Complex ratio = j.value / j.deriv;
            Complex repulsion{};
            for (int i = 0; i < n; ++i) {
                if (i != k) {
                    repulsion += 1.0 / (z[k] - z[i]);
                }
            }
            const Complex step = ratio / (1.0 - ratio * repulsion);
            if (std::isfinite(step.real()) && std::isfinite(step.imag())) {
                z[k] -= step;
                max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
            }
        }
        if (max_step < 1e-15) {
            break;
        }
    }

    // Newton polish against the undeflated polynomial.
    for (auto& r : z) {
        for (int it = 0; it < 3; ++it) {
            const Jet j = jet(r);
            if (j.deriv == Complex{} || j.value == Complex{}) {
                break;
            }
            const Complex step = j.value / j.deriv;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                break;
            }
            r -= step;
        }
    }
    std::sort(z.begin(), z.end(), modulus_then_arg_less);
    return z;
}

double Polynomial::variation_bound(Complex center, double radius) const
{
    // Taylor coefficients at center via repeated synthetic division.
    std::vector<Complex> c = coeffs_;
    const int n = degree();
    double bound = 0.0;
    double rk = 1.0;
    for (int k = 0; k <= n; ++k) {
        // c now holds coefficients of p(x) after k divisions; its value at
        // center is the k-th Taylor coefficient.
        Complex acc{};
        std::vector<Complex> q(c.size() > 1 ? c.size() - 1 : 0);
        for (std::size_t i = c.size(); i-- > 0;) {
            acc = acc * center + c[i];
            if (i > 0) {
                q[i - 1] = acc;
            }
        }
        if (k > 0) {
            bound += std::abs(acc) * rk;
        }
        rk *= radius;
        c = std::move(q);
        if (c.empty()) {
            break;
        }
    }
    return bound;
}

} // namespace merodim
