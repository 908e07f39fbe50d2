#include "merodim/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "merodim/complex_io.hpp"
#include "merodim/regression.hpp"

namespace merodim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// z^n by repeated squaring, n >= 0.
Complex ipow(Complex z, int n)
{
    Complex result{1.0, 0.0};
    Complex base = z;
    while (n > 0) {
        if (n & 1) {
            result *= base;
        }
        base *= base;
        n >>= 1;
    }
    return result;
}

// Tan poles sit at (k + 1/2) pi.
double tan_pole_offset(Complex z, double& pole)
{
    const double k = std::round((z.real() - 0.5 * pi) / pi);
    pole = (k + 0.5) * pi;
    return std::abs(z - pole);
}

// k-th Taylor coefficient of p at b.
Complex taylor_coefficient(const Polynomial& p, Complex b, int k)
{
    const auto& c = p.coefficients();
    Complex acc{};
    for (std::size_t j = c.size(); j-- > static_cast<std::size_t>(k);) {
        double binom = 1.0;
        for (int i = 0; i < k; ++i) {
            binom *= static_cast<double>(j - i) / static_cast<double>(i + 1);
        }
        acc = acc * b;
        acc += binom * c[j];
    }
    // The loop above evaluates sum_j binom(j,k) c_j b^(j-k) by Horner.
    return acc;
}

// Group roots that coincide to within tol; returns (mean location, count).
std::vector<std::pair<Complex, int>> cluster_roots(const std::vector<Complex>& roots, double tol)
{
    std::vector<std::pair<Complex, int>> groups;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) {
            continue;
        }
        Complex sum = roots[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < tol * std::max(1.0, std::abs(roots[i]))) {
                used[j] = true;
                sum += roots[j];
                ++count;
            }
        }
        groups.emplace_back(sum / static_cast<double>(count), count);
    }
    return groups;
}

// Points z with |z - center| <= radius and P(z) in shift + lattice.
std::vector<std::pair<Complex, int>> poly_preimages_of_lattice(const Polynomial& poly, const Lattice& lattice,
                                                               Complex shift, Complex center, double radius)
{
    const double reach = poly.variation_bound(center, radius);
    std::vector<std::pair<Complex, int>> out;
    for (const Complex omega : lattice.points_in_disk(poly(center) - shift, reach)) {
        const auto roots = poly.shifted(omega + shift).roots();
        for (const auto& [z, mult] : cluster_roots(roots, 1e-7)) {
            if (std::abs(z - center) <= radius) {
                out.emplace_back(z, mult);
            }
        }
    }
    return out;
}

void sort_poles(std::vector<PoleData>& poles)
{
    std::sort(poles.begin(), poles.end(),
              [](const PoleData& a, const PoleData& b) { return modulus_then_arg_less(a.location, b.location); });
}

std::string lattice_label(const Lattice& l)
{
    return "omega1=" + format_complex(l.omega1(), 6) + ",omega2=" + format_complex(l.omega2(), 6);
}

} // namespace

FamilySpec::FamilySpec(Variant v) : variant_(std::move(v)) {}

FamilySpec FamilySpec::tan_power(Complex lambda, int m)
{
    if (m < 1) {
        throw std::invalid_argument("tan family: m must be a positive integer");
    }
    if (lambda == Complex{}) {
        throw std::invalid_argument("tan family: lambda must be nonzero");
    }
    FamilySpec f(TanPower{lambda, m});
    f.order_ = 1.0;
    f.alpha1_ = 0.0;
    f.max_pole_multiplicity_ = m;
    return f;
}

FamilySpec FamilySpec::weierstrass(Lattice lattice)
{
    FamilySpec f(WeierstrassP{std::move(lattice)});
    f.order_ = 2.0;
    f.alpha1_ = 0.0;
    f.max_pole_multiplicity_ = 2;
    return f;
}

FamilySpec FamilySpec::elliptic_compose_poly(Lattice lattice, Polynomial poly)
{
    const int d = poly.degree();
    if (d < 1) {
        throw std::invalid_argument("elliptic-poly family: polynomial degree must be at least 1");
    }
    FamilySpec f(EllipticComposePoly{std::move(lattice), std::move(poly)});
    f.order_ = 2.0 * d;
    f.alpha1_ = d - 1.0;
    f.max_pole_multiplicity_ = 2;
    return f;
}

FamilySpec FamilySpec::exp_elliptic(Complex lambda, int d, Lattice lattice)
{
    if (d < 1) {
        throw std::invalid_argument("exp-elliptic family: d must be a positive integer");
    }
    if (lambda == Complex{}) {
        throw std::invalid_argument("exp-elliptic family: lambda must be nonzero");
    }
    auto zeros = lattice.solve_wp(Complex(-static_cast<double>(d), 0.0));
    FamilySpec f(ExpElliptic{lambda, d, std::move(lattice), std::move(zeros)});
    f.order_ = 2.0;
    f.alpha1_ = 0.0;
    f.max_pole_multiplicity_ = 2 * d;
    return f;
}

FamilySpec FamilySpec::with_pole_exclusion_radius(double radius) const
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("pole exclusion radius must be positive");
    }
    FamilySpec out = *this;
    out.pole_exclusion_ = radius;
    return out;
}

std::string FamilySpec::kind() const
{
    return std::visit(overloaded{
                          [](const TanPower&) { return std::string("tan"); },
                          [](const WeierstrassP&) { return std::string("weierstrass"); },
                          [](const EllipticComposePoly&) { return std::string("elliptic-poly"); },
                          [](const ExpElliptic&) { return std::string("exp-elliptic"); },
                      },
                      variant_);
}

std::string FamilySpec::label() const
{
    return std::visit(
        overloaded{
            [](const TanPower& v) {
                return "tan(lambda=" + format_complex(v.lambda, 6) + ",m=" + std::to_string(v.m) + ")";
            },
            [](const WeierstrassP& v) { return "weierstrass(" + lattice_label(v.lattice) + ")"; },
            [](const EllipticComposePoly& v) {
                std::string s = "elliptic-poly(" + lattice_label(v.lattice) + ",poly=";
                const auto& c = v.poly.coefficients();
                for (std::size_t k = 0; k < c.size(); ++k) {
                    s += (k ? ";" : "") + format_complex(c[k], 6);
                }
                return s + ")";
            },
            [](const ExpElliptic& v) {
                return "exp-elliptic(lambda=" + format_complex(v.lambda, 6) + ",d=" + std::to_string(v.d) + ","
                       + lattice_label(v.lattice) + ")";
            },
        },
        variant_);
}

std::optional<Jet> jet(const FamilySpec& f, Complex z)
{
    const double excl = f.pole_exclusion_radius();
    return std::visit(
        overloaded{
            [&](const TanPower& v) -> std::optional<Jet> {
                double pole = 0.0;
                if (tan_pole_offset(z, pole) < excl) {
                    return std::nullopt;
                }
                const Complex t = std::tan(z);
                const Complex tm1 = ipow(t, v.m - 1);
                return Jet{v.lambda * tm1 * t, v.lambda * static_cast<double>(v.m) * tm1 * (1.0 + t * t)};
            },
            [&](const WeierstrassP& v) { return v.lattice.wp(z, excl); },
            [&](const EllipticComposePoly& v) -> std::optional<Jet> {
                const Jet p = v.poly.jet(z);
                const Complex offset = p.value - v.lattice.nearest_point(p.value);
                const double dist = std::abs(p.deriv) > 0.0 ? std::abs(offset) / std::abs(p.deriv) : std::abs(offset);
                if (offset == Complex{} || dist < excl) {
                    return std::nullopt;
                }
                const auto w = v.lattice.wp(p.value, 0.0);
                if (!w) {
                    return std::nullopt;
                }
                return Jet{w->value, w->deriv * p.deriv};
            },
            [&](const ExpElliptic& v) -> std::optional<Jet> {
                const auto w = v.lattice.wp(z, excl);
                if (!w) {
                    return std::nullopt;
                }
                const double d = v.d;
                const Complex base = 1.0 + w->value / d;
                const Complex pm1 = ipow(base, v.d - 1);
                return Jet{v.lambda * pm1 * base, v.lambda * pm1 * w->deriv};
            },
        },
        f.variant());
}

EvalResult eval(const FamilySpec& f, Complex z)
{
    const auto j = jet(f, z);
    return j ? EvalResult::finite(j->value) : EvalResult::pole();
}

EvalResult deriv(const FamilySpec& f, Complex z)
{
    const auto j = jet(f, z);
    return j ? EvalResult::finite(j->deriv) : EvalResult::pole();
}

std::vector<PoleData> poles_in_disk(const FamilySpec& f, double radius)
{
    return poles_in_disk(f, Complex{}, radius);
}

std::vector<PoleData> poles_in_disk(const FamilySpec& f, Complex center, double radius)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("poles_in_disk: radius must be positive");
    }
    std::vector<PoleData> poles;
    std::visit(overloaded{
                   [&](const TanPower& v) {
                       const double sign = (v.m % 2 == 0) ? 1.0 : -1.0;
                       const auto kmin = static_cast<long>(std::floor((center.real() - radius) / pi - 0.5));
                       const auto kmax = static_cast<long>(std::ceil((center.real() + radius) / pi - 0.5));
                       for (long k = kmin; k <= kmax; ++k) {
                           const Complex b{(static_cast<double>(k) + 0.5) * pi, 0.0};
                           if (std::abs(b - center) <= radius) {
                               poles.push_back({b, v.m, sign * v.lambda});
                           }
                       }
                   },
                   [&](const WeierstrassP& v) {
                       for (const Complex b : v.lattice.points_in_disk(center, radius)) {
                           poles.push_back({b, 2, Complex{1.0, 0.0}});
                       }
                   },
                   [&](const EllipticComposePoly& v) {
                       for (const auto& [b, k] :
                            poly_preimages_of_lattice(v.poly, v.lattice, Complex{}, center, radius)) {
                           const Complex a = taylor_coefficient(v.poly, b, k);
                           poles.push_back({b, 2 * k, 1.0 / (a * a)});
                       }
                   },
                   [&](const ExpElliptic& v) {
                       const Complex lc = v.lambda / std::pow(static_cast<double>(v.d), v.d);
                       for (const Complex b : v.lattice.points_in_disk(center, radius)) {
                           poles.push_back({b, 2 * v.d, lc});
                       }
                   },
               },
               f.variant());
    sort_poles(poles);
    return poles;
}

double distance_to_nearest_pole(const FamilySpec& f, Complex z)
{
    return std::visit(overloaded{
                          [&](const TanPower&) {
                              double pole = 0.0;
                              return tan_pole_offset(z, pole);
                          },
                          [&](const WeierstrassP& v) { return std::abs(z - v.lattice.nearest_point(z)); },
                          [&](const EllipticComposePoly& v) {
                              const Jet p = v.poly.jet(z);
                              const double off = std::abs(p.value - v.lattice.nearest_point(p.value));
                              if (std::abs(p.deriv) == 0.0) {
                                  return off == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
                              }
                              return off / std::abs(p.deriv);
                          },
                          [&](const ExpElliptic& v) { return std::abs(z - v.lattice.nearest_point(z)); },
                      },
                      f.variant());
}

std::vector<Complex> critical_points_in_disk(const FamilySpec& f, Complex center, double radius)
{
    std::vector<Complex> out;
    const auto add_lattice_class = [&](const Lattice& lattice, Complex rep) {
        for (const Complex p : lattice.points_in_disk(center - rep, radius)) {
            out.push_back(p + rep);
        }
    };
    std::visit(overloaded{
                   [&](const TanPower& v) {
                       if (v.m < 2) {
                           return;
                       }
                       const auto kmin = static_cast<long>(std::floor((center.real() - radius) / pi));
                       const auto kmax = static_cast<long>(std::ceil((center.real() + radius) / pi));
                       for (long k = kmin; k <= kmax; ++k) {
                           const Complex c{static_cast<double>(k) * pi, 0.0};
                           if (std::abs(c - center) <= radius) {
                               out.push_back(c);
                           }
                       }
                   },
                   [&](const WeierstrassP& v) {
                       for (const Complex h : v.lattice.half_periods()) {
                           add_lattice_class(v.lattice, h);
                       }
                   },
                   [&](const EllipticComposePoly& v) {
                       if (v.poly.degree() >= 2) {
                           for (const Complex c : v.poly.derivative().roots()) {
                               if (std::abs(c - center) <= radius) {
                                   out.push_back(c);
                               }
                           }
                       }
                       for (const Complex h : v.lattice.half_periods()) {
                           for (const auto& [z, k] : poly_preimages_of_lattice(v.poly, v.lattice, h, center, radius)) {
                               out.push_back(z);
                           }
                       }
                   },
                   [&](const ExpElliptic& v) {
                       for (const Complex h : v.lattice.half_periods()) {
                           add_lattice_class(v.lattice, h);
                       }
                       if (v.d >= 2) {
                           for (const Complex u : v.zero_representatives) {
                               add_lattice_class(v.lattice, u);
                           }
                       }
                   },
               },
               f.variant());
    std::sort(out.begin(), out.end(), modulus_then_arg_less);
    return out;
}

std::vector<Complex> singular_values(const FamilySpec& f)
{
    std::vector<Complex> out;
    std::visit(overloaded{
                   [&](const TanPower& v) {
                       out.push_back(v.lambda * ipow(Complex{0.0, 1.0}, v.m));
                       out.push_back(v.lambda * ipow(Complex{0.0, -1.0}, v.m));
                       if (v.m >= 2) {
                           out.emplace_back(0.0, 0.0);
                       }
                   },
                   [&](const WeierstrassP& v) {
                       for (const Complex e : v.lattice.half_period_values()) {
                           out.push_back(e);
                       }
                   },
                   [&](const EllipticComposePoly& v) {
                       for (const Complex e : v.lattice.half_period_values()) {
                           out.push_back(e);
                       }
                       if (v.poly.degree() >= 2) {
                           for (const Complex c : v.poly.derivative().roots()) {
                               if (const auto w = v.lattice.wp(v.poly(c))) {
                                   out.push_back(w->value);
                               }
                           }
                       }
                   },
                   [&](const ExpElliptic& v) {
                       const double d = v.d;
                       for (const Complex e : v.lattice.half_period_values()) {
                           out.push_back(v.lambda * ipow(1.0 + e / d, v.d));
                       }
                       if (v.d >= 2) {
                           out.emplace_back(0.0, 0.0);
                       }
                   },
               },
               f.variant());
    return out;
}

double near_pole_scaling_exponent(const FamilySpec& f, const PoleData& pole, int samples)
{
    if (samples < 10) {
        throw std::invalid_argument("near_pole_scaling_exponent: need at least 10 samples");
    }
    const Complex direction = std::polar(1.0, 0.3);
    std::vector<double> log_f;
    std::vector<double> log_df;
    log_f.reserve(samples);
    log_df.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double eps = std::pow(10.0, -6.0 + 4.0 * k / (samples - 1));
        const Complex z = pole.location + eps * direction;
        // Another pole closer than the sampled one means the samples no
        // longer see the local form around this pole.
        if (distance_to_nearest_pole(f, z) < 0.5 * eps) {
            throw AtPoleError("near_pole_scaling_exponent: sample collides with another pole");
        }
        const auto j = jet(f, z);
        if (!j) {
            throw AtPoleError("near_pole_scaling_exponent: sample landed on a pole");
        }
        log_f.push_back(std::log(std::abs(j->value)));
        log_df.push_back(std::log(std::abs(j->deriv)));
    }
    return fit_line(log_f, log_df).slope;
}

} // namespace merodim
