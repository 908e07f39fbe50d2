#include "merodim/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace merodim {

namespace {

constexpr Complex two_pi_i{0.0, 2.0 * pi};
constexpr int max_series_terms = 200;
constexpr double series_tolerance = 1e-18;

// exp(x) - 1 without cancellation for small |x|.
Complex expm1_complex(Complex x)
{
    const double re = std::expm1(x.real()) * std::cos(x.imag())
                      - 2.0 * std::sin(0.5 * x.imag()) * std::sin(0.5 * x.imag());
    const double im = std::exp(x.real()) * std::sin(x.imag());
    return {re, im};
}

} // namespace

Lattice::Lattice(Complex omega1, Complex omega2) : omega1_(omega1), omega2_(omega2)
{
    if (!std::isfinite(omega1.real()) || !std::isfinite(omega1.imag())
        || !std::isfinite(omega2.real()) || !std::isfinite(omega2.imag())) {
        throw std::invalid_argument("lattice generators must be finite");
    }
    if (omega2_ == Complex{} || std::abs((omega1_ / omega2_).imag()) < 1e-12) {
        throw std::invalid_argument("lattice generators are linearly dependent over R");
    }
    if ((omega1_ / omega2_).imag() < 0.0) {
        std::swap(omega1_, omega2_);
    }
    area_ = std::abs((std::conj(omega1_) * omega2_).imag());

    // Lagrange-Gauss reduction.
    Complex a = omega1_;
    Complex b = omega2_;
    if (std::abs(a) > std::abs(b)) {
        std::swap(a, b);
    }
    for (int guard = 0; guard < 1000; ++guard) {
        const double mu = std::round((b * std::conj(a)).real() / std::norm(a));
        b -= mu * a;
        if (std::abs(b) < std::abs(a)) {
            std::swap(a, b);
        } else {
            break;
        }
    }
    if ((b / a).imag() < 0.0) {
        b = -b;
    }
    e1_ = a;
    e2_ = b;
    tau_ = e2_ / e1_;
    q_ = std::exp(two_pi_i * tau_);

    Complex c_sum{};
    Complex e4_sum{};
    Complex e6_sum{};
    Complex qn = q_;
    for (int n = 1; n <= max_series_terms; ++n) {
        const Complex one_minus = 1.0 - qn;
        const double nd = n;
        c_sum += qn / (one_minus * one_minus);
        e4_sum += nd * nd * nd * qn / one_minus;
        e6_sum += nd * nd * nd * nd * nd * qn / one_minus;
        if (std::abs(qn) * nd * nd * nd * nd * nd < series_tolerance) {
            break;
        }
        qn *= q_;
    }
    constant_term_ = 1.0 / 12.0 - 2.0 * c_sum;

    const Complex e4 = 1.0 + 240.0 * e4_sum;
    const Complex e6 = 1.0 - 504.0 * e6_sum;
    const double pi4 = pi * pi * pi * pi;
    const double pi6 = pi4 * pi * pi;
    const Complex e1_2 = e1_ * e1_;
    g2_ = (4.0 * pi4 / 3.0) * e4 / (e1_2 * e1_2);
    g3_ = (8.0 * pi6 / 27.0) * e6 / (e1_2 * e1_2 * e1_2);
}

Lattice Lattice::square()
{
    return Lattice(Complex{1.0, 0.0}, Complex{0.0, 1.0});
}

std::pair<double, double> Lattice::coordinates(Complex z) const
{
    const double det = (std::conj(e1_) * e2_).imag();
    const double b = (std::conj(e1_) * z).imag() / det;
    const double a = -(std::conj(e2_) * z).imag() / det;
    return {a, b};
}

Complex Lattice::nearest_point(Complex z) const
{
    const auto [a, b] = coordinates(z);
    const double ra = std::round(a);
    const double rb = std::round(b);
    Complex best{};
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            const Complex p = (ra + i) * e1_ + (rb + j) * e2_;
            const double d = std::abs(z - p);
            if (d < best_dist) {
                best_dist = d;
                best = p;
            }
        }
    }
    return best;
}

std::vector<Complex> Lattice::points_in_disk(Complex center, double radius) const
{
    const auto [a0, b0] = coordinates(center);
    const double det = (std::conj(e1_) * e2_).imag();
    const double da = radius * std::abs(e2_) / det;
    const double db = radius * std::abs(e1_) / det;
    std::vector<Complex> out;
    for (long i = static_cast<long>(std::floor(a0 - da)); i <= static_cast<long>(std::ceil(a0 + da)); ++i) {
        for (long j = static_cast<long>(std::floor(b0 - db)); j <= static_cast<long>(std::ceil(b0 + db)); ++j) {
            const Complex p = static_cast<double>(i) * e1_ + static_cast<double>(j) * e2_;
            if (std::abs(p - center) <= radius) {
                out.push_back(p);
            }
        }
    }
    return out;
}

std::array<Complex, 3> Lattice::half_periods() const
{
    return {0.5 * e1_, 0.5 * e2_, 0.5 * (e1_ + e2_)};
}

std::array<Complex, 3> Lattice::half_period_values() const
{
    std::array<Complex, 3> out{};
    const auto hp = half_periods();
    for (std::size_t k = 0; k < 3; ++k) {
        out[k] = wp(hp[k])->value;
    }
    return out;
}

std::optional<Jet> Lattice::wp(Complex z, double pole_exclusion) const
{
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw SeriesNotConverged("non-finite argument to wp");
    }
    if (std::abs(z - nearest_point(z)) < pole_exclusion) {
        return std::nullopt;
    }

    // Normalize to the lattice Z + tau Z and reduce into the centered
    // parallelogram, so the only near-singular term is the n = 0 one.
    Complex u = z / e1_;
    const double b = std::round(u.imag() / tau_.imag());
    u -= b * tau_;
    u -= std::round(u.real());

    const Complex em = expm1_complex(two_pi_i * u);
    const Complex w = 1.0 + em;
    Complex sum = w / (em * em);
    Complex dsum = -w * (1.0 + w) / (em * em * em);

    const Complex winv = 1.0 / w;
    const double wscale = std::max(std::abs(w), std::abs(winv));
    Complex qn = q_;
    bool converged = false;
    for (int n = 1; n <= max_series_terms; ++n) {
        const Complex a = qn * w;
        const Complex c = qn * winv;
        const Complex oa = 1.0 - a;
        const Complex oc = 1.0 - c;
        sum += a / (oa * oa) + c / (oc * oc);
        dsum += a * (1.0 + a) / (oa * oa * oa) - c * (1.0 + c) / (oc * oc * oc);
        if (std::abs(qn) * wscale < series_tolerance) {
            converged = true;
            break;
        }
        qn *= q_;
    }
    if (!converged) {
        throw SeriesNotConverged("wp q-series did not converge");
    }

    const Complex value_norm = two_pi_i * two_pi_i * (sum + constant_term_);
    const Complex deriv_norm = two_pi_i * two_pi_i * two_pi_i * dsum;
    const Complex e1_2 = e1_ * e1_;
    return Jet{value_norm / e1_2, deriv_norm / (e1_2 * e1_)};
}

std::vector<Complex> Lattice::solve_wp(Complex c) const
{
    const auto hp = half_periods();
    const auto ek = half_period_values();
    for (std::size_t k = 0; k < 3; ++k) {
        if (std::abs(ek[k] - c) < 1e-12 * std::max(1.0, std::abs(c))) {
            return {hp[k]};
        }
    }

    std::vector<Complex> roots;
    const auto same_class = [this](Complex x, Complex y) {
        const Complex d = x - y;
        return std::abs(d - nearest_point(d)) < 1e-8 * std::max(1.0, std::abs(e1_));
    };
    constexpr int grid = 8;
    for (int i = 0; i < grid && roots.size() < 2; ++i) {
        for (int j = 0; j < grid && roots.size() < 2; ++j) {
            Complex u = ((i + 0.5) / grid) * e1_ + ((j + 0.5) / grid) * e2_;
            bool ok = false;
            for (int it = 0; it < 100; ++it) {
                const auto jet = wp(u);
                if (!jet || jet->deriv == Complex{}) {
                    break;
                }
                const Complex step = (jet->value - c) / jet->deriv;
                u -= step;
                u -= nearest_point(u);
                if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(e1_))) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                continue;
            }
            const auto jet = wp(u);
            if (!jet || std::abs(jet->value - c) > 1e-9 * std::max(1.0, std::abs(c))) {
                continue;
            }
            const bool seen = std::any_of(roots.begin(), roots.end(),
                                          [&](Complex r) { return same_class(r, u); });
            if (!seen) {
                roots.push_back(u);
            }
        }
    }
    return roots;
}

} // namespace merodim
