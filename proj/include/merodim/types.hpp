#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace merodim {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// Value and first derivative at one point.
struct Jet {
    Complex value;
    Complex deriv;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AtPoleError : public Error {
public:
    using Error::Error;
};

class SeriesNotConverged : public Error {
public:
    using Error::Error;
};

class BoundaryCollision : public Error {
public:
    using Error::Error;
};

class QuadratureNotConverged : public Error {
public:
    using Error::Error;
};

class NewtonDiverged : public Error {
public:
    using Error::Error;
};

class CountMismatch : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class HypothesisViolated : public Error {
public:
    using Error::Error;
};

class NotContracting : public Error {
public:
    using Error::Error;
};

class DegenerateMask : public Error {
public:
    using Error::Error;
};

// Result of evaluating a meromorphic function: a finite value, or the
// marker that the argument sits on (within the exclusion radius of) a pole.
class EvalResult {
public:
    static EvalResult finite(Complex v) { return EvalResult(v); }
    static EvalResult pole() { return EvalResult(); }

    bool at_pole() const { return !value_.has_value(); }
    explicit operator bool() const { return value_.has_value(); }

    Complex value() const
    {
        if (!value_) {
            throw AtPoleError("evaluation at a pole");
        }
        return *value_;
    }

private:
    EvalResult() = default;
    explicit EvalResult(Complex v) : value_(v) {}

    std::optional<Complex> value_;
};

// Argument in [0, 2pi), used for the modulus-then-argument ordering.
inline double positive_arg(Complex z)
{
    double a = std::arg(z);
    if (a < 0.0) {
        a += 2.0 * pi;
    }
    return a;
}

// Ordering by modulus, ties broken by argument in [0, 2pi). The modulus is
// quantized so that points equal in modulus up to rounding compare by
// argument, while the comparison stays a strict weak ordering.
inline bool modulus_then_arg_less(Complex a, Complex b)
{
    const long long ka = std::llround(std::abs(a) * 1e9);
    const long long kb = std::llround(std::abs(b) * 1e9);
    if (ka != kb) {
        return ka < kb;
    }
    return positive_arg(a) < positive_arg(b);
}

} // namespace merodim
