#include "merodim/complex_io.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace merodim {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_real(std::string_view s, std::string_view whole)
{
    s = trim(s);
    const std::string buf(s);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(buf, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a complex number: '" + std::string(whole) + "'");
    }
    if (pos != buf.size() || !std::isfinite(v)) {
        throw std::invalid_argument("not a complex number: '" + std::string(whole) + "'");
    }
    return v;
}

// Coefficient of i: "" or "+" -> 1, "-" -> -1, otherwise a number.
double parse_imag_coefficient(std::string_view s, std::string_view whole)
{
    s = trim(s);
    if (s.empty() || s == "+") {
        return 1.0;
    }
    if (s == "-") {
        return -1.0;
    }
    return parse_real(s, whole);
}

} // namespace

Complex parse_complex(std::string_view text)
{
    const std::string_view s = trim(text);
    if (s.empty()) {
        throw std::invalid_argument("empty complex number");
    }
    if (s.front() == '(') {
        if (s.back() != ')') {
            throw std::invalid_argument("not a complex number: '" + std::string(text) + "'");
        }
        const auto inner = s.substr(1, s.size() - 2);
        const auto comma = inner.find(',');
        if (comma == std::string_view::npos) {
            return {parse_real(inner, text), 0.0};
        }
        return {parse_real(inner.substr(0, comma), text), parse_real(inner.substr(comma + 1), text)};
    }
    if (s.back() != 'i' && s.back() != 'j') {
        return {parse_real(s, text), 0.0};
    }
    const auto body = s.substr(0, s.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        const char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string_view::npos) {
        return {0.0, parse_imag_coefficient(body, text)};
    }
    return {parse_real(body.substr(0, split), text), parse_imag_coefficient(body.substr(split), text)};
}

std::string format_complex(Complex z, int precision)
{
    std::ostringstream os;
    os.precision(precision);
    const double re = z.real();
    const double im = z.imag();
    if (im == 0.0) {
        os << re;
        return os.str();
    }
    if (re != 0.0) {
        os << re << (im < 0.0 ? "-" : "+") << std::abs(im) << 'i';
        return os.str();
    }
    os << im << 'i';
    return os.str();
}

} // namespace merodim
