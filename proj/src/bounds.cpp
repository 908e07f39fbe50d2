#include "merodim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace merodim {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Consistent:
        return "Consistent";
    case Verdict::Inconsistent:
        return "Inconsistent";
    case Verdict::NumericsUnavailable:
        return "NumericsUnavailable";
    }
    return "NumericsUnavailable";
}

double theorem1_bound(const BoundInput& input)
{
    if (input.q < 1) {
        throw std::invalid_argument("theorem1_bound: pole multiplicity must be positive");
    }
    if (!(input.rho > 0.0)) {
        throw std::invalid_argument("theorem1_bound: order must be positive");
    }
    const double denom = input.alpha1 + 1.0 + 1.0 / input.q;
    if (!(denom > 0.0)) {
        throw HypothesisViolated("theorem1_bound: alpha1 must exceed -1 - 1/q");
    }
    return input.rho / denom;
}

namespace {

BoundReport theory_row(std::string label, BoundInput input, std::string note = {})
{
    BoundReport r;
    r.family_label = std::move(label);
    r.input = input;
    r.theoretical = theorem1_bound(input);
    r.verdict = Verdict::NumericsUnavailable;
    r.note = std::move(note);
    return r;
}

} // namespace

std::vector<BoundReport> corollary_table()
{
    std::vector<BoundReport> rows;
    for (int m = 1; m <= 5; ++m) {
        rows.push_back(theory_row("tan(m=" + std::to_string(m) + ")", {1.0, 0.0, m}));
    }
    for (int q = 2; q <= 3; ++q) {
        rows.push_back(theory_row("elliptic(q=" + std::to_string(q) + ")", {2.0, 0.0, q}));
    }
    // wp o P with deg P = d: rho = 2d, alpha1 = d - 1, so the bound is 2d / (d + 1/q).
    for (int d = 1; d <= 4; ++d) {
        rows.push_back(theory_row("elliptic-poly(d=" + std::to_string(d) + ",q=2)", {2.0 * d, d - 1.0, 2}));
    }
    for (int d = 1; d <= 10; ++d) {
        rows.push_back(theory_row("exp-elliptic(d=" + std::to_string(d) + ",q=2)", {2.0, 0.0, 2 * d},
                                  "increasing in d with supremum 2"));
    }
    for (int d0 = 0; d0 <= 4; ++d0) {
        for (int d1 = 0; d1 <= 4; ++d1) {
            const double rho = 1.0 + std::max(0.5 * d0, static_cast<double>(d1));
            const double alpha1 = std::max(d0, d1);
            rows.push_back(theory_row("riccati(d0=" + std::to_string(d0) + ",d1=" + std::to_string(d1) + ")",
                                      {rho, alpha1, 1}, "theory only"));
        }
    }
    for (const int d : {0, 2, 4}) {
        rows.push_back(theory_row("schwarzian(d=" + std::to_string(d) + ")", {0.5 * d + 1.0, 0.5 * d, 1},
                                  "theory only; strict inequality not asserted"));
    }
    return rows;
}

BoundReport compare(double theory, const std::optional<ThetaEstimate>& theta, std::optional<double> bowen)
{
    if (!(theory > 0.0)) {
        throw std::invalid_argument("compare: theoretical bound must be positive");
    }
    BoundReport r;
    r.theoretical = theory;
    r.bowen_root = bowen;
    if (!theta) {
        r.verdict = Verdict::NumericsUnavailable;
        return r;
    }
    r.theta_hat = theta->theta_hat;
    const bool theta_ok = std::abs(theta->theta_hat - theory) <= consistency_tolerance;
    const bool bowen_ok = !bowen || *bowen <= theory + consistency_tolerance;
    r.verdict = theta_ok && bowen_ok ? Verdict::Consistent : Verdict::Inconsistent;
    return r;
}

BoundReport compare(std::string label, const BoundInput& input, const std::optional<ThetaEstimate>& theta,
                    std::optional<double> bowen)
{
    BoundReport r = compare(theorem1_bound(input), theta, bowen);
    r.family_label = std::move(label);
    r.input = input;
    return r;
}

void write_bounds_csv(std::ostream& os, std::span<const BoundReport> rows)
{
    const auto old = os.precision(17);
    os << "family_label,rho,alpha1,q,theoretical,theta_hat,bowen_root,verdict\n";
    for (const auto& r : rows) {
        os << '"' << r.family_label << "\"," << r.input.rho << ',' << r.input.alpha1 << ',' << r.input.q << ','
           << r.theoretical << ',';
        if (r.theta_hat) {
            os << *r.theta_hat;
        }
        os << ',';
        if (r.bowen_root) {
            os << *r.bowen_root;
        }
        os << ',' << to_string(r.verdict) << '\n';
    }
    os.precision(old);
}

} // namespace merodim
