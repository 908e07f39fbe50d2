#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "merodim/ifs.hpp"

namespace merodim {

struct BoundInput {
    double rho = 0.0;
    double alpha1 = 0.0;
    int q = 1;
};

enum class Verdict { Consistent, Inconsistent, NumericsUnavailable };

std::string to_string(Verdict v);

struct BoundReport {
    std::string family_label;
    BoundInput input;
    double theoretical = 0.0;
    std::optional<double> theta_hat;
    std::optional<double> bowen_root;
    Verdict verdict = Verdict::NumericsUnavailable;
    // Free-form remark (e.g. the monotone approach to 2 of the exp-elliptic rows).
    std::string note;
};

// Agreement window between theta_hat (and the Bowen root) and the bound.
inline constexpr double consistency_tolerance = 0.05;

// rho / (alpha1 + 1 + 1/q). Throws HypothesisViolated if alpha1 <= -1 - 1/q.
double theorem1_bound(const BoundInput& input);

// Theory-only rows for every concrete family and application.
std::vector<BoundReport> corollary_table();

BoundReport compare(double theory, const std::optional<ThetaEstimate>& theta, std::optional<double> bowen);
BoundReport compare(std::string label, const BoundInput& input, const std::optional<ThetaEstimate>& theta,
                    std::optional<double> bowen);

// Columns: family_label, rho, alpha1, q, theoretical, theta_hat, bowen_root, verdict.
void write_bounds_csv(std::ostream& os, std::span<const BoundReport> rows);

} // namespace merodim
