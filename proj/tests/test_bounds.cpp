#include <doctest.h>

#include <sstream>

#include "merodim/bounds.hpp"

using namespace merodim;

TEST_CASE("theorem bound closed forms")
{
    for (int m = 1; m <= 5; ++m) {
        CHECK(std::abs(theorem1_bound({1.0, 0.0, m}) - double(m) / (m + 1)) < 1e-12);
    }
    CHECK(std::abs(theorem1_bound({2.0, 0.0, 2}) - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(theorem1_bound({2.0, 0.0, 3}) - 1.5) < 1e-12);
    CHECK_THROWS_AS(theorem1_bound({1.0, -2.5, 1}), HypothesisViolated);
    CHECK_THROWS_AS(theorem1_bound({1.0, -1.5, 2}), HypothesisViolated);
    CHECK_THROWS_AS(theorem1_bound({1.0, 0.0, 0}), std::invalid_argument);
}

TEST_CASE("theorem bound monotonicity")
{
    for (double rho = 0.5; rho < 5.0; rho += 0.5) {
        for (double a = 0.0; a < 4.0; a += 0.5) {
            for (int q = 1; q < 6; ++q) {
                const double v = theorem1_bound({rho, a, q});
                CHECK(theorem1_bound({rho + 0.25, a, q}) > v);
                CHECK(theorem1_bound({rho, a + 0.25, q}) < v);
                CHECK(theorem1_bound({rho, a, q + 1}) > v);
            }
        }
    }
}

TEST_CASE("corollary table")
{
    const auto rows = corollary_table();
    CHECK(rows.size() >= 30);
    std::vector<double> exp_elliptic;
    for (const auto& r : rows) {
        CAPTURE(r.family_label);
        CHECK(r.theoretical > 0.0);
        CHECK(r.theoretical < 2.0);
        CHECK(r.verdict == Verdict::NumericsUnavailable);
        CHECK_FALSE(r.theta_hat);
        if (r.family_label.rfind("exp-elliptic", 0) == 0) {
            exp_elliptic.push_back(r.theoretical);
        }
        if (r.family_label.rfind("riccati", 0) == 0 || r.family_label.rfind("schwarzian", 0) == 0) {
            CHECK(r.theoretical >= 0.5);
            CHECK(std::abs(r.theoretical - r.input.rho / (r.input.alpha1 + 2.0)) < 1e-12);
        }
    }
    REQUIRE(exp_elliptic.size() == 10);
    for (int d = 1; d <= 10; ++d) {
        CHECK(std::abs(exp_elliptic[d - 1] - 4.0 * d / (2.0 * d + 1.0)) < 1e-12);
        if (d > 1) {
            CHECK(exp_elliptic[d - 1] > exp_elliptic[d - 2]);
        }
    }
    CHECK(std::abs(exp_elliptic.back() - 40.0 / 21.0) < 1e-12);
}

TEST_CASE("compare verdicts")
{
    ThetaEstimate t;
    t.theta_hat = 0.49;
    CHECK(compare(0.5, t, std::nullopt).verdict == Verdict::Consistent);
    t.theta_hat = 0.8;
    CHECK(compare(0.5, t, std::nullopt).verdict == Verdict::Inconsistent);
    CHECK(compare(4.0 / 3.0, std::nullopt, std::nullopt).verdict == Verdict::NumericsUnavailable);
    t.theta_hat = 0.5;
    CHECK(compare(0.5, t, 0.53).verdict == Verdict::Consistent);
    CHECK(compare(0.5, t, 0.6).verdict == Verdict::Inconsistent);
    const auto r = compare("tan", {1.0, 0.0, 1}, t, 0.4);
    CHECK(r.family_label == "tan");
    CHECK(r.theoretical == doctest::Approx(0.5));
}

TEST_CASE("bounds csv")
{
    std::ostringstream os;
    const auto rows = corollary_table();
    write_bounds_csv(os, rows);
    const std::string s = os.str();
    CHECK(s.rfind("family_label,rho,alpha1,q,theoretical,theta_hat,bowen_root,verdict\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) == rows.size() + 1);
}
