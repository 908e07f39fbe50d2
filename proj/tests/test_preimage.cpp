#include <doctest.h>

#include <random>
#include <sstream>

#include "merodim/preimage.hpp"
#include "oracles.hpp"

using namespace merodim;

namespace {
const Complex I{0.0, 1.0};
}

TEST_CASE("rectangle helpers")
{
    const Rect r{0.0, 2.0, -1.0, 1.0};
    CHECK(r.center() == Complex{1.0, 0.0});
    CHECK(r.diameter() == doctest::Approx(std::sqrt(8.0)));
    CHECK(r.contains(Complex{0.5, 0.5}));
    CHECK_FALSE(r.contains(Complex{-0.5, 0.5}));
    CHECK(r.contains(Complex{-0.5, 0.5}, 0.6)); // margin widens the rectangle
    CHECK(r.boundary_distance(Complex{0.5, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("argument-principle counts")
{
    const auto tan1 = FamilySpec::tan_power(1.0, 1);
    const Rect strip{-pi / 2 + 0.1, pi / 2 - 0.1, -1.0, 1.0};
    // tan z = 2i has its solutions on Re z = pi/2 (mod pi), outside this strip;
    // tan z = i/2 has exactly one inside.
    CHECK(count_zeros_in_rectangle(tan1, 2.0 * I, strip) == 0);
    CHECK(count_zeros_in_rectangle(tan1, 0.5 * I, strip) == 1);
    // strip containing two poles, two solutions
    CHECK(count_zeros_in_rectangle(tan1, 3.0, Rect{-0.5, 2 * pi - 0.5, -2.0, 2.0}) == 2);
    // tiny rectangle away from any solution
    const Complex c{0.3, 0.7};
    CHECK(count_zeros_in_rectangle(tan1, 5.0, Rect{c.real(), c.real() + 1e-6, c.imag(), c.imag() + 1e-6}) == 0);

    const auto wp = FamilySpec::weierstrass(Lattice::square());
    // one fundamental domain, shifted so that no solution of wp = 5 sits on the edge
    CHECK(count_zeros_in_rectangle(wp, 5.0, Rect{0.05, 1.05, 0.07, 1.07}) == 2);
}

TEST_CASE("boundary collisions are reported")
{
    const auto tan1 = FamilySpec::tan_power(1.0, 1);
    // solution at atan(1) = pi/4 sits on the left edge
    CHECK_THROWS_AS(count_zeros_in_rectangle(tan1, 1.0, Rect{pi / 4, 1.5, -1.0, 1.0}), BoundaryCollision);
    // pole pi/2 on the right edge
    CHECK_THROWS_AS(count_zeros_in_rectangle(tan1, 1.0, Rect{0.0, pi / 2, -1.0, 1.0}), BoundaryCollision);
}

TEST_CASE("random rectangles: count, refined roots and grid scan agree")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(-8.0, 8.0);
    std::uniform_real_distribution<double> size(0.5, 4.0);
    const auto tan1 = FamilySpec::tan_power(1.0, 1);
    const auto wp = FamilySpec::weierstrass(Lattice::square());
    int checked = 0;
    for (int k = 0; k < 16; ++k) {
        const bool use_tan = k < 10;
        const FamilySpec& f = use_tan ? tan1 : wp;
        const Complex a = use_tan ? Complex{pos(rng) * 0.3, pos(rng) * 0.3} : Complex{pos(rng), pos(rng)};
        const double x0 = pos(rng);
        const double y0 = pos(rng) * (use_tan ? 0.25 : 1.0);
        const Rect r{x0, x0 + size(rng), y0, y0 + size(rng)};
        int count = 0;
        try {
            count = count_zeros_in_rectangle(f, a, r);
        } catch (const BoundaryCollision&) {
            continue;
        }
        const auto found = find_preimages_in_rect(f, a, r);
        const auto scan = oracle::grid_scan_roots(f, a, r, 80, 80);
        CHECK(found.enclosing_count == count);
        CHECK(found.leaf_count_sum == count);
        CHECK(static_cast<int>(found.preimages.size()) == count);
        CHECK(static_cast<int>(scan.size()) == count);
        ++checked;
    }
    CHECK(checked >= 12);
}

TEST_CASE("tan b-points match the closed form")
{
    const auto tan1 = FamilySpec::tan_power(1.0, 1);
    const double radius = 30.0;
    const auto got = find_preimages(tan1, pi / 2, radius);
    const auto want = oracle::tan_preimages(1.0, pi / 2, radius);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i].point - want[i]) < 1e-8);
        CHECK(got[i].residual < 1e-10);
    }
    CHECK(find_preimages(tan1, pi / 2, 0.9).empty());
}

TEST_CASE("tan power m = 2 preimages")
{
    const auto t2 = FamilySpec::tan_power(1.0, 2);
    const Complex a{0.3, 0.4};
    const auto got = find_preimages(t2, a, 12.0);
    // tan z = +-sqrt(a)
    std::vector<Complex> want = oracle::tan_preimages(1.0, std::sqrt(a), 12.0);
    const auto neg = oracle::tan_preimages(1.0, -std::sqrt(a), 12.0);
    want.insert(want.end(), neg.begin(), neg.end());
    REQUIRE(got.size() == want.size());
    for (const Complex w : want) {
        const bool hit = std::any_of(got.begin(), got.end(), [&](const Preimage& p) { return std::abs(p.point - w) < 1e-8; });
        CHECK(hit);
    }
}

TEST_CASE("wp preimages against the grid scan")
{
    const auto wp = FamilySpec::weierstrass(Lattice::square());
    const auto got = find_preimages(wp, 10.0, 3.0);
    const auto scan = oracle::grid_scan_roots(wp, 10.0, Rect{-3.0, 3.0, -3.0, 3.0}, 400, 400);
    const auto inside = std::count_if(scan.begin(), scan.end(), [](Complex z) { return std::abs(z) <= 3.0; });
    CHECK(static_cast<long>(got.size()) == inside);
    // two solutions per period cell; about 2 pi r^2 / area
    CHECK(std::abs(static_cast<double>(got.size()) - 2.0 * pi * 9.0) < 12.0);
}

TEST_CASE("preimage search is deterministic and thread independent")
{
    const auto wp = FamilySpec::weierstrass(Lattice::square());
    SolverOptions one;
    SolverOptions many;
    many.threads = 4;
    const auto a = find_preimages(wp, Complex{1.0, 0.5}, 6.0, one);
    const auto b = find_preimages(wp, Complex{1.0, 0.5}, 6.0, many);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].point == b[i].point);
    }
}

TEST_CASE("counting function and order of growth")
{
    const auto tan1 = FamilySpec::tan_power(1.0, 1);
    const auto pre = find_preimages(tan1, pi / 2, 100.0 * pi);
    std::vector<double> radii;
    for (int k = 1; k <= 10; ++k) {
        radii.push_back(k * pi);
    }
    const auto small = counting_function(pre, radii);
    for (int k = 1; k <= 10; ++k) {
        CHECK(std::abs(static_cast<long>(small[k - 1].count) - 2 * k) <= 1);
    }
    radii.clear();
    for (int k = 1; k <= 40; ++k) {
        radii.push_back(100.0 * pi * k / 40.0);
    }
    const auto samples = counting_function(pre, radii);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        CHECK(samples[i].count >= samples[i - 1].count);
    }
    CHECK(estimate_order_of_growth(samples) == doctest::Approx(1.0).epsilon(0.05));

    const auto wp = FamilySpec::weierstrass(Lattice::square());
    const auto wpre = find_preimages(wp, 1.0, 30.0);
    radii.clear();
    for (int k = 1; k <= 40; ++k) {
        radii.push_back(30.0 * k / 40.0);
    }
    CHECK(std::abs(estimate_order_of_growth(counting_function(wpre, radii)) - 2.0) < 0.1);

    CHECK(counting_function({}, radii).back().count == 0);
    std::vector<CountingSample> flat;
    for (int k = 1; k <= 10; ++k) {
        flat.push_back({double(k), 7});
    }
    CHECK(estimate_order_of_growth(flat) == doctest::Approx(0.0));
    const std::vector<double> unsorted{2.0, 1.0};
    CHECK_THROWS_AS(counting_function(pre, unsorted), std::invalid_argument);
}

TEST_CASE("preimage csv")
{
    std::ostringstream os;
    write_preimages_csv(os, std::vector<Preimage>{});
    CHECK(os.str() == "re,im,modulus,residual\n");
}
