#include <doctest.h>

#include <sstream>

#include "merodim/render.hpp"
#include "oracles.hpp"

using namespace merodim;

namespace {

Mask filled(int w, int h, bool on)
{
    return {w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, on ? 1 : 0)};
}

const std::vector<int> sizes{1, 2, 4, 8, 16, 32};

} // namespace

TEST_CASE("grid validation")
{
    RenderGrid g;
    CHECK_NOTHROW(g.validate());
    g.pixels_x = 8;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = RenderGrid{};
    g.escape_radius = 2.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("pixel centers")
{
    RenderGrid g;
    g.center = Complex{1.0, -1.0};
    g.width = 4.0;
    g.pixels_x = g.pixels_y = 16;
    CHECK(std::abs(g.pixel_center(0, 0) - Complex{-1.0 + 0.125, 1.0 - 0.125}) < 1e-15);
    CHECK(std::abs(g.pixel_center(15, 15) - Complex{3.0 - 0.125, -3.0 + 0.125}) < 1e-15);
}

TEST_CASE("max_iter 0 leaves every pixel undecided")
{
    RenderGrid g;
    g.pixels_x = g.pixels_y = 32;
    g.max_iter = 0;
    const auto c = classify(FamilySpec::tan_power(1.0, 1), g);
    for (const auto& l : c.labels) {
        CHECK(l.kind == LabelKind::Undecided);
    }
}

TEST_CASE("contracting fixture gives a uniform label")
{
    // 0.2 tan z maps the small frame around 0 into itself
    RenderGrid g;
    g.width = 0.5;
    g.pixels_x = g.pixels_y = 32;
    g.max_iter = 50;
    const auto c = classify(FamilySpec::tan_power(0.2, 1), g);
    for (const auto& l : c.labels) {
        CHECK(l.kind == LabelKind::Undecided);
    }
}

TEST_CASE("pole captures and escapes are labelled")
{
    RenderGrid g;
    g.center = pi / 2;
    g.width = 1e-5;
    g.pixels_x = g.pixels_y = 16;
    g.escape_radius = 1e3;
    g.max_iter = 5;
    const auto c = classify(FamilySpec::tan_power(1.0, 1), g);
    int captured = 0;
    int escaped = 0;
    for (const auto& l : c.labels) {
        captured += l.kind == LabelKind::Captured;
        escaped += l.kind == LabelKind::Escaped;
        CHECK(l.step <= g.max_iter);
    }
    CHECK(captured > 0);
    CHECK(escaped > 0);
}

TEST_CASE("render bytes are thread independent")
{
    RenderGrid g;
    g.pixels_x = g.pixels_y = 128;
    const auto f = FamilySpec::tan_power(1.0, 1);
    const auto a = render(f, g, 1);
    CHECK(a == render(f, g, 1));
    CHECK(a == render(f, g, 3));
    const std::string header(a.begin(), a.begin() + 15);
    CHECK(header == "P6\n128 128\n255\n");
    CHECK(a.size() == 15 + 3 * 128 * 128);
}

TEST_CASE("boundary mask and P4")
{
    Classification c;
    c.width = c.height = 16;
    c.labels.assign(256, PixelLabel{});
    for (int y = 0; y < 16; ++y) {
        for (int x = 8; x < 16; ++x) {
            c.labels[y * 16 + x] = {LabelKind::Escaped, 3};
        }
    }
    const Mask m = boundary_mask(c);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            CHECK(m.at(x, y) == (x == 7 || x == 8));
        }
    }
    const auto p4 = to_p4(m);
    const std::string header = "P4\n16 16\n";
    REQUIRE(p4.size() == header.size() + 32);
    CHECK(p4[header.size()] == 0x01);
    CHECK(p4[header.size() + 1] == 0x80);
}

TEST_CASE("box counting calibration")
{
    const std::vector<int> big{8, 16, 32, 64, 128};
    CHECK(std::abs(box_counting(filled(256, 256, true), sizes) - 2.0) < 0.05);
    Mask dot = filled(256, 256, false);
    dot.bits[100 * 256 + 37] = 1;
    CHECK(std::abs(box_counting(dot, sizes)) < 0.05);
    const Mask dust = oracle::cantor_dust(2048, 5);
    CHECK(std::abs(box_counting(dust, big) - std::log(4.0) / std::log(3.0)) < 0.08);
    CHECK_THROWS_AS(box_counting(filled(64, 64, false), sizes), DegenerateMask);
    const std::vector<int> three{2, 4, 8};
    CHECK_THROWS_AS(box_counting(dot, three), std::invalid_argument);
    const std::vector<int> odd{2, 3, 4, 8};
    CHECK_THROWS_AS(box_counting(dot, odd), std::invalid_argument);
}

TEST_CASE("box count csv")
{
    std::ostringstream os;
    const std::vector<int> s{1, 2};
    write_box_counts_csv(os, box_counts(filled(4, 4, true), s));
    CHECK(os.str() == "box_size,occupied\n1,16\n2,4\n");
}
