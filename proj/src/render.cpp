#include "merodim/render.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "merodim/parallel.hpp"
#include "merodim/regression.hpp"

namespace merodim {

void RenderGrid::validate() const
{
    if (pixels_x < 16 || pixels_y < 16) {
        throw std::invalid_argument("RenderGrid: at least 16 pixels per side");
    }
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("RenderGrid: width must be positive");
    }
    if (!(escape_radius > width)) {
        throw std::invalid_argument("RenderGrid: escape_radius must exceed width");
    }
    if (max_iter < 0) {
        throw std::invalid_argument("RenderGrid: max_iter must be non-negative");
    }
    if (!(pole_capture_radius > 0.0)) {
        throw std::invalid_argument("RenderGrid: pole_capture_radius must be positive");
    }
}

Complex RenderGrid::pixel_center(int ix, int iy) const
{
    const double h = width / pixels_x;
    const double height = h * pixels_y;
    return {center.real() - 0.5 * width + (ix + 0.5) * h, center.imag() + 0.5 * height - (iy + 0.5) * h};
}

namespace {

PixelLabel iterate(const FamilySpec& f, Complex z, const RenderGrid& grid)
{
    for (int k = 0; k < grid.max_iter; ++k) {
        if (distance_to_nearest_pole(f, z) <= grid.pole_capture_radius) {
            return {LabelKind::Captured, k};
        }
        const EvalResult r = eval(f, z);
        if (r.at_pole()) {
            return {LabelKind::Captured, k};
        }
        z = r.value();
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > grid.escape_radius) {
            return {LabelKind::Escaped, k + 1};
        }
    }
    return {LabelKind::Undecided, grid.max_iter};
}

} // namespace

Classification classify(const FamilySpec& f, const RenderGrid& grid, unsigned threads)
{
    grid.validate();
    Classification c;
    c.width = grid.pixels_x;
    c.height = grid.pixels_y;
    c.labels.resize(static_cast<std::size_t>(c.width) * c.height);
    parallel_for(static_cast<std::size_t>(c.height), threads, [&](std::size_t iy) {
        for (int ix = 0; ix < c.width; ++ix) {
            c.labels[iy * c.width + ix] = iterate(f, grid.pixel_center(ix, static_cast<int>(iy)), grid);
        }
    });
    return c;
}

std::vector<std::uint8_t> to_p6(const Classification& c, int max_iter)
{
    const std::string header = "P6\n" + std::to_string(c.width) + " " + std::to_string(c.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + 3 * c.labels.size());
    const double scale = max_iter > 0 ? 1.0 / max_iter : 0.0;
    for (const auto& l : c.labels) {
        // integer-valued so the bytes do not depend on libm rounding
        const int shade = static_cast<int>(255 - (200 * l.step) * scale);
        std::uint8_t rgb[3] = {0, 0, 0};
        switch (l.kind) {
        case LabelKind::Undecided:
            break;
        case LabelKind::Escaped:
            rgb[0] = static_cast<std::uint8_t>(shade);
            rgb[1] = static_cast<std::uint8_t>(shade / 2);
            rgb[2] = 32;
            break;
        case LabelKind::Captured:
            rgb[0] = 32;
            rgb[1] = static_cast<std::uint8_t>(shade / 2);
            rgb[2] = static_cast<std::uint8_t>(shade);
            break;
        }
        out.insert(out.end(), rgb, rgb + 3);
    }
    return out;
}

std::vector<std::uint8_t> render(const FamilySpec& f, const RenderGrid& grid, unsigned threads)
{
    return to_p6(classify(f, grid, threads), grid.max_iter);
}

Mask boundary_mask(const Classification& c)
{
    Mask m{c.width, c.height, std::vector<std::uint8_t>(c.labels.size(), 0)};
    for (int y = 0; y < c.height; ++y) {
        for (int x = 0; x < c.width; ++x) {
            const LabelKind k = c.at(x, y).kind;
            const bool differs = (x > 0 && c.at(x - 1, y).kind != k) || (x + 1 < c.width && c.at(x + 1, y).kind != k) ||
                                 (y > 0 && c.at(x, y - 1).kind != k) || (y + 1 < c.height && c.at(x, y + 1).kind != k);
            m.bits[static_cast<std::size_t>(y) * c.width + x] = differs ? 1 : 0;
        }
    }
    return m;
}

Mask undecided_mask(const Classification& c)
{
    Mask m{c.width, c.height, std::vector<std::uint8_t>(c.labels.size(), 0)};
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
        m.bits[i] = c.labels[i].kind == LabelKind::Undecided ? 1 : 0;
    }
    return m;
}

std::vector<std::uint8_t> to_p4(const Mask& m)
{
    const std::string header = "P4\n" + std::to_string(m.width) + " " + std::to_string(m.height) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const int row_bytes = (m.width + 7) / 8;
    for (int y = 0; y < m.height; ++y) {
        for (int b = 0; b < row_bytes; ++b) {
            std::uint8_t byte = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const int x = 8 * b + bit;
                if (x < m.width && m.at(x, y)) {
                    byte |= static_cast<std::uint8_t>(0x80u >> bit);
                }
            }
            out.push_back(byte);
        }
    }
    return out;
}

std::vector<BoxCount> box_counts(const Mask& mask, std::span<const int> box_sizes)
{
    std::vector<BoxCount> out;
    for (const int s : box_sizes) {
        if (s <= 0) {
            throw std::invalid_argument("box_counts: box sizes must be positive");
        }
        const int nx = (mask.width + s - 1) / s;
        const int ny = (mask.height + s - 1) / s;
        std::vector<std::uint8_t> hit(static_cast<std::size_t>(nx) * ny, 0);
        for (int y = 0; y < mask.height; ++y) {
            for (int x = 0; x < mask.width; ++x) {
                if (mask.at(x, y)) {
                    hit[static_cast<std::size_t>(y / s) * nx + x / s] = 1;
                }
            }
        }
        out.push_back({s, static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1))});
    }
    return out;
}

double box_counting(const Mask& mask, std::span<const int> box_sizes)
{
    const std::set<int> distinct(box_sizes.begin(), box_sizes.end());
    if (distinct.size() < 4) {
        throw std::invalid_argument("box_counting: at least 4 distinct box sizes");
    }
    for (const int s : distinct) {
        if (s <= 0 || (s & (s - 1)) != 0) {
            throw std::invalid_argument("box_counting: box sizes must be powers of two");
        }
    }
    if (std::none_of(mask.bits.begin(), mask.bits.end(), [](std::uint8_t b) { return b != 0; })) {
        throw DegenerateMask("box_counting: empty mask");
    }
    const std::vector<int> sizes(distinct.begin(), distinct.end());
    const auto counts = box_counts(mask, sizes);
    std::vector<double> x, y;
    for (const auto& c : counts) {
        x.push_back(-std::log(static_cast<double>(c.box_size)));
        y.push_back(std::log(static_cast<double>(c.occupied)));
    }
    return fit_line(x, y).slope;
}

void write_box_counts_csv(std::ostream& os, std::span<const BoxCount> counts)
{
    os << "box_size,occupied\n";
    for (const auto& c : counts) {
        os << c.box_size << ',' << c.occupied << '\n';
    }
}

} // namespace merodim
