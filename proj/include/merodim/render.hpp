#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "merodim/family.hpp"

namespace merodim {

struct RenderGrid {
    Complex center{0.0, 0.0};
    double width = 4.0;
    int pixels_x = 512;
    int pixels_y = 512;
    int max_iter = 64;
    double escape_radius = 1e6;
    double pole_capture_radius = 1e-6;

    // Throws std::invalid_argument unless pixels >= 16 per side and escape_radius > width.
    void validate() const;
    // Center of pixel (ix, iy); row 0 is the top edge.
    Complex pixel_center(int ix, int iy) const;
};

enum class LabelKind : std::uint8_t { Undecided, Escaped, Captured };

struct PixelLabel {
    LabelKind kind = LabelKind::Undecided;
    int step = 0;

    friend bool operator==(const PixelLabel&, const PixelLabel&) = default;
};

struct Classification {
    int width = 0;
    int height = 0;
    std::vector<PixelLabel> labels; // row-major

    const PixelLabel& at(int ix, int iy) const { return labels[static_cast<std::size_t>(iy) * width + ix]; }
};

// Iterates f from every pixel center. Rows are distributed over threads but
// each label only depends on its own pixel.
Classification classify(const FamilySpec& f, const RenderGrid& grid, unsigned threads = 1);

// Binary P6 image (header included) with a label-dependent palette.
std::vector<std::uint8_t> to_p6(const Classification& c, int max_iter);
std::vector<std::uint8_t> render(const FamilySpec& f, const RenderGrid& grid, unsigned threads = 1);

struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 0/1, row-major

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
};

// Pixels whose label kind differs from one of their 4-neighbors.
Mask boundary_mask(const Classification& c);
Mask undecided_mask(const Classification& c);

std::vector<std::uint8_t> to_p4(const Mask& m);

struct BoxCount {
    int box_size = 0;
    std::size_t occupied = 0;
};

std::vector<BoxCount> box_counts(const Mask& mask, std::span<const int> box_sizes);

// Slope of log(occupied) against log(1/size). Needs >= 4 distinct powers of
// two; throws DegenerateMask on an empty mask.
double box_counting(const Mask& mask, std::span<const int> box_sizes);

void write_box_counts_csv(std::ostream& os, std::span<const BoxCount> counts);

} // namespace merodim
