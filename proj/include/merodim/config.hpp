#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "merodim/family.hpp"
#include "merodim/render.hpp"

namespace merodim {

// Parse or validation failure; line and column are 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, int column = 0);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct FamilyBlock {
    std::string kind = "tan"; // tan | weierstrass | elliptic-poly | exp-elliptic
    Complex lambda{1.0, 0.0};
    int m = 1;
    int d = 2;
    Complex omega1{1.0, 0.0};
    Complex omega2{0.0, 1.0};
    // Coefficients of P, lowest degree first.
    std::vector<Complex> poly{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
    double pole_exclusion_radius = 1e-12;
};

struct PipelineBlock {
    // Unset: 200 pi for tan, otherwise 1.6 times the claim threshold.
    std::optional<double> search_radius;
    std::optional<double> outer_radius;
    std::optional<double> inner_radius;
    // Unset: 200 for tan, every admissible b-point otherwise.
    std::optional<std::size_t> max_branches;
    std::string distortion = "off"; // off | koebe
    // Branches with |z_n| below this are left out of the theta regression.
    double regression_min_modulus = 0.0;
    int counting_samples = 40;
    double leaf_diameter = 0.1;
    unsigned threads = 1;
    std::uint64_t seed = 42;
};

struct RenderBlock {
    bool enabled = false;
    RenderGrid grid;
};

struct OutputBlock {
    std::string directory = ".";
    std::vector<std::string> formats{"csv", "json", "ppm"};

    bool wants(std::string_view fmt) const;
};

struct RunConfig {
    FamilyBlock family;
    PipelineBlock pipeline;
    RenderBlock render;
    OutputBlock output;

    void validate() const;
};

// Reads a JSON object with optional "family", "pipeline", "render" and
// "output" sections into `base`; keys present in the text override, keys
// absent keep their value in `base`. A manifest (an object with a "config"
// member) is accepted and its embedded config is used.
RunConfig apply_config_text(RunConfig base, std::string_view text);
RunConfig load_config_file(RunConfig base, const std::string& path);

// Canonical JSON text: every field, fixed key order, no whitespace variance.
std::string canonical_config(const RunConfig& cfg);
// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

FamilySpec family_from_config(const FamilyBlock& fb);

} // namespace merodim
