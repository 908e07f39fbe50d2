#include "merodim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "merodim/complex_io.hpp"

namespace merodim {

using nlohmann::json;

ConfigError::ConfigError(const std::string& what, int line, int column)
    : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")" : what),
      line_(line), column_(column)
{
}

bool OutputBlock::wants(std::string_view fmt) const
{
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

void RunConfig::validate() const
{
    static const std::vector<std::string> kinds{"tan", "weierstrass", "elliptic-poly", "exp-elliptic"};
    if (std::find(kinds.begin(), kinds.end(), family.kind) == kinds.end()) {
        throw ConfigError("family.kind: unknown variant '" + family.kind + "'");
    }
    if (family.m < 1 || family.d < 1) {
        throw ConfigError("family: m and d must be positive");
    }
    if (!(family.pole_exclusion_radius > 0.0)) {
        throw ConfigError("family.pole_exclusion_radius must be positive");
    }
    if (pipeline.distortion != "off" && pipeline.distortion != "koebe") {
        throw ConfigError("pipeline.distortion must be 'off' or 'koebe'");
    }
    for (const auto* r : {&pipeline.search_radius, &pipeline.outer_radius, &pipeline.inner_radius}) {
        if (*r && !(**r > 0.0)) {
            throw ConfigError("pipeline radii must be positive");
        }
    }
    if (pipeline.max_branches && *pipeline.max_branches < 1) {
        throw ConfigError("pipeline.max_branches must be positive");
    }
    if (pipeline.counting_samples < 10) {
        throw ConfigError("pipeline.counting_samples must be at least 10");
    }
    if (!(pipeline.leaf_diameter > 0.0)) {
        throw ConfigError("pipeline.leaf_diameter must be positive");
    }
    if (render.enabled) {
        try {
            render.grid.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("render: ") + e.what());
        }
    }
    for (const auto& f : output.formats) {
        if (f != "csv" && f != "json" && f != "ppm") {
            throw ConfigError("output.formats: unknown format '" + f + "'");
        }
    }
}

namespace {

struct Position {
    int line = 0;
    int column = 0;
};

Position position_of(std::string_view text, std::size_t offset)
{
    Position p{1, 1};
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else {
            ++p.column;
        }
    }
    return p;
}

// Best-effort location of "key" inside "section" for diagnostics.
Position locate(std::string_view text, std::string_view section, std::string_view key)
{
    std::size_t from = 0;
    if (!section.empty()) {
        from = text.find("\"" + std::string(section) + "\"");
        if (from == std::string_view::npos) {
            return {};
        }
    }
    const std::size_t at = key.empty() ? from : text.find("\"" + std::string(key) + "\"", from);
    if (at == std::string_view::npos) {
        return {};
    }
    return position_of(text, at);
}

class Reader {
public:
    Reader(std::string_view text, std::string section, const json& obj)
        : text_(text), section_(std::move(section)), obj_(obj)
    {
        if (!obj_.is_object()) {
            fail("", "section must be an object");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        const Position p = locate(text_, section_, key);
        const std::string where = key.empty() ? section_ : section_ + "." + key;
        throw ConfigError(where + ": " + msg, p.line, p.column);
    }

    void reject_unknown(std::initializer_list<std::string_view> known) const
    {
        for (const auto& [k, v] : obj_.items()) {
            if (std::find(known.begin(), known.end(), k) == known.end()) {
                fail(k, "unknown key");
            }
        }
    }

    template <class T, class Fn>
    void read(const std::string& key, T& target, Fn&& convert) const
    {
        const auto it = obj_.find(key);
        if (it == obj_.end()) {
            return;
        }
        try {
            target = convert(*it);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    }

    void number(const std::string& key, double& target) const
    {
        read(key, target, [](const json& j) {
            if (!j.is_number()) {
                throw std::invalid_argument("expected a number");
            }
            return j.get<double>();
        });
    }

    void optional_number(const std::string& key, std::optional<double>& target) const
    {
        read(key, target, [](const json& j) -> std::optional<double> {
            if (j.is_null()) {
                return std::nullopt;
            }
            if (!j.is_number()) {
                throw std::invalid_argument("expected a number or null");
            }
            return j.get<double>();
        });
    }

    template <class Int>
    void integer(const std::string& key, Int& target) const
    {
        read(key, target, [](const json& j) {
            if (!j.is_number_integer()) {
                throw std::invalid_argument("expected an integer");
            }
            if constexpr (std::is_unsigned_v<Int>) {
                if (j.get<long long>() < 0) {
                    throw std::invalid_argument("expected a non-negative integer");
                }
            }
            return j.get<Int>();
        });
    }

    void string(const std::string& key, std::string& target) const
    {
        read(key, target, [](const json& j) {
            if (!j.is_string()) {
                throw std::invalid_argument("expected a string");
            }
            return j.get<std::string>();
        });
    }

    void boolean(const std::string& key, bool& target) const
    {
        read(key, target, [](const json& j) {
            if (!j.is_boolean()) {
                throw std::invalid_argument("expected true or false");
            }
            return j.get<bool>();
        });
    }

    // Complex numbers are written as strings ("1+2i") or plain numbers.
    static Complex to_complex(const json& j)
    {
        if (j.is_number()) {
            return {j.get<double>(), 0.0};
        }
        if (!j.is_string()) {
            throw std::invalid_argument("expected a complex number string");
        }
        return parse_complex(j.get<std::string>());
    }

    void complex(const std::string& key, Complex& target) const { read(key, target, to_complex); }

    void complex_list(const std::string& key, std::vector<Complex>& target) const
    {
        read(key, target, [](const json& j) {
            if (!j.is_array()) {
                throw std::invalid_argument("expected an array");
            }
            std::vector<Complex> out;
            for (const auto& e : j) {
                out.push_back(to_complex(e));
            }
            return out;
        });
    }

    void string_list(const std::string& key, std::vector<std::string>& target) const
    {
        read(key, target, [](const json& j) {
            if (!j.is_array()) {
                throw std::invalid_argument("expected an array");
            }
            std::vector<std::string> out;
            for (const auto& e : j) {
                out.push_back(e.get<std::string>());
            }
            return out;
        });
    }

private:
    std::string_view text_;
    std::string section_;
    const json& obj_;
};

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

RunConfig apply_config_text(RunConfig cfg, std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const Position p = position_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(std::string("syntax error: ") + e.what(), p.line, p.column);
    }
    if (!doc.is_object()) {
        throw ConfigError("top level must be an object", 1, 1);
    }
    if (doc.contains("config")) {
        // manifest
        doc = doc["config"];
        if (!doc.is_object()) {
            const Position p = locate(text, "config", "");
            throw ConfigError("manifest config must be an object", p.line, p.column);
        }
    }
    Reader top(text, "", doc);
    top.reject_unknown({"family", "pipeline", "render", "output"});

    if (doc.contains("family")) {
        Reader r(text, "family", doc["family"]);
        r.reject_unknown({"kind", "lambda", "m", "d", "omega1", "omega2", "poly", "pole_exclusion_radius"});
        auto& f = cfg.family;
        r.string("kind", f.kind);
        r.complex("lambda", f.lambda);
        r.integer("m", f.m);
        r.integer("d", f.d);
        r.complex("omega1", f.omega1);
        r.complex("omega2", f.omega2);
        r.complex_list("poly", f.poly);
        r.number("pole_exclusion_radius", f.pole_exclusion_radius);
    }
    if (doc.contains("pipeline")) {
        Reader r(text, "pipeline", doc["pipeline"]);
        r.reject_unknown({"search_radius", "outer_radius", "inner_radius", "max_branches", "distortion",
                          "regression_min_modulus", "counting_samples", "leaf_diameter", "threads", "seed"});
        auto& p = cfg.pipeline;
        r.optional_number("search_radius", p.search_radius);
        r.optional_number("outer_radius", p.outer_radius);
        r.optional_number("inner_radius", p.inner_radius);
        r.read("max_branches", p.max_branches, [](const json& j) -> std::optional<std::size_t> {
            if (j.is_null()) {
                return std::nullopt;
            }
            if (!j.is_number_unsigned()) {
                throw std::invalid_argument("expected a non-negative integer or null");
            }
            return j.get<std::size_t>();
        });
        r.string("distortion", p.distortion);
        r.number("regression_min_modulus", p.regression_min_modulus);
        r.integer("counting_samples", p.counting_samples);
        r.number("leaf_diameter", p.leaf_diameter);
        r.integer("threads", p.threads);
        r.integer("seed", p.seed);
    }
    if (doc.contains("render")) {
        Reader r(text, "render", doc["render"]);
        r.reject_unknown({"enabled", "center", "width", "pixels_x", "pixels_y", "max_iter", "escape_radius",
                          "pole_capture_radius"});
        auto& g = cfg.render.grid;
        r.boolean("enabled", cfg.render.enabled);
        r.complex("center", g.center);
        r.number("width", g.width);
        r.integer("pixels_x", g.pixels_x);
        r.integer("pixels_y", g.pixels_y);
        r.integer("max_iter", g.max_iter);
        r.number("escape_radius", g.escape_radius);
        r.number("pole_capture_radius", g.pole_capture_radius);
    }
    if (doc.contains("output")) {
        Reader r(text, "output", doc["output"]);
        r.reject_unknown({"directory", "formats"});
        r.string("directory", cfg.output.directory);
        r.string_list("formats", cfg.output.formats);
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(RunConfig base, const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return apply_config_text(std::move(base), ss.str());
}

std::string canonical_config(const RunConfig& cfg)
{
    json poly = json::array();
    for (const auto& c : cfg.family.poly) {
        poly.push_back(format_complex(c));
    }
    const auto& f = cfg.family;
    const auto& p = cfg.pipeline;
    const auto& g = cfg.render.grid;
    json j;
    j["family"] = {{"kind", f.kind},
                   {"lambda", format_complex(f.lambda)},
                   {"m", f.m},
                   {"d", f.d},
                   {"omega1", format_complex(f.omega1)},
                   {"omega2", format_complex(f.omega2)},
                   {"poly", poly},
                   {"pole_exclusion_radius", f.pole_exclusion_radius}};
    j["pipeline"] = {{"search_radius", optional_json(p.search_radius)},
                     {"outer_radius", optional_json(p.outer_radius)},
                     {"inner_radius", optional_json(p.inner_radius)},
                     {"max_branches", p.max_branches ? json(*p.max_branches) : json(nullptr)},
                     {"distortion", p.distortion},
                     {"regression_min_modulus", p.regression_min_modulus},
                     {"counting_samples", p.counting_samples},
                     {"leaf_diameter", p.leaf_diameter},
                     {"threads", p.threads},
                     {"seed", p.seed}};
    j["render"] = {{"enabled", cfg.render.enabled},
                   {"center", format_complex(g.center)},
                   {"width", g.width},
                   {"pixels_x", g.pixels_x},
                   {"pixels_y", g.pixels_y},
                   {"max_iter", g.max_iter},
                   {"escape_radius", g.escape_radius},
                   {"pole_capture_radius", g.pole_capture_radius}};
    j["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
    return j.dump();
}

std::string config_hash(const RunConfig& cfg)
{
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : canonical_config(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FamilySpec family_from_config(const FamilyBlock& fb)
{
    FamilySpec f = [&] {
        if (fb.kind == "tan") {
            return FamilySpec::tan_power(fb.lambda, fb.m);
        }
        if (fb.kind == "weierstrass") {
            return FamilySpec::weierstrass(Lattice(fb.omega1, fb.omega2));
        }
        if (fb.kind == "elliptic-poly") {
            return FamilySpec::elliptic_compose_poly(Lattice(fb.omega1, fb.omega2), Polynomial(fb.poly));
        }
        if (fb.kind == "exp-elliptic") {
            return FamilySpec::exp_elliptic(fb.lambda, fb.d, Lattice(fb.omega1, fb.omega2));
        }
        throw ConfigError("family.kind: unknown variant '" + fb.kind + "'");
    }();
    return f.with_pole_exclusion_radius(fb.pole_exclusion_radius);
}

} // namespace merodim
