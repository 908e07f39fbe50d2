// merodim: bounds, preimages, theta estimation and renders for meromorphic families.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "merodim/bounds.hpp"
#include "merodim/complex_io.hpp"
#include "merodim/config.hpp"
#include "merodim/pipeline.hpp"
#include "merodim/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace merodim;

namespace {

constexpr const char* version = "0.1.0";

enum Exit { Ok = 0, ConfigFailure = 1, InconsistentVerdict = 2, RuntimeFailure = 3 };

struct Flags {
    std::optional<std::string> family;
    std::optional<std::string> lambda;
    std::optional<int> m;
    std::optional<int> d;
    std::optional<std::string> omega1;
    std::optional<std::string> omega2;
    std::vector<std::string> poly;
    std::optional<double> radius;
    std::optional<double> outer_radius;
    std::optional<double> inner_radius;
    std::optional<std::size_t> max_branches;
    std::optional<std::string> distortion;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> config;
    std::optional<std::string> target;
    std::optional<std::string> center;
    std::optional<double> width;
    std::optional<int> pixels;
    std::optional<int> max_iter;
    std::optional<double> escape_radius;
    bool table_only = false;
};

Complex complex_flag(const std::string& name, const std::string& text)
{
    try {
        return parse_complex(text);
    } catch (const std::invalid_argument&) {
        throw ConfigError("--" + name + ": cannot parse complex number '" + text + "'");
    }
}

// Defaults, then flags, then the config file (file values win).
RunConfig resolve(const Flags& fl)
{
    RunConfig cfg;
    auto& f = cfg.family;
    auto& p = cfg.pipeline;
    auto& g = cfg.render.grid;
    if (fl.family) f.kind = *fl.family;
    if (fl.lambda) f.lambda = complex_flag("lambda", *fl.lambda);
    if (fl.m) f.m = *fl.m;
    if (fl.d) f.d = *fl.d;
    if (fl.omega1) f.omega1 = complex_flag("omega1", *fl.omega1);
    if (fl.omega2) f.omega2 = complex_flag("omega2", *fl.omega2);
    if (!fl.poly.empty()) {
        f.poly.clear();
        for (const auto& c : fl.poly) {
            f.poly.push_back(complex_flag("poly", c));
        }
    }
    if (fl.radius) p.search_radius = *fl.radius;
    if (fl.outer_radius) p.outer_radius = *fl.outer_radius;
    if (fl.inner_radius) p.inner_radius = *fl.inner_radius;
    if (fl.max_branches) p.max_branches = *fl.max_branches;
    if (fl.distortion) p.distortion = *fl.distortion;
    if (fl.threads) p.threads = *fl.threads;
    if (fl.seed) p.seed = *fl.seed;
    if (fl.out) cfg.output.directory = *fl.out;
    if (fl.center) g.center = complex_flag("center", *fl.center);
    if (fl.width) g.width = *fl.width;
    if (fl.pixels) g.pixels_x = g.pixels_y = *fl.pixels;
    if (fl.max_iter) g.max_iter = *fl.max_iter;
    if (fl.escape_radius) g.escape_radius = *fl.escape_radius;
    if (fl.config) {
        return load_config_file(cfg, *fl.config);
    }
    cfg.validate();
    return cfg;
}

fs::path out_dir(const RunConfig& cfg)
{
    fs::path dir(cfg.output.directory);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes)
{
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

void write_manifest(const RunConfig& cfg, const std::string& command)
{
    json m;
    m["command"] = command;
    m["config"] = json::parse(canonical_config(cfg));
    m["config_hash"] = config_hash(cfg);
    m["seed"] = cfg.pipeline.seed;
    m["versions"] = {{"merodim", version}, {"compiler", __VERSION__}};
    write_text(out_dir(cfg) / "manifest.json", m.dump(2) + "\n");
}

void print_table(std::span<const BoundReport> rows)
{
    std::cout << std::left << std::setw(34) << "family" << std::setw(8) << "rho" << std::setw(8) << "alpha1"
              << std::setw(5) << "q" << std::setw(12) << "bound" << std::setw(12) << "theta_hat" << std::setw(12)
              << "bowen" << "verdict\n";
    const auto opt = [](const std::optional<double>& v) {
        std::ostringstream s;
        if (v) {
            s << std::setprecision(6) << *v;
        } else {
            s << "-";
        }
        return s.str();
    };
    for (const auto& r : rows) {
        std::cout << std::setw(34) << r.family_label << std::setw(8) << r.input.rho << std::setw(8) << r.input.alpha1
                  << std::setw(5) << r.input.q << std::setw(12) << std::setprecision(8) << r.theoretical
                  << std::setw(12) << opt(r.theta_hat) << std::setw(12) << opt(r.bowen_root) << to_string(r.verdict)
                  << '\n';
    }
}

void write_bound_files(const RunConfig& cfg, std::span<const BoundReport> rows)
{
    const fs::path dir = out_dir(cfg);
    if (cfg.output.wants("csv")) {
        std::ofstream csv(dir / "bounds.csv");
        write_bounds_csv(csv, rows);
    }
    if (cfg.output.wants("json")) {
        json arr = json::array();
        for (const auto& r : rows) {
            arr.push_back(to_json(r));
        }
        write_text(dir / "bounds.json", arr.dump(2) + "\n");
    }
}

int cmd_bound(const Flags& fl)
{
    const RunConfig cfg = resolve(fl);
    write_manifest(cfg, "bound");
    std::vector<BoundReport> rows;
    const bool numerics = !fl.table_only && (fl.family || fl.config);
    if (!numerics) {
        rows = corollary_table();
    } else {
        const FamilySpec f = family_from_config(cfg.family);
        const PipelineResult res = run_pipeline(f, cfg.pipeline);
        for (const auto& note : res.notes) {
            std::cerr << "note: " << note << '\n';
        }
        rows.push_back(res.report);
    }
    print_table(rows);
    write_bound_files(cfg, rows);
    const bool bad = std::any_of(rows.begin(), rows.end(), [](const BoundReport& r) {
        return r.verdict == Verdict::Inconsistent;
    });
    return bad ? InconsistentVerdict : Ok;
}

int cmd_preimages(const Flags& fl)
{
    const RunConfig cfg = resolve(fl);
    write_manifest(cfg, "preimages");
    const FamilySpec f = family_from_config(cfg.family);
    const PoleData b = select_pole(f);
    const Complex target = fl.target ? complex_flag("target", *fl.target) : b.location;
    double radius = 0.0;
    if (cfg.pipeline.search_radius) {
        radius = *cfg.pipeline.search_radius;
    } else {
        const IfsConfig ifs = make_ifs_config(f, b, cfg.pipeline.max_branches.value_or(default_max_branches(f)),
                                              cfg.pipeline.inner_radius,
                                              cfg.pipeline.outer_radius);
        radius = default_search_radius(f, ifs);
    }
    SolverOptions so;
    so.leaf_diameter = cfg.pipeline.leaf_diameter;
    so.seed = cfg.pipeline.seed;
    so.threads = cfg.pipeline.threads;
    const auto pre = find_preimages(f, target, radius, so);
    std::ofstream csv(out_dir(cfg) / "preimages.csv");
    write_preimages_csv(csv, pre);
    std::cout << pre.size() << " solutions of f(z) = " << format_complex(target, 10) << " with |z| <= " << radius
              << '\n';
    return Ok;
}

int cmd_theta(const Flags& fl)
{
    const RunConfig cfg = resolve(fl);
    write_manifest(cfg, "theta");
    const FamilySpec f = family_from_config(cfg.family);
    const PipelineResult res = run_pipeline(f, cfg.pipeline);
    const fs::path dir = out_dir(cfg);
    const json j = res.theta ? to_json(*res.theta) : json(nullptr);
    write_text(dir / "theta.json", j.dump(2) + "\n");
    if (cfg.output.wants("csv")) {
        std::ofstream csv(dir / "branches.csv");
        write_branches_csv(csv, res.branches.branches);
    }
    for (const auto& note : res.notes) {
        std::cerr << "note: " << note << '\n';
    }
    std::cout << j.dump(2) << '\n';
    return Ok;
}

json render_outputs(const RunConfig& cfg, const FamilySpec& f)
{
    const fs::path dir = out_dir(cfg);
    const auto& grid = cfg.render.grid;
    const Classification c = classify(f, grid, cfg.pipeline.threads);
    if (cfg.output.wants("ppm")) {
        write_bytes(dir / "render.ppm", to_p6(c, grid.max_iter));
    }
    const Mask mask = boundary_mask(c);
    if (cfg.output.wants("ppm")) {
        write_bytes(dir / "boundary.pbm", to_p4(mask));
    }
    std::vector<int> sizes;
    for (int s = 2; s <= std::min(grid.pixels_x, grid.pixels_y) / 4; s *= 2) {
        sizes.push_back(s);
    }
    json j;
    j["box_sizes"] = sizes;
    try {
        const auto counts = box_counts(mask, sizes);
        if (cfg.output.wants("csv")) {
            std::ofstream csv(dir / "boxcount.csv");
            write_box_counts_csv(csv, counts);
        }
        j["box_counting_dimension"] = box_counting(mask, sizes);
    } catch (const std::exception& e) {
        j["box_counting_dimension"] = nullptr;
        j["box_counting_error"] = e.what();
    }
    return j;
}

int cmd_render(const Flags& fl)
{
    const RunConfig cfg = resolve(fl);
    write_manifest(cfg, "render");
    const FamilySpec f = family_from_config(cfg.family);
    const json j = render_outputs(cfg, f);
    std::cout << j.dump(2) << '\n';
    return Ok;
}

int cmd_report(const Flags& fl)
{
    const RunConfig cfg = resolve(fl);
    write_manifest(cfg, "report");
    const FamilySpec f = family_from_config(cfg.family);
    const PipelineResult res = run_pipeline(f, cfg.pipeline);
    json j;
    j["config_hash"] = config_hash(cfg);
    j["pipeline"] = to_json(res);
    j["render"] = cfg.render.enabled ? render_outputs(cfg, f) : json(nullptr);
    const fs::path dir = out_dir(cfg);
    write_text(dir / "report.json", j.dump(2) + "\n");
    if (cfg.output.wants("csv")) {
        std::ofstream pre(dir / "preimages.csv");
        write_preimages_csv(pre, res.preimages.preimages);
        std::ofstream br(dir / "branches.csv");
        write_branches_csv(br, res.branches.branches);
    }
    const BoundReport rows[] = {res.report};
    print_table(rows);
    return res.report.verdict == Verdict::Inconsistent ? InconsistentVerdict : Ok;
}

void add_shared(CLI::App& app, Flags& fl)
{
    app.add_option("--config", fl.config, "JSON config file or manifest; its values override flags");
    app.add_option("--family", fl.family, "tan | weierstrass | elliptic-poly | exp-elliptic")
        ->check(CLI::IsMember({"tan", "weierstrass", "elliptic-poly", "exp-elliptic"}));
    app.add_option("--lambda", fl.lambda, "multiplier (complex, e.g. 1+0.5i)");
    app.add_option("--m", fl.m, "tan power");
    app.add_option("--d", fl.d, "exp-elliptic degree");
    app.add_option("--omega1", fl.omega1, "first lattice generator");
    app.add_option("--omega2", fl.omega2, "second lattice generator");
    app.add_option("--poly", fl.poly, "polynomial coefficients, lowest degree first");
    app.add_option("--radius", fl.radius, "preimage search radius");
    app.add_option("--outer-radius", fl.outer_radius, "outer radius R of the branch system");
    app.add_option("--inner-radius", fl.inner_radius, "radius of the disk D around the pole");
    app.add_option("--max-branches", fl.max_branches, "branch cap (default: 200 for tan, all otherwise)");
    app.add_option("--distortion", fl.distortion, "Bowen distortion mode")->check(CLI::IsMember({"off", "koebe"}));
    app.add_option("--threads", fl.threads, "worker threads");
    app.add_option("--seed", fl.seed, "seed for subdivision jitter (default 42)");
    app.add_option("--out", fl.out, "output directory");
    app.add_option("--target", fl.target, "preimages: solve f(z) = target (default: the selected pole)");
    app.add_option("--center", fl.center, "render: frame center");
    app.add_option("--width", fl.width, "render: frame width");
    app.add_option("--pixels", fl.pixels, "render: pixels per side");
    app.add_option("--max-iter", fl.max_iter, "render: iteration cap");
    app.add_option("--escape-radius", fl.escape_radius, "render: escape radius");
    app.add_flag("--table-only", fl.table_only, "bound: print the theory table without numerics");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Critical exponents and dimension bounds for meromorphic families"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);
    Flags fl;
    add_shared(app, fl);
    app.fallthrough();

    int (*handler)(const Flags&) = nullptr;
    app.add_subcommand("bound", "theorem bound table, with numerics when a family is given")
        ->callback([&] { handler = cmd_bound; });
    app.add_subcommand("preimages", "solutions of f(z) = target as CSV")->callback([&] { handler = cmd_preimages; });
    app.add_subcommand("theta", "critical exponent estimate as JSON")->callback([&] { handler = cmd_theta; });
    app.add_subcommand("render", "escape/capture image, boundary mask, box counts")
        ->callback([&] { handler = cmd_render; });
    app.add_subcommand("report", "every stage in one JSON bundle")->callback([&] { handler = cmd_report; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigFailure;
    }

    try {
        return handler(fl);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return RuntimeFailure;
    }
}
