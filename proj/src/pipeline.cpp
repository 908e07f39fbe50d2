#include "merodim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "merodim/complex_io.hpp"

namespace merodim {

using nlohmann::json;

PoleData select_pole(const FamilySpec& f)
{
    const auto singular = singular_values(f);
    for (double r = 2.0; r <= 1024.0; r *= 2.0) {
        for (const auto& p : poles_in_disk(f, r)) {
            const bool clear = std::none_of(singular.begin(), singular.end(),
                                            [&](Complex s) { return std::abs(s - p.location) < 1e-6; });
            if (clear) {
                return p;
            }
        }
    }
    throw HypothesisViolated("select_pole: every pole near the origin is a singular value");
}

BoundInput bound_input(const FamilySpec& f)
{
    return {f.order(), f.alpha1(), f.max_pole_multiplicity()};
}

double default_search_radius(const FamilySpec& f, const IfsConfig& cfg)
{
    const double generic = 1.6 * claim_threshold(cfg);
    if (f.kind() == "tan") {
        return std::max(200.0 * pi, generic);
    }
    return generic;
}

std::size_t default_max_branches(const FamilySpec& f)
{
    // A few hundred branches of tan already span two decades of |z_n|; the
    // elliptic families need the whole annulus above the claim threshold.
    return f.kind() == "tan" ? 200 : std::numeric_limits<std::size_t>::max();
}

PipelineResult run_pipeline(const FamilySpec& f, const PipelineBlock& opts)
{
    PipelineResult res;
    res.family_label = f.label();
    res.bound_input = bound_input(f);

    const PoleData b = select_pole(f);
    res.ifs = make_ifs_config(f, b, opts.max_branches.value_or(default_max_branches(f)), opts.inner_radius, opts.outer_radius);
    res.search_radius = opts.search_radius.value_or(default_search_radius(f, res.ifs));

    SolverOptions so;
    so.leaf_diameter = opts.leaf_diameter;
    so.seed = opts.seed;
    so.threads = opts.threads;
    res.preimages = search_preimages(f, b.location, res.search_radius, so);

    std::vector<double> radii;
    const int n = opts.counting_samples;
    for (int i = 1; i <= n; ++i) {
        radii.push_back(res.search_radius * i / n);
    }
    res.counting = counting_function(res.preimages.preimages, radii);
    try {
        res.rho_hat = estimate_order_of_growth(res.counting);
    } catch (const InsufficientData& e) {
        res.notes.push_back(std::string("order of growth: ") + e.what());
    }

    res.branches = build_branches(f, res.ifs, res.preimages.preimages, opts.threads);
    const auto& branches = res.branches.branches;

    if (res.rho_hat) {
        std::vector<Branch> window;
        std::copy_if(branches.begin(), branches.end(), std::back_inserter(window),
                     [&](const Branch& br) { return std::abs(br.z) >= opts.regression_min_modulus; });
        try {
            res.theta = estimate_theta(window, *res.rho_hat);
        } catch (const InsufficientData& e) {
            res.notes.push_back(std::string("theta: ") + e.what());
        }
    }

    res.distortion_factor = opts.distortion == "koebe" ? koebe_distortion_factor() : 1.0;
    if (!branches.empty()) {
        res.separation = separation_check(branches, res.ifs);
        try {
            res.bowen = bowen_one_level(branches, branches.size(), res.distortion_factor);
        } catch (const NotContracting& e) {
            res.notes.push_back(std::string("bowen: ") + e.what());
        }
    } else {
        res.notes.push_back("no admissible b-points inside the search radius");
    }
    if (res.theta) {
        try {
            res.dyadic = dyadic_block_sums(branches, res.theta->theta_hat);
        } catch (const std::exception& e) {
            res.notes.push_back(std::string("dyadic blocks: ") + e.what());
        }
    }

    std::optional<double> bowen_t;
    if (res.bowen && res.bowen->found) {
        bowen_t = res.bowen->t;
    }
    res.report = compare(res.family_label, res.bound_input, res.theta, bowen_t);
    return res;
}

json to_json(const ThetaEstimate& t)
{
    return {{"slope_beta", t.slope_beta}, {"rho_hat", t.rho_hat},   {"theta_hat", t.theta_hat},
            {"r_squared", t.r_squared},   {"n_used", t.n_used},     {"degenerate_fit", t.degenerate_fit}};
}

json to_json(const BoundReport& r)
{
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return {{"family_label", r.family_label},
            {"rho", r.input.rho},
            {"alpha1", r.input.alpha1},
            {"q", r.input.q},
            {"theoretical", r.theoretical},
            {"theta_hat", opt(r.theta_hat)},
            {"bowen_root", opt(r.bowen_root)},
            {"verdict", to_string(r.verdict)},
            {"note", r.note}};
}

json to_json(const PipelineResult& r)
{
    json j;
    j["family_label"] = r.family_label;
    j["pole"] = {{"location", format_complex(r.ifs.pole.location)},
                 {"multiplicity", r.ifs.pole.multiplicity},
                 {"leading_coefficient", format_complex(r.ifs.pole.leading_coefficient)}};
    j["ifs"] = {{"inner_radius", r.ifs.inner_radius},
                {"safety_radius", r.ifs.safety_radius},
                {"outer_radius", r.ifs.outer_radius},
                {"claim_threshold", claim_threshold(r.ifs)},
                {"max_branches", r.ifs.max_branches == std::numeric_limits<std::size_t>::max()
                                     ? json(nullptr)
                                     : json(r.ifs.max_branches)}};
    j["preimages"] = {{"search_radius", r.search_radius},
                      {"count", r.preimages.preimages.size()},
                      {"enclosing_count", r.preimages.enclosing_count},
                      {"leaf_count_sum", r.preimages.leaf_count_sum},
                      {"cells_examined", r.preimages.cells_examined},
                      {"retries", r.preimages.retries}};
    json counting = json::array();
    for (const auto& s : r.counting) {
        counting.push_back({s.radius, s.count});
    }
    j["counting_function"] = counting;
    j["rho_hat"] = r.rho_hat ? json(*r.rho_hat) : json(nullptr);
    j["branches"] = {{"count", r.branches.branches.size()},
                     {"bpoints_used", r.branches.bpoints_used},
                     {"seeds_escaped", r.branches.seeds_escaped},
                     {"newton_failures", r.branches.newton_failures}};
    j["theta"] = r.theta ? to_json(*r.theta) : json(nullptr);
    if (r.separation) {
        json v = json::array();
        for (const auto& [a, b] : r.separation->violations) {
            v.push_back({a, b});
        }
        j["separation"] = {{"n0", r.separation->n0},
                           {"checked_up_to", r.separation->checked_up_to},
                           {"witnessed", r.separation->witnessed()},
                           {"violations", v}};
    } else {
        j["separation"] = nullptr;
    }
    j["distortion_factor"] = r.distortion_factor;
    j["bowen"] = r.bowen ? json{{"t", r.bowen->t}, {"found", r.bowen->found}} : json(nullptr);
    if (r.dyadic) {
        j["dyadic_blocks"] = {{"shell_start", r.dyadic->shell_start},
                              {"sums", r.dyadic->sums},
                              {"divergence_indicated", r.dyadic->divergence_indicated}};
    } else {
        j["dyadic_blocks"] = nullptr;
    }
    j["bound"] = to_json(r.report);
    j["notes"] = r.notes;
    return j;
}

} // namespace merodim
