#include "merodim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "merodim/parallel.hpp"
#include "merodim/regression.hpp"

namespace merodim {

namespace {

struct LocalRoots {
    std::vector<std::pair<Complex, Jet>> roots;
    std::size_t escaped = 0;
    std::size_t failures = 0;
};

// Newton for 1/f(w) = 1/target, which has a simple root near a pole of f.
std::optional<Complex> newton_reciprocal(const FamilySpec& f, Complex w, Complex target)
{
    for (int it = 0; it < 60; ++it) {
        const auto j = jet(f, w);
        if (!j || j->deriv == Complex{}) {
            return std::nullopt;
        }
        const Complex step = (j->value / j->deriv) * (1.0 - j->value / target);
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
            return std::nullopt;
        }
        w += step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(w))) {
            return w;
        }
    }
    // Accept a stalled iteration if the residual is already at rounding level.
    if (const auto j = jet(f, w); j && std::abs(j->value - target) < 1e-12 * std::abs(target)) {
        return w;
    }
    return std::nullopt;
}

LocalRoots solve_near_pole(const FamilySpec& f, const IfsConfig& cfg, Complex z)
{
    LocalRoots out;
    const int q = cfg.pole.multiplicity;
    const Complex b = cfg.pole.location;
    const Complex principal = std::pow(cfg.pole.leading_coefficient / z, 1.0 / q);
    for (int k = 0; k < q; ++k) {
        const Complex seed = b + principal * std::polar(1.0, 2.0 * pi * k / q);
        const auto w = newton_reciprocal(f, seed, z);
        if (!w) {
            ++out.failures;
            continue;
        }
        const auto j = jet(f, *w);
        if (!j || std::abs(j->value - z) >= 1e-9 * std::abs(z)) {
            ++out.failures;
            continue;
        }
        if (std::abs(*w - b) >= cfg.inner_radius) {
            ++out.escaped;
            continue;
        }
        const bool duplicate = std::any_of(out.roots.begin(), out.roots.end(), [&](const auto& r) {
            return std::abs(r.first - *w) < 1e-10 * std::max(1.0, std::abs(*w));
        });
        if (duplicate) {
            ++out.escaped;
            continue;
        }
        out.roots.emplace_back(*w, *j);
    }
    return out;
}

} // namespace

double default_inner_radius(const FamilySpec& f, const PoleData& pole)
{
    const Complex b = pole.location;
    double nearest = std::numeric_limits<double>::infinity();
    for (double r = 1.0; r <= 128.0 && !std::isfinite(nearest); r *= 2.0) {
        for (const PoleData& p : poles_in_disk(f, b, r)) {
            const double d = std::abs(p.location - b);
            if (d > 1e-9) {
                nearest = std::min(nearest, d);
            }
        }
        for (const Complex c : critical_points_in_disk(f, b, r)) {
            nearest = std::min(nearest, std::abs(c - b));
        }
    }
    return std::min(0.5, 0.5 * nearest);
}

double default_outer_radius(const FamilySpec& f, const PoleData& pole, double inner_radius)
{
    constexpr int samples = 720;
    double max_abs = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Complex z = pole.location + std::polar(inner_radius, 2.0 * pi * (k + 0.5) / samples);
        max_abs = std::max(max_abs, std::abs(eval(f, z).value()));
    }
    return 1.01 * max_abs;
}

IfsConfig make_ifs_config(const FamilySpec& f, const PoleData& pole, std::size_t max_branches,
                          std::optional<double> inner_radius, std::optional<double> outer_radius)
{
    IfsConfig cfg;
    cfg.pole = pole;
    cfg.inner_radius = inner_radius.value_or(default_inner_radius(f, pole));
    cfg.safety_radius = 2.0 * cfg.inner_radius;
    cfg.outer_radius = outer_radius.value_or(default_outer_radius(f, pole, cfg.inner_radius));
    cfg.max_branches = max_branches;
    validate_ifs_config(f, cfg);
    return cfg;
}

void validate_ifs_config(const FamilySpec& f, const IfsConfig& cfg)
{
    if (!(cfg.inner_radius > 0.0)) {
        throw std::invalid_argument("IFS config: inner radius must be positive");
    }
    if (std::abs(cfg.safety_radius - 2.0 * cfg.inner_radius) > 1e-12 * cfg.inner_radius) {
        throw std::invalid_argument("IFS config: safety radius must be twice the inner radius");
    }
    if (!(cfg.outer_radius > 0.0)) {
        throw std::invalid_argument("IFS config: outer radius must be positive");
    }
    if (cfg.max_branches == 0) {
        throw std::invalid_argument("IFS config: max_branches must be positive");
    }
    const Complex b = cfg.pole.location;
    const double open_limit = cfg.safety_radius * (1.0 - 1e-12);
    for (const PoleData& p : poles_in_disk(f, b, cfg.safety_radius)) {
        const double d = std::abs(p.location - b);
        if (d > 1e-9 && d < open_limit) {
            throw std::invalid_argument("IFS config: another pole lies in D*");
        }
    }
    for (const Complex c : critical_points_in_disk(f, b, cfg.safety_radius)) {
        if (std::abs(c - b) < open_limit) {
            throw std::invalid_argument("IFS config: a critical point lies in D*");
        }
    }
    for (int i = 1; i <= 16; ++i) {
        const double r = cfg.safety_radius * i / 17.0;
        for (int k = 0; k < 32; ++k) {
            const auto j = jet(f, b + std::polar(r, 2.0 * pi * (k + 0.25) / 32.0));
            if (!j || !(std::abs(j->deriv) > 0.0) || !std::isfinite(std::abs(j->deriv))) {
                throw std::invalid_argument("IFS config: f' vanishes or is singular on D* sample grid");
            }
        }
    }
}

BranchBuild build_branches(const FamilySpec& f, const IfsConfig& cfg, std::span<const Preimage> bpoints,
                           unsigned threads)
{
    std::vector<Preimage> admissible;
    const double threshold = claim_threshold(cfg);
    for (const auto& p : bpoints) {
        if (p.modulus > threshold) {
            admissible.push_back(p);
        }
    }
    std::sort(admissible.begin(), admissible.end(),
              [](const Preimage& x, const Preimage& y) { return modulus_then_arg_less(x.point, y.point); });

    BranchBuild out;
    std::size_t next = 0;
    while (out.branches.size() < cfg.max_branches && next < admissible.size()) {
        const std::size_t remaining = cfg.max_branches - out.branches.size();
        const std::size_t chunk = std::min(remaining, admissible.size() - next);
        std::vector<LocalRoots> solved(chunk);
        parallel_for(chunk, threads, [&](std::size_t i) { solved[i] = solve_near_pole(f, cfg, admissible[next + i].point); });
        for (std::size_t i = 0; i < chunk && out.branches.size() < cfg.max_branches; ++i) {
            const Preimage& zp = admissible[next + i];
            ++out.bpoints_used;
            out.seeds_escaped += solved[i].escaped;
            out.newton_failures += solved[i].failures;
            const auto jz = jet(f, zp.point);
            if (!jz) {
                ++out.newton_failures;
                continue;
            }
            for (const auto& [w, jw] : solved[i].roots) {
                if (out.branches.size() >= cfg.max_branches) {
                    break;
                }
                Branch br;
                br.index = out.branches.size() + 1;
                br.z = zp.point;
                br.w = w;
                br.phi_deriv_mag = 1.0 / (std::abs(jw.deriv) * std::abs(jz->deriv));
                br.residual_z = std::abs(jz->value - cfg.pole.location);
                br.residual_w = std::abs(jw.value - zp.point);
                out.branches.push_back(br);
            }
        }
        next += chunk;
    }
    return out;
}

double poincare_sum(std::span<const Branch> branches, double t, std::size_t n0)
{
    if (!(t > 0.0)) {
        throw std::invalid_argument("poincare_sum: t must be positive");
    }
    if (branches.empty()) {
        throw std::invalid_argument("poincare_sum: no branches");
    }
    double sum = 0.0;
    for (const auto& br : branches) {
        if (br.index >= n0) {
            sum += std::pow(br.phi_deriv_mag, t);
        }
    }
    return sum;
}

ThetaEstimate estimate_theta(std::span<const Branch> branches, double rho_hat)
{
    if (branches.size() < 30) {
        throw InsufficientData("estimate_theta: need at least 30 branches");
    }
    if (!(rho_hat > 0.0)) {
        throw std::invalid_argument("estimate_theta: rho_hat must be positive");
    }
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(branches.size());
    y.reserve(branches.size());
    for (const auto& br : branches) {
        x.push_back(std::log(std::abs(br.z)));
        y.push_back(std::log(br.phi_deriv_mag));
    }
    const LinearFit fit = fit_line(x, y);
    if (!(fit.slope < 0.0)) {
        throw InsufficientData("estimate_theta: derivative magnitudes do not decay");
    }
    ThetaEstimate est;
    est.slope_beta = fit.slope;
    est.rho_hat = rho_hat;
    est.theta_hat = rho_hat / std::abs(fit.slope);
    est.r_squared = fit.r_squared;
    est.n_used = branches.size();
    est.degenerate_fit = fit.r_squared < 0.9;
    return est;
}

BowenRoot bowen_one_level(std::span<const Branch> branches, std::size_t subset_size, double distortion_factor)
{
    if (subset_size == 0 || subset_size > branches.size()) {
        throw std::invalid_argument("bowen_one_level: subset size out of range");
    }
    if (!(distortion_factor >= 1.0)) {
        throw std::invalid_argument("bowen_one_level: distortion factor must be >= 1");
    }
    std::vector<double> logs;
    logs.reserve(subset_size);
    for (std::size_t i = 0; i < subset_size; ++i) {
        const double c = branches[i].phi_deriv_mag / distortion_factor;
        if (!(c < 1.0) || !(c > 0.0)) {
            throw NotContracting("bowen_one_level: branch is not a contraction");
        }
        logs.push_back(std::log(c));
    }
    const auto sum = [&](double t) {
        double s = 0.0;
        for (const double l : logs) {
            s += std::exp(t * l);
        }
        return s;
    };
    double lo = 1e-6;
    double hi = 10.0;
    if (sum(lo) <= 1.0) {
        return {0.0, false};
    }
    if (sum(hi) > 1.0) {
        return {hi, false};
    }
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (sum(mid) > 1.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), true};
}

double koebe_distortion_factor(double s)
{
    if (!(s >= 0.0 && s < 1.0)) {
        throw std::invalid_argument("koebe_distortion_factor: s must lie in [0, 1)");
    }
    return (1.0 + s) / ((1.0 - s) * (1.0 - s) * (1.0 - s));
}

SeparationReport separation_check(std::span<const Branch> branches, const IfsConfig& cfg)
{
    if (branches.empty()) {
        throw std::invalid_argument("separation_check: no branches");
    }
    SeparationReport rep;
    const Complex b = cfg.pole.location;
    const double r = cfg.inner_radius;
    std::size_t max_index = 0;
    for (const auto& br : branches) {
        max_index = std::max(max_index, br.index);
        const double rho = br.phi_deriv_mag * r;
        if (!(std::abs(br.w - b) + 4.0 * rho < r)) {
            rep.violations.emplace_back(br.index, 0);
        }
    }
    rep.checked_up_to = max_index;

    // Sweep along Re(w) to find intersecting inner disks.
    std::vector<std::size_t> order(branches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto inner = [&](std::size_t i) { return 0.25 * branches[i].phi_deriv_mag * r; };
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return branches[i].w.real() - inner(i) < branches[j].w.real() - inner(j);
    });
    for (std::size_t a = 0; a < order.size(); ++a) {
        const auto& bi = branches[order[a]];
        const double ri = inner(order[a]);
        for (std::size_t c = a + 1; c < order.size(); ++c) {
            const auto& bj = branches[order[c]];
            const double rj = inner(order[c]);
            if (bj.w.real() - rj > bi.w.real() + ri) {
                break;
            }
            if (std::abs(bi.w - bj.w) < ri + rj) {
                rep.violations.emplace_back(std::min(bi.index, bj.index), std::max(bi.index, bj.index));
            }
        }
    }
    std::sort(rep.violations.begin(), rep.violations.end());

    std::size_t last_bad = 0;
    for (const auto& [i, j] : rep.violations) {
        last_bad = std::max(last_bad, j == 0 ? i : std::min(i, j));
    }
    rep.n0 = last_bad + 1;
    return rep;
}

DyadicBlocks dyadic_block_sums(std::span<const Branch> branches, double t)
{
    std::map<int, double> shells;
    for (const auto& br : branches) {
        const int k = static_cast<int>(std::floor(std::log2(std::abs(br.z))));
        shells[k] += std::pow(br.phi_deriv_mag, t);
    }
    DyadicBlocks out;
    if (shells.empty()) {
        return out;
    }
    const int kmin = shells.begin()->first;
    const int kmax = shells.rbegin()->first;
    for (int k = kmin; k <= kmax; ++k) {
        out.shell_start.push_back(std::ldexp(1.0, k));
        const auto it = shells.find(k);
        out.sums.push_back(it == shells.end() ? 0.0 : it->second);
    }
    // The first and last shells are cut by the admissibility threshold and
    // the search radius; judge the trend on the complete ones in between.
    if (out.sums.size() >= 5) {
        std::vector<double> x;
        std::vector<double> y;
        for (std::size_t i = 1; i + 1 < out.sums.size(); ++i) {
            if (out.sums[i] > 0.0) {
                x.push_back(static_cast<double>(i));
                y.push_back(std::log2(out.sums[i]));
            }
        }
        if (x.size() >= 3) {
            out.divergence_indicated = fit_line(x, y).slope > -0.1;
        }
    }
    return out;
}

void write_branches_csv(std::ostream& os, std::span<const Branch> branches)
{
    const auto old = os.precision(17);
    os << "index,z_re,z_im,w_re,w_im,phi_deriv_mag\n";
    for (const auto& br : branches) {
        os << br.index << ',' << br.z.real() << ',' << br.z.imag() << ',' << br.w.real() << ',' << br.w.imag() << ','
           << br.phi_deriv_mag << '\n';
    }
    os.precision(old);
}

} // namespace merodim
