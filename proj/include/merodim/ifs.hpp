#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "merodim/family.hpp"
#include "merodim/preimage.hpp"

namespace merodim {

// Geometry of the two-level inverse-branch system around one pole b:
// D = D(b, inner_radius), D* = D(b, safety_radius) with safety = 2 * inner,
// and {|z| > outer_radius} contained in f(D \ {b}).
struct IfsConfig {
    PoleData pole;
    double inner_radius = 0.0;
    double safety_radius = 0.0;
    double outer_radius = 0.0;
    std::size_t max_branches = 0;
};

// Half the distance from b to the nearest other pole or critical point,
// capped at 0.5.
double default_inner_radius(const FamilySpec& f, const PoleData& pole);

// Smallest R (with a 1% margin) such that |f| > R is guaranteed outside the
// image of the circle |z - b| = inner_radius: max of |f| over that circle.
double default_outer_radius(const FamilySpec& f, const PoleData& pole, double inner_radius);

// Builds a config with defaults for any radius left unset and validates it.
IfsConfig make_ifs_config(const FamilySpec& f, const PoleData& pole, std::size_t max_branches,
                          std::optional<double> inner_radius = std::nullopt,
                          std::optional<double> outer_radius = std::nullopt);

// Throws std::invalid_argument if another pole or a critical point lies in
// D*, or if |f'| vanishes on a sample grid of D* \ {b}.
void validate_ifs_config(const FamilySpec& f, const IfsConfig& cfg);

// b-points must satisfy |z_n| > claim_threshold(cfg) to enter the system.
inline double claim_threshold(const IfsConfig& cfg)
{
    return 3.0 * cfg.outer_radius;
}

// One map Phi_n = psi_n o phi_n with Phi_n(b) = w_n and f(w_n) = z_n, f(z_n) = b.
struct Branch {
    std::size_t index = 0;
    Complex z;
    Complex w;
    // |Phi_n'(b)| = 1 / (|f'(w_n)| |f'(z_n)|)
    double phi_deriv_mag = 0.0;
    double residual_z = 0.0;
    double residual_w = 0.0;
};

struct BranchBuild {
    std::vector<Branch> branches;
    std::size_t bpoints_used = 0;
    // Newton converged outside D (SeedEscapedD) or to an already-found w.
    std::size_t seeds_escaped = 0;
    std::size_t newton_failures = 0;
};

// For every admissible b-point, solves f(w) = z_n from the q seeds
// b + (g(b)/z_n)^(1/q) and keeps each distinct solution inside D. Stops at
// cfg.max_branches branches; indices are 1-based in (z_n, root) order.
BranchBuild build_branches(const FamilySpec& f, const IfsConfig& cfg, std::span<const Preimage> bpoints,
                           unsigned threads = 1);

// Sum of phi_deriv_mag^t over branches with index >= n0.
double poincare_sum(std::span<const Branch> branches, double t, std::size_t n0 = 1);

struct ThetaEstimate {
    double slope_beta = 0.0;
    double rho_hat = 0.0;
    double theta_hat = 0.0;
    double r_squared = 0.0;
    std::size_t n_used = 0;
    // r_squared < 0.9
    bool degenerate_fit = false;
};

// log phi_deriv_mag ~ slope_beta * log|z_n|; theta_hat = rho_hat / |slope_beta|.
ThetaEstimate estimate_theta(std::span<const Branch> branches, double rho_hat);

struct BowenRoot {
    double t = 0.0;
    // false when the sum is already <= 1 as t -> 0 (e.g. a single map)
    bool found = false;
};

// Root of sum over the first subset_size branches of
// (phi_deriv_mag / distortion_factor)^t = 1, by bisection on [1e-6, 10].
BowenRoot bowen_one_level(std::span<const Branch> branches, std::size_t subset_size, double distortion_factor = 1.0);

// Koebe distortion constant (1 + s) / (1 - s)^3.
double koebe_distortion_factor(double s = 0.5);

struct SeparationReport {
    std::size_t n0 = 1;
    std::size_t checked_up_to = 0;
    // (i, j): inner disks of branches i < j intersect; (i, 0): the outer
    // disk of branch i is not contained in D.
    std::vector<std::pair<std::size_t, std::size_t>> violations;

    bool witnessed() const { return n0 <= checked_up_to; }
};

// Brackets Phi_n(D) between the disks of radius rho_n / 4 and 4 rho_n about
// w_n, rho_n = phi_deriv_mag * inner_radius, and finds the first index from
// which all outer disks lie in D and all inner disks are pairwise disjoint.
SeparationReport separation_check(std::span<const Branch> branches, const IfsConfig& cfg);

// Sums of phi_deriv_mag^t over dyadic shells 2^k <= |z_n| < 2^(k+1). Block
// sums that do not decay point at a series divergent at t.
struct DyadicBlocks {
    std::vector<double> shell_start;
    std::vector<double> sums;
    bool divergence_indicated = false;
};

DyadicBlocks dyadic_block_sums(std::span<const Branch> branches, double t);

void write_branches_csv(std::ostream& os, std::span<const Branch> branches);

} // namespace merodim
