#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "merodim/bounds.hpp"
#include "merodim/config.hpp"
#include "merodim/ifs.hpp"
#include "merodim/preimage.hpp"

namespace merodim {

// First pole by modulus then argument that is not within 1e-6 of a finite
// singular value; the IFS needs b away from the postsingular set.
PoleData select_pole(const FamilySpec& f);

// Theoretical (rho, alpha1, q) for a family.
BoundInput bound_input(const FamilySpec& f);

double default_search_radius(const FamilySpec& f, const IfsConfig& cfg);
std::size_t default_max_branches(const FamilySpec& f);

struct PipelineResult {
    std::string family_label;
    BoundInput bound_input;
    IfsConfig ifs;
    double search_radius = 0.0;
    PreimageSearch preimages;
    std::vector<CountingSample> counting;
    std::optional<double> rho_hat;
    BranchBuild branches;
    std::optional<ThetaEstimate> theta;
    std::optional<SeparationReport> separation;
    double distortion_factor = 1.0;
    std::optional<BowenRoot> bowen;
    std::optional<DyadicBlocks> dyadic;
    BoundReport report;
    // Stages that could not produce a value, with the reason.
    std::vector<std::string> notes;
};

// Preimages of b -> rho_hat -> branches -> theta_hat, separation, Bowen
// root, dyadic blocks -> comparison with the bound. Numerical stages that
// fail (too few branches, ...) leave their field empty and add a note.
PipelineResult run_pipeline(const FamilySpec& f, const PipelineBlock& opts);

nlohmann::json to_json(const ThetaEstimate& t);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const PipelineResult& r);

} // namespace merodim
