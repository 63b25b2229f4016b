#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/fields.hpp"
#include "finsler/psi.hpp"

namespace finsler::cli {

using json = nlohmann::ordered_json;

struct KernelSpec {
    std::string family = "exp_gamma"; // exp_gamma | randers3 | alpha_beta | composed
    double b0 = 0.45;
    double g0 = 0.5;
    std::string phi_kind = "exp"; // exp | poly
    std::vector<double> phi_coef;
    std::string psi_kind = "poly";
    std::vector<double> psi_coef = {1.0, 1.0, 0.2};
};

struct ToleranceSet {
    double jet_rel = 1e-9;     // closed form vs jet oracle
    double det_rel = 1e-8;     // Eq (det) vs numeric determinant
    double inverse = 1e-8;     // g * ginv vs identity
    double cartan = 1e-8;      // Eq (C_ijk) vs oracle
    double cartan_y = 1e-9;    // C . y
    double spray_rel = 1e-7;   // Eq (G^i) vs Eq (0G^i)
    double identity = 1e-8;    // ell_r D^r identity, B^ij reconstruction
    double flat_pass = 1e-6;   // scan positive threshold
    double flat_fail = 1e-3;   // scan negative threshold
};

struct RunConfig {
    int dimension = 2;
    std::string fixture; // empty when inline fields are given
    KernelSpec kernel;
    fields::SampleSpec samples;
    ToleranceSet tol;
    json raw; // parsed config document (echoed into reports; holds inline fields)
};

// Parses and structurally validates a config document. Field-level problems
// throw InvalidConfig.
RunConfig config_from_json(const json& doc);

// Reads a JSON config file; syntax errors throw ParseError("line L, column C: ...").
RunConfig load_config(const std::string& path);

json config_to_json(const RunConfig& cfg);

// Builds the field set and kernel, validates SPD metric and the declared
// bounds ||beta||_alpha < b0, ||gamma||_alpha < g0 at every sample point.
struct Materialized {
    fields::FixtureSet fields;
    psi::PsiKernel kernel;
    std::vector<fields::EvaluationPoint> points;
};

Materialized materialize(const RunConfig& cfg);

// {"terms": [{"coef": c, "pow": [..], "lin": [..]}, ...]}
fields::FieldExpr expr_from_json(const json& j, int dim, const std::string& where);

void emit_json(const json& doc, const std::string& path);

} // namespace finsler::cli
