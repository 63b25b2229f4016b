#pragma once

#include <span>
#include <string>

#include "finsler/fields.hpp"
#include "finsler/spray.hpp"
#include "finsler/tensors.hpp"

namespace finsler::analysis {

// Residual of the Hamel system: res_j = F_{x^k y^j} y^k - F_{x^j}.
Vec hamel_residual(const tensors::MetricFunction& mf, const fields::EvaluationPoint& p);

// P = F_{x^k} y^k / (2F).
double projective_factor(const tensors::MetricFunction& mf, const fields::EvaluationPoint& p);

// Left-hand side of Lemma 5.1's Eq (condition); vanishes iff the Hamel
// residual does.
Vec condition51(const spray::SprayPointData& pd, const psi::PsiKernel& kernel,
                std::span<const double> y);

// Douglas tensor D^i_{jkl} from order-4 jets of the closed-form spray.
Ten4 douglas_tensor(const spray::SprayPointData& pd, const psi::PsiKernel& kernel,
                    std::span<const double> y);

// Eq (B^ij).
Mat bij(const spray::SprayPointData& pd, const psi::PsiKernel& kernel, std::span<const double> y);

// (G^i y^j - G^j y^i) - (^aG^i y^j - ^aG^j y^i) from spray_closed; equals
// Eq (B^ij) (consistency oracle).
Mat bij_from_spray(const spray::SprayPointData& pd, const psi::PsiKernel& kernel,
                   std::span<const double> y);

// Max |4th y-derivative| of B^ij; zero iff B^ij is a polynomial of degree <= 3
// in y (the hp(3) cross-check).
double bij_hp3_residual(const spray::SprayPointData& pd, const psi::PsiKernel& kernel,
                        std::span<const double> y);

struct FormClassification {
    bool closed = false;   // max |s_ij| <= tol over samples
    bool parallel = false; // max |nabla| <= tol over samples
    double max_s = 0.0;
    double max_nabla = 0.0;
};

FormClassification classify_form(const fields::MetricField& m, const fields::OneFormField& f,
                                 std::span<const fields::EvaluationPoint> pts, double tol = 1e-8);

enum class Verdict { positive, negative, inconclusive };
std::string to_string(Verdict v);

// Scan thresholds: every point <= flat_tol -> positive; any point > fail_tol
// -> negative; otherwise inconclusive (three-decade gap, never rounded).
struct ScanThresholds {
    double pass_tol = 1e-6;
    double fail_tol = 1e-3;
};

struct FlatnessReport {
    Verdict verdict = Verdict::inconclusive;
    double max_hamel = 0.0;     // normalized residual over the scan
    double max_condition = 0.0; // normalized Eq (condition) residual
    bool equivalence_ok = true; // per-point hamel vs condition51 verdicts agree
    double max_gp_deviation = 0.0; // max |G - P y| / max(1, |G|) (flat points)
};

FlatnessReport flatness_scan(const fields::FixtureSet& fx, const psi::PsiKernel& kernel,
                             std::span<const fields::EvaluationPoint> pts,
                             const ScanThresholds& th = {});

struct DouglasReport {
    Verdict verdict = Verdict::inconclusive;
    double max_douglas = 0.0;       // normalized Douglas tensor over the scan
    double max_bij_reconstruct = 0.0;
    double max_bij_symmetry = 0.0;  // |B^ij + B^ji|
};

DouglasReport douglas_scan(const fields::FixtureSet& fx, const psi::PsiKernel& kernel,
                           std::span<const fields::EvaluationPoint> pts,
                           const ScanThresholds& th = {});

// Normalized per-point magnitudes used by the scans.
double hamel_rel(const tensors::MetricFunction& mf, const fields::EvaluationPoint& p);
double condition51_rel(const spray::SprayPointData& pd, const psi::PsiKernel& kernel,
                       std::span<const double> y);
double douglas_rel(const spray::SprayPointData& pd, const psi::PsiKernel& kernel,
                   std::span<const double> y);

} // namespace finsler::analysis
