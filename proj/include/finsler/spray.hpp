#pragma once

#include <span>

#include "finsler/alpha_geometry.hpp"
#include "finsler/fields.hpp"
#include "finsler/jets.hpp"
#include "finsler/psi.hpp"
#include "finsler/tensors.hpp"

namespace finsler::spray {

// Everything Eq (G^i) consumes at a fixed base point x: the metric, both
// forms, their covariant-derivative splits, and the alpha connection.
struct SprayPointData {
    int n = 0;
    Vec x;
    Mat a, ainv;
    Vec b, g, b_up, g_up;
    double b2 = 0.0, g2 = 0.0, theta = 0.0;
    Ten3 christoffel;
    alpha::FormDerivatives fd_beta, fd_gamma;
};

SprayPointData make_spray_point_data(const fields::MetricField& m,
                                     const fields::OneFormField& beta,
                                     const fields::OneFormField& gamma,
                                     std::span<const double> x);

// Intermediates of one spray evaluation, exposed for Lemma 5.1 / Eq (B^ij).
template <class T>
struct SprayTerms {
    T alpha, s, sb;
    std::vector<T> alpha_low;        // alpha_i
    std::vector<T> h, hb;            // h_i, hbar_i
    std::vector<T> Galpha;           // ^alpha G^i
    std::vector<T> s_beta_low;       // ^beta s_{i0}
    std::vector<T> s_gamma_low;      // ^gamma s_{i0}
    std::vector<T> s_beta_up;        // ^beta s^i_0
    std::vector<T> s_gamma_up;       // ^gamma s^i_0
    T rb00, rg00;                    // ^beta r_00, ^gamma r_00
    T bs0, bsb0, gs0, gsb0;          // ^beta s_0, ^beta sbar_0, ^gamma s_0, ^gamma sbar_0
    psi::Psi2<T> k;
    T Pi, J, Gamma;
    T Rbeta, Rgamma;
    T Gamma1, Gamma2, Gamma3;
};

// Eq (G^i) with A := Pi, in any scalar type. The Pi/Gamma degeneracy guards
// fire on the scalar part only.
template <class T>
std::vector<T> spray_eval(const SprayPointData& pd, const psi::PsiKernel& kernel,
                          std::span<const T> y, SprayTerms<T>* terms = nullptr) {
    using std::sqrt;
    const int n = pd.n;
    SprayTerms<T> t;
    T alpha2 = y[0] * 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) alpha2 += pd.a(i, j) * y[i] * y[j];
    t.alpha = sqrt(alpha2);
    t.alpha_low.assign(n, y[0] * 0.0);
    for (int i = 0; i < n; ++i) {
        T ay = y[0] * 0.0;
        for (int j = 0; j < n; ++j) ay += pd.a(i, j) * y[j];
        t.alpha_low[i] = ay / t.alpha;
    }
    T bv = y[0] * 0.0, gv = y[0] * 0.0;
    for (int i = 0; i < n; ++i) {
        bv += pd.b[i] * y[i];
        gv += pd.g[i] * y[i];
    }
    t.s = bv / t.alpha;
    t.sb = gv / t.alpha;
    t.h.assign(n, y[0] * 0.0);
    t.hb.assign(n, y[0] * 0.0);
    for (int i = 0; i < n; ++i) {
        t.h[i] = pd.b[i] - t.s * t.alpha_low[i];
        t.hb[i] = pd.g[i] - t.sb * t.alpha_low[i];
    }

    t.k = kernel.partials2(t.s, t.sb);
    t.Pi = t.k.v - t.s * t.k.s - t.sb * t.k.sb;
    if (std::abs(jets::scalar_value(t.Pi)) < 1e-12)
        throw DegeneratePi("spray_eval: Pi degenerate");
    t.J = (t.k.ss * t.k.sbsb - t.k.ssb * t.k.ssb) / t.Pi;
    const T p = pd.b2 - t.s * t.s;
    const T q = pd.g2 - t.sb * t.sb;
    const T r = pd.theta - t.s * t.sb;
    t.Gamma = t.Pi + p * t.k.ss + q * t.k.sbsb + 2.0 * r * t.k.ssb + (p * q - r * r) * t.J;
    if (std::abs(jets::scalar_value(t.Gamma)) < 1e-12)
        throw DegenerateGamma("spray_eval: Gamma degenerate");

    const T rho0 = t.k.v * t.k.ss + t.k.s * t.k.s;
    const T rhob0 = t.k.v * t.k.sbsb + t.k.sb * t.k.sb;
    const T rho3 = t.k.v * t.k.ssb + t.k.s * t.k.sb;
    const T rho1 = t.k.v * t.k.s - t.s * rho0 - t.sb * rho3;
    const T rhob1 = t.k.v * t.k.sb - t.sb * rhob0 - t.s * rho3;
    const T pi1 = t.k.sb * t.k.ssb - t.k.s * t.k.sbsb + t.s * t.k.v * t.J;
    const T pi2 = t.k.s * t.k.ssb - t.k.sb * t.k.ss + t.sb * t.k.v * t.J;

    t.Galpha.assign(n, y[0] * 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k2 = 0; k2 < n; ++k2)
                t.Galpha[i] += 0.5 * pd.christoffel(i, j, k2) * y[j] * y[k2];

    t.s_beta_low.assign(n, y[0] * 0.0);
    t.s_gamma_low.assign(n, y[0] * 0.0);
    t.rb00 = y[0] * 0.0;
    t.rg00 = y[0] * 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            t.s_beta_low[i] += pd.fd_beta.smat(i, j) * y[j];
            t.s_gamma_low[i] += pd.fd_gamma.smat(i, j) * y[j];
            t.rb00 += pd.fd_beta.r(i, j) * y[i] * y[j];
            t.rg00 += pd.fd_gamma.r(i, j) * y[i] * y[j];
        }
    }
    t.s_beta_up.assign(n, y[0] * 0.0);
    t.s_gamma_up.assign(n, y[0] * 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            t.s_beta_up[i] += pd.ainv(i, j) * t.s_beta_low[j];
            t.s_gamma_up[i] += pd.ainv(i, j) * t.s_gamma_low[j];
        }
    t.bs0 = y[0] * 0.0;
    t.bsb0 = y[0] * 0.0;
    t.gs0 = y[0] * 0.0;
    t.gsb0 = y[0] * 0.0;
    for (int i = 0; i < n; ++i) {
        t.bs0 += pd.b[i] * t.s_beta_up[i];   // ^beta s_0
        t.bsb0 += pd.g[i] * t.s_beta_up[i];  // ^beta sbar_0 (crossed: gamma)
        t.gs0 += pd.g[i] * t.s_gamma_up[i];  // ^gamma s_0 (own form)
        t.gsb0 += pd.b[i] * t.s_gamma_up[i]; // ^gamma sbar_0 (crossed: b)
    }

    // Eq (R,E)
    t.Rbeta = t.rb00 - (2.0 * t.alpha / t.Pi) * (t.k.s * t.bs0 + t.k.sb * t.gsb0);
    t.Rgamma = t.rg00 - (2.0 * t.alpha / t.Pi) * (t.k.s * t.bsb0 + t.k.sb * t.gs0);
    // Eq (gamma123)
    t.Gamma1 = (t.k.ss + q * t.J) * t.Rbeta + (t.k.ssb - r * t.J) * t.Rgamma;
    t.Gamma2 = (t.k.sbsb + p * t.J) * t.Rgamma + (t.k.ssb - r * t.J) * t.Rbeta;
    t.Gamma3 = (rho1 + pi2 * r - pi1 * q) * t.Rbeta + (rhob1 - pi2 * p + pi1 * r) * t.Rgamma;

    std::vector<T> G(n, y[0] * 0.0);
    for (int i = 0; i < n; ++i) {
        const T alpha_up = y[i] / t.alpha;
        G[i] = t.Galpha[i] + (t.alpha / t.Pi) * (t.k.s * t.s_beta_up[i] + t.k.sb * t.s_gamma_up[i])
               + (t.Gamma1 * pd.b_up[i] + t.Gamma2 * pd.g_up[i] + t.Gamma3 * alpha_up / t.k.v)
                     / (2.0 * t.Gamma);
    }
    if (terms) *terms = std::move(t);
    return G;
}

struct SpraySolution {
    Vec G;      // spray coefficients of F
    Vec Galpha; // ^alpha G^i
    Vec D;      // D^i = 2 G^i - 2 ^alpha G^i
    double Gamma1 = 0.0, Gamma2 = 0.0, Gamma3 = 0.0;
    double Rbeta = 0.0, Rgamma = 0.0;
};

// Double-precision Eq (G^i), evaluated at the alpha-unit rescaling of y and
// mapped back by 2-homogeneity (conditioning).
SpraySolution spray_closed(const SprayPointData& pd, const psi::PsiKernel& kernel,
                           std::span<const double> y);

// Direct-formula spray Eq (0G^i): numeric fundamental tensor and its analytic
// x-derivatives through mixed jets.
Vec spray_oracle(const tensors::MetricFunction& mf, const fields::EvaluationPoint& p);

// Lemma 4.1: the algebraic system ell_{ir} A^r = B_i (with B_i y^i = 0),
// ell_r A^r = B.
struct EllSystem {
    Vec B_i;
    double B = 0.0;
};

// Projects w orthogonal to y (plain component pairing) so B_i y^i = 0 holds
// by construction.
EllSystem make_ell_system(std::span<const double> w, double B, std::span<const double> y);

struct EllSolution {
    Vec A;
    double residual_linear = 0.0; // max_i |ell_{ir} A^r - B_i|
    double residual_scalar = 0.0; // |ell_r A^r - B|
};

// Eq (solution) with Eq (aA); residuals are recomputed from the state as part
// of the contract.
EllSolution solve_ell_system(const EllSystem& sys, const tensors::ScalarState& st);

// ell_i = F_{y^i} and ell_{ij} = F_{y^i y^j} from the scalar state.
Vec ell_covector(const tensors::ScalarState& st);
Mat ell_hessian(const tensors::ScalarState& st);

} // namespace finsler::spray
