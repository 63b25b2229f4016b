#pragma once

#include <span>

#include "finsler/fields.hpp"
#include "finsler/jets.hpp"
#include "finsler/linalg.hpp"
#include "finsler/psi.hpp"

namespace finsler::tensors {

// F(x, y) = alpha * Psi(beta/alpha, gamma/alpha) as a generic scalar field;
// the single formula behind every jet/fd oracle in the project.
struct MetricFunction {
    const fields::MetricField* metric = nullptr;
    const fields::OneFormField* beta = nullptr;
    const fields::OneFormField* gamma = nullptr;
    const psi::PsiKernel* kernel = nullptr;

    template <class T>
    T operator()(std::span<const T> x, std::span<const T> y) const {
        using std::sqrt;
        const int n = metric->dim();
        const auto a = metric->value_generic(x);
        const auto b = beta->value_generic(x);
        const auto g = gamma->value_generic(x);
        T alpha2 = x[0] * 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) alpha2 += a[static_cast<std::size_t>(i) * n + j] * y[i] * y[j];
        T alpha = sqrt(alpha2);
        T bv = x[0] * 0.0;
        T gv = x[0] * 0.0;
        for (int i = 0; i < n; ++i) {
            bv += b[i] * y[i];
            gv += g[i] * y[i];
        }
        return alpha * kernel->value(bv / alpha, gv / alpha);
    }

    jets::ScalarField field() const {
        return jets::make_field(
            [this](auto x, auto y) { return (*this)(x, y); });
    }
    // F^2 / 2, whose y-Hessian is the fundamental tensor
    jets::ScalarField energy() const {
        return jets::make_field([this](auto x, auto y) {
            auto F = (*this)(x, y);
            return F * F * 0.5;
        });
    }
};

inline MetricFunction metric_function(const fields::FixtureSet& fx, const psi::PsiKernel& k) {
    return {&fx.metric, &fx.beta, &fx.gamma, &k};
}

// Pointwise scalars of Prop 3.2's proof: alpha and its y-derivatives, s, sbar,
// h_i = b_i - s alpha_i, hbar_i, the norms, and the full coefficient set.
struct ScalarState {
    int n = 0;
    Vec x, y;
    Mat a, ainv;
    double det_a = 0.0;
    Vec b, g;       // form coefficients at x
    Vec b_up, g_up; // indices raised with a^{-1}
    double alpha = 0.0;
    Vec alpha_i;
    Mat alpha_ij;
    double s = 0.0, sb = 0.0;
    double b2 = 0.0, g2 = 0.0, theta = 0.0;
    Vec h, hb;
    psi::PsiJet kjet;
    psi::CoefficientSet coeffs;
};

ScalarState scalar_state(const fields::MetricField& m, const fields::OneFormField& beta,
                         const fields::OneFormField& gamma, const psi::PsiKernel& k,
                         const fields::EvaluationPoint& p);

struct FundamentalTensor {
    Mat g;
    double det = 0.0;
    Mat ginv;
};

// Closed forms of Prop 3.2: Eq (g_ij), Eq (det), and Eq (g^ij) with the
// b^i gamma^j cross term restored (the printed equation drops it; see the
// ginv unit tests, which pin both the fix and the defect).
FundamentalTensor fundamental_closed(const ScalarState& st);

// Hessian of F^2/2 in y, by exact jets.
Mat oracle_g(const MetricFunction& mf, const fields::EvaluationPoint& p);

struct CartanTensor {
    Ten3 C;
};

// Eq (C_ijk).
CartanTensor cartan_closed(const ScalarState& st);

// (1/2) d g_ij / d y^k = (1/4) [F^2]_{y^i y^j y^k}, by exact jets.
Ten3 oracle_cartan(const MetricFunction& mf, const fields::EvaluationPoint& p);

} // namespace finsler::tensors
