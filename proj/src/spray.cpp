#include "finsler/spray.hpp"

namespace finsler::spray {

SprayPointData make_spray_point_data(const fields::MetricField& m,
                                     const fields::OneFormField& beta,
                                     const fields::OneFormField& gamma,
                                     std::span<const double> x) {
    SprayPointData pd;
    pd.n = m.dim();
    pd.x.assign(x.begin(), x.end());
    pd.a = m.value(x);
    if (lu_det(pd.a) == 0.0) throw SingularMetric("spray point data: a(x) singular");
    pd.ainv = lu_inverse(pd.a);
    pd.b = beta.value(x);
    pd.g = gamma.value(x);
    pd.b_up = mat_vec(pd.ainv, pd.b);
    pd.g_up = mat_vec(pd.ainv, pd.g);
    pd.b2 = dot(pd.b, pd.b_up);
    pd.g2 = dot(pd.g, pd.g_up);
    pd.theta = dot(pd.b, pd.g_up);
    pd.christoffel = alpha::christoffel_symbols(m, x);
    pd.fd_beta = alpha::covariant_derivative(m, beta, x);
    pd.fd_gamma = alpha::covariant_derivative(m, gamma, x);
    return pd;
}

SpraySolution spray_closed(const SprayPointData& pd, const psi::PsiKernel& kernel,
                           std::span<const double> y) {
    const int n = pd.n;
    const double alpha0 = std::sqrt(quad_form(pd.a, y, y));
    if (alpha0 == 0.0) throw NullDirection("spray_closed: alpha(y) = 0");
    Vec yhat(n);
    for (int i = 0; i < n; ++i) yhat[i] = y[i] / alpha0;
    SprayTerms<double> t;
    const Vec Ghat = spray_eval<double>(pd, kernel, yhat, &t);

    SpraySolution out;
    const double scale = alpha0 * alpha0;
    out.G.assign(n, 0.0);
    out.Galpha.assign(n, 0.0);
    out.D.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        out.G[i] = scale * Ghat[i];
        out.Galpha[i] = scale * t.Galpha[i];
        out.D[i] = 2.0 * (out.G[i] - out.Galpha[i]);
    }
    out.Gamma1 = scale * t.Gamma1;
    out.Gamma2 = scale * t.Gamma2;
    out.Gamma3 = scale * t.Gamma3;
    out.Rbeta = scale * t.Rbeta;
    out.Rgamma = scale * t.Rgamma;
    return out;
}

Vec spray_oracle(const tensors::MetricFunction& mf, const fields::EvaluationPoint& p) {
    using jets::Jet;
    using jets::TaylorTables;
    const int n = static_cast<int>(p.y.size());
    if (norm2(p.y) == 0.0) throw DegenerateDirection("spray_oracle: y = 0");
    const TaylorTables& tt = TaylorTables::get(2 * n, 3);
    std::vector<Jet> xj, yj;
    for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(tt, i, p.x[i]));
    for (int i = 0; i < n; ++i) yj.push_back(Jet::variable(tt, n + i, p.y[i]));
    const jets::ScalarField energy = mf.energy();
    const Jet E = energy.jet(xj, yj);
    if (!E.is_finite()) throw NonSmoothPoint("spray_oracle: non-finite jet");

    std::vector<int> e(2 * n, 0);
    Mat g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            e.assign(2 * n, 0);
            e[n + i] += 1;
            e[n + j] += 1;
            g(i, j) = E.derivative(e);
        }
    const Mat gi = lu_inverse(g);
    Ten3 dgdx(n); // dgdx(k, i, j) = d g_ij / d x^k
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                e.assign(2 * n, 0);
                e[k] += 1;
                e[n + i] += 1;
                e[n + j] += 1;
                dgdx(k, i, j) = E.derivative(e);
            }

    Vec G(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) {
            double inner = 0.0;
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    inner += (dgdx(k, j, l) + dgdx(j, l, k) - dgdx(l, j, k)) * p.y[j] * p.y[k];
            acc += gi(i, l) * inner;
        }
        G[i] = 0.25 * acc;
    }
    return G;
}

EllSystem make_ell_system(std::span<const double> w, double B, std::span<const double> y) {
    const double yy = dot(y, y);
    const double wy = dot(w, y);
    EllSystem sys;
    sys.B = B;
    sys.B_i.assign(w.begin(), w.end());
    for (std::size_t i = 0; i < w.size(); ++i) sys.B_i[i] -= wy / yy * y[i];
    return sys;
}

Vec ell_covector(const tensors::ScalarState& st) {
    Vec l(st.n);
    for (int i = 0; i < st.n; ++i)
        l[i] = st.kjet.v * st.alpha_i[i] + st.kjet.s * st.h[i] + st.kjet.sb * st.hb[i];
    return l;
}

Mat ell_hessian(const tensors::ScalarState& st) {
    Mat l(st.n);
    const auto& j = st.kjet;
    const double Pi = st.coeffs.Pi;
    for (int i = 0; i < st.n; ++i)
        for (int k = 0; k < st.n; ++k)
            l(i, k) = Pi * st.alpha_ij(i, k)
                      + (j.ss * st.h[i] * st.h[k] + j.sbsb * st.hb[i] * st.hb[k]
                         + j.ssb * (st.h[i] * st.hb[k] + st.h[k] * st.hb[i]))
                            / st.alpha;
    return l;
}

EllSolution solve_ell_system(const EllSystem& sys, const tensors::ScalarState& st) {
    const int n = st.n;
    const auto& j = st.kjet;
    const auto& c = st.coeffs;
    if (std::abs(c.Pi) < 1e-12) throw DegeneratePi("solve_ell_system: Pi degenerate");
    if (std::abs(c.Gamma) < 1e-12) throw DegenerateGamma("solve_ell_system: Gamma degenerate");

    const double p = st.b2 - st.s * st.s;
    const double q = st.g2 - st.sb * st.sb;
    const double r = st.theta - st.s * st.sb;
    const Vec B_up = mat_vec(st.ainv, sys.B_i);
    const double Bb = dot(sys.B_i, st.b_up);
    const double Bg = dot(sys.B_i, st.g_up);

    const double mu1 = (j.ss + q * c.J) * Bb + (j.ssb - r * c.J) * Bg;
    const double mu2 = (j.sbsb + p * c.J) * Bg + (j.ssb - r * c.J) * Bb;
    // Eq (aA)
    const double aA =
        (sys.B
         - st.alpha / (c.Pi * c.Gamma)
               * (j.s * (c.Pi + r * j.ssb + q * j.sbsb) - j.sb * (r * j.ss + q * j.ssb)) * Bb
         - st.alpha / (c.Pi * c.Gamma)
               * (j.sb * (c.Pi + p * j.ss + r * j.ssb) - j.s * (p * j.ssb + r * j.sbsb)) * Bg)
        / j.v;

    const Vec h_up = mat_vec(st.ainv, st.h);
    const Vec hb_up = mat_vec(st.ainv, st.hb);
    EllSolution sol;
    sol.A.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double alpha_up = st.y[i] / st.alpha;
        sol.A[i] = aA * alpha_up + st.alpha / c.Pi * B_up[i]
                   - st.alpha / (c.Pi * c.Gamma) * (mu1 * h_up[i] + mu2 * hb_up[i]);
    }

    const Vec l = ell_covector(st);
    const Mat lij = ell_hessian(st);
    const Vec lA = mat_vec(lij, sol.A);
    for (int i = 0; i < n; ++i)
        sol.residual_linear = std::max(sol.residual_linear, std::abs(lA[i] - sys.B_i[i]));
    sol.residual_scalar = std::abs(dot(l, sol.A) - sys.B);
    if (sol.residual_linear > 1e-6 || sol.residual_scalar > 1e-6)
        throw Error("solve_ell_system: residual contract violated");
    return sol;
}

} // namespace finsler::spray
