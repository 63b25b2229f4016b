#include "finsler/tensors.hpp"

#include <algorithm>

namespace finsler::tensors {

ScalarState scalar_state(const fields::MetricField& m, const fields::OneFormField& beta,
                         const fields::OneFormField& gamma, const psi::PsiKernel& k,
                         const fields::EvaluationPoint& p) {
    ScalarState st;
    st.n = m.dim();
    st.x = p.x;
    st.y = p.y;
    st.a = m.value(p.x);
    st.det_a = lu_det(st.a);
    if (st.det_a == 0.0) throw SingularMetric("scalar_state: det a = 0");
    st.ainv = lu_inverse(st.a);
    st.b = beta.value(p.x);
    st.g = gamma.value(p.x);
    st.b_up = mat_vec(st.ainv, st.b);
    st.g_up = mat_vec(st.ainv, st.g);

    const double alpha2 = quad_form(st.a, p.y, p.y);
    if (alpha2 <= 0.0) throw NullDirection("scalar_state: alpha(y) = 0");
    st.alpha = std::sqrt(alpha2);
    st.alpha_i.assign(st.n, 0.0);
    const Vec ay = mat_vec(st.a, p.y);
    for (int i = 0; i < st.n; ++i) st.alpha_i[i] = ay[i] / st.alpha;
    st.alpha_ij = Mat(st.n);
    for (int i = 0; i < st.n; ++i)
        for (int j = 0; j < st.n; ++j)
            st.alpha_ij(i, j) = (st.a(i, j) - st.alpha_i[i] * st.alpha_i[j]) / st.alpha;

    st.s = dot(st.b, p.y) / st.alpha;
    st.sb = dot(st.g, p.y) / st.alpha;
    st.b2 = dot(st.b, st.b_up);
    st.g2 = dot(st.g, st.g_up);
    st.theta = dot(st.b, st.g_up);
    st.h.assign(st.n, 0.0);
    st.hb.assign(st.n, 0.0);
    for (int i = 0; i < st.n; ++i) {
        st.h[i] = st.b[i] - st.s * st.alpha_i[i];
        st.hb[i] = st.g[i] - st.sb * st.alpha_i[i];
    }
    st.kjet = psi_eval(k, st.s, st.sb);
    st.coeffs = psi::coefficients(st.kjet, st.s, st.sb, st.b2, st.g2, st.theta);
    return st;
}

FundamentalTensor fundamental_closed(const ScalarState& st) {
    const int n = st.n;
    const auto& c = st.coeffs;
    const auto& j = st.kjet;
    FundamentalTensor out;

    out.g = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            out.g(i, k) = c.rho * st.a(i, k) + c.rho0 * st.b[i] * st.b[k]
                          + c.rhob0 * st.g[i] * st.g[k]
                          + c.rho1 * (st.b[i] * st.alpha_i[k] + st.b[k] * st.alpha_i[i])
                          + c.rhob1 * (st.g[i] * st.alpha_i[k] + st.g[k] * st.alpha_i[i])
                          + c.rho2 * st.alpha_i[i] * st.alpha_i[k]
                          + c.rho3 * (st.b[i] * st.g[k] + st.b[k] * st.g[i]);

    out.det = std::pow(j.v, n + 1) * std::pow(c.Pi, n - 2) * c.Gamma * st.det_a;

    if (std::abs(c.Pi) < 1e-12) throw DegeneratePi("fundamental_closed: Pi degenerate");
    if (std::abs(c.Gamma) < 1e-12) throw DegenerateGamma("fundamental_closed: Gamma degenerate");
    const double p = st.b2 - st.s * st.s;
    const double q = st.g2 - st.sb * st.sb;
    const double r = st.theta - st.s * st.sb;
    const double cbb = (j.ss + q * c.J) / c.Gamma;
    const double cgg = (j.sbsb + p * c.J) / c.Gamma;
    const double cbg = (j.ssb - r * c.J) / c.Gamma; // absent from the printed equation
    const double wb = c.rho1 + c.pi2 * r - c.pi1 * q;
    const double wg = c.rhob1 - c.pi2 * p + c.pi1 * r;
    const double cba = wb / (j.v * c.Gamma);
    const double cga = wg / (j.v * c.Gamma);
    const double caa = ((st.s * j.v + p * j.s + r * j.sb) * wb
                        + (st.sb * j.v + q * j.sb + r * j.s) * wg)
                       / (j.v * j.v * c.Gamma);
    Vec au(n);
    for (int i = 0; i < n; ++i) au[i] = st.y[i] / st.alpha; // alpha^i
    out.ginv = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            out.ginv(i, k) =
                (st.ainv(i, k) - cbb * st.b_up[i] * st.b_up[k] - cgg * st.g_up[i] * st.g_up[k]
                 - cbg * (st.b_up[i] * st.g_up[k] + st.b_up[k] * st.g_up[i])
                 - cba * (st.b_up[i] * au[k] + st.b_up[k] * au[i])
                 - cga * (st.g_up[i] * au[k] + st.g_up[k] * au[i]) + caa * au[i] * au[k])
                / c.rho;
    return out;
}

Mat oracle_g(const MetricFunction& mf, const fields::EvaluationPoint& p) {
    const auto yj = jets::eval_y_jet(mf.energy(), p.x, p.y, 2);
    return yj.d2;
}

CartanTensor cartan_closed(const ScalarState& st) {
    const int n = st.n;
    const auto& c = st.coeffs;
    const auto& j = st.kjet;
    // derivatives of rho0, rhob0 in (s, sbar); (rho0)_sb == (rho3)_s etc.
    const double r0s = j.v * j.sss + 3.0 * j.s * j.ss;
    const double r0sb = j.v * j.sssb + j.sb * j.ss + 2.0 * j.s * j.ssb;
    const double rb0s = j.v * j.ssbsb + j.s * j.sbsb + 2.0 * j.sb * j.ssb;
    const double rb0sb = j.v * j.sbsbsb + 3.0 * j.sb * j.sbsb;

    CartanTensor out;
    out.C = Ten3(n);
    const double ia = 1.0 / (2.0 * st.alpha);
    // evaluate on sorted triples and mirror: exact total symmetry
    for (int i = 0; i < n; ++i)
        for (int k = i; k < n; ++k)
            for (int l = k; l < n; ++l) {
                const double t1 = 0.5 * c.rho1
                                  * (st.h[l] * st.alpha_ij(i, k) + st.h[i] * st.alpha_ij(k, l)
                                     + st.h[k] * st.alpha_ij(i, l));
                const double t2 = 0.5 * c.rhob1
                                  * (st.hb[l] * st.alpha_ij(i, k) + st.hb[i] * st.alpha_ij(k, l)
                                     + st.hb[k] * st.alpha_ij(i, l));
                const double t3 = r0sb * ia
                                  * (st.h[i] * st.h[k] * st.hb[l] + st.h[k] * st.h[l] * st.hb[i]
                                     + st.h[i] * st.h[l] * st.hb[k]);
                const double t4 = rb0s * ia
                                  * (st.hb[i] * st.hb[k] * st.h[l] + st.hb[k] * st.hb[l] * st.h[i]
                                     + st.hb[i] * st.hb[l] * st.h[k]);
                const double t5 = r0s * ia * st.h[i] * st.h[k] * st.h[l];
                const double t6 = rb0sb * ia * st.hb[i] * st.hb[k] * st.hb[l];
                const double v = t1 + t2 + t3 + t4 + t5 + t6;
                const int idx[3] = {i, k, l};
                int perm[3] = {0, 1, 2};
                std::sort(perm, perm + 3);
                do {
                    out.C(idx[perm[0]], idx[perm[1]], idx[perm[2]]) = v;
                } while (std::next_permutation(perm, perm + 3));
            }
    return out;
}

Ten3 oracle_cartan(const MetricFunction& mf, const fields::EvaluationPoint& p) {
    const auto yj = jets::eval_y_jet(mf.energy(), p.x, p.y, 3);
    const int n = static_cast<int>(p.y.size());
    Ten3 C(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) C(i, j, k) = 0.5 * yj.d3(i, j, k);
    return C;
}

} // namespace finsler::tensors
