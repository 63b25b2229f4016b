#include "finsler/alpha_geometry.hpp"

namespace finsler::alpha {

Ten3 christoffel_symbols(const fields::MetricField& m, std::span<const double> x) {
    const int n = m.dim();
    const Mat a = m.value(x);
    if (lu_det(a) == 0.0) throw SingularMetric("christoffel: a(x) singular");
    const Mat ai = lu_inverse(a);
    const Ten3 da = m.derivative(x);
    Ten3 ch(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double sum = 0.0;
                for (int l = 0; l < n; ++l)
                    sum += ai(i, l) * (da(l, j, k) + da(l, k, j) - da(j, k, l));
                ch(i, j, k) = 0.5 * sum;
            }
    return ch;
}

AlphaConnection connection(const fields::MetricField& m, const fields::EvaluationPoint& p) {
    const int n = m.dim();
    AlphaConnection c;
    c.christoffel = christoffel_symbols(m, p.x);
    c.G.assign(n, 0.0);
    c.G_y = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double gy = 0.0;
            for (int k = 0; k < n; ++k) {
                c.G[i] += 0.5 * c.christoffel(i, j, k) * p.y[j] * p.y[k];
                gy += c.christoffel(i, j, k) * p.y[k];
            }
            c.G_y(i, j) = gy;
        }
    c.G_yy = c.christoffel;
    return c;
}

FormDerivatives covariant_derivative(const fields::MetricField& m, const fields::OneFormField& f,
                                     std::span<const double> x) {
    const int n = m.dim();
    const Ten3 ch = christoffel_symbols(m, x);
    const Vec v = f.value(x);
    const Mat dv = f.derivative(x);
    FormDerivatives out;
    out.nabla = Mat(n);
    out.r = Mat(n);
    out.smat = Mat(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double nab = dv(i, j);
            for (int k = 0; k < n; ++k) nab -= ch(k, i, j) * v[k];
            out.nabla(i, j) = nab;
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.r(i, j) = 0.5 * (out.nabla(i, j) + out.nabla(j, i));
            out.smat(i, j) = 0.5 * (out.nabla(i, j) - out.nabla(j, i));
        }
    return out;
}

namespace {

FormContractions contract_one(const FormDerivatives& fd, const Mat& ainv, const Vec& own,
                              const Vec& other, std::span<const double> y) {
    const int n = ainv.dim();
    FormContractions c;
    c.ri0.assign(n, 0.0);
    c.si0.assign(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            c.ri0[i] += fd.r(i, j) * y[j];
            c.si0[i] += fd.smat(i, j) * y[j];
        }
    c.r00 = dot(c.ri0, y);
    c.si0_up = mat_vec(ainv, c.si0);
    const Vec own_up = mat_vec(ainv, own);
    const Vec other_up = mat_vec(ainv, other);
    c.r0 = dot(own_up, c.ri0);
    c.s0 = dot(own_up, c.si0);
    c.sbar0 = dot(other_up, c.si0);
    return c;
}

} // namespace

Contractions contractions(const FormDerivatives& fd_beta, const FormDerivatives& fd_gamma,
                          const fields::MetricField& m, const fields::OneFormField& beta,
                          const fields::OneFormField& gamma, const fields::EvaluationPoint& p) {
    const Mat ainv = lu_inverse(m.value(p.x));
    const Vec b = beta.value(p.x);
    const Vec g = gamma.value(p.x);
    Contractions c;
    c.beta = contract_one(fd_beta, ainv, b, g, p.y);
    c.gamma = contract_one(fd_gamma, ainv, g, b, p.y);
    return c;
}

Ten3 metric_compatibility_residual(const fields::MetricField& m, std::span<const double> x) {
    const int n = m.dim();
    const Ten3 ch = christoffel_symbols(m, x);
    const Mat a = m.value(x);
    const Ten3 da = m.derivative(x);
    Ten3 res(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = da(i, j, k);
                for (int l = 0; l < n; ++l) v -= ch(l, i, k) * a(l, j) + ch(l, j, k) * a(i, l);
                res(i, j, k) = v;
            }
    return res;
}

} // namespace finsler::alpha
