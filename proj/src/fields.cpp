#include "finsler/fields.hpp"

#include <algorithm>
#include <functional>
#include <random>

namespace finsler::fields {

FieldExpr FieldExpr::constant(int dim, double c) {
    FieldExpr e(dim);
    if (c != 0.0) e.add(c, std::vector<int>(dim, 0));
    return e;
}

FieldExpr& FieldExpr::add(double coef, std::vector<int> pow, std::vector<double> lin) {
    Term t;
    t.coef = coef;
    t.pow = std::move(pow);
    t.lin = lin.empty() ? std::vector<double>(dim_, 0.0) : std::move(lin);
    terms_.push_back(std::move(t));
    return *this;
}

FieldExpr FieldExpr::derivative(int k) const {
    FieldExpr d(dim_);
    for (const Term& t : terms_) {
        if (t.pow[k] > 0) {
            Term u = t;
            u.coef *= t.pow[k];
            u.pow[k] -= 1;
            d.terms_.push_back(std::move(u));
        }
        if (t.lin[k] != 0.0) {
            Term u = t;
            u.coef *= t.lin[k];
            d.terms_.push_back(std::move(u));
        }
    }
    return d;
}

double FieldExpr::operator()(std::span<const double> x) const {
    double acc = 0.0;
    for (const Term& t : terms_) {
        double m = t.coef;
        for (int k = 0; k < dim_; ++k)
            for (int p = 0; p < t.pow[k]; ++p) m *= x[k];
        double e = 0.0;
        bool has_exp = false;
        for (int k = 0; k < dim_; ++k)
            if (t.lin[k] != 0.0) {
                e += t.lin[k] * x[k];
                has_exp = true;
            }
        acc += has_exp ? m * std::exp(e) : m;
    }
    return acc;
}

MetricField::MetricField(int n, std::vector<FieldExpr> upper) : n_(n), upper_(std::move(upper)) {
    if (static_cast<int>(upper_.size()) != n * (n + 1) / 2)
        throw Error("MetricField: wrong number of entries");
}

const FieldExpr& MetricField::entry(int i, int j) const {
    if (i > j) std::swap(i, j);
    // row-major upper triangle offset
    const int off = i * n_ - i * (i - 1) / 2 + (j - i);
    return upper_[off];
}

Mat MetricField::value(std::span<const double> x) const {
    Mat a(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) a(i, j) = a(j, i) = entry(i, j)(x);
    return a;
}

Ten3 MetricField::derivative(std::span<const double> x) const {
    Ten3 da(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                const double v = entry(i, j).derivative(k)(x);
                da(i, j, k) = v;
                da(j, i, k) = v;
            }
    return da;
}

OneFormField::OneFormField(int n, std::vector<FieldExpr> comps, double declared_bound)
    : n_(n), comps_(std::move(comps)), bound_(declared_bound) {
    if (static_cast<int>(comps_.size()) != n) throw Error("OneFormField: wrong arity");
}

Vec OneFormField::value(std::span<const double> x) const {
    Vec v(n_);
    for (int i = 0; i < n_; ++i) v[i] = comps_[i](x);
    return v;
}

Mat OneFormField::derivative(std::span<const double> x) const {
    Mat d(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) d(i, j) = comps_[i].derivative(j)(x);
    return d;
}

bool OneFormField::is_zero() const {
    for (const FieldExpr& c : comps_)
        if (!c.terms().empty()) return false;
    return true;
}

Norms norms(const MetricField& m, const OneFormField& beta, const OneFormField& gamma,
            std::span<const double> x) {
    const Mat a = m.value(x);
    if (lu_det(a) == 0.0) throw SingularMetric("norms: a(x) not invertible");
    const Mat ai = lu_inverse(a);
    const Vec b = beta.value(x);
    const Vec g = gamma.value(x);
    Norms r;
    r.b2 = quad_form(ai, b, b);
    r.g2 = quad_form(ai, g, g);
    r.theta = quad_form(ai, b, g);
    return r;
}

namespace {

FieldExpr zero(int n) { return FieldExpr(n); }

std::vector<FieldExpr> identity_metric(int n) {
    std::vector<FieldExpr> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) upper.push_back(FieldExpr::constant(n, i == j ? 1.0 : 0.0));
    return upper;
}

// a = e^{2 sigma} delta with sigma = 0.1 x^1
std::vector<FieldExpr> conformal_metric(int n) {
    std::vector<FieldExpr> upper;
    std::vector<double> lin(n, 0.0);
    lin[0] = 0.2;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            FieldExpr e(n);
            if (i == j) e.add(1.0, std::vector<int>(n, 0), lin);
            upper.push_back(e);
        }
    return upper;
}

OneFormField constant_beta(int n) {
    std::vector<FieldExpr> c(n, zero(n));
    c[0] = FieldExpr::constant(n, 0.3);
    return OneFormField(n, std::move(c), 0.4);
}

std::vector<int> mono(int n, int var, int p = 1) {
    std::vector<int> e(n, 0);
    e[var] = p;
    return e;
}

} // namespace

FixtureSet fixture(const std::string& name, int n) {
    if (n < 2 || n > 4) throw UnknownFixture("fixture: dimension must be 2..4");
    if (name == "euclidean_parallel_closed") {
        // gamma = d f with f = 0.25 x^1 x^2 (closed, exact)
        std::vector<FieldExpr> g(n, zero(n));
        g[0] = FieldExpr(n).add(0.25, mono(n, 1));
        g[1] = FieldExpr(n).add(0.25, mono(n, 0));
        return {name, MetricField(n, identity_metric(n)), constant_beta(n),
                OneFormField(n, std::move(g), 0.45)};
    }
    if (name == "euclidean_nonclosed") {
        // gamma_1 = 0.4 (x^2)^2, the rest zero; d gamma has antisymmetric part
        std::vector<FieldExpr> g(n, zero(n));
        g[0] = FieldExpr(n).add(0.4, mono(n, 1, 2));
        return {name, MetricField(n, identity_metric(n)), constant_beta(n),
                OneFormField(n, std::move(g), 0.45)};
    }
    if (name == "conformal_generic") {
        std::vector<FieldExpr> b(n, zero(n));
        b[0] = FieldExpr(n).add(0.2, std::vector<int>(n, 0)).add(0.03, mono(n, 1));
        b[1] = FieldExpr(n).add(-0.1, std::vector<int>(n, 0)).add(0.04, mono(n, 0, 2));
        if (n >= 3) b[2] = FieldExpr(n).add(0.05, mono(n, 0));
        std::vector<FieldExpr> g(n, zero(n));
        g[0] = FieldExpr(n).add(0.1, mono(n, 1));
        g[1] = FieldExpr(n).add(0.06, mono(n, 0, 2));
        if (n >= 3) {
            g[2] = FieldExpr(n).add(0.05, std::vector<int>(n, 0));
            std::vector<int> x1x2(n, 0);
            x1x2[0] = x1x2[1] = 1;
            g[2].add(0.03, x1x2);
        }
        return {name, MetricField(n, conformal_metric(n)),
                OneFormField(n, std::move(b), 0.4), OneFormField(n, std::move(g), 0.45)};
    }
    if (name == "riemannian_only") {
        return {name, MetricField(n, conformal_metric(n)),
                OneFormField(n, std::vector<FieldExpr>(n, zero(n)), 0.1),
                OneFormField(n, std::vector<FieldExpr>(n, zero(n)), 0.1)};
    }
    throw UnknownFixture("unknown fixture: " + name);
}

std::vector<std::string> fixture_names() {
    return {"euclidean_parallel_closed", "euclidean_nonclosed", "conformal_generic",
            "riemannian_only"};
}

std::vector<EvaluationPoint> sample_points(const SampleSpec& spec, int n) {
    std::vector<Vec> xs;
    Vec cur(n, 0.0);
    std::function<void(int)> build = [&](int pos) {
        if (pos == n) {
            xs.push_back(cur);
            return;
        }
        for (double v : spec.axis) {
            cur[pos] = v;
            build(pos + 1);
        }
    };
    build(0);

    std::vector<Vec> dirs;
    Vec d(n, 0.0);
    d[0] = 1.0;
    dirs.push_back(d);
    std::fill(d.begin(), d.end(), 1.0 / std::sqrt(static_cast<double>(n)));
    dirs.push_back(d);
    std::mt19937 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(dirs.size()) < spec.directions) {
        Vec v(n);
        for (double& c : v) c = gauss(rng);
        const double nv = norm2(v);
        if (nv < 1e-6) continue;
        for (double& c : v) c /= nv;
        dirs.push_back(v);
    }

    std::vector<EvaluationPoint> pts;
    pts.reserve(xs.size() * dirs.size());
    for (const Vec& x : xs)
        for (const Vec& y : dirs) pts.push_back({x, y});
    return pts;
}

double max_form_norm(const MetricField& m, const OneFormField& f,
                     std::span<const EvaluationPoint> pts) {
    double mx = 0.0;
    for (const EvaluationPoint& p : pts) {
        const Mat ai = lu_inverse(m.value(p.x));
        const Vec v = f.value(p.x);
        mx = std::max(mx, std::sqrt(std::max(0.0, quad_form(ai, v, v))));
    }
    return mx;
}

} // namespace finsler::fields
