#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "finsler/fields.hpp"
#include "finsler/jets.hpp"
#include "test_helpers.hpp"

using namespace finsler;
using fields::FieldExpr;

namespace {

fields::MetricField euclidean(int n) {
    std::vector<FieldExpr> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) upper.push_back(FieldExpr::constant(n, i == j ? 1.0 : 0.0));
    return fields::MetricField(n, std::move(upper));
}

fields::OneFormField constant_form(int n, Vec c, double bound) {
    std::vector<FieldExpr> comps;
    for (int i = 0; i < n; ++i) comps.push_back(FieldExpr::constant(n, c[i]));
    return fields::OneFormField(n, std::move(comps), bound);
}

} // namespace

TEST_CASE("norms: orthogonal constant forms on the Euclidean metric") {
    const auto m = euclidean(2);
    const auto beta = constant_form(2, {0.3, 0.0}, 0.4);
    const auto gamma = constant_form(2, {0.0, 0.2}, 0.3);
    const Vec x = {0.1, 0.7};
    const auto n = fields::norms(m, beta, gamma, x);
    CHECK(n.b2 == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(n.g2 == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(n.theta == doctest::Approx(0.0));
}

TEST_CASE("norms: proportional forms give the Cauchy-Schwarz equality case") {
    const auto m = euclidean(2);
    const auto beta = constant_form(2, {0.3, 0.0}, 0.4);
    const auto n = fields::norms(m, beta, beta, Vec{0.0, 0.0});
    CHECK(n.theta == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(n.theta == doctest::Approx(n.b2));
    CHECK(n.theta == doctest::Approx(n.g2));
}

TEST_CASE("norms: conformal metric rescales the squared norm by e^{-2 sigma}") {
    // a = e^{2 sigma} delta with sigma = 0.1 x^1, so a^{ij} = e^{-2 sigma} delta
    const auto fx = fields::fixture("conformal_generic", 2);
    const auto beta = constant_form(2, {0.3, 0.0}, 0.4);
    const auto gamma = constant_form(2, {0.0, 0.0}, 0.1);
    const Vec x = {1.0, 0.0};
    const auto n = fields::norms(fx.metric, beta, gamma, x);
    CHECK(n.b2 == doctest::Approx(0.09 * std::exp(-0.2)).epsilon(1e-14));
}

TEST_CASE("fixture: euclidean_parallel_closed has constant beta and closed gamma") {
    const auto fx = fields::fixture("euclidean_parallel_closed", 2);
    const Vec x = {0.6, -0.3};
    CHECK(max_abs(fx.beta.derivative(x).data()) == 0.0);
    const Mat dg = fx.gamma.derivative(x);
    CHECK(dg(0, 1) - dg(1, 0) == doctest::Approx(0.0)); // antisymmetric part vanishes
}

TEST_CASE("fixture: euclidean_nonclosed has a nonvanishing curl") {
    const auto fx = fields::fixture("euclidean_nonclosed", 2);
    const Vec x = {0.0, 1.0};
    const Mat dg = fx.gamma.derivative(x);
    CHECK(dg(0, 1) - dg(1, 0) == doctest::Approx(0.8)); // d(0.4 (x^2)^2)/dx^2 = 0.8 x^2
}

TEST_CASE("fixture: riemannian_only has identically zero forms") {
    const auto fx = fields::fixture("riemannian_only", 3);
    CHECK(fx.beta.is_zero());
    CHECK(fx.gamma.is_zero());
    const Vec x = {0.2, 0.4, -0.1};
    CHECK(max_abs(fx.beta.value(x)) == 0.0);
    CHECK(max_abs(fx.gamma.value(x)) == 0.0);
}

TEST_CASE("fixture: unknown name throws") {
    CHECK_THROWS_AS(fields::fixture("no_such_fixture", 2), UnknownFixture);
    CHECK_THROWS_AS(fields::fixture("euclidean_nonclosed", 7), UnknownFixture);
}

TEST_CASE("fixtures: SPD metric, declared bounds, Cauchy-Schwarz at all samples") {
    for (const auto& name : fields::fixture_names()) {
        for (int n : {2, 3}) {
            const auto fx = fields::fixture(name, n);
            const auto pts = fields::sample_points({}, n);
            for (const auto& p : pts) {
                CHECK(spd_check(fx.metric.value(p.x)));
                const auto nr = fields::norms(fx.metric, fx.beta, fx.gamma, p.x);
                CHECK(nr.theta * nr.theta <= nr.b2 * nr.g2 + 1e-14);
            }
            CHECK(fields::max_form_norm(fx.metric, fx.beta, pts) < fx.beta.declared_bound());
            CHECK(fields::max_form_norm(fx.metric, fx.gamma, pts) < fx.gamma.declared_bound());
        }
    }
}

TEST_CASE("fixtures: declared derivatives match the fd oracle") {
    for (const auto& name : fields::fixture_names()) {
        const int n = 2;
        const auto fx = fields::fixture(name, n);
        const Vec x = {0.4, -0.6};
        const Vec y = {1.0, 0.0}; // unused by the fields
        // metric entries
        const Ten3 da = fx.metric.derivative(x);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const auto f = jets::make_field(
                        [&, i, j](auto xs, auto) { return fx.metric.entry(i, j)(xs); });
                    std::vector<int> multi(2 * n, 0);
                    multi[k] = 1;
                    const auto fd = jets::fd_check(f, x, y, multi);
                    CHECK(testutil::rel(da(i, j, k), fd.value) <= 1e-8);
                }
        // form components
        const Mat db = fx.gamma.derivative(x);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const auto f = jets::make_field(
                    [&, i](auto xs, auto) { return fx.gamma.component(i)(xs); });
                std::vector<int> multi(2 * n, 0);
                multi[k] = 1;
                const auto fd = jets::fd_check(f, x, y, multi);
                CHECK(testutil::rel(db(i, k), fd.value) <= 1e-8);
            }
    }
}

TEST_CASE("sample_points: deterministic, unit directions, axis and diagonal included") {
    fields::SampleSpec spec;
    const auto a = fields::sample_points(spec, 2);
    const auto b = fields::sample_points(spec, 2);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 9 * 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(norm2(a[i].y) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(a[0].y == Vec{1.0, 0.0});
    const double d = 1.0 / std::sqrt(2.0);
    CHECK(a[1].y == Vec{d, d});
}

TEST_CASE("FieldExpr: derivative stays in the family (exp of linear form)") {
    FieldExpr e(2);
    e.add(2.0, {1, 0}, {0.3, -0.1}); // 2 x1 exp(0.3 x1 - 0.1 x2)
    const FieldExpr d0 = e.derivative(0);
    const Vec x = {0.5, 0.8};
    const double expct = 2.0 * std::exp(0.3 * 0.5 - 0.1 * 0.8) * (1.0 + 0.5 * 0.3);
    CHECK(d0(std::span<const double>(x)) == doctest::Approx(expct).epsilon(1e-14));
}
