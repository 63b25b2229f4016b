#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/linalg.hpp"

namespace finsler::jets {

// Index tables for truncated multivariate Taylor polynomials: monomials in
// `vars` variables of total degree <= `order`, in graded lexicographic order
// (term 0 is the constant). Tables are built once per (vars, order) and
// shared; Jet instances hold a pointer into the cache.
class TaylorTables {
public:
    static const TaylorTables& get(int vars, int order);

    int vars() const { return vars_; }
    int order() const { return order_; }
    int terms() const { return terms_; }
    int exponent(int term, int var) const { return expo_[static_cast<std::size_t>(term) * vars_ + var]; }
    int degree(int term) const { return deg_[term]; }
    // Index of the product monomial, -1 if the total degree exceeds `order`.
    int prod(int i, int j) const { return prod_[static_cast<std::size_t>(i) * terms_ + j]; }
    // Index of the monomial with the given exponents, -1 if absent.
    int index(std::span<const int> expo) const;
    // Product of exponent factorials: converts a Taylor coefficient into a
    // partial derivative.
    double deriv_factor(int term) const { return dfac_[term]; }

    TaylorTables(const TaylorTables&) = delete;
    TaylorTables& operator=(const TaylorTables&) = delete;

private:
    TaylorTables(int vars, int order);
    int vars_, order_, terms_;
    std::vector<std::uint8_t> expo_;
    std::vector<int> deg_;
    std::vector<std::int32_t> prod_;
    std::vector<double> dfac_;
};

// Truncated multivariate Taylor polynomial with value-semantics arithmetic.
// Feeding variables through ordinary formulas yields exact derivatives of the
// formula at the seed point (forward-mode differentiation).
class Jet {
public:
    Jet() = default;
    static Jet constant(const TaylorTables& tt, double v);
    static Jet variable(const TaylorTables& tt, int var, double v);

    const TaylorTables& tables() const { return *tt_; }
    double value() const { return c_.empty() ? 0.0 : c_[0]; }
    double coefficient(std::span<const int> expo) const;
    double derivative(std::span<const int> expo) const;
    bool is_finite() const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator+=(double v);
    Jet& operator-=(double v);
    Jet& operator*=(double v);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double b) { return a += b; }
    friend Jet operator+(double a, Jet b) { return b += a; }
    friend Jet operator-(Jet a, double b) { return a -= b; }
    friend Jet operator-(double a, const Jet& b);
    friend Jet operator-(const Jet& a);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator*(Jet a, double b) { return a *= b; }
    friend Jet operator*(double a, Jet b) { return b *= a; }
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator/(double a, const Jet& b);
    friend Jet operator/(Jet a, double b) { return a *= 1.0 / b; }

    // f applied to the jet, given derivatives f^(k) at the jet's value.
    friend Jet analytic(const Jet& u, std::span<const double> derivs);
    friend Jet sqrt(const Jet& u);
    friend Jet exp(const Jet& u);
    friend Jet pow(const Jet& u, int k);

private:
    explicit Jet(const TaylorTables& tt) : tt_(&tt), c_(tt.terms(), 0.0) {}
    const TaylorTables* tt_ = nullptr;
    std::vector<double> c_;
};

inline double scalar_value(double v) { return v; }
inline double scalar_value(const Jet& v) { return v.value(); }

// A scalar field of (x, y), evaluable on plain reals and on jets. Both views
// must be the same formula; make_field builds them from one generic functor.
struct ScalarField {
    std::function<double(std::span<const double>, std::span<const double>)> real;
    std::function<Jet(std::span<const Jet>, std::span<const Jet>)> jet;
};

template <class F>
ScalarField make_field(F f) {
    return ScalarField{
        [f](std::span<const double> x, std::span<const double> y) { return f(x, y); },
        [f](std::span<const Jet> x, std::span<const Jet> y) { return f(x, y); },
    };
}

struct YJet {
    double value = 0.0;
    Vec d1;
    Mat d2;
    Ten3 d3;
    std::optional<Ten4> d4;
};

struct XYJet {
    Vec fx;  // F_{x^k}
    Mat fxy; // fxy(k, j) = F_{x^k y^j}
};

// Exact y-derivatives of f at (x, y), orders 1..4. x is held constant.
YJet eval_y_jet(const ScalarField& f, std::span<const double> x, std::span<const double> y,
                int order);

// First x-derivatives and mixed x-y second derivatives of f at (x, y).
XYJet eval_xy_mixed(const ScalarField& f, std::span<const double> x, std::span<const double> y);

struct FdResult {
    double value = 0.0;
    double error = 0.0; // Richardson error estimate
};

// Independent derivative oracle: nested central differences with Richardson
// extrapolation. multi is a multi-index over the 2n slots (x^0..x^{n-1},
// y^0..y^{n-1}), total order <= 4.
FdResult fd_check(const ScalarField& f, std::span<const double> x, std::span<const double> y,
                  std::span<const int> multi);

} // namespace finsler::jets
