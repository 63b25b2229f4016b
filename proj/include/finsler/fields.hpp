#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/linalg.hpp"

namespace finsler::fields {

struct EvaluationPoint {
    Vec x;
    Vec y;
};

// Sum of terms  coef * prod_k x_k^{pow_k} * exp(sum_k lin_k x_k).
// Closed under partial differentiation, which is what makes all field
// x-derivatives analytic. Covers every fixture and the inline-config grammar
// (polynomials and exponentials of linear forms).
class FieldExpr {
public:
    struct Term {
        double coef = 0.0;
        std::vector<int> pow;    // size dim
        std::vector<double> lin; // size dim, all-zero means no exponential factor
    };

    FieldExpr() = default;
    explicit FieldExpr(int dim) : dim_(dim) {}

    static FieldExpr constant(int dim, double c);
    FieldExpr& add(double coef, std::vector<int> pow, std::vector<double> lin = {});

    int dim() const { return dim_; }
    const std::vector<Term>& terms() const { return terms_; }
    FieldExpr derivative(int k) const;

    template <class T>
    T operator()(std::span<const T> x) const {
        T acc = x[0] * 0.0;
        for (const Term& t : terms_) {
            T m = x[0] * 0.0 + t.coef;
            for (int k = 0; k < dim_; ++k)
                for (int p = 0; p < t.pow[k]; ++p) m = m * x[k];
            bool has_exp = false;
            for (double l : t.lin) has_exp = has_exp || l != 0.0;
            if (has_exp) {
                T e = x[0] * 0.0;
                for (int k = 0; k < dim_; ++k)
                    if (t.lin[k] != 0.0) e += x[k] * t.lin[k];
                using std::exp;
                m = m * exp(e);
            }
            acc += m;
        }
        return acc;
    }

    double operator()(std::span<const double> x) const;

private:
    int dim_ = 0;
    std::vector<Term> terms_;
};

class MetricField {
public:
    // `upper` holds the distinct entries a_{ij}, i <= j, row by row.
    MetricField(int n, std::vector<FieldExpr> upper);

    int dim() const { return n_; }
    Mat value(std::span<const double> x) const;
    // da(i, j, k) = d a_{ij} / d x^k
    Ten3 derivative(std::span<const double> x) const;
    const FieldExpr& entry(int i, int j) const;

    template <class T>
    std::vector<T> value_generic(std::span<const T> x) const {
        std::vector<T> a(static_cast<std::size_t>(n_) * n_, x[0] * 0.0);
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                a[static_cast<std::size_t>(i) * n_ + j] = entry(i, j).template operator()<T>(x);
                if (i != j) a[static_cast<std::size_t>(j) * n_ + i] = a[static_cast<std::size_t>(i) * n_ + j];
            }
        return a;
    }

private:
    int n_;
    std::vector<FieldExpr> upper_;
};

class OneFormField {
public:
    OneFormField(int n, std::vector<FieldExpr> comps, double declared_bound);

    int dim() const { return n_; }
    double declared_bound() const { return bound_; }
    Vec value(std::span<const double> x) const;
    // dc(i, j) = d coeff_i / d x^j
    Mat derivative(std::span<const double> x) const;
    const FieldExpr& component(int i) const { return comps_[i]; }
    bool is_zero() const;

    template <class T>
    std::vector<T> value_generic(std::span<const T> x) const {
        std::vector<T> v;
        v.reserve(n_);
        for (int i = 0; i < n_; ++i) v.push_back(comps_[i].template operator()<T>(x));
        return v;
    }

private:
    int n_;
    std::vector<FieldExpr> comps_;
    double bound_;
};

struct Norms {
    double b2 = 0.0;
    double g2 = 0.0;
    double theta = 0.0;
};

// b^2 = a^{ij} b_i b_j, g^2 = a^{ij} g_i g_j, theta = a^{ij} b_i g_j.
Norms norms(const MetricField& m, const OneFormField& beta, const OneFormField& gamma,
            std::span<const double> x);

struct FixtureSet {
    std::string name;
    MetricField metric;
    OneFormField beta;
    OneFormField gamma;
};

// Catalogue: euclidean_parallel_closed, euclidean_nonclosed, conformal_generic,
// riemannian_only. Throws UnknownFixture.
FixtureSet fixture(const std::string& name, int n);
std::vector<std::string> fixture_names();

struct SampleSpec {
    std::vector<double> axis = {-0.8, 0.0, 0.8}; // per-coordinate x grid
    int directions = 8;                          // y directions per x point
    std::uint32_t seed = 97;
};

// Deterministic (x, y) sample set: Cartesian x grid, unit y directions
// (first axis, main diagonal, then seeded pseudo-random).
std::vector<EvaluationPoint> sample_points(const SampleSpec& spec, int n);

// Max over sample x of ||form||_alpha; used for bound validation.
double max_form_norm(const MetricField& m, const OneFormField& f,
                     std::span<const EvaluationPoint> pts);

} // namespace finsler::fields
