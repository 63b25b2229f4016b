#include "finsler/jets.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace finsler::jets {

namespace {

// Graded order: by total degree, then lexicographic on the exponent vector.
void enumerate_monomials(int vars, int order, std::vector<std::uint8_t>& out) {
    std::vector<int> cur(vars, 0);
    std::function<void(int, int)> rec = [&](int pos, int rem) {
        if (pos == vars - 1) {
            cur[pos] = rem;
            for (int v : cur) out.push_back(static_cast<std::uint8_t>(v));
            return;
        }
        for (int k = rem; k >= 0; --k) {
            cur[pos] = k;
            rec(pos + 1, rem - k);
        }
    };
    for (int deg = 0; deg <= order; ++deg) rec(0, deg);
}

std::uint64_t key_of(const std::uint8_t* e, int vars, int order) {
    std::uint64_t k = 0;
    for (int v = 0; v < vars; ++v) k = k * static_cast<std::uint64_t>(order + 1) + e[v];
    return k;
}

} // namespace

TaylorTables::TaylorTables(int vars, int order) : vars_(vars), order_(order) {
    enumerate_monomials(vars, order, expo_);
    terms_ = static_cast<int>(expo_.size()) / vars_;
    deg_.resize(terms_);
    dfac_.resize(terms_);
    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(terms_);
    for (int t = 0; t < terms_; ++t) {
        int d = 0;
        double fac = 1.0;
        for (int v = 0; v < vars_; ++v) {
            const int e = exponent(t, v);
            d += e;
            for (int k = 2; k <= e; ++k) fac *= k;
        }
        deg_[t] = d;
        dfac_[t] = fac;
        lookup.emplace(key_of(&expo_[static_cast<std::size_t>(t) * vars_], vars_, order_), t);
    }
    prod_.assign(static_cast<std::size_t>(terms_) * terms_, -1);
    std::vector<std::uint8_t> sum(vars_);
    for (int i = 0; i < terms_; ++i)
        for (int j = 0; j < terms_; ++j) {
            if (deg_[i] + deg_[j] > order_) continue;
            for (int v = 0; v < vars_; ++v) sum[v] = static_cast<std::uint8_t>(exponent(i, v) + exponent(j, v));
            prod_[static_cast<std::size_t>(i) * terms_ + j] = lookup.at(key_of(sum.data(), vars_, order_));
        }
}

const TaylorTables& TaylorTables::get(int vars, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<TaylorTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{vars, order}];
    if (!slot) slot.reset(new TaylorTables(vars, order));
    return *slot;
}

int TaylorTables::index(std::span<const int> expo) const {
    for (int t = 0; t < terms_; ++t) {
        bool match = true;
        for (int v = 0; v < vars_ && match; ++v) match = exponent(t, v) == expo[v];
        if (match) return t;
    }
    return -1;
}

Jet Jet::constant(const TaylorTables& tt, double v) {
    Jet j(tt);
    j.c_[0] = v;
    return j;
}

Jet Jet::variable(const TaylorTables& tt, int var, double v) {
    Jet j(tt);
    j.c_[0] = v;
    std::vector<int> e(tt.vars(), 0);
    e[var] = 1;
    const int t = tt.index(e);
    j.c_[t] = 1.0;
    return j;
}

double Jet::coefficient(std::span<const int> expo) const {
    const int t = tt_->index(expo);
    return t < 0 ? 0.0 : c_[t];
}

double Jet::derivative(std::span<const int> expo) const {
    const int t = tt_->index(expo);
    return t < 0 ? 0.0 : c_[t] * tt_->deriv_factor(t);
}

bool Jet::is_finite() const {
    for (double v : c_)
        if (!std::isfinite(v)) return false;
    return true;
}

Jet& Jet::operator+=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator+=(double v) {
    c_[0] += v;
    return *this;
}

Jet& Jet::operator-=(double v) {
    c_[0] -= v;
    return *this;
}

Jet& Jet::operator*=(double v) {
    for (double& c : c_) c *= v;
    return *this;
}

Jet operator-(double a, const Jet& b) {
    Jet r = b;
    for (double& c : r.c_) c = -c;
    r.c_[0] += a;
    return r;
}

Jet operator-(const Jet& a) {
    Jet r = a;
    for (double& c : r.c_) c = -c;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    const TaylorTables& tt = *a.tt_;
    Jet r(tt);
    const int nt = tt.terms();
    for (int i = 0; i < nt; ++i) {
        const double ai = a.c_[i];
        if (ai == 0.0) continue;
        for (int j = 0; j < nt; ++j) {
            const int p = tt.prod(i, j);
            if (p < 0) break; // graded order: all later j overflow too
            r.c_[p] += ai * b.c_[j];
        }
    }
    return r;
}

Jet analytic(const Jet& u, std::span<const double> derivs) {
    const TaylorTables& tt = *u.tt_;
    Jet w = u;
    w.c_[0] = 0.0; // nilpotent part
    Jet r = Jet::constant(tt, derivs[0]);
    Jet wp = w;
    double fac = 1.0;
    for (int k = 1; k <= tt.order() && k < static_cast<int>(derivs.size()); ++k) {
        fac *= k;
        Jet term = wp;
        term *= derivs[k] / fac;
        r += term;
        if (k < tt.order()) wp = wp * w;
    }
    return r;
}

Jet sqrt(const Jet& u) {
    const double u0 = u.value();
    if (u0 <= 0.0) throw NonSmoothPoint("sqrt of non-positive jet value");
    const int d = u.tables().order();
    // d^k/du^k sqrt(u) = sqrt(u0) * prod_{m=0}^{k-1} (1/2 - m) / u0^k
    std::vector<double> der(d + 1);
    der[0] = std::sqrt(u0);
    double coeff = 1.0;
    for (int k = 1; k <= d; ++k) {
        coeff *= 0.5 - (k - 1);
        der[k] = der[0] * coeff / std::pow(u0, k);
    }
    return analytic(u, der);
}

Jet exp(const Jet& u) {
    const int d = u.tables().order();
    std::vector<double> der(d + 1, std::exp(u.value()));
    return analytic(u, der);
}

Jet operator/(const Jet& a, const Jet& b) {
    const double b0 = b.value();
    if (b0 == 0.0) throw NonSmoothPoint("division by zero-valued jet");
    const int d = b.tables().order();
    std::vector<double> der(d + 1); // d^k/du^k (1/u) = (-1)^k k! / u^{k+1}
    double p = 1.0 / b0;
    der[0] = p;
    double fac = 1.0;
    for (int k = 1; k <= d; ++k) {
        fac *= -k;
        p /= b0;
        der[k] = fac * p;
    }
    return a * analytic(b, der);
}

Jet operator/(double a, const Jet& b) {
    return Jet::constant(b.tables(), a) / b;
}

Jet pow(const Jet& u, int k) {
    Jet r = Jet::constant(u.tables(), 1.0);
    for (int i = 0; i < k; ++i) r = r * u;
    return r;
}

namespace {

std::vector<Jet> seed_constants(const TaylorTables& tt, std::span<const double> v) {
    std::vector<Jet> r;
    r.reserve(v.size());
    for (double x : v) r.push_back(Jet::constant(tt, x));
    return r;
}

std::vector<Jet> seed_variables(const TaylorTables& tt, std::span<const double> v, int offset) {
    std::vector<Jet> r;
    r.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        r.push_back(Jet::variable(tt, offset + static_cast<int>(i), v[i]));
    return r;
}

} // namespace

YJet eval_y_jet(const ScalarField& f, std::span<const double> x, std::span<const double> y,
                int order) {
    const int n = static_cast<int>(y.size());
    if (order < 1 || order > 4) throw Error("eval_y_jet: order must be 1..4");
    if (norm2(y) == 0.0) throw DegenerateDirection("eval_y_jet: y = 0");
    const TaylorTables& tt = TaylorTables::get(n, order);
    auto xj = seed_constants(tt, x);
    auto yj = seed_variables(tt, y, 0);
    Jet val = f.jet(xj, yj);
    if (!val.is_finite()) throw NonSmoothPoint("eval_y_jet: non-finite jet");

    YJet out;
    out.value = val.value();
    out.d1.assign(n, 0.0);
    std::vector<int> e(n, 0);
    for (int i = 0; i < n; ++i) {
        e.assign(n, 0);
        e[i] = 1;
        out.d1[i] = val.derivative(e);
    }
    if (order >= 2) {
        out.d2 = Mat(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                e.assign(n, 0);
                e[i] += 1;
                e[j] += 1;
                out.d2(i, j) = val.derivative(e);
            }
    }
    if (order >= 3) {
        out.d3 = Ten3(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    e.assign(n, 0);
                    e[i] += 1;
                    e[j] += 1;
                    e[k] += 1;
                    out.d3(i, j, k) = val.derivative(e);
                }
    }
    if (order >= 4) {
        out.d4 = Ten4(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        e.assign(n, 0);
                        e[i] += 1;
                        e[j] += 1;
                        e[k] += 1;
                        e[l] += 1;
                        (*out.d4)(i, j, k, l) = val.derivative(e);
                    }
    }
    return out;
}

XYJet eval_xy_mixed(const ScalarField& f, std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(y.size());
    if (norm2(y) == 0.0) throw DegenerateDirection("eval_xy_mixed: y = 0");
    const TaylorTables& tt = TaylorTables::get(2 * n, 2);
    auto xj = seed_variables(tt, x, 0);
    auto yj = seed_variables(tt, y, n);
    Jet val = f.jet(xj, yj);
    if (!val.is_finite()) throw NonSmoothPoint("eval_xy_mixed: non-finite jet");

    XYJet out;
    out.fx.assign(n, 0.0);
    out.fxy = Mat(n);
    std::vector<int> e(2 * n, 0);
    for (int k = 0; k < n; ++k) {
        e.assign(2 * n, 0);
        e[k] = 1;
        out.fx[k] = val.derivative(e);
        for (int j = 0; j < n; ++j) {
            e.assign(2 * n, 0);
            e[k] = 1;
            e[n + j] += 1;
            out.fxy(k, j) = val.derivative(e);
        }
    }
    return out;
}

namespace {

double nested_central(const ScalarField& f, Vec x, Vec y, std::span<const int> multi, double h,
                      std::size_t slot) {
    const std::size_t n = x.size();
    while (slot < multi.size() && multi[slot] == 0) ++slot;
    if (slot == multi.size()) return f.real(x, y);
    std::vector<int> rest(multi.begin(), multi.end());
    rest[slot] -= 1;
    double& coord = slot < n ? x[slot] : y[slot - n];
    const double c0 = coord;
    coord = c0 + h;
    const double fp = nested_central(f, x, y, rest, h, slot);
    coord = c0 - h;
    const double fm = nested_central(f, x, y, rest, h, slot);
    return (fp - fm) / (2.0 * h);
}

} // namespace

FdResult fd_check(const ScalarField& f, std::span<const double> x, std::span<const double> y,
                  std::span<const int> multi) {
    int total = 0;
    for (int m : multi) total += m;
    if (total > 4) throw Error("fd_check: multi-index order > 4");
    if (total == 0) return {f.real(x, y), 0.0};

    const double h0 = total <= 2 ? 1e-2 : 5e-2;
    constexpr int kLevels = 5;
    // Richardson table over h, h/2, h/4, ... assuming O(h^2) error expansion.
    std::vector<std::vector<double>> t(kLevels);
    Vec xv(x.begin(), x.end()), yv(y.begin(), y.end());
    double best = 0.0, best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kLevels; ++i) {
        const double h = h0 / std::pow(2.0, i);
        double v = nested_central(f, xv, yv, multi, h, 0);
        if (!std::isfinite(v)) throw StepUnderflow("fd_check: non-finite sample");
        t[i].resize(i + 1);
        t[i][0] = v;
        for (int j = 1; j <= i; ++j) {
            const double w = std::pow(4.0, j);
            t[i][j] = (w * t[i][j - 1] - t[i - 1][j - 1]) / (w - 1.0);
        }
        if (i > 0) {
            const double err = std::abs(t[i][i] - t[i - 1][i - 1]);
            if (err < best_err) {
                best_err = err;
                best = t[i][i];
            }
        }
    }
    if (!std::isfinite(best)) throw StepUnderflow("fd_check: no stable step");
    return {best, best_err};
}

} // namespace finsler::jets
