#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jets.hpp"

namespace finsler::psi {

// Psi and its partials to order 3 at one (s, sbar).
struct PsiJet {
    double v = 0.0;
    double s = 0.0, sb = 0.0;
    double ss = 0.0, ssb = 0.0, sbsb = 0.0;
    double sss = 0.0, sssb = 0.0, ssbsb = 0.0, sbsbsb = 0.0;
};

// Partials to order 2 in any scalar type (double or jets::Jet); this is the
// slice the spray pipeline needs when it is itself differentiated.
template <class T>
struct Psi2 {
    T v, s, sb, ss, ssb, sbsb;
};

// Univariate factor for the alpha_beta and composed families.
struct Phi {
    enum class Kind { poly, exponential };
    Kind kind = Kind::exponential;
    std::vector<double> coef; // poly: c0 + c1 t + c2 t^2 + ...

    static Phi exponential() { return {Kind::exponential, {}}; }
    static Phi poly(std::vector<double> c) { return {Kind::poly, std::move(c)}; }

    // deriv-th derivative evaluated at t
    template <class T>
    T eval(const T& t, int deriv) const {
        using std::exp;
        if (kind == Kind::exponential) return exp(t);
        T acc = t * 0.0;
        for (int k = static_cast<int>(coef.size()) - 1; k >= deriv; --k) {
            double c = coef[k];
            for (int m = 0; m < deriv; ++m) c *= k - m;
            T term = t * 0.0 + c;
            for (int p = 0; p < k - deriv; ++p) term = term * t;
            acc += term;
        }
        return acc;
    }
};

struct ExpGamma {};  // Psi = e^s + sbar
struct Randers3 {};  // Psi = 1 + s + sbar
struct AlphaBeta {   // Psi = phi(s)
    Phi phi;
};
struct Composed {    // Psi = phi(s) psi(sbar / phi(s))
    Phi phi;
    Phi psi;
};

class PsiKernel {
public:
    using Variant = std::variant<ExpGamma, Randers3, AlphaBeta, Composed>;

    PsiKernel(Variant v, double b0, double g0, std::string name)
        : v_(std::move(v)), b0_(b0), g0_(g0), name_(std::move(name)) {}

    static PsiKernel exp_gamma(double b0, double g0) { return {ExpGamma{}, b0, g0, "exp_gamma"}; }
    static PsiKernel randers3(double b0, double g0) { return {Randers3{}, b0, g0, "randers3"}; }
    static PsiKernel alpha_beta(Phi phi, double b0, double g0 = 1e9) {
        return {AlphaBeta{std::move(phi)}, b0, g0, "alpha_beta"};
    }
    static PsiKernel composed(Phi phi, Phi psi, double b0, double g0) {
        return {Composed{std::move(phi), std::move(psi)}, b0, g0, "composed"};
    }

    const std::string& name() const { return name_; }
    double b0() const { return b0_; }
    double g0() const { return g0_; }
    const Variant& variant() const { return v_; }
    bool in_domain(double s, double sb) const {
        return std::abs(s) < b0_ && std::abs(sb) < g0_;
    }

    template <class T>
    T value(const T& s, const T& sb) const {
        using std::exp;
        return std::visit(
            [&](const auto& k) -> T {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ExpGamma>) {
                    return exp(s) + sb;
                } else if constexpr (std::is_same_v<K, Randers3>) {
                    return 1.0 + s + sb;
                } else if constexpr (std::is_same_v<K, AlphaBeta>) {
                    return k.phi.eval(s, 0);
                } else {
                    T phi = k.phi.eval(s, 0);
                    return phi * k.psi.eval(sb / phi, 0);
                }
            },
            v_);
    }

    template <class T>
    Psi2<T> partials2(const T& s, const T& sb) const {
        using std::exp;
        const T zero = s * 0.0;
        return std::visit(
            [&](const auto& k) -> Psi2<T> {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, ExpGamma>) {
                    T es = exp(s);
                    return {es + sb, es, zero + 1.0, es, zero, zero};
                } else if constexpr (std::is_same_v<K, Randers3>) {
                    return {1.0 + s + sb, zero + 1.0, zero + 1.0, zero, zero, zero};
                } else if constexpr (std::is_same_v<K, AlphaBeta>) {
                    return {k.phi.eval(s, 0), k.phi.eval(s, 1), zero, k.phi.eval(s, 2), zero, zero};
                } else {
                    // Psi = phi(s) psi(t), t = sbar/phi
                    T phi = k.phi.eval(s, 0);
                    T dphi = k.phi.eval(s, 1);
                    T ddphi = k.phi.eval(s, 2);
                    T t = sb / phi;
                    T ps = k.psi.eval(t, 0);
                    T dps = k.psi.eval(t, 1);
                    T ddps = k.psi.eval(t, 2);
                    T ws = ps - t * dps; // psi - t psi'
                    Psi2<T> r{phi * ps,
                              dphi * ws,
                              dps,
                              ddphi * ws + t * t * dphi * dphi * ddps / phi,
                              -t * dphi * ddps / phi,
                              ddps / phi};
                    return r;
                }
            },
            v_);
    }

    // All partials to order 3; throws OutOfDomain outside the declared
    // rectangle.
    PsiJet partials3(double s, double sb) const;

private:
    Variant v_;
    double b0_, g0_;
    std::string name_;
};

// Spec op name; validates the domain and returns the order-3 jet.
inline PsiJet psi_eval(const PsiKernel& k, double s, double sb) { return k.partials3(s, sb); }

struct CoefficientSet {
    // inputs
    double s = 0.0, sb = 0.0, b2 = 0.0, g2 = 0.0, theta = 0.0;
    // Eq (rho)
    double rho = 0.0, rho0 = 0.0, rhob0 = 0.0, rho1 = 0.0, rhob1 = 0.0, rho2 = 0.0, rho3 = 0.0;
    // Eq (condition0), (Gamma), (pi), and J
    double Pi = 0.0, J = 0.0, pi1 = 0.0, pi2 = 0.0, Gamma = 0.0;
};

// Assembles the whole coefficient set. Throws DegeneratePi when |Pi| < 1e-12
// (J, pi1, pi2 divide by Pi).
CoefficientSet coefficients(const PsiJet& j, double s, double sb, double b2, double g2,
                            double theta);

struct GridSpec {
    int ns = 33;     // s resolution per (b, g) cell
    int nsb = 33;    // sbar resolution
    int nb = 9;      // b resolution over (0, b0)
    int ng = 9;      // g resolution over (0, g0)
    int ntheta = 5;  // theta resolution over [max(-bg, s*sb), bg]
};

struct AdmissibilityNode {
    double b = 0.0, g = 0.0, s = 0.0, sb = 0.0, theta = 0.0;
    double Pi = 0.0, Gamma = 0.0, psi = 0.0;
};

struct AdmissibilityReport {
    bool admissible = false;
    int dimension = 0;
    GridSpec grid;
    long nodes_checked = 0;
    double min_Pi = 0.0, min_Gamma = 0.0, min_psi = 0.0;
    std::optional<AdmissibilityNode> witness; // first violating node
    bool psi_positive = true;                 // kernel positivity, reported separately
};

// Sampled Prop 3.4 predicate: Pi > 0 and Gamma > 0 at every node for n >= 3,
// Gamma > 0 alone for n = 2. Nodes with |Pi| < 1e-12 count as violations
// (Gamma's J term divides by Pi).
AdmissibilityReport admissibility(const PsiKernel& k, double b0, double g0, const GridSpec& grid,
                                  int n);

// Enumerates the sweep's nodes in deterministic order.
template <class F>
void for_each_grid_node(double b0, double g0, const GridSpec& grid, F&& visit) {
    if (grid.ns < 2 || grid.nsb < 2 || grid.nb < 1 || grid.ng < 1 || grid.ntheta < 1)
        throw EmptyGrid("admissibility: empty grid");
    for (int ib = 1; ib <= grid.nb; ++ib) {
        const double b = b0 * ib / (grid.nb + 1);
        for (int ig = 1; ig <= grid.ng; ++ig) {
            const double g = g0 * ig / (grid.ng + 1);
            for (int is = 0; is < grid.ns; ++is) {
                const double s = -b + 2.0 * b * is / (grid.ns - 1);
                for (int isb = 0; isb < grid.nsb; ++isb) {
                    const double sb = -g + 2.0 * g * isb / (grid.nsb - 1);
                    const double lo = std::max(-b * g, s * sb);
                    const double hi = b * g;
                    for (int it = 0; it < grid.ntheta; ++it) {
                        const double th =
                            grid.ntheta == 1 ? lo : lo + (hi - lo) * it / (grid.ntheta - 1);
                        visit(b, g, s, sb, th);
                    }
                }
            }
        }
    }
}

} // namespace finsler::psi
