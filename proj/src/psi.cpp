#include "finsler/psi.hpp"

#include <limits>

namespace finsler::psi {

namespace {

// Order-3 partials of a generic two-argument kernel via 2-variable jets.
PsiJet jet_partials3(const PsiKernel& k, double s, double sb) {
    using jets::Jet;
    using jets::TaylorTables;
    const TaylorTables& tt = TaylorTables::get(2, 3);
    Jet js = Jet::variable(tt, 0, s);
    Jet jsb = Jet::variable(tt, 1, sb);
    Jet v = k.value(js, jsb);
    auto D = [&](int i, int j) {
        const int e[2] = {i, j};
        return v.derivative(std::span<const int>(e, 2));
    };
    PsiJet r;
    r.v = D(0, 0);
    r.s = D(1, 0);
    r.sb = D(0, 1);
    r.ss = D(2, 0);
    r.ssb = D(1, 1);
    r.sbsb = D(0, 2);
    r.sss = D(3, 0);
    r.sssb = D(2, 1);
    r.ssbsb = D(1, 2);
    r.sbsbsb = D(0, 3);
    return r;
}

} // namespace

PsiJet PsiKernel::partials3(double s, double sb) const {
    if (!in_domain(s, sb))
        throw OutOfDomain("psi_eval: (s, sbar) outside the declared rectangle");
    return std::visit(
        [&](const auto& k) -> PsiJet {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, ExpGamma>) {
                const double es = std::exp(s);
                PsiJet r;
                r.v = es + sb;
                r.s = r.ss = r.sss = es;
                r.sb = 1.0;
                return r;
            } else if constexpr (std::is_same_v<K, Randers3>) {
                PsiJet r;
                r.v = 1.0 + s + sb;
                r.s = 1.0;
                r.sb = 1.0;
                return r;
            } else if constexpr (std::is_same_v<K, AlphaBeta>) {
                PsiJet r;
                r.v = k.phi.eval(s, 0);
                r.s = k.phi.eval(s, 1);
                r.ss = k.phi.eval(s, 2);
                r.sss = k.phi.eval(s, 3);
                return r;
            } else {
                return jet_partials3(*this, s, sb);
            }
        },
        v_);
}

CoefficientSet coefficients(const PsiJet& j, double s, double sb, double b2, double g2,
                            double theta) {
    CoefficientSet c;
    c.s = s;
    c.sb = sb;
    c.b2 = b2;
    c.g2 = g2;
    c.theta = theta;

    c.Pi = j.v - s * j.s - sb * j.sb;
    c.rho = j.v * c.Pi;
    c.rho0 = j.v * j.ss + j.s * j.s;
    c.rhob0 = j.v * j.sbsb + j.sb * j.sb;
    c.rho3 = j.v * j.ssb + j.s * j.sb;
    c.rho1 = j.v * j.s - s * c.rho0 - sb * c.rho3;
    c.rhob1 = j.v * j.sb - sb * c.rhob0 - s * c.rho3;
    c.rho2 = -s * c.rho1 - sb * c.rhob1;

    if (std::abs(c.Pi) < 1e-12)
        throw DegeneratePi("coefficients: |Pi| below 1e-12");
    c.J = (j.ss * j.sbsb - j.ssb * j.ssb) / c.Pi;
    const double p = b2 - s * s;
    const double q = g2 - sb * sb;
    const double r = theta - s * sb;
    c.Gamma = c.Pi + p * j.ss + q * j.sbsb + 2.0 * r * j.ssb + (p * q - r * r) * c.J;
    c.pi1 = j.sb * j.ssb - j.s * j.sbsb + s * j.v * c.J;
    c.pi2 = j.s * j.ssb - j.sb * j.ss + sb * j.v * c.J;
    return c;
}

AdmissibilityReport admissibility(const PsiKernel& k, double b0, double g0, const GridSpec& grid,
                                  int n) {
    AdmissibilityReport rep;
    rep.dimension = n;
    rep.grid = grid;
    rep.admissible = true;
    rep.min_Pi = rep.min_Gamma = rep.min_psi = std::numeric_limits<double>::infinity();

    for_each_grid_node(b0, g0, grid, [&](double b, double g, double s, double sb, double th) {
        ++rep.nodes_checked;
        const auto p2 = k.partials2(s, sb);
        const double Pi = p2.v - s * p2.s - sb * p2.sb;
        const double p = b * b - s * s;
        const double q = g * g - sb * sb;
        const double r = th - s * sb;
        double Gamma = std::numeric_limits<double>::quiet_NaN();
        bool degenerate = std::abs(Pi) < 1e-12;
        if (!degenerate) {
            const double J = (p2.ss * p2.sbsb - p2.ssb * p2.ssb) / Pi;
            Gamma = Pi + p * p2.ss + q * p2.sbsb + 2.0 * r * p2.ssb + (p * q - r * r) * J;
        }
        rep.min_Pi = std::min(rep.min_Pi, Pi);
        if (!degenerate) rep.min_Gamma = std::min(rep.min_Gamma, Gamma);
        rep.min_psi = std::min(rep.min_psi, p2.v);
        if (p2.v <= 0.0) rep.psi_positive = false;

        const bool node_ok = !degenerate && Gamma > 0.0 && (n == 2 || Pi > 0.0);
        if (!node_ok && rep.admissible) {
            rep.admissible = false;
            rep.witness = AdmissibilityNode{b, g, s, sb, th, Pi, Gamma, p2.v};
        }
    });
    return rep;
}

} // namespace finsler::psi
