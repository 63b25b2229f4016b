#pragma once

#include <span>

#include "finsler/fields.hpp"
#include "finsler/linalg.hpp"

namespace finsler::alpha {

struct AlphaConnection {
    Ten3 christoffel; // gamma^i_{jk}, symmetric in (j, k)
    Vec G;            // ^alpha G^i = (1/2) gamma^i_{jk} y^j y^k
    Mat G_y;          // G_y(i, j) = d ^alpha G^i / d y^j
    Ten3 G_yy;        // = christoffel
};

AlphaConnection connection(const fields::MetricField& m, const fields::EvaluationPoint& p);

// Christoffel symbols alone (x-only part of the connection).
Ten3 christoffel_symbols(const fields::MetricField& m, std::span<const double> x);

struct FormDerivatives {
    Mat nabla; // nabla(i, j) = coeff_{i|j}
    Mat r;     // symmetric part
    Mat smat;  // antisymmetric part
};

FormDerivatives covariant_derivative(const fields::MetricField& m, const fields::OneFormField& f,
                                     std::span<const double> x);

// The seven contractions of Eqs (def r,s)/(def r,s2)'s lists for one form.
// The index on r_j / s_j is raised with the form's own coefficients
// (^beta with b^i, ^gamma with gamma^i); the crossed sbar0 uses the other
// form (^beta sbar_0 = ^beta s^i_0 gamma_i, ^gamma sbar_0 = ^gamma s^i_0 b_i).
struct FormContractions {
    double r00 = 0.0;
    Vec ri0;
    double r0 = 0.0;
    Vec si0;
    double s0 = 0.0;
    double sbar0 = 0.0;
    Vec si0_up; // s^i_0 = a^{ij} s_{j0}
};

struct Contractions {
    FormContractions beta;
    FormContractions gamma;
};

Contractions contractions(const FormDerivatives& fd_beta, const FormDerivatives& fd_gamma,
                          const fields::MetricField& m, const fields::OneFormField& beta,
                          const fields::OneFormField& gamma, const fields::EvaluationPoint& p);

// Covariant derivative of the metric itself; vanishes identically for the
// Levi-Civita connection (metric-compatibility oracle for tests).
Ten3 metric_compatibility_residual(const fields::MetricField& m, std::span<const double> x);

} // namespace finsler::alpha
