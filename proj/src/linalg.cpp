#include "finsler/linalg.hpp"

#include <algorithm>

namespace finsler {

namespace {

// Returns permutation sign, factors a in place (L\U, unit diagonal L).
// Returns 0 on singularity.
int lu_factor(Mat& a, std::vector<int>& piv) {
    const int n = a.dim();
    piv.resize(n);
    int sign = 1;
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (a(p, k) == 0.0) return 0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(piv[k], piv[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= a(i, k) * a(k, j);
        }
    }
    return sign;
}

} // namespace

double lu_det(const Mat& a) {
    Mat f = a;
    std::vector<int> piv;
    const int sign = lu_factor(f, piv);
    if (sign == 0) return 0.0;
    double det = sign;
    for (int i = 0; i < f.dim(); ++i) det *= f(i, i);
    return det;
}

Mat lu_inverse(const Mat& a) {
    const int n = a.dim();
    Mat f = a;
    std::vector<int> piv;
    if (lu_factor(f, piv) == 0) throw SingularMetric("matrix is singular");
    Mat inv(n);
    Vec col(n);
    for (int c = 0; c < n; ++c) {
        for (int i = 0; i < n; ++i) col[i] = piv[i] == c ? 1.0 : 0.0;
        for (int i = 0; i < n; ++i) // forward
            for (int j = 0; j < i; ++j) col[i] -= f(i, j) * col[j];
        for (int i = n - 1; i >= 0; --i) { // backward
            for (int j = i + 1; j < n; ++j) col[i] -= f(i, j) * col[j];
            col[i] /= f(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, c) = col[i];
    }
    return inv;
}

Vec mat_vec(const Mat& a, std::span<const double> v) {
    const int n = a.dim();
    Vec r(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r[i] += a(i, j) * v[j];
    return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

double quad_form(const Mat& a, std::span<const double> u, std::span<const double> v) {
    const int n = a.dim();
    double r = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r += a(i, j) * u[i] * v[j];
    return r;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    const int n = a.dim();
    Mat r(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

double norm2(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool spd_check(const Mat& a) {
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-12 * std::max(1.0, std::abs(a(i, j))))
                return false;
    // Cholesky without square roots; positive pivots <=> SPD
    Mat f = a;
    for (int k = 0; k < n; ++k) {
        if (f(k, k) <= 0.0) return false;
        for (int i = k + 1; i < n; ++i) {
            const double m = f(i, k) / f(k, k);
            for (int j = k; j < n; ++j) f(i, j) -= m * f(k, j);
        }
    }
    return true;
}

} // namespace finsler
