#pragma once

#include <cassert>
#include <cmath>
#include <span>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

using Vec = std::vector<double>;

// Dense row-major n x n matrix; n is 2..4 everywhere in this project.
class Mat {
public:
    Mat() = default;
    explicit Mat(int n, double fill = 0.0) : n_(n), d_(static_cast<std::size_t>(n) * n, fill) {}

    int dim() const { return n_; }
    double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    std::span<const double> data() const { return d_; }
    std::span<double> data() { return d_; }

    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    int n_ = 0;
    std::vector<double> d_;
};

class Ten3 {
public:
    Ten3() = default;
    explicit Ten3(int n, double fill = 0.0)
        : n_(n), d_(static_cast<std::size_t>(n) * n * n, fill) {}

    int dim() const { return n_; }
    double& operator()(int i, int j, int k) {
        return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
    }
    double operator()(int i, int j, int k) const {
        return d_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
    }
    std::span<const double> data() const { return d_; }

private:
    int n_ = 0;
    std::vector<double> d_;
};

class Ten4 {
public:
    Ten4() = default;
    explicit Ten4(int n, double fill = 0.0)
        : n_(n), d_(static_cast<std::size_t>(n) * n * n * n, fill) {}

    int dim() const { return n_; }
    double& operator()(int i, int j, int k, int l) {
        return d_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return d_[((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    std::span<const double> data() const { return d_; }

private:
    int n_ = 0;
    std::vector<double> d_;
};

// LU factorization with partial pivoting.
double lu_det(const Mat& a);
Mat lu_inverse(const Mat& a); // throws SingularMetric

Vec mat_vec(const Mat& a, std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double quad_form(const Mat& a, std::span<const double> u, std::span<const double> v);
Mat mat_mul(const Mat& a, const Mat& b);

double norm2(std::span<const double> v);
double max_abs(std::span<const double> v);

bool spd_check(const Mat& a); // symmetric + positive pivots in LDL^T sense

// |x - ref| / max(1, |ref|)
inline double rel_err(double x, double ref) {
    return std::abs(x - ref) / std::max(1.0, std::abs(ref));
}

} // namespace finsler
