// linalg.hpp - dense helpers: small index arrays, Gram-Schmidt under a metric.

#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace gaussflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Rank-3 array with row-major layout, T(a, b, c).
class Array3 {
public:
    Array3() = default;
    Array3(int n0, int n1, int n2) : n0_(n0), n1_(n1), n2_(n2), data_(std::size_t(n0) * n1 * n2, 0.0) {}
    explicit Array3(int n) : Array3(n, n, n) {}

    double& operator()(int a, int b, int c) { return data_[(std::size_t(a) * n1_ + b) * n2_ + c]; }
    double operator()(int a, int b, int c) const { return data_[(std::size_t(a) * n1_ + b) * n2_ + c]; }

    int dim(int k) const { return k == 0 ? n0_ : (k == 1 ? n1_ : n2_); }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    int n0_ = 0, n1_ = 0, n2_ = 0;
    std::vector<double> data_;
};

// Rank-4 array with equal extents, T(a, b, c, d).
class Array4 {
public:
    Array4() = default;
    explicit Array4(int n) : n_(n), data_(std::size_t(n) * n * n * n, 0.0) {}

    double& operator()(int a, int b, int c, int d) { return data_[((std::size_t(a) * n_ + b) * n_ + c) * n_ + d]; }
    double operator()(int a, int b, int c, int d) const { return data_[((std::size_t(a) * n_ + b) * n_ + c) * n_ + d]; }

    int dim() const { return n_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    int n_ = 0;
    std::vector<double> data_;
};

// Ordered Gram-Schmidt of the columns of `vectors` with respect to the inner
// product G. The first column is normalized, later columns are projected off
// the earlier ones and normalized. Throws RankError on (near) dependence.
Mat gram_schmidt(const Mat& vectors, const Mat& G, double rank_tol = 1e-10);

// G-orthonormal basis of the G-orthogonal complement of span(frame). Built by
// projecting the coordinate axes (largest residual first) and orthonormalizing.
Mat orthonormal_complement(const Mat& frame, const Mat& G);

// max |F^T G F - I|.
double gram_residual(const Mat& frame, const Mat& G);

// max |A^T G B| for frames expected to be mutually orthogonal.
double cross_residual(const Mat& A, const Mat& B, const Mat& G);

// Haar-distributed rotation in O(k) (QR of a Gaussian matrix, sign-fixed).
Mat random_orthogonal(int k, std::mt19937_64& rng);

// Inverse of a symmetric positive-definite matrix; throws DegeneracyError if
// the pivoted factorization finds a non-positive pivot.
Mat spd_inverse(const Mat& g, const char* what = "metric");

// Checks positive-definiteness via LDLT, throws DegeneracyError otherwise.
void require_positive_definite(const Mat& g, const char* what = "metric");

}  // namespace gaussflow
