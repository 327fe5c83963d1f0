// linalg.cpp - Gram-Schmidt, complements and SPD checks.

#include "gaussflow/linalg.hpp"

#include "gaussflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaussflow {

Mat gram_schmidt(const Mat& vectors, const Mat& G, double rank_tol) {
    Mat out = vectors;
    for (int j = 0; j < out.cols(); ++j) {
        const double n0 = std::sqrt(std::max(0.0, double(vectors.col(j).transpose() * G * vectors.col(j))));
        // Two passes of projection keep the result orthonormal to rounding.
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                const double c = out.col(i).transpose() * G * out.col(j);
                out.col(j) -= c * out.col(i);
            }
        }
        const double nrm = std::sqrt(std::max(0.0, double(out.col(j).transpose() * G * out.col(j))));
        if (!(nrm > rank_tol * std::max(1.0, n0))) {
            throw RankError("frame lost rank during orthonormalization (column " + std::to_string(j) + ")");
        }
        out.col(j) /= nrm;
    }
    return out;
}

Mat orthonormal_complement(const Mat& frame, const Mat& G) {
    const int n = int(G.rows());
    const int k = int(frame.cols());
    Mat basis(n, n - k);
    Mat current = frame;
    for (int c = 0; c < n - k; ++c) {
        // Pick the coordinate axis with the largest residual after projection.
        int best = -1;
        double best_norm = -1.0;
        Vec best_vec;
        for (int a = 0; a < n; ++a) {
            Vec e = Vec::Unit(n, a);
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i < current.cols(); ++i) e -= double(current.col(i).transpose() * G * e) * current.col(i);
            const double nrm = std::sqrt(std::max(0.0, double(e.transpose() * G * e)));
            if (nrm > best_norm + 1e-12) {
                best_norm = nrm;
                best = a;
                best_vec = e;
            }
        }
        if (best < 0 || best_norm < 1e-10) throw RankError("complement construction failed");
        best_vec /= best_norm;
        basis.col(c) = best_vec;
        current.conservativeResize(n, current.cols() + 1);
        current.col(current.cols() - 1) = best_vec;
    }
    return basis;
}

double gram_residual(const Mat& frame, const Mat& G) {
    const Mat gram = frame.transpose() * G * frame;
    return (gram - Mat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double cross_residual(const Mat& A, const Mat& B, const Mat& G) {
    if (A.cols() == 0 || B.cols() == 0) return 0.0;
    return (A.transpose() * G * B).cwiseAbs().maxCoeff();
}

Mat random_orthogonal(int k, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Mat a(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR();
    for (int j = 0; j < k; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
}

void require_positive_definite(const Mat& g, const char* what) {
    Eigen::LDLT<Mat> ldlt(g);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw DegeneracyError(std::string(what) + " is not positive definite");
    }
    const auto d = ldlt.vectorD();
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (d.minCoeff() <= 1e-14 * scale) throw DegeneracyError(std::string(what) + " is singular");
}

Mat spd_inverse(const Mat& g, const char* what) {
    const int n = int(g.rows());
    if (n <= 3) {
        // Closed-form inverses for small systems; the sign of the
        // determinant stands in for the pivot check.
        const double det = g.determinant();
        if (!(det > 0.0) || g(0, 0) <= 0.0) throw DegeneracyError(std::string(what) + " is not positive definite");
        return g.inverse();
    }
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw DegeneracyError(std::string(what) + " is not positive definite");
    return llt.solve(Mat::Identity(n, n));
}

}  // namespace gaussflow
