#pragma once

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

#include "cvnn/core.hpp"

namespace cvnn {

/// Monomial exponents (m, l) of z^m zbar^l.
using Exponent = std::pair<int, int>;

/// All (a, b) with a + b <= degree, ordered by total degree then by a descending.
inline std::vector<Exponent> total_degree_exponents(int degree) {
    std::vector<Exponent> out;
    for (int t = 0; t <= degree; ++t)
        for (int a = t; a >= 0; --a) out.emplace_back(a, t - a);
    return out;
}

/// All (a, b) with 0 <= a, b <= degree.
inline std::vector<Exponent> box_exponents(int degree) {
    std::vector<Exponent> out;
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; b <= degree; ++b) out.emplace_back(a, b);
    return out;
}

struct LeastSquaresResult {
    Eigen::VectorXcd coeffs;
    Eigen::Index rank = 0;
    double condition = 0.0;
};

/// Column-scaled, column-pivoted QR least squares.
/// Throws IllConditionedBasis when the scaled matrix is numerically rank deficient.
inline LeastSquaresResult scaled_least_squares(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& y,
                                               double rank_threshold = 1e-13) {
    const Eigen::Index n = A.cols();
    Eigen::VectorXd colscale(n);
    Eigen::MatrixXcd As = A;
    for (Eigen::Index c = 0; c < n; ++c) {
        double s = A.col(c).norm();
        colscale[c] = s > 0 ? 1.0 / s : 1.0;
        As.col(c) *= colscale[c];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(As);
    qr.setThreshold(rank_threshold);
    const auto& R = qr.matrixR();
    double rmax = std::abs(R(0, 0));
    double rmin = std::abs(R(std::min(A.rows(), n) - 1, std::min(A.rows(), n) - 1));
    LeastSquaresResult out;
    out.condition = rmin > 0 ? rmax / rmin : std::numeric_limits<double>::infinity();
    out.rank = qr.rank();
    if (A.rows() < n || out.rank < n) throw IllConditionedBasis(out.condition);
    out.coeffs = qr.solve(y);
    for (Eigen::Index c = 0; c < n; ++c) out.coeffs[c] *= colscale[c];
    return out;
}

}  // namespace cvnn
