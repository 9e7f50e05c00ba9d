#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "random.hpp"

namespace testsupport {

/// Textbook two-pass sample standard deviation (divisor n-1); the
/// library uses a one-pass update, so this is an independent route.
inline double two_pass_std(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("two_pass_std: need at least 2 values");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

/// Sample covariance via the pairwise identity
/// cov = sum_i sum_j (x_i - x_j)(y_i - y_j) / (2 n (n-1)),
/// which never forms a mean. O(n^2) but mean-free and independent.
inline double pairwise_covariance(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n != ys.size() || n < 2) throw std::invalid_argument("pairwise_covariance: bad input");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            acc += (xs[i] - xs[j]) * (ys[i] - ys[j]);
        }
    }
    return acc / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

/// Random n x p matrix with exactly the requested 2-norm condition
/// number: X = Q1 diag(sigma) Q2^T with orthonormal factors from QR of
/// Gaussian matrices and log-spaced singular values in [1/kappa, 1].
inline Eigen::MatrixXd conditioned_matrix(int n, int p, double kappa, Rng& rng) {
    Eigen::MatrixXd a(n, p);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    Eigen::MatrixXd b(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) b(i, j) = rng.normal();
    }
    const Eigen::MatrixXd q1 =
        Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() * Eigen::MatrixXd::Identity(n, p);
    const Eigen::MatrixXd q2 =
        Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd sigma(p);
    for (int j = 0; j < p; ++j) {
        const double t = p == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(p - 1);
        sigma(j) = std::pow(kappa, -t);  // 1 down to 1/kappa
    }
    return q1 * sigma.asDiagonal() * q2.transpose();
}

}  // namespace testsupport
