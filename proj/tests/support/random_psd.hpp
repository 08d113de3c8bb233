#pragma once

#include <Eigen/Dense>

#include <random>

namespace testsupport {

// Q diag(lambda) Q^T with Haar-ish orthogonal Q; the first `rank` eigenvalues in [lo, hi], the rest 0.
inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int size, int rank, double lo = 0.2, double hi = 3.0)
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd m(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) m(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(size);
    for (int i = 0; i < rank; ++i) lambda(i) = u(rng);
    Eigen::MatrixXd a = q * lambda.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int size)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd m(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) m(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ();
}

}  // namespace testsupport
