#include "ustat/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ustat {

QuadratureRule simpson_rule(int intervals) {
    if (intervals < 2) throw std::invalid_argument("simpson_rule: need at least 2 intervals");
    if (intervals % 2 != 0) ++intervals;
    const int n = intervals + 1;
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double h = 1.0 / intervals;
    for (int i = 0; i < n; ++i) {
        rule.nodes(i) = static_cast<double>(i) * h;
        double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        rule.weights(i) = w * h / 3.0;
    }
    return rule;
}

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix,
// weights are mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
    const int n = static_cast<int>(offdiag.size()) + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n - 1; ++k) {
        jacobi(k, k + 1) = offdiag(k);
        jacobi(k + 1, k) = offdiag(k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    rule.nodes = solver.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights(i) = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre_01(int points) {
    if (points < 1) throw std::invalid_argument("gauss_legendre_01: need at least 1 point");
    Eigen::VectorXd offdiag(points - 1);
    for (int k = 1; k < points; ++k) {
        offdiag(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    }
    QuadratureRule rule = golub_welsch(offdiag, 2.0);
    // Map [-1,1] with weight sum 2 onto [0,1] with the uniform density.
    rule.nodes = (rule.nodes.array() + 1.0) / 2.0;
    rule.weights /= 2.0;
    return rule;
}

QuadratureRule gauss_hermite(int points) {
    if (points < 1) throw std::invalid_argument("gauss_hermite: need at least 1 point");
    Eigen::VectorXd offdiag(points - 1);
    for (int k = 1; k < points; ++k) {
        offdiag(k - 1) = std::sqrt(static_cast<double>(k));
    }
    return golub_welsch(offdiag, 1.0);
}

}  // namespace ustat
