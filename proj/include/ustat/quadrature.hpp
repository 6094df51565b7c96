#ifndef USTAT_QUADRATURE_HPP
#define USTAT_QUADRATURE_HPP

#include <Eigen/Dense>

namespace ustat {

/// Nodes and weights of a quadrature rule against a probability measure;
/// weights sum to 1 for every rule built here.
struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Composite Simpson on [0,1] against the uniform density.
/// `intervals` is rounded up to the next even count.
QuadratureRule simpson_rule(int intervals);

/// Gauss-Legendre on [0,1] against the uniform density (Golub-Welsch).
QuadratureRule gauss_legendre_01(int points);

/// Gauss-Hermite for the standard normal weight, probabilists' convention
/// (Golub-Welsch). Exact for polynomials of degree <= 2*points - 1.
QuadratureRule gauss_hermite(int points);

}  // namespace ustat

#endif
