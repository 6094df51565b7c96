#ifndef USTAT_BOUNDS_HPP
#define USTAT_BOUNDS_HPP

#include <span>
#include <utility>

#include <Eigen/Dense>

#include "ustat/kernels.hpp"
#include "ustat/processes.hpp"

namespace ustat {

/// The full constant chain feeding the tail bounds:
///   c2      = max{16, 16 (c0 e^{-c1} / (1 - e^{-c1}))^4, (4 c0 e^{c1} / c1)^2}
///   tilde_c = 8 c2
///   b_f     = (C^m sum|f|)^{2/m}
///   c_one   = 1 / (tilde_c e)
/// The e factor in c_one is what the exponent optimization actually yields;
/// dropping it would claim a tighter bound than the argument supports.
struct BoundParameters {
    double c0 = 1.0;
    double c1 = 1.0;
    double sup_bound = 1.0;  // C
    int order = 1;           // m
    double abs_sum = 0.0;    // sum |f|

    double c2 = 0.0;
    double tilde_c = 0.0;
    double b_f = 0.0;
    double c_one = 0.0;
};

double compute_c2(double c0, double c1);

BoundParameters make_bound_parameters(double c0, double c1, double sup_bound, int order,
                                      double abs_sum);

/// Chain assembled from a kernel and a process envelope; throws
/// HypothesisError when the basis sup bound is infinite.
BoundParameters bound_parameters_for(const CanonicalKernel& kernel,
                                     const MixingEnvelope& envelope);

/// log of the tail bound exp{-c_one x^{2/m} / b_f}; -inf when b_f == 0.
double theorem_bound_log(double x, const BoundParameters& params);

/// P(|V_n| > x) and P(|U_n| > x) bound (identical constants), clipped to 1.
double theorem_bound(double x, const BoundParameters& params);

/// Classical one-sided bound exp(-2 [n/m] t^2 / (b-a)^2) for kernels with
/// values in [a, b] and independent observations.
double hoeffding_bound(double t, Eigen::Index n, int order, double a, double b);

/// min(1, c1_user exp(-(c2_user/2) (t/B)^{2/m})) for |f| <= B; the order-
/// dependent constants are caller-supplied.
double bounded_kernel_bound(double t, double sup_abs_kernel, int order, double c1_user,
                            double c2_user);

/// min(1, c1_user exp(-c2_user t^{2/m} / (sigma^2 + L t^{1/m} n^{-1/2}))).
double bernstein_bound(double t, double sigma, double big_l, Eigen::Index n, int order,
                       double c1_user, double c2_user);

/// min over supplied (N, E V^{2N}) of E V^{2N} / x^{2N}, clipped to 1.
double chebyshev_moment_bound(double x, std::span<const std::pair<int, double>> even_moments);

/// Integer moment order minimizing the even-moment bound: the continuous
/// optimum x^{2/m} / (tilde_c b_f m e) with floor/ceiling resolved by
/// evaluating both.
int optimal_moment_order(double x, const BoundParameters& params);

/// log (tilde_c C^2 m N)^{mN}, the mixed-moment bound |E S..S| <= ...
double lemma1_bound_log(int order, int moment_order, const BoundParameters& params);

/// log of (sum|f|)^{2N} (tilde_c C^2 m N)^{mN}, the even-moment majorant
/// E V_n^{2N} <= ...
double even_moment_bound_log(int order, int moment_order, const BoundParameters& params);

/// Chebyshev pipeline at the optimized integer N, clipped to 1. Within an
/// e^m rounding slack of theorem_bound for every x.
double optimized_chebyshev_bound(double x, const BoundParameters& params);

}  // namespace ustat

#endif
