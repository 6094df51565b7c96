#include "ustat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ustat/errors.hpp"

namespace ustat {

namespace {

constexpr double kE = 2.718281828459045;

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
}

}  // namespace

double compute_c2(double c0, double c1) {
    if (!(c0 >= 1.0)) throw std::invalid_argument("compute_c2: c0 >= 1 required");
    require_positive(c1, "compute_c2: c1");
    const double geometric = c0 * std::exp(-c1) / (1.0 - std::exp(-c1));
    const double term2 = 16.0 * std::pow(geometric, 4.0);
    const double term3 = std::pow(4.0 * c0 * std::exp(c1) / c1, 2.0);
    return std::max({16.0, term2, term3});
}

BoundParameters make_bound_parameters(double c0, double c1, double sup_bound, int order,
                                      double abs_sum) {
    if (order < 1) throw std::invalid_argument("make_bound_parameters: order >= 1 required");
    if (!(abs_sum >= 0.0)) throw std::invalid_argument("make_bound_parameters: abs_sum >= 0");
    if (!std::isfinite(sup_bound) || sup_bound <= 0.0) {
        throw HypothesisError("condition (A) violated: basis sup bound must be finite positive");
    }
    BoundParameters params;
    params.c0 = c0;
    params.c1 = c1;
    params.sup_bound = sup_bound;
    params.order = order;
    params.abs_sum = abs_sum;
    params.c2 = compute_c2(c0, c1);
    params.tilde_c = 8.0 * params.c2;
    params.b_f =
        abs_sum == 0.0 ? 0.0 : std::pow(std::pow(sup_bound, order) * abs_sum, 2.0 / order);
    params.c_one = 1.0 / (params.tilde_c * kE);
    return params;
}

BoundParameters bound_parameters_for(const CanonicalKernel& kernel,
                                     const MixingEnvelope& envelope) {
    if (!kernel.basis().sup_bound_finite()) {
        throw HypothesisError(
            "condition (A) violated: Hermite-type bases have an infinite sup bound");
    }
    return make_bound_parameters(envelope.c0, envelope.c1, kernel.basis().sup_bound(),
                                 kernel.order(), kernel.coefficients().abs_sum());
}

double theorem_bound_log(double x, const BoundParameters& params) {
    require_positive(x, "theorem_bound: x");
    if (params.b_f == 0.0) return -std::numeric_limits<double>::infinity();
    return -params.c_one * std::pow(x, 2.0 / params.order) / params.b_f;
}

double theorem_bound(double x, const BoundParameters& params) {
    return std::exp(std::min(0.0, theorem_bound_log(x, params)));
}

double hoeffding_bound(double t, Eigen::Index n, int order, double a, double b) {
    require_positive(t, "hoeffding_bound: t");
    if (order < 1 || n < order) throw std::invalid_argument("hoeffding_bound: need n >= m >= 1");
    if (!(b > a)) throw std::invalid_argument("hoeffding_bound: kernel range needs b > a");
    const double blocks = static_cast<double>(n / order);  // [n/m]
    const double width = b - a;
    return std::exp(-2.0 * blocks * t * t / (width * width));
}

double bounded_kernel_bound(double t, double sup_abs_kernel, int order, double c1_user,
                            double c2_user) {
    require_positive(t, "bounded_kernel_bound: t");
    require_positive(sup_abs_kernel, "bounded_kernel_bound: B");
    require_positive(c1_user, "bounded_kernel_bound: c1");
    require_positive(c2_user, "bounded_kernel_bound: c2");
    if (order < 1) throw std::invalid_argument("bounded_kernel_bound: order >= 1 required");
    const double log_bound =
        std::log(c1_user) - 0.5 * c2_user * std::pow(t / sup_abs_kernel, 2.0 / order);
    return std::exp(std::min(0.0, log_bound));
}

double bernstein_bound(double t, double sigma, double big_l, Eigen::Index n, int order,
                       double c1_user, double c2_user) {
    require_positive(t, "bernstein_bound: t");
    require_positive(sigma, "bernstein_bound: sigma");
    require_positive(big_l, "bernstein_bound: L");
    require_positive(c1_user, "bernstein_bound: c1");
    require_positive(c2_user, "bernstein_bound: c2");
    if (order < 1 || n < 1) throw std::invalid_argument("bernstein_bound: need n, m >= 1");
    const double denom = sigma * sigma + big_l * std::pow(t, 1.0 / order) /
                                             std::sqrt(static_cast<double>(n));
    const double log_bound = std::log(c1_user) - c2_user * std::pow(t, 2.0 / order) / denom;
    return std::exp(std::min(0.0, log_bound));
}

double chebyshev_moment_bound(double x, std::span<const std::pair<int, double>> even_moments) {
    require_positive(x, "chebyshev_moment_bound: x");
    if (even_moments.empty()) {
        throw std::invalid_argument("chebyshev_moment_bound: at least one moment required");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [moment_order, moment] : even_moments) {
        if (moment_order < 1) {
            throw std::invalid_argument("chebyshev_moment_bound: N >= 1 required");
        }
        if (!(moment >= 0.0)) {
            throw std::invalid_argument("chebyshev_moment_bound: moments must be nonnegative");
        }
        const double log_ratio =
            moment == 0.0 ? -std::numeric_limits<double>::infinity()
                          : std::log(moment) - 2.0 * moment_order * std::log(x);
        best = std::min(best, std::exp(std::min(0.0, log_ratio)));
    }
    return best;
}

double lemma1_bound_log(int order, int moment_order, const BoundParameters& params) {
    if (order < 1) throw std::invalid_argument("lemma1_bound: order >= 1 required");
    if (moment_order < 1) throw std::invalid_argument("lemma1_bound: N >= 1 required");
    const double mn = static_cast<double>(order) * moment_order;
    return mn * std::log(params.tilde_c * params.sup_bound * params.sup_bound * mn);
}

double even_moment_bound_log(int order, int moment_order, const BoundParameters& params) {
    if (params.abs_sum == 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * moment_order * std::log(params.abs_sum) +
           lemma1_bound_log(order, moment_order, params);
}

namespace {

// log of the Chebyshev bound at integer N: even-moment majorant over x^{2N}.
double chebyshev_log_at(double x, int moment_order, const BoundParameters& params) {
    return even_moment_bound_log(params.order, moment_order, params) -
           2.0 * moment_order * std::log(x);
}

}  // namespace

int optimal_moment_order(double x, const BoundParameters& params) {
    require_positive(x, "optimal_moment_order: x");
    if (params.b_f == 0.0) return 1;
    const double c4 = params.tilde_c * params.b_f;
    // Clamped before the integer cast; by that magnitude the bound has long
    // underflowed, so the cap is unobservable.
    const double continuous = std::min(
        std::pow(x, 2.0 / params.order) / (c4 * params.order * kE), 1.0e9);
    const int lo = std::max(1, static_cast<int>(std::floor(continuous)));
    const int hi = std::max(1, static_cast<int>(std::ceil(continuous)));
    if (lo == hi) return lo;
    return chebyshev_log_at(x, lo, params) <= chebyshev_log_at(x, hi, params) ? lo : hi;
}

double optimized_chebyshev_bound(double x, const BoundParameters& params) {
    require_positive(x, "optimized_chebyshev_bound: x");
    if (params.b_f == 0.0) return 0.0;
    const int best = optimal_moment_order(x, params);
    return std::exp(std::min(0.0, chebyshev_log_at(x, best, params)));
}

}  // namespace ustat
