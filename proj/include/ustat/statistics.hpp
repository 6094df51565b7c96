#ifndef USTAT_STATISTICS_HPP
#define USTAT_STATISTICS_HPP

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "ustat/kernels.hpp"

namespace ustat {

enum class StatKind { VStat, UStat, HoeffdingU };
enum class StatMethod { Naive, Factorized };

struct StatisticResult {
    StatKind kind;
    double value;
    Eigen::Index n;
    StatMethod method;
};

/// S_n(i) = n^{-1/2} sum_j e_i(X_j), keyed by basis index.
struct PartialSums {
    std::map<int, double> values;
    Eigen::Index n = 0;
};

PartialSums compute_partial_sums(const OrthonormalBasis& basis,
                                 const Eigen::Ref<const Eigen::VectorXd>& path,
                                 const std::vector<int>& indices);

/// Default naive-evaluation budget: kernel evaluations per statistic.
inline constexpr double kDefaultEvalBudget = 1e8;

/// V-statistic by the full m-fold sum over all index tuples (diagonals
/// included), scale n^{-m/2}. Lexicographic tuple order, compensated
/// accumulation. Throws BudgetError when n^m exceeds `budget`.
StatisticResult v_stat_naive(const CanonicalKernel& kernel,
                             const Eigen::Ref<const Eigen::VectorXd>& path,
                             double budget = kDefaultEvalBudget);

/// V-statistic through the partial-sum factorization
///   V_n = sum f_{i1..im} S_n(i1) ... S_n(im),
/// an algebraic identity with the naive sum. O(n K + entries) time.
StatisticResult v_stat_factorized(const CanonicalKernel& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& path);

/// U-statistic over pairwise-distinct tuples, scale n^{-m/2}; full
/// enumeration under the budget.
StatisticResult u_stat_naive(const CanonicalKernel& kernel,
                             const Eigen::Ref<const Eigen::VectorXd>& path,
                             double budget = kDefaultEvalBudget);

/// U-statistic for m <= 3 by subtracting diagonal-collision strata from the
/// factorized V; every stratum is itself a factorized O(n K) sum.
StatisticResult u_stat_factorized(const CanonicalKernel& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& path);

/// Dispatch: factorized route for m <= 3, naive otherwise.
StatisticResult u_stat(const CanonicalKernel& kernel,
                       const Eigen::Ref<const Eigen::VectorXd>& path,
                       double budget = kDefaultEvalBudget);

using SymmetricKernelFn = std::function<double(std::span<const double>)>;

/// Nondegenerate-normalization U: distinct-tuple sum scaled by (n-m)!/n!.
StatisticResult hoeffding_u(const SymmetricKernelFn& kernel, int order,
                            const Eigen::Ref<const Eigen::VectorXd>& path,
                            double budget = kDefaultEvalBudget);

}  // namespace ustat

#endif
