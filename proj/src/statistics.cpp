#include "ustat/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "ustat/accum.hpp"
#include "ustat/errors.hpp"

namespace ustat {

namespace {

std::vector<int> distinct_indices(const CoefficientTensor& tensor) {
    std::set<int> seen;
    for (const auto& [indices, value] : tensor.entries()) {
        seen.insert(indices.begin(), indices.end());
    }
    return {seen.begin(), seen.end()};
}

void check_tuple_budget(Eigen::Index n, int order, double budget, const char* hint) {
    if (std::pow(static_cast<double>(n), order) > budget) {
        throw BudgetError(std::string("evaluation budget exceeded (n^m > budget); ") + hint);
    }
}

// Basis rows cached over the path: row k holds e_{index}(X_j) for the k-th
// distinct index. Kept when the table is small; otherwise callers stream.
struct BasisCache {
    std::vector<int> indices;
    Eigen::MatrixXd rows;  // indices.size() x n
    std::map<int, int> row_of;

    BasisCache(const CanonicalKernel& kernel, const Eigen::Ref<const Eigen::VectorXd>& path)
        : indices(distinct_indices(kernel.coefficients())) {
        rows.resize(static_cast<Eigen::Index>(indices.size()), path.size());
        for (std::size_t k = 0; k < indices.size(); ++k) {
            rows.row(static_cast<Eigen::Index>(k)) =
                kernel.basis().evaluate_path(indices[k], path).transpose();
            row_of[indices[k]] = static_cast<int>(k);
        }
    }

    double kernel_at(const CanonicalKernel& kernel, std::span<const Eigen::Index> tuple) const {
        KahanAccumulator sum;
        for (const auto& [idx, value] : kernel.coefficients().entries()) {
            double term = value;
            for (std::size_t k = 0; k < tuple.size(); ++k) {
                term *= rows(row_of.at(idx[k]), tuple[k]);
            }
            sum.add(term);
        }
        return sum.value();
    }
};

// Full m-fold tuple enumeration in lexicographic order; `skip_collisions`
// restricts to pairwise-distinct tuples. Basis values are cached when the
// table fits; very long m=1 paths fall back to streaming evaluation.
double enumerate_tuples(const CanonicalKernel& kernel,
                        const Eigen::Ref<const Eigen::VectorXd>& path, bool skip_collisions) {
    const int m = kernel.order();
    const Eigen::Index n = path.size();
    const auto table_entries =
        static_cast<long long>(distinct_indices(kernel.coefficients()).size()) * n;
    std::optional<BasisCache> cache;
    if (table_entries <= 20'000'000LL) cache.emplace(kernel, path);

    std::vector<Eigen::Index> tuple(m, 0);
    std::vector<double> point(m);
    KahanAccumulator sum;
    while (true) {
        bool collision = false;
        if (skip_collisions) {
            for (int a = 0; a < m && !collision; ++a) {
                for (int b = a + 1; b < m; ++b) {
                    if (tuple[a] == tuple[b]) {
                        collision = true;
                        break;
                    }
                }
            }
        }
        if (!collision) {
            if (cache) {
                sum.add(cache->kernel_at(kernel, tuple));
            } else {
                for (int k = 0; k < m; ++k) point[k] = path(tuple[k]);
                sum.add(kernel(point));
            }
        }
        int k = m - 1;
        for (; k >= 0; --k) {
            if (++tuple[k] < n) break;
            tuple[k] = 0;
        }
        if (k < 0) break;
    }
    return sum.value();
}

double scale_n_pow(Eigen::Index n, int m) {
    return std::pow(static_cast<double>(n), -0.5 * m);
}

}  // namespace

PartialSums compute_partial_sums(const OrthonormalBasis& basis,
                                 const Eigen::Ref<const Eigen::VectorXd>& path,
                                 const std::vector<int>& indices) {
    PartialSums sums;
    sums.n = path.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(path.size()));
    for (int index : indices) {
        KahanAccumulator acc;
        for (Eigen::Index j = 0; j < path.size(); ++j) {
            acc.add(basis.evaluate(index, path(j)));
        }
        sums.values[index] = scale * acc.value();
    }
    return sums;
}

StatisticResult v_stat_naive(const CanonicalKernel& kernel,
                             const Eigen::Ref<const Eigen::VectorXd>& path, double budget) {
    const Eigen::Index n = path.size();
    if (n < 1) throw std::invalid_argument("v_stat_naive: empty path");
    check_tuple_budget(n, kernel.order(), budget, "use v_stat_factorized");
    const double total = enumerate_tuples(kernel, path, /*skip_collisions=*/false);
    return {StatKind::VStat, scale_n_pow(n, kernel.order()) * total, n, StatMethod::Naive};
}

StatisticResult v_stat_factorized(const CanonicalKernel& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& path) {
    const Eigen::Index n = path.size();
    if (n < 1) throw std::invalid_argument("v_stat_factorized: empty path");
    const PartialSums sums =
        compute_partial_sums(kernel.basis(), path, distinct_indices(kernel.coefficients()));
    KahanAccumulator value;
    for (const auto& [indices, coefficient] : kernel.coefficients().entries()) {
        double term = coefficient;
        for (int idx : indices) term *= sums.values.at(idx);
        value.add(term);
    }
    return {StatKind::VStat, value.value(), n, StatMethod::Factorized};
}

StatisticResult u_stat_naive(const CanonicalKernel& kernel,
                             const Eigen::Ref<const Eigen::VectorXd>& path, double budget) {
    const Eigen::Index n = path.size();
    const int m = kernel.order();
    if (n < m) throw std::invalid_argument("u_stat_naive: n >= m required");
    check_tuple_budget(n, m, budget, "use u_stat_factorized (m <= 3)");
    const double total = enumerate_tuples(kernel, path, /*skip_collisions=*/true);
    return {StatKind::UStat, scale_n_pow(n, m) * total, n, StatMethod::Naive};
}

StatisticResult u_stat_factorized(const CanonicalKernel& kernel,
                                  const Eigen::Ref<const Eigen::VectorXd>& path) {
    const Eigen::Index n = path.size();
    const int m = kernel.order();
    if (n < m) throw std::invalid_argument("u_stat_factorized: n >= m required");
    if (m > 3) {
        throw std::invalid_argument("u_stat_factorized: inclusion-exclusion path covers m <= 3");
    }

    const BasisCache cache(kernel, path);
    // Pointwise power sums over the path: P(i) = sum_j e_i(X_j),
    // D(i,i') = sum_j e_i(X_j) e_{i'}(X_j), T likewise with three factors.
    auto pow_sum = [&](std::initializer_list<int> idxs) {
        KahanAccumulator acc;
        for (Eigen::Index j = 0; j < n; ++j) {
            double prod = 1.0;
            for (int i : idxs) prod *= cache.rows(cache.row_of.at(i), j);
            acc.add(prod);
        }
        return acc.value();
    };

    KahanAccumulator distinct_sum;
    for (const auto& [idx, f] : kernel.coefficients().entries()) {
        double stratum = 0.0;
        if (m == 1) {
            stratum = pow_sum({idx[0]});
        } else if (m == 2) {
            stratum = pow_sum({idx[0]}) * pow_sum({idx[1]}) - pow_sum({idx[0], idx[1]});
        } else {
            const double p1 = pow_sum({idx[0]});
            const double p2 = pow_sum({idx[1]});
            const double p3 = pow_sum({idx[2]});
            const double d12 = pow_sum({idx[0], idx[1]});
            const double d13 = pow_sum({idx[0], idx[2]});
            const double d23 = pow_sum({idx[1], idx[2]});
            const double triple = pow_sum({idx[0], idx[1], idx[2]});
            // All tuples, minus the three single-collision strata, plus twice
            // the all-equal stratum (inclusion-exclusion over partitions).
            stratum = p1 * p2 * p3 - d12 * p3 - d13 * p2 - d23 * p1 + 2.0 * triple;
        }
        distinct_sum.add(f * stratum);
    }
    return {StatKind::UStat, scale_n_pow(n, m) * distinct_sum.value(), n, StatMethod::Factorized};
}

StatisticResult u_stat(const CanonicalKernel& kernel,
                       const Eigen::Ref<const Eigen::VectorXd>& path, double budget) {
    if (kernel.order() <= 3) return u_stat_factorized(kernel, path);
    return u_stat_naive(kernel, path, budget);
}

StatisticResult hoeffding_u(const SymmetricKernelFn& kernel, int order,
                            const Eigen::Ref<const Eigen::VectorXd>& path, double budget) {
    const Eigen::Index n = path.size();
    if (order < 1) throw std::invalid_argument("hoeffding_u: order >= 1 required");
    if (n < order) throw std::invalid_argument("hoeffding_u: n >= m required");
    check_tuple_budget(n, order, budget, "reduce n or m");

    std::vector<Eigen::Index> tuple(order, 0);
    std::vector<double> point(order);
    KahanAccumulator sum;
    while (true) {
        bool collision = false;
        for (int a = 0; a < order && !collision; ++a) {
            for (int b = a + 1; b < order; ++b) {
                if (tuple[a] == tuple[b]) {
                    collision = true;
                    break;
                }
            }
        }
        if (!collision) {
            for (int k = 0; k < order; ++k) point[k] = path(tuple[k]);
            sum.add(kernel(point));
        }
        int k = order - 1;
        for (; k >= 0; --k) {
            if (++tuple[k] < n) break;
            tuple[k] = 0;
        }
        if (k < 0) break;
    }
    double falling = 1.0;  // n! / (n-m)!
    for (int k = 0; k < order; ++k) falling *= static_cast<double>(n - k);
    return {StatKind::HoeffdingU, sum.value() / falling, n, StatMethod::Naive};
}

}  // namespace ustat
