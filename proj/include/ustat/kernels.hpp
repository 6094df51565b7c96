#ifndef USTAT_KERNELS_HPP
#define USTAT_KERNELS_HPP

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "ustat/basis.hpp"

namespace ustat {

/// Sparse order-m coefficient array {f_{i1..im}} keyed by index tuples with
/// every component >= 1 (the constant basis function never appears).
/// Entries iterate in sorted tuple order, so accumulations are deterministic.
class CoefficientTensor {
public:
    using EntryMap = std::map<std::vector<int>, double>;

    /// Zero-valued entries are dropped; indices < 1 are rejected.
    CoefficientTensor(int order, EntryMap entries);

    static CoefficientTensor zero(int order) { return CoefficientTensor(order, {}); }

    int order() const { return order_; }
    const EntryMap& entries() const { return entries_; }
    double abs_sum() const { return abs_sum_; }
    bool symmetric() const { return symmetric_; }
    /// Largest basis index used; 0 for the empty tensor.
    int max_index() const { return max_index_; }

    CoefficientTensor scaled(double factor) const;

private:
    int order_;
    EntryMap entries_;
    double abs_sum_ = 0.0;
    bool symmetric_ = false;
    int max_index_ = 0;
};

/// Finite-truncation series kernel
///   f(t_1..t_m) = sum f_{i1..im} e_{i1}(t_1) ... e_{im}(t_m),
/// canonical by construction since every factor is mean-zero.
class CanonicalKernel {
public:
    CanonicalKernel(OrthonormalBasis basis, CoefficientTensor coefficients);

    int order() const { return coefficients_.order(); }
    const OrthonormalBasis& basis() const { return basis_; }
    const CoefficientTensor& coefficients() const { return coefficients_; }

    double operator()(std::span<const double> point) const;

private:
    OrthonormalBasis basis_;
    CoefficientTensor coefficients_;
};

double evaluate_kernel(const CanonicalKernel& kernel, std::span<const double> point);

/// Black-box kernel of `order` arguments.
using RawKernel = std::function<double(std::span<const double>)>;

/// |integral of f over the marginal in argument `slot` (1-based), the other
/// arguments frozen at `fixed_point`|. Exact summation on finite alphabets,
/// quadrature otherwise. Zero (up to quadrature noise) iff the kernel is
/// degenerate in that slot at that point.
double check_canonicity(const RawKernel& kernel, int order, const OrthonormalBasis& basis,
                        int slot, std::span<const double> fixed_point,
                        int quadrature_nodes = 10000);
double check_canonicity(const CanonicalKernel& kernel, int slot,
                        std::span<const double> fixed_point, int quadrature_nodes = 10000);

/// B(f) = (C^m sum|f|)^(2/m) with C the basis sup bound; throws
/// HypothesisError when the sup bound is infinite (condition (A) fails).
double b_of_f(const CanonicalKernel& kernel);

struct HoeffdingComponent {
    std::vector<int> slots;  // 1-based argument slots this component acts on
    CanonicalKernel kernel;  // order == slots.size()
};

struct HoeffdingDecomposition {
    double constant_term = 0.0;
    std::vector<HoeffdingComponent> components;  // empty tensors omitted

    /// Constant plus every component evaluated at its slots of `point`.
    double evaluate(std::span<const double> point) const;
};

struct DecomposeOptions {
    int quadrature_nodes = 128;     // per-dimension Gauss nodes (continuous spaces)
    double drop_tolerance = 1e-10;  // coefficients below this are discarded
    double magnitude_limit = 1e12;  // grid values beyond this fail the integrability check
};

/// Project a raw kernel of order m <= 3 onto the tensor basis up to
/// `truncation` and group coefficients by their set of nonconstant slots.
/// Every returned component is canonical; the sum of constant and components
/// is the L2 projection onto the truncated tensor space.
HoeffdingDecomposition hoeffding_decompose(const RawKernel& kernel, const OrthonormalBasis& basis,
                                           int truncation, int order,
                                           const DecomposeOptions& options = {});

}  // namespace ustat

#endif
