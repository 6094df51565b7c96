#include "ustat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ustat/accum.hpp"
#include "ustat/errors.hpp"

namespace ustat {

namespace {

bool is_permutation_invariant(const CoefficientTensor::EntryMap& entries, int order) {
    if (order == 1) return true;
    for (const auto& [indices, value] : entries) {
        std::vector<int> perm = indices;
        std::sort(perm.begin(), perm.end());
        do {
            const auto it = entries.find(perm);
            if (it == entries.end() || it->second != value) return false;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return true;
}

}  // namespace

CoefficientTensor::CoefficientTensor(int order, EntryMap entries) : order_(order) {
    if (order < 1) throw std::invalid_argument("CoefficientTensor: order >= 1 required");
    for (auto it = entries.begin(); it != entries.end();) {
        if (static_cast<int>(it->first.size()) != order) {
            throw std::invalid_argument("CoefficientTensor: tuple length must equal order");
        }
        for (int idx : it->first) {
            if (idx < 1) {
                throw std::invalid_argument(
                    "CoefficientTensor: basis indices start at 1 (e_0 never appears)");
            }
        }
        if (it->second == 0.0) {
            it = entries.erase(it);
        } else {
            ++it;
        }
    }
    entries_ = std::move(entries);
    KahanAccumulator abs_sum;
    for (const auto& [indices, value] : entries_) {
        abs_sum.add(std::abs(value));
        max_index_ = std::max(max_index_, *std::max_element(indices.begin(), indices.end()));
    }
    abs_sum_ = abs_sum.value();
    symmetric_ = is_permutation_invariant(entries_, order_);
}

CoefficientTensor CoefficientTensor::scaled(double factor) const {
    EntryMap scaled_entries;
    for (const auto& [indices, value] : entries_) scaled_entries[indices] = factor * value;
    return CoefficientTensor(order_, std::move(scaled_entries));
}

CanonicalKernel::CanonicalKernel(OrthonormalBasis basis, CoefficientTensor coefficients)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)) {
    if (coefficients_.max_index() > basis_.max_index()) {
        throw std::invalid_argument("CanonicalKernel: coefficient index exceeds basis max_index");
    }
}

double CanonicalKernel::operator()(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != order()) {
        throw std::invalid_argument("CanonicalKernel: point arity mismatch");
    }
    KahanAccumulator sum;
    for (const auto& [indices, value] : coefficients_.entries()) {
        double term = value;
        for (int k = 0; k < order(); ++k) term *= basis_.evaluate(indices[k], point[k]);
        sum.add(term);
    }
    return sum.value();
}

double evaluate_kernel(const CanonicalKernel& kernel, std::span<const double> point) {
    return kernel(point);
}

double check_canonicity(const RawKernel& kernel, int order, const OrthonormalBasis& basis,
                        int slot, std::span<const double> fixed_point, int quadrature_nodes) {
    if (slot < 1 || slot > order) throw std::invalid_argument("check_canonicity: slot in 1..m");
    if (static_cast<int>(fixed_point.size()) != order - 1) {
        throw std::invalid_argument("check_canonicity: fixed_point needs m-1 components");
    }
    const QuadratureRule rule = basis.marginal_quadrature(quadrature_nodes);
    std::vector<double> point(order);
    int pos = 0;
    for (int k = 0; k < order; ++k) {
        if (k != slot - 1) point[k] = fixed_point[pos++];
    }
    KahanAccumulator integral;
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
        point[slot - 1] = rule.nodes(q);
        integral.add(rule.weights(q) * kernel(point));
    }
    return std::abs(integral.value());
}

double check_canonicity(const CanonicalKernel& kernel, int slot,
                        std::span<const double> fixed_point, int quadrature_nodes) {
    RawKernel fn = [&kernel](std::span<const double> point) { return kernel(point); };
    return check_canonicity(fn, kernel.order(), kernel.basis(), slot, fixed_point,
                            quadrature_nodes);
}

double b_of_f(const CanonicalKernel& kernel) {
    const double c = kernel.basis().sup_bound();
    if (!std::isfinite(c)) {
        throw HypothesisError("condition (A) violated: basis sup bound is infinite");
    }
    const double m = kernel.order();
    const double abs_sum = kernel.coefficients().abs_sum();
    if (abs_sum == 0.0) return 0.0;
    return std::pow(std::pow(c, m) * abs_sum, 2.0 / m);
}

double HoeffdingDecomposition::evaluate(std::span<const double> point) const {
    KahanAccumulator sum;
    sum.add(constant_term);
    for (const auto& component : components) {
        std::vector<double> sub(component.slots.size());
        for (std::size_t k = 0; k < component.slots.size(); ++k) {
            sub[k] = point[component.slots[k] - 1];
        }
        sum.add(component.kernel(sub));
    }
    return sum.value();
}

HoeffdingDecomposition hoeffding_decompose(const RawKernel& kernel, const OrthonormalBasis& basis,
                                           int truncation, int order,
                                           const DecomposeOptions& options) {
    if (order < 1 || order > 3) {
        throw std::invalid_argument("hoeffding_decompose: order must be 1, 2, or 3");
    }
    if (truncation < 1 || truncation > basis.max_index()) {
        throw std::invalid_argument(
            "hoeffding_decompose: truncation must be in 1..basis.max_index");
    }

    // Gaussian rules here, not the marginal Simpson grid: the projection
    // integrals carry products of basis oscillations that composite rules at
    // this node count cannot resolve.
    QuadratureRule rule;
    switch (basis.space().kind) {
        case SpaceKind::UnitInterval:
            rule = gauss_legendre_01(options.quadrature_nodes);
            break;
        case SpaceKind::RealLine:
            rule = gauss_hermite(options.quadrature_nodes);
            break;
        case SpaceKind::FiniteAlphabet:
            rule = basis.marginal_quadrature(0);
            break;
    }
    const int grid = static_cast<int>(rule.nodes.size());
    const int range = truncation + 1;

    // Weighted basis table: row i holds w_q * e_i(x_q).
    Eigen::MatrixXd weighted(range, grid);
    for (int i = 0; i < range; ++i) {
        weighted.row(i) =
            (basis.evaluate_path(i, rule.nodes).array() * rule.weights.array()).transpose();
    }

    // Kernel values on the tensor grid; out-of-range magnitudes mean the
    // projection integrals are untrustworthy.
    long long cells = 1;
    for (int k = 0; k < order; ++k) cells *= grid;
    if (cells > 200'000'000LL) {
        throw BudgetError("hoeffding_decompose: tensor grid exceeds the evaluation budget");
    }
    std::vector<double> values(static_cast<std::size_t>(cells));
    std::vector<double> point(order);
    std::vector<int> odometer(order, 0);
    for (long long c = 0; c < cells; ++c) {
        for (int k = 0; k < order; ++k) point[k] = rule.nodes(odometer[k]);
        const double v = kernel(point);
        if (!std::isfinite(v) || std::abs(v) > options.magnitude_limit) {
            throw std::domain_error(
                "hoeffding_decompose: kernel magnitude exceeds the integrability limit");
        }
        values[static_cast<std::size_t>(c)] = v;
        for (int k = order - 1; k >= 0; --k) {
            if (++odometer[k] < grid) break;
            odometer[k] = 0;
        }
    }

    // Contract one axis at a time: coefficients c_{i1..im} = <kernel, tensor e>.
    std::vector<double> work = std::move(values);
    long long lead = 1;          // product of already-transformed extents
    long long trail = cells;     // product of untransformed extents
    for (int axis = 0; axis < order; ++axis) {
        trail /= grid;
        std::vector<double> next(static_cast<std::size_t>(lead * range * trail), 0.0);
        for (long long a = 0; a < lead; ++a) {
            for (int i = 0; i < range; ++i) {
                for (long long b = 0; b < trail; ++b) {
                    double acc = 0.0;
                    const double* src = work.data() + (a * grid) * trail + b;
                    for (int q = 0; q < grid; ++q) acc += weighted(i, q) * src[q * trail];
                    next[static_cast<std::size_t>((a * range + i) * trail + b)] = acc;
                }
            }
        }
        work = std::move(next);
        lead *= range;
    }

    // Group coefficients by the set of slots carrying a nonconstant index.
    HoeffdingDecomposition result;
    std::map<std::vector<int>, CoefficientTensor::EntryMap> by_slots;
    std::vector<int> multi(order, 0);
    const long long total = lead;
    for (long long c = 0; c < total; ++c) {
        long long rest = c;
        for (int k = order - 1; k >= 0; --k) {
            multi[k] = static_cast<int>(rest % range);
            rest /= range;
        }
        const double coefficient = work[static_cast<std::size_t>(c)];
        if (std::abs(coefficient) < options.drop_tolerance) continue;
        std::vector<int> slots;
        std::vector<int> indices;
        for (int k = 0; k < order; ++k) {
            if (multi[k] >= 1) {
                slots.push_back(k + 1);
                indices.push_back(multi[k]);
            }
        }
        if (slots.empty()) {
            result.constant_term = coefficient;
        } else {
            by_slots[slots][indices] = coefficient;
        }
    }
    for (auto& [slots, entries] : by_slots) {
        CoefficientTensor tensor(static_cast<int>(slots.size()), std::move(entries));
        result.components.push_back({slots, CanonicalKernel(basis, std::move(tensor))});
    }
    std::sort(result.components.begin(), result.components.end(),
              [](const HoeffdingComponent& a, const HoeffdingComponent& b) {
                  if (a.slots.size() != b.slots.size()) return a.slots.size() < b.slots.size();
                  return a.slots < b.slots;
              });
    return result;
}

}  // namespace ustat
