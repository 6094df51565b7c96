#ifndef USTAT_BASIS_HPP
#define USTAT_BASIS_HPP

#include <Eigen/Dense>

#include "ustat/quadrature.hpp"

namespace ustat {

enum class SpaceKind { UnitInterval, RealLine, FiniteAlphabet };

struct SampleSpace {
    SpaceKind kind = SpaceKind::UnitInterval;
    int alphabet_size = 0;  // meaningful for FiniteAlphabet only, >= 2

    static SampleSpace unit_interval() { return {SpaceKind::UnitInterval, 0}; }
    static SampleSpace real_line() { return {SpaceKind::RealLine, 0}; }
    static SampleSpace finite_alphabet(int size);

    bool operator==(const SampleSpace&) const = default;
};

enum class BasisFamily { Cosine, Hermite, FiniteIndicatorGS, CustomTabulated };

enum class MarginalKind { Uniform01, StandardNormal, FiniteVector };

/// Orthonormal family {e_0, e_1, ..., e_max_index} on a sample space, with
/// e_0 == 1 and every e_i (i >= 1) mean-zero under the marginal. Immutable
/// after construction; concurrent reads are safe.
class OrthonormalBasis {
public:
    double evaluate(int index, double t) const;

    /// e_index applied elementwise to a path.
    Eigen::VectorXd evaluate_path(int index, const Eigen::Ref<const Eigen::VectorXd>& path) const;

    const SampleSpace& space() const { return space_; }
    BasisFamily family() const { return family_; }
    MarginalKind marginal_kind() const { return marginal_kind_; }
    /// Probability vector of the marginal; empty unless FiniteVector.
    const Eigen::VectorXd& marginal_probabilities() const { return probabilities_; }
    int max_index() const { return max_index_; }
    /// sup_{i <= max_index, t} |e_i(t)|; +inf when condition (A) fails.
    double sup_bound() const { return sup_bound_; }
    bool sup_bound_finite() const;
    /// Every shipped family is continuous on its space (finite alphabets
    /// carry the discrete topology).
    bool continuous() const { return true; }

    /// Quadrature against the marginal: composite Simpson for UnitInterval,
    /// Gauss-Hermite for RealLine, exact atoms for finite alphabets (where
    /// `nodes` is ignored).
    QuadratureRule marginal_quadrature(int nodes) const;

    friend OrthonormalBasis make_cosine_basis(int);
    friend OrthonormalBasis make_hermite_basis(int);
    friend OrthonormalBasis gram_schmidt_finite(const Eigen::Ref<const Eigen::VectorXd>&);
    friend OrthonormalBasis make_tabulated_basis(const Eigen::Ref<const Eigen::VectorXd>&,
                                                 const Eigen::Ref<const Eigen::MatrixXd>&);

private:
    OrthonormalBasis() = default;

    SampleSpace space_;
    BasisFamily family_ = BasisFamily::Cosine;
    MarginalKind marginal_kind_ = MarginalKind::Uniform01;
    Eigen::VectorXd probabilities_;  // finite alphabets
    Eigen::MatrixXd table_;          // (max_index+1) x s, finite families
    int max_index_ = 0;
    double sup_bound_ = 0.0;
};

/// Uniform[0,1] basis: e_0 = 1, e_i(t) = sqrt(2) cos(i pi t); sup bound sqrt(2).
OrthonormalBasis make_cosine_basis(int max_index);

/// Standard-normal basis of normalized probabilists' Hermite polynomials;
/// the sup bound is infinite, so this family cannot feed the tail bounds.
OrthonormalBasis make_hermite_basis(int max_index);

/// Gram-Schmidt on the indicator functions of a finite alphabet, seeded with
/// e_0 == 1 and processed in point order 0,1,...,s-2. Sign convention: the
/// first nonzero value of each e_i is positive. Deterministic.
OrthonormalBasis gram_schmidt_finite(const Eigen::Ref<const Eigen::VectorXd>& probabilities);

/// Caller-supplied table on a finite alphabet; row i holds the values of e_i.
/// Row 0 must be identically 1 and the rows orthonormal under `probabilities`.
OrthonormalBasis make_tabulated_basis(const Eigen::Ref<const Eigen::VectorXd>& probabilities,
                                      const Eigen::Ref<const Eigen::MatrixXd>& values);

/// Gram matrix <e_i, e_j> for i,j <= max_index under the basis marginal,
/// by quadrature (continuous spaces) or exact summation (finite alphabets).
Eigen::MatrixXd gram_matrix(const OrthonormalBasis& basis, int quadrature_nodes = 10000);

}  // namespace ustat

#endif
