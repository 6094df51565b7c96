#include "ustat/basis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ustat {

SampleSpace SampleSpace::finite_alphabet(int size) {
    if (size < 2) throw std::invalid_argument("finite alphabet needs size >= 2");
    return {SpaceKind::FiniteAlphabet, size};
}

bool OrthonormalBasis::sup_bound_finite() const { return std::isfinite(sup_bound_); }

double OrthonormalBasis::evaluate(int index, double t) const {
    if (index < 0 || index > max_index_) {
        throw std::out_of_range("basis index out of range");
    }
    switch (family_) {
        case BasisFamily::Cosine:
            return index == 0 ? 1.0 : M_SQRT2 * std::cos(index * M_PI * t);
        case BasisFamily::Hermite: {
            // Normalized recurrence: h_{k+1} = (t h_k - sqrt(k) h_{k-1}) / sqrt(k+1).
            if (index == 0) return 1.0;
            double prev = 1.0;
            double cur = t;
            for (int k = 1; k < index; ++k) {
                const double next =
                    (t * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
                prev = cur;
                cur = next;
            }
            return cur;
        }
        case BasisFamily::FiniteIndicatorGS:
        case BasisFamily::CustomTabulated: {
            const auto point = static_cast<Eigen::Index>(std::llround(t));
            if (point < 0 || point >= table_.cols()) {
                throw std::out_of_range("alphabet point out of range");
            }
            return table_(index, point);
        }
    }
    return 0.0;
}

Eigen::VectorXd OrthonormalBasis::evaluate_path(int index,
                                                const Eigen::Ref<const Eigen::VectorXd>& path) const {
    Eigen::VectorXd out(path.size());
    for (Eigen::Index j = 0; j < path.size(); ++j) out(j) = evaluate(index, path(j));
    return out;
}

QuadratureRule OrthonormalBasis::marginal_quadrature(int nodes) const {
    switch (space_.kind) {
        case SpaceKind::UnitInterval:
            return simpson_rule(nodes);
        case SpaceKind::RealLine:
            return gauss_hermite(std::min(nodes, 200));
        case SpaceKind::FiniteAlphabet: {
            QuadratureRule rule;
            const int s = space_.alphabet_size;
            rule.nodes = Eigen::VectorXd::LinSpaced(s, 0.0, s - 1.0);
            rule.weights = probabilities_;
            return rule;
        }
    }
    throw std::logic_error("unreachable");
}

OrthonormalBasis make_cosine_basis(int max_index) {
    if (max_index < 1) throw std::invalid_argument("make_cosine_basis: max_index >= 1 required");
    OrthonormalBasis basis;
    basis.space_ = SampleSpace::unit_interval();
    basis.family_ = BasisFamily::Cosine;
    basis.marginal_kind_ = MarginalKind::Uniform01;
    basis.max_index_ = max_index;
    basis.sup_bound_ = M_SQRT2;
    return basis;
}

OrthonormalBasis make_hermite_basis(int max_index) {
    if (max_index < 1) throw std::invalid_argument("make_hermite_basis: max_index >= 1 required");
    OrthonormalBasis basis;
    basis.space_ = SampleSpace::real_line();
    basis.family_ = BasisFamily::Hermite;
    basis.marginal_kind_ = MarginalKind::StandardNormal;
    basis.max_index_ = max_index;
    basis.sup_bound_ = std::numeric_limits<double>::infinity();
    return basis;
}

namespace {

void validate_probabilities(const Eigen::Ref<const Eigen::VectorXd>& p) {
    if (p.size() < 2) throw std::invalid_argument("probability vector needs length >= 2");
    if (p.minCoeff() <= 0.0) {
        throw std::invalid_argument("probability vector has a nonpositive (zero-mass) entry");
    }
    if (std::abs(p.sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("probability vector does not sum to 1 within 1e-12");
    }
}

}  // namespace

OrthonormalBasis gram_schmidt_finite(const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
    validate_probabilities(probabilities);
    const int s = static_cast<int>(probabilities.size());

    // Weighted inner product <f,g> = sum_x p(x) f(x) g(x).
    auto dot = [&](const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
        return (probabilities.array() * f.array() * g.array()).sum();
    };

    Eigen::MatrixXd table(s, s);
    table.row(0).setOnes();
    for (int i = 1; i < s; ++i) {
        // Seed: indicator of point i-1, modified Gram-Schmidt against rows < i.
        Eigen::VectorXd v = Eigen::VectorXd::Zero(s);
        v(i - 1) = 1.0;
        for (int j = 0; j < i; ++j) {
            const Eigen::VectorXd prev = table.row(j).transpose();
            v -= dot(v, prev) * prev;
        }
        const double norm = std::sqrt(dot(v, v));
        if (!(norm > 1e-14)) {
            throw std::invalid_argument("gram_schmidt_finite: degenerate indicator system");
        }
        v /= norm;
        for (int x = 0; x < s; ++x) {
            if (std::abs(v(x)) > 1e-12) {
                if (v(x) < 0.0) v = -v;
                break;
            }
        }
        table.row(i) = v.transpose();
    }

    OrthonormalBasis basis;
    basis.space_ = SampleSpace::finite_alphabet(s);
    basis.family_ = BasisFamily::FiniteIndicatorGS;
    basis.marginal_kind_ = MarginalKind::FiniteVector;
    basis.probabilities_ = probabilities;
    basis.table_ = table;
    basis.max_index_ = s - 1;
    basis.sup_bound_ = table.cwiseAbs().maxCoeff();
    return basis;
}

OrthonormalBasis make_tabulated_basis(const Eigen::Ref<const Eigen::VectorXd>& probabilities,
                                      const Eigen::Ref<const Eigen::MatrixXd>& values) {
    validate_probabilities(probabilities);
    const int s = static_cast<int>(probabilities.size());
    if (values.cols() != s || values.rows() < 2) {
        throw std::invalid_argument("make_tabulated_basis: values must be (max_index+1) x s");
    }
    if ((values.row(0).array() - 1.0).abs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("make_tabulated_basis: row 0 must be identically 1");
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double g = (probabilities.array() * values.row(i).transpose().array() *
                              values.row(j).transpose().array())
                                 .sum();
            const double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(g - expected) > 1e-8) {
                throw std::invalid_argument("make_tabulated_basis: rows not orthonormal");
            }
        }
    }

    OrthonormalBasis basis;
    basis.space_ = SampleSpace::finite_alphabet(s);
    basis.family_ = BasisFamily::CustomTabulated;
    basis.marginal_kind_ = MarginalKind::FiniteVector;
    basis.probabilities_ = probabilities;
    basis.table_ = values;
    basis.max_index_ = static_cast<int>(values.rows()) - 1;
    basis.sup_bound_ = values.cwiseAbs().maxCoeff();
    return basis;
}

Eigen::MatrixXd gram_matrix(const OrthonormalBasis& basis, int quadrature_nodes) {
    const QuadratureRule rule = basis.marginal_quadrature(quadrature_nodes);
    const int k = basis.max_index() + 1;
    Eigen::MatrixXd evals(k, rule.nodes.size());
    for (int i = 0; i < k; ++i) {
        evals.row(i) = basis.evaluate_path(i, rule.nodes).transpose();
    }
    return evals * rule.weights.asDiagonal() * evals.transpose();
}

}  // namespace ustat
