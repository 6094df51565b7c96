#include <doctest.h>

#include <cmath>
#include <random>

#include "ustat/errors.hpp"
#include "ustat/kernels.hpp"
#include "ustat/quadrature.hpp"

using namespace ustat;

namespace {

CanonicalKernel series_kernel(const OrthonormalBasis& basis, int order,
                              CoefficientTensor::EntryMap entries) {
    return {basis, CoefficientTensor(order, std::move(entries))};
}

// Test-side inner product over [0,1]^2 with a Gauss-Legendre grid,
// independent of the decomposition's own quadrature path.
double inner_product_2d(const std::function<double(double, double)>& f,
                        const std::function<double(double, double)>& g) {
    const QuadratureRule rule = gauss_legendre_01(96);
    double sum = 0.0;
    for (Eigen::Index a = 0; a < rule.nodes.size(); ++a) {
        for (Eigen::Index b = 0; b < rule.nodes.size(); ++b) {
            const double x = rule.nodes(a);
            const double y = rule.nodes(b);
            sum += rule.weights(a) * rule.weights(b) * f(x, y) * g(x, y);
        }
    }
    return sum;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("coefficient tensor invariants") {
    CoefficientTensor tensor(2, {{{1, 1}, 0.5}, {{1, 2}, 0.25}, {{2, 2}, 0.0}});
    CHECK(tensor.entries().size() == 2);  // exact zero dropped
    CHECK(tensor.abs_sum() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(tensor.max_index() == 2);
    CHECK(!tensor.symmetric());

    CoefficientTensor symmetric(2, {{{1, 2}, 0.3}, {{2, 1}, 0.3}});
    CHECK(symmetric.symmetric());

    CHECK_THROWS_AS(CoefficientTensor(2, {{{0, 1}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientTensor(2, {{{1}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(CoefficientTensor(0, {}), std::invalid_argument);
}

TEST_CASE("evaluate_kernel matches hand arithmetic") {
    const auto basis = make_cosine_basis(3);
    const auto order1 = series_kernel(basis, 1, {{{1}, 1.0}});
    double t0 = 0.0;
    CHECK(evaluate_kernel(order1, {&t0, 1}) == doctest::Approx(M_SQRT2).epsilon(1e-15));

    const auto order2 = series_kernel(basis, 2, {{{1, 1}, 1.0}});
    const std::vector<double> origin{0.0, 0.0};
    CHECK(evaluate_kernel(order2, origin) == doctest::Approx(2.0).epsilon(1e-14));

    const auto mixed = series_kernel(basis, 2, {{{1, 1}, 0.5}, {{1, 2}, 0.25}});
    const std::vector<double> point{0.1, 0.2};
    const double e1_01 = M_SQRT2 * std::cos(M_PI * 0.1);
    const double e1_02 = M_SQRT2 * std::cos(M_PI * 0.2);
    const double e2_02 = M_SQRT2 * std::cos(2.0 * M_PI * 0.2);
    const double expected = 0.5 * e1_01 * e1_02 + 0.25 * e1_01 * e2_02;
    CHECK(std::abs(evaluate_kernel(mixed, point) - expected) <= 1e-14);
}

TEST_CASE("kernel construction rejects indices beyond the basis") {
    const auto basis = make_cosine_basis(2);
    CHECK_THROWS_AS(series_kernel(basis, 1, {{{3}, 1.0}}), std::invalid_argument);
}

TEST_CASE("series kernels are canonical in every slot") {
    const auto basis = make_cosine_basis(3);
    const auto pair_kernel = series_kernel(basis, 2, {{{1, 1}, 1.0}});
    const std::vector<double> fixed{0.7};
    CHECK(check_canonicity(pair_kernel, 1, fixed) <= 1e-8);
    CHECK(check_canonicity(pair_kernel, 2, fixed) <= 1e-8);

    const auto triple = series_kernel(basis, 3, {{{1, 2, 3}, 2.0}});
    const std::vector<double> fixed_pair{0.3, 0.9};
    for (int slot = 1; slot <= 3; ++slot) {
        CHECK(check_canonicity(triple, slot, fixed_pair) <= 1e-8);
    }
}

TEST_CASE("a constant raw kernel is maximally non-canonical") {
    const auto basis = make_cosine_basis(2);
    const RawKernel constant = [](std::span<const double>) { return 1.0; };
    CHECK(check_canonicity(constant, 1, basis, 1, {}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("canonicity on finite alphabets uses exact summation") {
    Eigen::VectorXd p(3);
    p << 0.2, 0.3, 0.5;
    const auto basis = gram_schmidt_finite(p);
    const auto kernel = series_kernel(basis, 2, {{{1, 2}, 1.0}, {{2, 2}, 0.5}});
    for (int slot = 1; slot <= 2; ++slot) {
        for (int x = 0; x < 3; ++x) {
            const std::vector<double> fixed{static_cast<double>(x)};
            CHECK(check_canonicity(kernel, slot, fixed) <= 1e-12);
        }
    }
}

TEST_CASE("b_of_f substitutes into the displayed formula") {
    const auto basis = make_cosine_basis(2);
    CHECK(b_of_f(series_kernel(basis, 1, {{{1}, 1.0}})) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b_of_f(series_kernel(basis, 2, {{{1, 1}, 1.0}})) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b_of_f(series_kernel(basis, 2, {})) == 0.0);

    const auto hermite = make_hermite_basis(2);
    CHECK_THROWS_AS(b_of_f(series_kernel(hermite, 1, {{{1}, 1.0}})), HypothesisError);
}

TEST_CASE("b_of_f is homogeneous of degree 2/m") {
    std::mt19937_64 rng(11);
    auto uniform = [&rng] { return (rng() >> 11) * 0x1.0p-53; };
    const auto basis = make_cosine_basis(5);
    for (int m = 1; m <= 3; ++m) {
        for (int trial = 0; trial < 10; ++trial) {
            CoefficientTensor::EntryMap entries;
            const int count = 1 + static_cast<int>(rng() % 6);
            for (int e = 0; e < count; ++e) {
                std::vector<int> idx(m);
                for (int k = 0; k < m; ++k) idx[k] = 1 + static_cast<int>(rng() % 5);
                entries[idx] = uniform() * 2.0 - 1.0;
            }
            const auto kernel = series_kernel(basis, m, entries);
            if (kernel.coefficients().abs_sum() == 0.0) continue;
            const double lambda = 0.1 + 5.0 * uniform();
            const auto scaled =
                CanonicalKernel(basis, kernel.coefficients().scaled(lambda));
            const double expected = std::pow(lambda, 2.0 / m) * b_of_f(kernel);
            CHECK(b_of_f(scaled) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("symmetric kernels are exchangeable") {
    const auto basis = make_cosine_basis(3);
    const auto kernel =
        series_kernel(basis, 2, {{{1, 2}, 0.4}, {{2, 1}, 0.4}, {{1, 1}, -0.3}});
    REQUIRE(kernel.coefficients().symmetric());
    const std::vector<double> point{0.15, 0.85};
    const std::vector<double> swapped{0.85, 0.15};
    CHECK(std::abs(evaluate_kernel(kernel, point) - evaluate_kernel(kernel, swapped)) <= 1e-12);
}

TEST_CASE("decomposition of an already-canonical product kernel") {
    const auto basis = make_cosine_basis(6);
    const RawKernel raw = [&basis](std::span<const double> p) {
        return basis.evaluate(1, p[0]) * basis.evaluate(1, p[1]);
    };
    const auto decomposition = hoeffding_decompose(raw, basis, 4, 2);
    CHECK(std::abs(decomposition.constant_term) <= 1e-8);
    REQUIRE(decomposition.components.size() == 1);
    const auto& only = decomposition.components[0];
    CHECK(only.slots == std::vector<int>{1, 2});
    REQUIRE(only.kernel.coefficients().entries().size() == 1);
    CHECK(only.kernel.coefficients().entries().at({1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("decomposition of an additive nondegenerate kernel") {
    const auto basis = make_cosine_basis(6);
    const RawKernel raw = [&basis](std::span<const double> p) {
        return basis.evaluate(1, p[0]) + basis.evaluate(1, p[1]);
    };
    const auto decomposition = hoeffding_decompose(raw, basis, 4, 2);
    CHECK(std::abs(decomposition.constant_term) <= 1e-8);
    REQUIRE(decomposition.components.size() == 2);
    CHECK(decomposition.components[0].slots == std::vector<int>{1});
    CHECK(decomposition.components[1].slots == std::vector<int>{2});
    for (const auto& component : decomposition.components) {
        REQUIRE(component.kernel.coefficients().entries().size() == 1);
        CHECK(component.kernel.coefficients().entries().at({1}) ==
              doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("decomposition of the shifted product recovers all layers") {
    const auto basis = make_cosine_basis(6);
    const RawKernel raw = [&basis](std::span<const double> p) {
        return (basis.evaluate(1, p[0]) + 1.0) * (basis.evaluate(1, p[1]) + 1.0);
    };
    const auto decomposition = hoeffding_decompose(raw, basis, 4, 2);
    CHECK(decomposition.constant_term == doctest::Approx(1.0).epsilon(1e-8));
    REQUIRE(decomposition.components.size() == 3);
    CHECK(decomposition.components[0].kernel.coefficients().entries().at({1}) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(decomposition.components[1].kernel.coefficients().entries().at({1}) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(decomposition.components[2].kernel.coefficients().entries().at({1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-8));

    // Components of order >= 1 pass the canonicity check.
    for (const auto& component : decomposition.components) {
        const int m = static_cast<int>(component.slots.size());
        const std::vector<double> fixed(m - 1, 0.4);
        for (int slot = 1; slot <= m; ++slot) {
            CHECK(check_canonicity(component.kernel, slot, fixed) <= 1e-6);
        }
    }

    // Pairwise orthogonality in L2(F^2), via the test-side inner product.
    auto lift = [&](const HoeffdingComponent& component) {
        return [&component](double x, double y) {
            std::vector<double> sub;
            for (int slot : component.slots) sub.push_back(slot == 1 ? x : y);
            return component.kernel(sub);
        };
    };
    for (std::size_t a = 0; a < decomposition.components.size(); ++a) {
        for (std::size_t b = a + 1; b < decomposition.components.size(); ++b) {
            const double ip = inner_product_2d(lift(decomposition.components[a]),
                                               lift(decomposition.components[b]));
            CHECK(std::abs(ip) <= 1e-6);
        }
    }

    // The decomposition reproduces the projection (= the kernel itself here).
    for (double x : {0.1, 0.45, 0.8}) {
        for (double y : {0.2, 0.65}) {
            const std::vector<double> point{x, y};
            CHECK(decomposition.evaluate(point) ==
                  doctest::Approx(raw(point)).epsilon(1e-8));
        }
    }
}

TEST_CASE("decomposition on a finite alphabet is exact") {
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    const auto basis = gram_schmidt_finite(p);
    // e1 = (+1, -1); raw(s,t) = e1(s) e1(t) + 2.
    const RawKernel raw = [&basis](std::span<const double> pt) {
        return basis.evaluate(1, pt[0]) * basis.evaluate(1, pt[1]) + 2.0;
    };
    const auto decomposition = hoeffding_decompose(raw, basis, 1, 2);
    CHECK(decomposition.constant_term == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(decomposition.components.size() == 1);
    CHECK(decomposition.components[0].kernel.coefficients().entries().at({1, 1}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decomposition guards") {
    const auto basis = make_cosine_basis(4);
    const RawKernel huge = [](std::span<const double>) { return 1e13; };
    CHECK_THROWS_AS(hoeffding_decompose(huge, basis, 2, 2), std::domain_error);
    const RawKernel fine = [](std::span<const double>) { return 0.0; };
    CHECK_THROWS_AS(hoeffding_decompose(fine, basis, 2, 4), std::invalid_argument);
    CHECK_THROWS_AS(hoeffding_decompose(fine, basis, 9, 2), std::invalid_argument);
}

}  // TEST_SUITE
