#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ustat/basis.hpp"
#include "ustat/processes.hpp"

using namespace ustat;

namespace {

double pearson_lag_correlation(const Eigen::VectorXd& values, int lag) {
    const Eigen::Index n = values.size() - lag;
    const Eigen::VectorXd head = values.head(n);
    const Eigen::VectorXd tail = values.tail(n);
    const double mean_head = head.mean();
    const double mean_tail = tail.mean();
    const Eigen::ArrayXd a = head.array() - mean_head;
    const Eigen::ArrayXd b = tail.array() - mean_tail;
    return (a * b).sum() / std::sqrt((a * a).sum() * (b * b).sum());
}

Eigen::MatrixXd symmetric_two_state(double flip) {
    Eigen::MatrixXd transition(2, 2);
    transition << 1.0 - flip, flip, flip, 1.0 - flip;
    return transition;
}

}  // namespace

TEST_SUITE("processes") {

TEST_CASE("generation is a pure function of spec, n, seed") {
    const auto spec = ProcessSpec::iid_uniform();
    const auto a = generate(spec, 5, 42);
    const auto b = generate(spec, 5, 42);
    CHECK(a.values == b.values);
    const auto c = generate(spec, 5, 43);
    CHECK(a.values != c.values);
}

TEST_CASE("ar1 lag-1 empirical correlation matches phi") {
    const auto spec = ProcessSpec::gaussian_ar1(0.5);
    const auto path = generate(spec, 100000, 1234);
    CHECK(pearson_lag_correlation(path.values, 1) == doctest::Approx(0.5).epsilon(0.02));
    // marginal is standard normal
    CHECK(std::abs(path.values.mean()) <= 0.02);
    CHECK(path.values.array().square().mean() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("symmetric chain visits both states equally") {
    const auto spec = ProcessSpec::finite_markov(symmetric_two_state(0.3));
    CHECK(spec.stationary()(0) == doctest::Approx(0.5).epsilon(1e-10));
    const auto path = generate(spec, 100000, 99);
    const double frequency_zero =
        (path.values.array() == 0.0).cast<double>().mean();
    CHECK(frequency_zero == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("mixing envelopes match the analytic formulas") {
    const auto ar1 = ProcessSpec::gaussian_ar1(0.5).mixing_envelope();
    CHECK(ar1.c0 == 1.0);
    CHECK(ar1.c1 == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    const auto iid_like = ProcessSpec::m_dependent(0).mixing_envelope();
    CHECK(iid_like.zero_beyond_lag.has_value());
    CHECK(*iid_like.zero_beyond_lag == 0);
    CHECK(iid_like.rho_bound(1) == 0.0);

    const auto windowed = ProcessSpec::m_dependent(2).mixing_envelope();
    CHECK(windowed.c0 == doctest::Approx(std::exp(2.0)));
    CHECK(windowed.c1 == 1.0);
    CHECK(windowed.rho_bound(2) >= 1.0);   // dominates rho <= 1 inside the window
    CHECK(windowed.rho_bound(3) == 0.0);   // exact zero beyond it

    // lambda2 of the symmetric two-state chain is |1 - 2 flip|.
    const auto markov = ProcessSpec::finite_markov(symmetric_two_state(0.3)).mixing_envelope();
    CHECK(markov.c0 == 1.0);
    CHECK(markov.c1 == doctest::Approx(-std::log(0.4)).epsilon(1e-10));
}

TEST_CASE("reversible chain correlations sit under the envelope") {
    const auto spec = ProcessSpec::finite_markov(symmetric_two_state(0.3));
    const auto envelope = spec.mixing_envelope();
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    const auto basis = gram_schmidt_finite(p);
    const auto path = generate(spec, 1000000, 31337);
    const Eigen::VectorXd signs = basis.evaluate_path(1, path.values);
    for (int lag = 1; lag <= 10; ++lag) {
        const double corr = pearson_lag_correlation(signs, lag);
        // Dependent-data standard error, inflated by the autocorrelation time.
        const double se = 2.0 / std::sqrt(static_cast<double>(signs.size() - lag));
        CHECK(corr <= envelope.rho_bound(lag) + 3.0 * se);
    }
}

TEST_CASE("stationary marginals pass a chi-square check across paths") {
    // Third observation of the chain over independent replications.
    const auto chain = ProcessSpec::finite_markov(symmetric_two_state(0.3));
    int counts[2] = {0, 0};
    const int replications = 10000;
    for (int r = 0; r < replications; ++r) {
        const auto path = generate(chain, 3, 500 + static_cast<std::uint64_t>(r));
        counts[static_cast<int>(path.values(2))]++;
    }
    double chi_square = 0.0;
    for (int value : counts) {
        const double expected = replications / 2.0;
        chi_square += (value - expected) * (value - expected) / expected;
    }
    CHECK(chi_square <= 10.828);  // df = 1, significance 0.001

    // Third observation of the m-dependent mixer is Uniform[0,1].
    const auto mdep = ProcessSpec::m_dependent(2);
    int bins[10] = {0};
    for (int r = 0; r < replications; ++r) {
        const auto path = generate(mdep, 3, 9000 + static_cast<std::uint64_t>(r));
        const int bin = std::min(9, static_cast<int>(path.values(2) * 10.0));
        bins[bin]++;
    }
    double chi_square_uniform = 0.0;
    for (int value : bins) {
        const double expected = replications / 10.0;
        chi_square_uniform += (value - expected) * (value - expected) / expected;
    }
    CHECK(chi_square_uniform <= 27.877);  // df = 9, significance 0.001
}

TEST_CASE("ar1 marginal at a fixed time passes a ks check across paths") {
    const auto spec = ProcessSpec::gaussian_ar1(0.5);
    const int replications = 2000;
    std::vector<double> samples(replications);
    for (int r = 0; r < replications; ++r) {
        const auto path = generate(spec, 3, 77000 + static_cast<std::uint64_t>(r));
        samples[r] = path.values(2);
    }
    std::sort(samples.begin(), samples.end());
    double ks = 0.0;
    for (int i = 0; i < replications; ++i) {
        const double cdf = 0.5 * std::erfc(-samples[i] * M_SQRT1_2);
        const double lower = static_cast<double>(i) / replications;
        const double upper = static_cast<double>(i + 1) / replications;
        ks = std::max({ks, std::abs(cdf - lower), std::abs(cdf - upper)});
    }
    // Kolmogorov critical value at significance 0.001.
    CHECK(ks <= 1.94947 / std::sqrt(static_cast<double>(replications)));
}

TEST_CASE("m-dependent sequences decorrelate exactly beyond the window") {
    const auto spec = ProcessSpec::m_dependent(2);
    const auto path = generate(spec, 100000, 2024);
    CHECK(pearson_lag_correlation(path.values, 1) >= 0.3);  // inside the window
    for (int lag = 3; lag <= 6; ++lag) {
        const double corr = pearson_lag_correlation(path.values, lag);
        CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(path.values.size() - lag)));
    }
}

TEST_CASE("uniformized ar1 has uniform marginals and the same envelope") {
    const auto spec = ProcessSpec::gaussian_ar1(0.5, /*uniformized=*/true);
    CHECK(spec.space().kind == SpaceKind::UnitInterval);
    CHECK(spec.mixing_envelope().c1 == doctest::Approx(std::log(2.0)));
    const auto path = generate(spec, 50000, 7);
    CHECK(path.values.minCoeff() >= 0.0);
    CHECK(path.values.maxCoeff() <= 1.0);
    CHECK(path.values.mean() == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("iid finite paths follow the supplied law") {
    Eigen::VectorXd p(3);
    p << 0.2, 0.3, 0.5;
    const auto spec = ProcessSpec::iid_finite(p);
    CHECK(spec.ac_certified());
    const auto path = generate(spec, 100000, 5150);
    for (int x = 0; x < 3; ++x) {
        const double frequency =
            (path.values.array() == static_cast<double>(x)).cast<double>().mean();
        CHECK(frequency == doctest::Approx(p(x)).epsilon(0.05));
    }
}

TEST_CASE("invalid specs are rejected before generation") {
    CHECK_THROWS_AS(ProcessSpec::gaussian_ar1(1.0), std::invalid_argument);
    CHECK_THROWS_AS(ProcessSpec::m_dependent(-1), std::invalid_argument);
    CHECK_THROWS_AS(ProcessSpec::m_dependent(11), std::invalid_argument);

    Eigen::MatrixXd bad_rows(2, 2);
    bad_rows << 0.7, 0.2, 0.3, 0.7;
    CHECK_THROWS_AS(ProcessSpec::finite_markov(bad_rows), std::invalid_argument);

    // Periodic permutation chain: irreducible but not aperiodic.
    Eigen::MatrixXd periodic(2, 2);
    periodic << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(ProcessSpec::finite_markov(periodic), std::invalid_argument);

    // Wrong stationary vector.
    Eigen::VectorXd not_stationary(2);
    not_stationary << 0.9, 0.1;
    CHECK_THROWS_AS(
        ProcessSpec::finite_markov(symmetric_two_state(0.3), not_stationary),
        std::invalid_argument);

    const auto spec = ProcessSpec::iid_uniform();
    CHECK_THROWS_AS(generate(spec, 0, 1), std::invalid_argument);
}

TEST_CASE("ac certification follows the construction rules") {
    CHECK(ProcessSpec::iid_uniform().ac_certified());
    CHECK(ProcessSpec::gaussian_ar1(0.3).ac_certified());
    CHECK(ProcessSpec::finite_markov(symmetric_two_state(0.25)).ac_certified());
    CHECK(!ProcessSpec::m_dependent(2).ac_certified());

    // Strictly positive powers certify primitivity but not (AC) itself.
    Eigen::MatrixXd with_zero(2, 2);
    with_zero << 0.0, 1.0, 0.5, 0.5;
    const auto spec = ProcessSpec::finite_markov(with_zero);
    CHECK(!spec.ac_certified());
}

}  // TEST_SUITE
