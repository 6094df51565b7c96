#include "ustat/processes.hpp"

#include <cmath>
#include <stdexcept>

#include "ustat/rng.hpp"

namespace ustat {

double MixingEnvelope::rho_bound(int lag) const {
    if (lag < 1) throw std::invalid_argument("rho_bound: lag >= 1");
    if (zero_beyond_lag && lag > *zero_beyond_lag) return 0.0;
    return c0 * std::exp(-c1 * lag);
}

namespace {

Eigen::VectorXd cumulative(const Eigen::VectorXd& p) {
    Eigen::VectorXd cdf(p.size());
    double run = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        run += p(i);
        cdf(i) = run;
    }
    cdf(p.size() - 1) = 1.0;
    return cdf;
}

void validate_probability_vector(const Eigen::VectorXd& p, const char* what) {
    if (p.size() < 2) throw std::invalid_argument(std::string(what) + ": length >= 2 required");
    if (p.minCoeff() <= 0.0) throw std::invalid_argument(std::string(what) + ": entries must be positive");
    if (std::abs(p.sum() - 1.0) > 1e-12) {
        throw std::invalid_argument(std::string(what) + ": must sum to 1 within 1e-12");
    }
}

// Second-largest singular value of the pi-weighted transition operator,
// i.e. the operator norm of D^{1/2} P D^{-1/2} restricted to the orthogonal
// complement of sqrt(pi). Dominates the maximal correlation at lag k by
// lambda2^k (submultiplicativity on the invariant subspace).
double second_singular_value(const Eigen::MatrixXd& transition, const Eigen::VectorXd& pi) {
    const Eigen::Index s = pi.size();
    const Eigen::VectorXd root = pi.cwiseSqrt();
    const Eigen::MatrixXd weighted =
        root.asDiagonal() * transition * root.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd projector = Eigen::MatrixXd::Identity(s, s) - root * root.transpose();
    const Eigen::MatrixXd restricted = projector * weighted * projector;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted);
    return svd.singularValues()(0);
}

// Irwin-Hall cdf of the sum of `terms` i.i.d. Uniform[0,1] variables;
// alternating series, stable for the small window sizes accepted here.
double irwin_hall_cdf(double x, int terms) {
    if (x <= 0.0) return 0.0;
    if (x >= terms) return 1.0;
    double factorial = 1.0;
    for (int k = 2; k <= terms; ++k) factorial *= k;
    double sum = 0.0;
    double binom = 1.0;  // C(terms, k)
    const int top = static_cast<int>(std::floor(x));
    for (int k = 0; k <= top; ++k) {
        sum += (k % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(x - k, terms);
        binom = binom * (terms - k) / (k + 1);
    }
    const double value = sum / factorial;
    return std::min(1.0, std::max(0.0, value));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace

ProcessSpec ProcessSpec::iid_uniform() {
    ProcessSpec spec;
    spec.kind_ = ProcessKind::IID;
    spec.space_ = SampleSpace::unit_interval();
    spec.marginal_kind_ = MarginalKind::Uniform01;
    spec.ac_certified_ = true;  // joint law equals the product law
    spec.envelope_ = {1.0, kIidSentinelRate, 0};
    return spec;
}

ProcessSpec ProcessSpec::iid_normal() {
    ProcessSpec spec = iid_uniform();
    spec.space_ = SampleSpace::real_line();
    spec.marginal_kind_ = MarginalKind::StandardNormal;
    return spec;
}

ProcessSpec ProcessSpec::iid_finite(Eigen::VectorXd probabilities) {
    validate_probability_vector(probabilities, "iid_finite");
    ProcessSpec spec;
    spec.kind_ = ProcessKind::IID;
    spec.space_ = SampleSpace::finite_alphabet(static_cast<int>(probabilities.size()));
    spec.marginal_kind_ = MarginalKind::FiniteVector;
    spec.stationary_cdf_ = cumulative(probabilities);
    spec.stationary_ = std::move(probabilities);
    spec.ac_certified_ = true;
    spec.envelope_ = {1.0, kIidSentinelRate, 0};
    return spec;
}

ProcessSpec ProcessSpec::m_dependent(int window) {
    if (window < 0 || window > 10) {
        throw std::invalid_argument("m_dependent: window must be in 0..10");
    }
    ProcessSpec spec;
    spec.kind_ = ProcessKind::MDependent;
    spec.space_ = SampleSpace::unit_interval();
    spec.marginal_kind_ = MarginalKind::Uniform01;
    spec.window_ = window;
    // rho(k) = 0 for k > window; the envelope must still dominate rho <= 1 at
    // the short lags, so c0 = e^{c1 window} with unit decay rate.
    if (window == 0) {
        spec.envelope_ = {1.0, kIidSentinelRate, 0};
        spec.ac_certified_ = true;
    } else {
        spec.envelope_ = {std::exp(static_cast<double>(window)), 1.0, window};
        spec.ac_certified_ = false;  // not certified at construction time
    }
    return spec;
}

ProcessSpec ProcessSpec::gaussian_ar1(double phi, bool uniformized) {
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("gaussian_ar1: |phi| < 1 required");
    ProcessSpec spec;
    spec.kind_ = ProcessKind::GaussianAR1;
    spec.space_ = uniformized ? SampleSpace::unit_interval() : SampleSpace::real_line();
    spec.marginal_kind_ = uniformized ? MarginalKind::Uniform01 : MarginalKind::StandardNormal;
    spec.phi_ = phi;
    spec.uniformized_ = uniformized;
    spec.ac_certified_ = true;  // nondegenerate Gaussian joint densities
    if (phi == 0.0) {
        spec.envelope_ = {1.0, kIidSentinelRate, 0};
    } else {
        // Gaussian maximal correlation: rho(k) = |corr(X_t, X_{t+k})| = |phi|^k.
        spec.envelope_ = {1.0, -std::log(std::abs(phi)), std::nullopt};
    }
    return spec;
}

ProcessSpec ProcessSpec::finite_markov(Eigen::MatrixXd transition,
                                       std::optional<Eigen::VectorXd> stationary) {
    const Eigen::Index s = transition.rows();
    if (s < 2 || transition.cols() != s) {
        throw std::invalid_argument("finite_markov: transition must be square, size >= 2");
    }
    if (transition.minCoeff() < 0.0) {
        throw std::invalid_argument("finite_markov: negative transition probability");
    }
    for (Eigen::Index r = 0; r < s; ++r) {
        if (std::abs(transition.row(r).sum() - 1.0) > 1e-12) {
            throw std::invalid_argument("finite_markov: row sums must be 1 within 1e-12");
        }
    }

    Eigen::VectorXd pi;
    if (stationary) {
        pi = std::move(*stationary);
        if (pi.size() != s) throw std::invalid_argument("finite_markov: stationary size mismatch");
    } else {
        // Solve pi P = pi, sum pi = 1 as a least-squares system.
        Eigen::MatrixXd system(s + 1, s);
        system.topRows(s) = transition.transpose() - Eigen::MatrixXd::Identity(s, s);
        system.row(s).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
        rhs(s) = 1.0;
        pi = system.colPivHouseholderQr().solve(rhs);
    }
    validate_probability_vector(pi, "finite_markov stationary vector");
    if ((pi.transpose() * transition - pi.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("finite_markov: vector is not stationary within 1e-10");
    }

    // Primitivity: some power of P is strictly positive (Wielandt exponent).
    const int wielandt = static_cast<int>((s - 1) * (s - 1) + 1);
    Eigen::MatrixXd power = transition;
    bool primitive = power.minCoeff() > 0.0;
    for (int k = 1; k < wielandt && !primitive; ++k) {
        power = power * transition;
        primitive = power.minCoeff() > 0.0;
    }
    if (!primitive) {
        throw std::invalid_argument("finite_markov: chain is not irreducible and aperiodic");
    }

    ProcessSpec spec;
    spec.kind_ = ProcessKind::FiniteMarkov;
    spec.space_ = SampleSpace::finite_alphabet(static_cast<int>(s));
    spec.marginal_kind_ = MarginalKind::FiniteVector;
    spec.stationary_cdf_ = cumulative(pi);
    spec.transition_cdf_.resize(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
        spec.transition_cdf_.row(r) = cumulative(transition.row(r).transpose()).transpose();
    }
    // On a finite alphabet with pi > 0 the product measure charges every
    // point; certification follows the strictly-positive-transition rule.
    spec.ac_certified_ = transition.minCoeff() > 0.0;

    const double lambda2 = second_singular_value(transition, pi);
    if (lambda2 >= 1.0 - 1e-9) {
        throw std::invalid_argument("finite_markov: degenerate mixing envelope (lambda2 ~ 1)");
    }
    if (lambda2 < 1e-300) {
        // lambda2 = 0 forces zero correlation at every lag (i.i.d.-as-chain).
        spec.envelope_ = {1.0, kIidSentinelRate, 0};
    } else {
        spec.envelope_ = {1.0, -std::log(lambda2), std::nullopt};
    }
    spec.stationary_ = std::move(pi);
    spec.transition_ = std::move(transition);
    return spec;
}

SamplePath generate(const ProcessSpec& spec, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate: n >= 1 required");
    Rng rng(seed);
    Eigen::VectorXd values(n);
    switch (spec.kind_) {
        case ProcessKind::IID: {
            switch (spec.marginal_kind_) {
                case MarginalKind::Uniform01:
                    for (Eigen::Index t = 0; t < n; ++t) values(t) = rng.uniform01();
                    break;
                case MarginalKind::StandardNormal:
                    for (Eigen::Index t = 0; t < n; ++t) values(t) = rng.normal01();
                    break;
                case MarginalKind::FiniteVector:
                    for (Eigen::Index t = 0; t < n; ++t) {
                        values(t) = rng.categorical(spec.stationary_cdf_);
                    }
                    break;
            }
            break;
        }
        case ProcessKind::MDependent: {
            const int w = spec.window_;
            Eigen::VectorXd drivers(n + w);
            for (Eigen::Index t = 0; t < n + w; ++t) drivers(t) = rng.uniform01();
            for (Eigen::Index t = 0; t < n; ++t) {
                values(t) = irwin_hall_cdf(drivers.segment(t, w + 1).sum(), w + 1);
            }
            break;
        }
        case ProcessKind::GaussianAR1: {
            const double phi = spec.phi_;
            const double innovation_scale = std::sqrt(1.0 - phi * phi);
            double state = rng.normal01();
            for (Eigen::Index t = 0; t < n; ++t) {
                values(t) = spec.uniformized_ ? normal_cdf(state) : state;
                state = phi * state + innovation_scale * rng.normal01();
            }
            break;
        }
        case ProcessKind::FiniteMarkov: {
            int state = rng.categorical(spec.stationary_cdf_);
            values(0) = state;
            for (Eigen::Index t = 1; t < n; ++t) {
                state = rng.categorical(spec.transition_cdf_.row(state));
                values(t) = state;
            }
            break;
        }
    }
    return {std::move(values), seed};
}

MixingEnvelope mixing_envelope_of(const ProcessSpec& spec) { return spec.mixing_envelope(); }

}  // namespace ustat
