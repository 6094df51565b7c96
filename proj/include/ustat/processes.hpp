#ifndef USTAT_PROCESSES_HPP
#define USTAT_PROCESSES_HPP

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ustat/basis.hpp"

namespace ustat {

/// Geometric dominating envelope rho(k) <= c0 exp(-c1 k); an optional marker
/// records exact zero correlation beyond a finite lag.
struct MixingEnvelope {
    double c0 = 1.0;
    double c1 = 1.0;
    std::optional<int> zero_beyond_lag;

    double rho_bound(int lag) const;
};

enum class ProcessKind { IID, MDependent, GaussianAR1, FiniteMarkov };

struct SamplePath {
    Eigen::VectorXd values;
    std::uint64_t seed = 0;
};

/// Description of a stationary generator with a known mixing envelope.
/// Immutable; generation is a pure function of (spec, n, seed).
class ProcessSpec {
public:
    static ProcessSpec iid_uniform();
    static ProcessSpec iid_normal();
    static ProcessSpec iid_finite(Eigen::VectorXd probabilities);
    /// Sliding-window mixer of i.i.d. uniform drivers: X_t depends on
    /// xi_t..xi_{t+window}, marginal exactly Uniform[0,1]. window <= 10.
    static ProcessSpec m_dependent(int window);
    /// Stationary Gaussian AR(1); with `uniformized` the path is pushed
    /// through the normal cdf, giving Uniform[0,1] marginals with the same
    /// mixing coefficients (a bijection of Gaussian observations).
    static ProcessSpec gaussian_ar1(double phi, bool uniformized = false);
    /// Irreducible aperiodic chain started from pi. If `stationary` is
    /// absent, pi is solved from the transition matrix.
    static ProcessSpec finite_markov(Eigen::MatrixXd transition,
                                     std::optional<Eigen::VectorXd> stationary = std::nullopt);

    ProcessKind kind() const { return kind_; }
    const SampleSpace& space() const { return space_; }
    MarginalKind marginal_kind() const { return marginal_kind_; }
    const Eigen::VectorXd& stationary() const { return stationary_; }
    const Eigen::MatrixXd& transition() const { return transition_; }
    double phi() const { return phi_; }
    int window() const { return window_; }
    bool uniformized() const { return uniformized_; }
    /// Condition (AC) certification, established at construction time.
    bool ac_certified() const { return ac_certified_; }
    MixingEnvelope mixing_envelope() const { return envelope_; }

private:
    ProcessSpec() = default;

    ProcessKind kind_ = ProcessKind::IID;
    SampleSpace space_;
    MarginalKind marginal_kind_ = MarginalKind::Uniform01;
    Eigen::VectorXd stationary_;
    Eigen::MatrixXd transition_;
    Eigen::MatrixXd transition_cdf_;  // row-wise cumulative sums
    Eigen::VectorXd stationary_cdf_;
    double phi_ = 0.0;
    int window_ = 0;
    bool uniformized_ = false;
    bool ac_certified_ = false;
    MixingEnvelope envelope_;

    friend SamplePath generate(const ProcessSpec&, Eigen::Index, std::uint64_t);
};

/// Length-n realization; pure in (spec, n, seed).
SamplePath generate(const ProcessSpec& spec, Eigen::Index n, std::uint64_t seed);

MixingEnvelope mixing_envelope_of(const ProcessSpec& spec);

/// Decay rate used when the true coefficient vanishes (i.i.d. or beyond an
/// m-dependence window): exp(-50 k) underflows every bound comparison while
/// keeping the constant chain finite.
inline constexpr double kIidSentinelRate = 50.0;

}  // namespace ustat

#endif
