#ifndef USTAT_EXPERIMENTS_HPP
#define USTAT_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ustat/bounds.hpp"
#include "ustat/kernels.hpp"
#include "ustat/processes.hpp"
#include "ustat/statistics.hpp"

namespace ustat {

struct TailExperimentConfig {
    ProcessSpec process;
    CanonicalKernel kernel;
    StatKind statistic = StatKind::VStat;  // VStat or UStat
    Eigen::Index n = 0;
    int replications = 0;
    std::vector<double> x_grid;  // strictly increasing, positive
    std::uint64_t base_seed = 0;
};

struct TailRecord {
    double x = 0.0;
    double empirical_tail = 0.0;  // fraction of replications with |stat| > x
    double mc_stderr = 0.0;       // sqrt(p (1-p) / R)
    double theorem_bound = 0.0;
    double hoeffding_bound = 0.0;  // NaN when not applicable (m > 1 or dependent)
};

struct ExperimentReport {
    std::vector<TailRecord> records;
    std::uint64_t config_hash = 0;
    double wall_seconds = 0.0;
    BoundParameters constants;
    Eigen::Index n = 0;
    int replications = 0;
    StatKind statistic = StatKind::VStat;

    /// max over grid points of empirical_tail / theorem_bound (0/0 -> 0).
    double max_empirical_to_bound_ratio() const;
};

/// Replication r draws its path from seed base_seed + r; replications run in
/// parallel with results stored by index, so the report is identical for any
/// worker count. Throws HypothesisError naming the violated condition when
/// the requested bounds do not apply ((A), or (AC) for U-statistics).
ExperimentReport run_tail_experiment(const TailExperimentConfig& config, int threads = 1);

/// Exact E S_n(i_1) ... S_n(i_L) for a finite chain (or finite i.i.d. spec)
/// by enumerating all s^n paths, each weighted pi(x_1) prod P(x_t, x_{t+1}).
/// Throws BudgetError when s^n exceeds `path_budget`.
double exact_moment_oracle(const ProcessSpec& process, const OrthonormalBasis& basis,
                           std::span<const int> indices, Eigen::Index n,
                           double path_budget = 1e7);

/// Exact E V_n^{2N} for a finite-alphabet kernel by path enumeration.
double exact_even_moment_vstat(const ProcessSpec& process, const CanonicalKernel& kernel,
                               Eigen::Index n, int moment_order, double path_budget = 1e7);

/// CSV with header x,empirical_tail,mc_stderr,theorem_bound,hoeffding_bound;
/// 17 significant digits, '\n' endings, byte-deterministic.
void write_report(const ExperimentReport& report, const std::filesystem::path& destination);

/// FNV-1a hash of the canonical config description (embedded in summaries so
/// reports can be traced back to their inputs).
std::uint64_t config_hash(const TailExperimentConfig& config);

}  // namespace ustat

#endif
