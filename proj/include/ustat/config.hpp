#ifndef USTAT_CONFIG_HPP
#define USTAT_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ustat/experiments.hpp"
#include "ustat/kernels.hpp"
#include "ustat/processes.hpp"
#include "ustat/statistics.hpp"

namespace ustat {

/// Raw-kernel presets usable in place of a series kernel (all defined
/// through the configured basis's e_1):
///   one                 f == 1                         (any order)
///   product_e1          e1(s) e1(t)                    (order 2)
///   sum_e1              e1(s) + e1(t)                  (order 2)
///   shifted_product_e1  (e1(s)+1)(e1(t)+1)             (order 2)
RawKernel make_raw_preset(const std::string& name, const OrthonormalBasis& basis, int order);

struct RawKernelSpec {
    std::string preset;
    int order = 2;
    int truncation = 4;
    bool decompose = false;
};

/// Parsed run configuration. Sections are optional in the document; each
/// subcommand checks for the sections it needs.
struct RunConfig {
    std::optional<OrthonormalBasis> basis;
    std::optional<CanonicalKernel> kernel;  // series form
    std::optional<RawKernelSpec> raw_kernel;
    std::optional<ProcessSpec> process;

    struct ExperimentSection {
        StatKind statistic = StatKind::VStat;
        Eigen::Index n = 0;
        int replications = 0;
        std::vector<double> x_grid;
        std::uint64_t base_seed = 0;
    };
    std::optional<ExperimentSection> experiment;
    std::optional<std::string> output_path;

    /// Canonical serialization of the parsed document (sorted keys); equal
    /// documents produce equal dumps, so configs round-trip losslessly.
    std::string canonical_dump;
};

/// Load and validate a JSON config. Unknown keys are rejected with their
/// JSON-pointer location; parse errors report line and column. Throws
/// ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

/// Assemble the tail-experiment inputs; throws ConfigError when a needed
/// section is missing.
TailExperimentConfig make_tail_config(const RunConfig& config);

}  // namespace ustat

#endif
