// ustat command-line front end: canonicity checks, statistic evaluation,
// tail-bound tables, Monte Carlo tail experiments, and exact enumeration
// oracles, all driven by a single JSON config per run.
//
// Exit codes: 0 success, 1 property violation, 2 input error, 3 budget.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ustat/bounds.hpp"
#include "ustat/config.hpp"
#include "ustat/errors.hpp"
#include "ustat/experiments.hpp"
#include "ustat/kernels.hpp"
#include "ustat/statistics.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
    }
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    for (double v : parse_double_list(text)) values.push_back(static_cast<int>(v));
    return values;
}

Eigen::MatrixXd parse_transition(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream stream(text);
    std::string row_text;
    while (std::getline(stream, row_text, ';')) {
        rows.push_back(parse_double_list(row_text));
    }
    if (rows.empty()) throw ustat::ConfigError("--transition: empty matrix");
    Eigen::MatrixXd matrix(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size()) {
            throw ustat::ConfigError("--transition: ragged matrix");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return matrix;
}

// Deterministic grid of (m-1)-tuples of fixed arguments for canonicity
// scans: linspaced points on the interval, cycled alphabet points otherwise.
std::vector<std::vector<double>> fixed_argument_grid(const ustat::OrthonormalBasis& basis,
                                                     int order, int count) {
    std::vector<std::vector<double>> tuples;
    if (order == 1) {
        tuples.push_back({});
        return tuples;
    }
    auto point_at = [&](int k, int of) -> double {
        switch (basis.space().kind) {
            case ustat::SpaceKind::UnitInterval:
                return of == 1 ? 0.5 : static_cast<double>(k) / (of - 1);
            case ustat::SpaceKind::RealLine:
                return -3.0 + 6.0 * (of == 1 ? 0.5 : static_cast<double>(k) / (of - 1));
            case ustat::SpaceKind::FiniteAlphabet:
                return k % basis.space().alphabet_size;
        }
        return 0.0;
    };
    if (order == 2) {
        for (int k = 0; k < count; ++k) tuples.push_back({point_at(k, count)});
        return tuples;
    }
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
    for (int a = 0; a < side; ++a) {
        for (int b = 0; b < side; ++b) {
            tuples.push_back({point_at(a, side), point_at(b, side)});
        }
    }
    return tuples;
}

struct CanonicityScan {
    double max_residual = 0.0;
    int slots = 0;
    int grid_points = 0;
};

CanonicityScan scan_canonicity(const ustat::RawKernel& kernel, int order,
                               const ustat::OrthonormalBasis& basis, int grid_points,
                               int quadrature_nodes) {
    CanonicityScan scan;
    scan.slots = order;
    const auto grid = fixed_argument_grid(basis, order, grid_points);
    scan.grid_points = static_cast<int>(grid.size());
    for (int slot = 1; slot <= order; ++slot) {
        for (const auto& fixed : grid) {
            scan.max_residual =
                std::max(scan.max_residual, ustat::check_canonicity(kernel, order, basis, slot,
                                                                    fixed, quadrature_nodes));
        }
    }
    return scan;
}

int cmd_kernel_check(const std::string& config_path, double tolerance, int grid_points,
                     int quadrature_nodes) {
    const ustat::RunConfig config = ustat::load_run_config(config_path);
    if (!config.basis) throw ustat::ConfigError("kernel-check: config needs a basis section");
    if (!config.kernel && !config.raw_kernel) {
        throw ustat::ConfigError("kernel-check: config needs a kernel section");
    }

    std::vector<std::pair<std::string, CanonicityScan>> results;
    if (config.kernel) {
        const auto& kernel = *config.kernel;
        ustat::RawKernel fn = [&kernel](std::span<const double> p) { return kernel(p); };
        results.emplace_back("series kernel",
                             scan_canonicity(fn, kernel.order(), kernel.basis(), grid_points,
                                             quadrature_nodes));
    } else {
        const auto& raw = *config.raw_kernel;
        const ustat::RawKernel fn = ustat::make_raw_preset(raw.preset, *config.basis, raw.order);
        if (raw.decompose) {
            const ustat::HoeffdingDecomposition decomposition =
                ustat::hoeffding_decompose(fn, *config.basis, raw.truncation, raw.order);
            std::cout << "decomposition: constant term = "
                      << format_double(decomposition.constant_term) << ", "
                      << decomposition.components.size() << " component(s)\n";
            for (const auto& component : decomposition.components) {
                const auto& kernel = component.kernel;
                ustat::RawKernel comp_fn = [&kernel](std::span<const double> p) {
                    return kernel(p);
                };
                std::ostringstream name;
                name << "component on slots {";
                for (std::size_t i = 0; i < component.slots.size(); ++i) {
                    name << (i ? "," : "") << component.slots[i];
                }
                name << "}";
                results.emplace_back(name.str(),
                                     scan_canonicity(comp_fn, kernel.order(), kernel.basis(),
                                                     grid_points, quadrature_nodes));
            }
        } else {
            results.emplace_back("raw preset '" + raw.preset + "'",
                                 scan_canonicity(fn, raw.order, *config.basis, grid_points,
                                                 quadrature_nodes));
        }
    }

    double worst = 0.0;
    for (const auto& [name, scan] : results) {
        std::cout << name << ": max canonicity residual " << format_double(scan.max_residual)
                  << " over " << scan.slots << " slot(s) x " << scan.grid_points
                  << " grid point(s)\n";
        worst = std::max(worst, scan.max_residual);
    }
    std::cout << (worst <= tolerance ? "CANONICAL" : "NOT CANONICAL") << " (tolerance "
              << format_double(tolerance) << ")\n";
    return worst <= tolerance ? kExitSuccess : kExitViolation;
}

int cmd_stat(const std::string& config_path, const std::string& method,
             std::optional<std::uint64_t> seed_override, const std::string& statistic_override) {
    const ustat::RunConfig config = ustat::load_run_config(config_path);
    if (!config.kernel) throw ustat::ConfigError("stat: config needs a series kernel");
    if (!config.process) throw ustat::ConfigError("stat: config needs a process section");
    if (!config.experiment) throw ustat::ConfigError("stat: config needs an experiment section");

    const auto& exp = *config.experiment;
    const std::uint64_t seed = seed_override.value_or(exp.base_seed);
    const ustat::SamplePath path = ustat::generate(*config.process, exp.n, seed);
    bool is_v = exp.statistic == ustat::StatKind::VStat;
    if (statistic_override == "v") is_v = true;
    if (statistic_override == "u") is_v = false;
    const char* label = is_v ? "V_n" : "U_n";

    auto compute = [&](bool naive) {
        if (is_v) {
            return naive ? ustat::v_stat_naive(*config.kernel, path.values)
                         : ustat::v_stat_factorized(*config.kernel, path.values);
        }
        return naive ? ustat::u_stat_naive(*config.kernel, path.values)
                     : ustat::u_stat_factorized(*config.kernel, path.values);
    };

    if (method == "both") {
        const auto naive = compute(true);
        const auto factorized = compute(false);
        std::cout << label << " naive      = " << format_double(naive.value) << "\n";
        std::cout << label << " factorized = " << format_double(factorized.value) << "\n";
        std::cout << "difference = " << format_double(naive.value - factorized.value) << "\n";
    } else {
        const auto result = compute(method == "naive");
        std::cout << label << " (" << method << ") = " << format_double(result.value) << "\n";
    }
    return kExitSuccess;
}

struct BoundFlags {
    double c0 = 1.0, c1 = 1.0, sup_bound = M_SQRT2, abs_sum = 1.0;
    int order = 1;
    Eigen::Index n = 100;
    double a = -1.0, b = 1.0;
    double sup_abs_kernel = 1.0;
    double sigma = 1.0, big_l = 1.0;
    double c1_user = 1.0, c2_user = 1.0;
};

int cmd_bound(const std::string& family, const std::vector<double>& grid,
              const BoundFlags& flags, const std::string& out_path) {
    if (grid.empty()) throw ustat::ConfigError("bound: empty x grid");
    for (double x : grid) {
        if (!(x > 0.0)) throw ustat::ConfigError("bound: grid values must be positive");
    }

    std::function<double(double)> evaluate;
    if (family == "theorem") {
        const auto params = ustat::make_bound_parameters(flags.c0, flags.c1, flags.sup_bound,
                                                         flags.order, flags.abs_sum);
        evaluate = [params](double x) { return ustat::theorem_bound(x, params); };
    } else if (family == "chebyshev-opt") {
        const auto params = ustat::make_bound_parameters(flags.c0, flags.c1, flags.sup_bound,
                                                         flags.order, flags.abs_sum);
        evaluate = [params](double x) { return ustat::optimized_chebyshev_bound(x, params); };
    } else if (family == "hoeffding") {
        evaluate = [flags](double t) {
            return ustat::hoeffding_bound(t, flags.n, flags.order, flags.a, flags.b);
        };
    } else if (family == "bounded-kernel") {
        evaluate = [flags](double t) {
            return ustat::bounded_kernel_bound(t, flags.sup_abs_kernel, flags.order,
                                               flags.c1_user, flags.c2_user);
        };
    } else if (family == "bernstein") {
        evaluate = [flags](double t) {
            return ustat::bernstein_bound(t, flags.sigma, flags.big_l, flags.n, flags.order,
                                          flags.c1_user, flags.c2_user);
        };
    } else {
        throw ustat::ConfigError("bound: unknown family '" + family + "'");
    }

    std::ostringstream csv;
    csv << "x,bound\n";
    for (double x : grid) csv << format_double(x) << "," << format_double(evaluate(x)) << "\n";
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("bound: cannot open '" + out_path + "'");
        out << csv.str();
    }
    return kExitSuccess;
}

int cmd_experiment(const std::string& config_path, int threads,
                   std::optional<std::uint64_t> seed_override, std::string out_path) {
    const ustat::RunConfig config = ustat::load_run_config(config_path);
    ustat::TailExperimentConfig tail = ustat::make_tail_config(config);
    if (seed_override) tail.base_seed = *seed_override;
    if (out_path.empty()) {
        if (!config.output_path) {
            throw ustat::ConfigError("experiment: no output path (config output.path or --out)");
        }
        out_path = *config.output_path;
    }

    const ustat::ExperimentReport report = ustat::run_tail_experiment(tail, threads);
    ustat::write_report(report, out_path);

    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(report.config_hash));
    std::cout << "report written to " << out_path << " (config " << hash_hex << ", wall "
              << format_double(report.wall_seconds) << " s)\n";
    std::cout << "max empirical/bound ratio = "
              << format_double(report.max_empirical_to_bound_ratio()) << "\n";

    // Domination with the 3-sigma Monte Carlo allowance is the property the
    // report exists to check; a breach is a property violation, not success.
    for (const auto& record : report.records) {
        if (record.empirical_tail > record.theorem_bound + 3.0 * record.mc_stderr) {
            std::cout << "bound domination FAILED at x = " << format_double(record.x) << "\n";
            return kExitViolation;
        }
    }
    return kExitSuccess;
}

int cmd_oracle(const std::string& flip_text, const std::string& transition_text, Eigen::Index n,
               const std::string& indices_text, const std::string& kernel_config,
               int moment_order) {
    ustat::ProcessSpec process = [&] {
        if (!flip_text.empty()) {
            const double flip = std::stod(flip_text);
            Eigen::MatrixXd transition(2, 2);
            transition << 1.0 - flip, flip, flip, 1.0 - flip;
            return ustat::ProcessSpec::finite_markov(transition);
        }
        if (!transition_text.empty()) {
            return ustat::ProcessSpec::finite_markov(parse_transition(transition_text));
        }
        throw ustat::ConfigError("oracle: give --flip or --transition");
    }();
    const ustat::MixingEnvelope envelope = process.mixing_envelope();

    if (!kernel_config.empty()) {
        // Even-moment mode: E V_n^{2N} against its majorant.
        const ustat::RunConfig config = ustat::load_run_config(kernel_config);
        if (!config.kernel) throw ustat::ConfigError("oracle: config needs a series kernel");
        const double moment =
            ustat::exact_even_moment_vstat(process, *config.kernel, n, moment_order);
        const auto params = ustat::bound_parameters_for(*config.kernel, envelope);
        const double log_bound =
            ustat::even_moment_bound_log(config.kernel->order(), moment_order, params);
        std::cout << "E V_n^" << 2 * moment_order << " = " << format_double(moment) << "\n";
        std::cout << "even-moment majorant (log) = " << format_double(log_bound) << "\n";
        const bool dominated = moment <= 0.0 || std::log(moment) <= log_bound;
        std::cout << (dominated ? "DOMINATED" : "VIOLATED") << "\n";
        return dominated ? kExitSuccess : kExitViolation;
    }

    if (indices_text.empty()) {
        throw ustat::ConfigError("oracle: give --indices (or --config for even moments)");
    }
    const std::vector<int> indices = parse_int_list(indices_text);
    const ustat::OrthonormalBasis basis = ustat::gram_schmidt_finite(process.stationary());
    const double moment = ustat::exact_moment_oracle(process, basis, indices, n);
    std::cout << "E S_n(i_1)...S_n(i_" << indices.size() << ") = " << format_double(moment)
              << "\n";
    if (indices.size() % 2 != 0) {
        std::cout << "no mixed-moment majorant for an odd index count\n";
        return kExitSuccess;
    }
    const auto params = ustat::make_bound_parameters(envelope.c0, envelope.c1, basis.sup_bound(),
                                                     1, 1.0);
    const double log_bound =
        ustat::lemma1_bound_log(1, static_cast<int>(indices.size() / 2), params);
    std::cout << "mixed-moment majorant (log) = " << format_double(log_bound) << "\n";
    const bool dominated =
        std::abs(moment) <= 0.0 || std::log(std::abs(moment)) <= log_bound;
    std::cout << (dominated ? "DOMINATED" : "VIOLATED") << "\n";
    return dominated ? kExitSuccess : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical U/V-statistics of mixing sequences: factorized evaluation, "
                 "exponential tail bounds, and verification harnesses"};
    app.require_subcommand(1);

    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    app.add_option("--threads", threads, "worker count (default: hardware concurrency)");

    std::string config_path;
    double tolerance = 1e-8;
    int grid_points = 100;
    int quadrature_nodes = 10000;
    auto* kernel_check = app.add_subcommand("kernel-check", "canonicity report for a kernel");
    kernel_check->add_option("config", config_path, "JSON run config")->required();
    kernel_check->add_option("--tolerance", tolerance, "pass threshold on the max residual");
    kernel_check->add_option("--grid-points", grid_points, "fixed-argument grid size");
    kernel_check->add_option("--quadrature-nodes", quadrature_nodes, "slot-integral resolution");

    std::string method = "factorized";
    std::string seed_text;
    std::string statistic_override;
    auto* stat = app.add_subcommand("stat", "evaluate the configured statistic on one path");
    stat->add_option("config", config_path, "JSON run config")->required();
    stat->add_option("--method", method, "naive | factorized | both")
        ->check(CLI::IsMember({"naive", "factorized", "both"}));
    stat->add_option("--seed", seed_text, "override the config base seed");
    stat->add_option("--statistic", statistic_override, "override: v | u")
        ->check(CLI::IsMember({"v", "u"}));

    std::string family = "theorem";
    std::string x_list, x_linspace, x_logspace, out_path;
    BoundFlags flags;
    auto* bound = app.add_subcommand("bound", "tabulate a tail bound as CSV");
    bound->add_option("--family", family,
                      "theorem | chebyshev-opt | hoeffding | bounded-kernel | bernstein");
    bound->add_option("--x", x_list, "comma-separated grid");
    bound->add_option("--x-linspace", x_linspace, "min:max:count");
    bound->add_option("--x-logspace", x_logspace, "min:max:count (geometric)");
    bound->add_option("--c0", flags.c0, "envelope constant c0 >= 1");
    bound->add_option("--c1", flags.c1, "envelope rate c1 > 0");
    bound->add_option("--C", flags.sup_bound, "basis sup bound");
    bound->add_option("--m", flags.order, "kernel order");
    bound->add_option("--abs-sum", flags.abs_sum, "sum of |coefficients|");
    bound->add_option("--n", flags.n, "sample size");
    bound->add_option("--a", flags.a, "kernel lower bound");
    bound->add_option("--b", flags.b, "kernel upper bound");
    bound->add_option("--B", flags.sup_abs_kernel, "sup |f|");
    bound->add_option("--sigma", flags.sigma, "majorant scale");
    bound->add_option("--L", flags.big_l, "majorant growth");
    bound->add_option("--c1-user", flags.c1_user, "leading constant");
    bound->add_option("--c2-user", flags.c2_user, "exponent constant");
    bound->add_option("--out", out_path, "CSV destination (default stdout)");

    auto* experiment = app.add_subcommand("experiment", "Monte Carlo tail experiment");
    experiment->add_option("config", config_path, "JSON run config")->required();
    experiment->add_option("--seed", seed_text, "override the config base seed");
    experiment->add_option("--out", out_path, "report destination (overrides config)");

    std::string flip_text, transition_text, indices_text, kernel_config;
    long long oracle_n = 4;
    int moment_order = 1;
    auto* oracle = app.add_subcommand("oracle", "exact path-enumeration moments vs bounds");
    oracle->add_option("--flip", flip_text, "2-state symmetric chain flip probability");
    oracle->add_option("--transition", transition_text, "rows 'a,b;c,d'");
    oracle->add_option("--n", oracle_n, "path length");
    oracle->add_option("--indices", indices_text, "basis indices i_1,...,i_L");
    oracle->add_option("--config", kernel_config, "kernel config for even-moment mode");
    oracle->add_option("--moment-order", moment_order, "N in E V^{2N}");

    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<std::uint64_t> seed_override;
        if (!seed_text.empty()) seed_override = std::stoull(seed_text);

        if (kernel_check->parsed()) {
            return cmd_kernel_check(config_path, tolerance, grid_points, quadrature_nodes);
        }
        if (stat->parsed()) {
            return cmd_stat(config_path, method, seed_override, statistic_override);
        }
        if (bound->parsed()) {
            std::vector<double> grid = parse_double_list(x_list);
            auto expand = [&](const std::string& text, bool geometric) {
                if (text.empty()) return;
                const auto parts = parse_double_list(
                    [&] {  // accept ':' separators
                        std::string s = text;
                        for (char& c : s) {
                            if (c == ':') c = ',';
                        }
                        return s;
                    }());
                if (parts.size() != 3) throw ustat::ConfigError("bound: grid spec is min:max:count");
                const int count = static_cast<int>(parts[2]);
                for (int i = 0; i < count; ++i) {
                    const double s = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
                    grid.push_back(geometric
                                       ? parts[0] * std::pow(parts[1] / parts[0], s)
                                       : parts[0] + (parts[1] - parts[0]) * s);
                }
            };
            expand(x_linspace, false);
            expand(x_logspace, true);
            return cmd_bound(family, grid, flags, out_path);
        }
        if (experiment->parsed()) {
            return cmd_experiment(config_path, threads, seed_override, out_path);
        }
        if (oracle->parsed()) {
            return cmd_oracle(flip_text, transition_text, oracle_n, indices_text, kernel_config,
                              moment_order);
        }
        return kExitInput;
    } catch (const ustat::BudgetError& error) {
        std::cerr << "budget error: " << error.what() << "\n";
        return kExitBudget;
    } catch (const ustat::ConfigError& error) {
        std::cerr << "config error: " << error.what() << "\n";
        return kExitInput;
    } catch (const ustat::HypothesisError& error) {
        std::cerr << "hypothesis error: " << error.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& error) {
        std::cerr << "input error: " << error.what() << "\n";
        return kExitInput;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return kExitViolation;
    }
}
