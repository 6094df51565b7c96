#include "ustat/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ustat/accum.hpp"
#include "ustat/errors.hpp"

namespace ustat {

namespace {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string describe_process(const ProcessSpec& process) {
    std::ostringstream out;
    switch (process.kind()) {
        case ProcessKind::IID:
            out << "iid/" << static_cast<int>(process.marginal_kind());
            if (process.marginal_kind() == MarginalKind::FiniteVector) {
                for (Eigen::Index i = 0; i < process.stationary().size(); ++i) {
                    out << "," << format_double(process.stationary()(i));
                }
            }
            break;
        case ProcessKind::MDependent:
            out << "mdep/" << process.window();
            break;
        case ProcessKind::GaussianAR1:
            out << "ar1/" << format_double(process.phi()) << "/" << process.uniformized();
            break;
        case ProcessKind::FiniteMarkov:
            out << "markov";
            for (Eigen::Index r = 0; r < process.transition().rows(); ++r) {
                for (Eigen::Index c = 0; c < process.transition().cols(); ++c) {
                    out << "," << format_double(process.transition()(r, c));
                }
            }
            break;
    }
    return out.str();
}

std::string describe_kernel(const CanonicalKernel& kernel) {
    std::ostringstream out;
    out << "m=" << kernel.order() << ";family=" << static_cast<int>(kernel.basis().family())
        << ";max_index=" << kernel.basis().max_index();
    for (const auto& [indices, value] : kernel.coefficients().entries()) {
        out << ";";
        for (int idx : indices) out << idx << ".";
        out << "=" << format_double(value);
    }
    return out.str();
}

void validate_marginal_match(const OrthonormalBasis& basis, const ProcessSpec& process) {
    if (!(basis.space() == process.space())) {
        throw std::invalid_argument("experiment: basis and process sample spaces differ");
    }
    if (basis.marginal_kind() != process.marginal_kind()) {
        throw std::invalid_argument("experiment: basis marginal does not match the process");
    }
    if (basis.marginal_kind() == MarginalKind::FiniteVector) {
        const auto diff =
            (basis.marginal_probabilities() - process.stationary()).cwiseAbs().maxCoeff();
        if (diff > 1e-9) {
            throw std::invalid_argument(
                "experiment: basis probabilities differ from the stationary law");
        }
    }
}

// Runs fn(r) for r in [0, count) across `threads` workers; results must be
// written into caller-owned slots indexed by r so scheduling cannot affect
// the outcome. First exception wins and is rethrown after join.
void parallel_replications(int count, int threads, const std::function<void(int)>& fn) {
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int r = 0; r < count; ++r) fn(r);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> aborted{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        while (!aborted.load()) {
            const int r = next.fetch_add(1);
            if (r >= count) break;
            try {
                fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                aborted.store(true);
                break;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

bool serially_independent(const ProcessSpec& process) {
    const auto envelope = process.mixing_envelope();
    return envelope.zero_beyond_lag && *envelope.zero_beyond_lag == 0;
}

}  // namespace

std::uint64_t config_hash(const TailExperimentConfig& config) {
    std::ostringstream out;
    out << describe_process(config.process) << "|" << describe_kernel(config.kernel) << "|"
        << (config.statistic == StatKind::VStat ? "V" : "U") << "|n=" << config.n
        << "|R=" << config.replications << "|seed=" << config.base_seed << "|x=";
    for (double x : config.x_grid) out << format_double(x) << ",";
    return fnv1a(out.str());
}

double ExperimentReport::max_empirical_to_bound_ratio() const {
    double worst = 0.0;
    for (const auto& record : records) {
        if (record.empirical_tail == 0.0) continue;
        worst = std::max(worst, record.empirical_tail / record.theorem_bound);
    }
    return worst;
}

ExperimentReport run_tail_experiment(const TailExperimentConfig& config, int threads) {
    if (config.replications < 1) {
        throw std::invalid_argument("experiment: replications >= 1 required");
    }
    if (config.n < 1) throw std::invalid_argument("experiment: n >= 1 required");
    if (config.x_grid.empty()) throw std::invalid_argument("experiment: empty x grid");
    for (std::size_t i = 0; i < config.x_grid.size(); ++i) {
        if (!(config.x_grid[i] > 0.0) ||
            (i > 0 && !(config.x_grid[i] > config.x_grid[i - 1]))) {
            throw std::invalid_argument(
                "experiment: x grid must be strictly increasing and positive");
        }
    }
    if (config.statistic == StatKind::HoeffdingU) {
        throw std::invalid_argument("experiment: statistic must be VStat or UStat");
    }
    validate_marginal_match(config.kernel.basis(), config.process);
    if (!config.kernel.basis().sup_bound_finite()) {
        throw HypothesisError(
            "condition (A) violated: theorem bounds need a finite basis sup bound");
    }
    if (config.statistic == StatKind::UStat && !config.process.ac_certified() &&
        !config.kernel.basis().continuous()) {
        throw HypothesisError(
            "condition (AC) violated: process lacks certification and the kernel is not "
            "continuous");
    }
    if (config.statistic == StatKind::UStat && config.n < config.kernel.order()) {
        throw std::invalid_argument("experiment: U-statistic needs n >= m");
    }

    const auto started = std::chrono::steady_clock::now();
    const BoundParameters params =
        bound_parameters_for(config.kernel, config.process.mixing_envelope());

    std::vector<double> magnitudes(config.replications);
    parallel_replications(config.replications, threads, [&](int r) {
        const SamplePath path =
            generate(config.process, config.n, config.base_seed + static_cast<std::uint64_t>(r));
        const StatisticResult result = config.statistic == StatKind::VStat
                                           ? v_stat_factorized(config.kernel, path.values)
                                           : u_stat(config.kernel, path.values);
        magnitudes[r] = std::abs(result.value);
    });

    // Hoeffding's classical bound applies to the m=1 mean of a bounded kernel
    // of independent observations; the V normalization rescales t by sqrt(n),
    // and the two-sided tail doubles the one-sided bound.
    const bool hoeffding_applies =
        config.kernel.order() == 1 && serially_independent(config.process);
    const double kernel_sup = params.sup_bound * params.abs_sum;

    ExperimentReport report;
    report.constants = params;
    report.config_hash = config_hash(config);
    report.n = config.n;
    report.replications = config.replications;
    report.statistic = config.statistic;
    report.records.reserve(config.x_grid.size());
    const double r_count = static_cast<double>(config.replications);
    for (double x : config.x_grid) {
        TailRecord record;
        record.x = x;
        long long exceed = 0;
        for (double magnitude : magnitudes) {
            if (magnitude > x) ++exceed;
        }
        record.empirical_tail = static_cast<double>(exceed) / r_count;
        record.mc_stderr =
            std::sqrt(record.empirical_tail * (1.0 - record.empirical_tail) / r_count);
        record.theorem_bound = theorem_bound(x, params);
        if (hoeffding_applies && kernel_sup > 0.0) {
            const double t = x / std::sqrt(static_cast<double>(config.n));
            record.hoeffding_bound = std::min(
                1.0, 2.0 * hoeffding_bound(t, config.n, 1, -kernel_sup, kernel_sup));
        } else {
            record.hoeffding_bound = std::numeric_limits<double>::quiet_NaN();
        }
        report.records.push_back(record);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

namespace {

struct ChainModel {
    int alphabet = 0;
    Eigen::VectorXd initial;     // pi
    Eigen::MatrixXd transition;  // rows = pi for i.i.d. specs
};

ChainModel chain_model(const ProcessSpec& process) {
    ChainModel model;
    if (process.kind() == ProcessKind::FiniteMarkov) {
        model.alphabet = process.space().alphabet_size;
        model.initial = process.stationary();
        model.transition = process.transition();
    } else if (process.kind() == ProcessKind::IID &&
               process.marginal_kind() == MarginalKind::FiniteVector) {
        model.alphabet = process.space().alphabet_size;
        model.initial = process.stationary();
        model.transition = model.initial.transpose().replicate(model.alphabet, 1);
    } else {
        throw std::invalid_argument("exact oracle: finite chain or finite i.i.d. spec required");
    }
    return model;
}

void check_enumeration_budget(int alphabet, Eigen::Index n, double budget) {
    if (n < 1) throw std::invalid_argument("exact oracle: n >= 1 required");
    if (std::pow(static_cast<double>(alphabet), static_cast<double>(n)) > budget) {
        throw BudgetError("exact oracle: s^n exceeds the enumeration budget");
    }
}

// Enumerates all s^n chain paths in lexicographic order, invoking
// visit(path_states, probability).
template <typename Visitor>
void enumerate_paths(const ChainModel& model, Eigen::Index n, Visitor&& visit) {
    std::vector<int> states(n, 0);
    while (true) {
        double probability = model.initial(states[0]);
        for (Eigen::Index t = 1; t < n; ++t) {
            probability *= model.transition(states[t - 1], states[t]);
        }
        visit(states, probability);
        Eigen::Index k = n - 1;
        for (; k >= 0; --k) {
            if (++states[k] < model.alphabet) break;
            states[k] = 0;
        }
        if (k < 0) break;
    }
}

}  // namespace

double exact_moment_oracle(const ProcessSpec& process, const OrthonormalBasis& basis,
                           std::span<const int> indices, Eigen::Index n, double path_budget) {
    const ChainModel model = chain_model(process);
    check_enumeration_budget(model.alphabet, n, path_budget);
    if (basis.space() != process.space() ||
        basis.marginal_kind() != MarginalKind::FiniteVector ||
        (basis.marginal_probabilities() - model.initial).cwiseAbs().maxCoeff() > 1e-9) {
        throw std::invalid_argument("exact oracle: basis marginal does not match the chain");
    }
    if (indices.empty()) throw std::invalid_argument("exact oracle: empty index list");
    for (int index : indices) {
        if (index < 1 || index > basis.max_index()) {
            throw std::invalid_argument("exact oracle: index outside 1..max_index");
        }
    }

    // Table of e_i(x) per alphabet point for the requested indices.
    Eigen::MatrixXd table(static_cast<Eigen::Index>(indices.size()), model.alphabet);
    for (std::size_t k = 0; k < indices.size(); ++k) {
        for (int x = 0; x < model.alphabet; ++x) {
            table(static_cast<Eigen::Index>(k), x) = basis.evaluate(indices[k], x);
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    KahanAccumulator expectation;
    enumerate_paths(model, n, [&](const std::vector<int>& states, double probability) {
        double product = probability;
        for (Eigen::Index k = 0; k < table.rows(); ++k) {
            double partial = 0.0;
            for (Eigen::Index t = 0; t < n; ++t) partial += table(k, states[t]);
            product *= scale * partial;
        }
        expectation.add(product);
    });
    return expectation.value();
}

double exact_even_moment_vstat(const ProcessSpec& process, const CanonicalKernel& kernel,
                               Eigen::Index n, int moment_order, double path_budget) {
    if (moment_order < 1) throw std::invalid_argument("exact oracle: N >= 1 required");
    const ChainModel model = chain_model(process);
    check_enumeration_budget(model.alphabet, n, path_budget);
    validate_marginal_match(kernel.basis(), process);

    Eigen::VectorXd path(n);
    KahanAccumulator expectation;
    enumerate_paths(model, n, [&](const std::vector<int>& states, double probability) {
        for (Eigen::Index t = 0; t < n; ++t) path(t) = states[t];
        const double v = v_stat_factorized(kernel, path).value;
        expectation.add(probability * std::pow(v, 2 * moment_order));
    });
    return expectation.value();
}

void write_report(const ExperimentReport& report, const std::filesystem::path& destination) {
    if (destination.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(destination.parent_path(), ec);
    }
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        throw std::runtime_error("write_report: cannot open '" + destination.string() + "'");
    }
    out << "x,empirical_tail,mc_stderr,theorem_bound,hoeffding_bound\n";
    for (const auto& record : report.records) {
        out << format_double(record.x) << "," << format_double(record.empirical_tail) << ","
            << format_double(record.mc_stderr) << "," << format_double(record.theorem_bound)
            << "," << format_double(record.hoeffding_bound) << "\n";
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write_report: write failed for '" + destination.string() + "'");
    }
}

}  // namespace ustat
