#include "ustat/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ustat/errors.hpp"

namespace ustat {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& message) {
    throw ConfigError(where.empty() ? message : message + " at " + where);
}

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& pointer) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) {
            fail(pointer + "/" + key, "unknown key '" + key + "'");
        }
    }
}

double as_number(const json& value, const std::string& pointer) {
    if (!value.is_number()) fail(pointer, "expected a number");
    return value.get<double>();
}

long long as_integer(const json& value, const std::string& pointer) {
    if (!value.is_number_integer()) fail(pointer, "expected an integer");
    return value.get<long long>();
}

std::string as_string(const json& value, const std::string& pointer) {
    if (!value.is_string()) fail(pointer, "expected a string");
    return value.get<std::string>();
}

Eigen::VectorXd as_vector(const json& value, const std::string& pointer) {
    if (!value.is_array()) fail(pointer, "expected an array of numbers");
    Eigen::VectorXd out(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = as_number(value[i], pointer);
    }
    return out;
}

OrthonormalBasis parse_basis(const json& section) {
    reject_unknown_keys(section, {"family", "max_index", "probabilities"}, "/basis");
    const std::string family = as_string(section.at("family"), "/basis/family");
    if (family == "cosine" || family == "hermite") {
        if (!section.contains("max_index")) fail("/basis", "missing max_index");
        const int max_index =
            static_cast<int>(as_integer(section.at("max_index"), "/basis/max_index"));
        return family == "cosine" ? make_cosine_basis(max_index) : make_hermite_basis(max_index);
    }
    if (family == "finite_gs") {
        if (!section.contains("probabilities")) fail("/basis", "missing probabilities");
        return gram_schmidt_finite(
            as_vector(section.at("probabilities"), "/basis/probabilities"));
    }
    fail("/basis/family", "unknown basis family '" + family + "'");
}

void parse_kernel(const json& section, const OrthonormalBasis& basis, RunConfig& config) {
    reject_unknown_keys(section, {"order", "entries", "raw_preset", "truncation", "decompose"},
                        "/kernel");
    if (!section.contains("order")) fail("/kernel", "missing order");
    const int order = static_cast<int>(as_integer(section.at("order"), "/kernel/order"));

    if (section.contains("raw_preset")) {
        if (section.contains("entries")) {
            fail("/kernel", "give either entries or raw_preset, not both");
        }
        RawKernelSpec raw;
        raw.preset = as_string(section.at("raw_preset"), "/kernel/raw_preset");
        raw.order = order;
        if (section.contains("truncation")) {
            raw.truncation =
                static_cast<int>(as_integer(section.at("truncation"), "/kernel/truncation"));
        }
        if (section.contains("decompose")) {
            if (!section.at("decompose").is_boolean()) fail("/kernel/decompose", "expected bool");
            raw.decompose = section.at("decompose").get<bool>();
        }
        make_raw_preset(raw.preset, basis, raw.order);  // validate early
        config.raw_kernel = raw;
        return;
    }

    if (!section.contains("entries")) fail("/kernel", "missing entries (or raw_preset)");
    const json& entries = section.at("entries");
    if (!entries.is_array()) fail("/kernel/entries", "expected an array of [indices, value]");
    CoefficientTensor::EntryMap map;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string pointer = "/kernel/entries/" + std::to_string(i);
        const json& pair = entries[i];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_array()) {
            fail(pointer, "expected [[i1..im], value]");
        }
        std::vector<int> indices;
        for (const auto& idx : pair[0]) {
            indices.push_back(static_cast<int>(as_integer(idx, pointer)));
        }
        map[indices] = as_number(pair[1], pointer);
    }
    try {
        config.kernel = CanonicalKernel(basis, CoefficientTensor(order, std::move(map)));
    } catch (const std::invalid_argument& error) {
        fail("/kernel", error.what());
    }
}

ProcessSpec parse_process(const json& section) {
    reject_unknown_keys(section,
                        {"kind", "space", "probabilities", "window", "phi", "uniformized",
                         "transition", "stationary"},
                        "/process");
    const std::string kind = as_string(section.at("kind"), "/process/kind");
    try {
        if (kind == "iid") {
            const std::string space =
                section.contains("space") ? as_string(section.at("space"), "/process/space")
                                          : "unit_interval";
            if (space == "unit_interval") return ProcessSpec::iid_uniform();
            if (space == "real_line") return ProcessSpec::iid_normal();
            if (space == "finite") {
                if (!section.contains("probabilities")) fail("/process", "missing probabilities");
                return ProcessSpec::iid_finite(
                    as_vector(section.at("probabilities"), "/process/probabilities"));
            }
            fail("/process/space", "unknown space '" + space + "'");
        }
        if (kind == "m_dependent") {
            if (!section.contains("window")) fail("/process", "missing window");
            return ProcessSpec::m_dependent(
                static_cast<int>(as_integer(section.at("window"), "/process/window")));
        }
        if (kind == "gaussian_ar1") {
            if (!section.contains("phi")) fail("/process", "missing phi");
            bool uniformized = false;
            if (section.contains("uniformized")) {
                if (!section.at("uniformized").is_boolean()) {
                    fail("/process/uniformized", "expected bool");
                }
                uniformized = section.at("uniformized").get<bool>();
            }
            return ProcessSpec::gaussian_ar1(as_number(section.at("phi"), "/process/phi"),
                                             uniformized);
        }
        if (kind == "finite_markov") {
            if (!section.contains("transition")) fail("/process", "missing transition");
            const json& rows = section.at("transition");
            if (!rows.is_array() || rows.empty()) {
                fail("/process/transition", "expected an array of rows");
            }
            Eigen::MatrixXd transition(rows.size(), rows[0].size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const Eigen::VectorXd row =
                    as_vector(rows[r], "/process/transition/" + std::to_string(r));
                if (row.size() != transition.cols()) {
                    fail("/process/transition", "ragged transition matrix");
                }
                transition.row(static_cast<Eigen::Index>(r)) = row.transpose();
            }
            std::optional<Eigen::VectorXd> stationary;
            if (section.contains("stationary")) {
                stationary = as_vector(section.at("stationary"), "/process/stationary");
            }
            return ProcessSpec::finite_markov(std::move(transition), std::move(stationary));
        }
    } catch (const std::invalid_argument& error) {
        fail("/process", error.what());
    }
    fail("/process/kind", "unknown process kind '" + kind + "'");
}

RunConfig::ExperimentSection parse_experiment(const json& section) {
    reject_unknown_keys(section, {"statistic", "n", "replications", "x_grid", "base_seed"},
                        "/experiment");
    RunConfig::ExperimentSection exp;
    if (section.contains("statistic")) {
        const std::string stat = as_string(section.at("statistic"), "/experiment/statistic");
        if (stat == "v") {
            exp.statistic = StatKind::VStat;
        } else if (stat == "u") {
            exp.statistic = StatKind::UStat;
        } else {
            fail("/experiment/statistic", "expected 'v' or 'u'");
        }
    }
    if (!section.contains("n")) fail("/experiment", "missing n");
    exp.n = as_integer(section.at("n"), "/experiment/n");
    if (!section.contains("replications")) fail("/experiment", "missing replications");
    exp.replications =
        static_cast<int>(as_integer(section.at("replications"), "/experiment/replications"));
    if (!section.contains("x_grid")) fail("/experiment", "missing x_grid");
    const Eigen::VectorXd grid = as_vector(section.at("x_grid"), "/experiment/x_grid");
    exp.x_grid.assign(grid.data(), grid.data() + grid.size());
    if (section.contains("base_seed")) {
        exp.base_seed =
            static_cast<std::uint64_t>(as_integer(section.at("base_seed"), "/experiment/base_seed"));
    }
    return exp;
}

std::pair<int, int> line_column_of(const std::string& text, std::size_t byte) {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

RawKernel make_raw_preset(const std::string& name, const OrthonormalBasis& basis, int order) {
    auto e1 = [basis](double t) { return basis.evaluate(1, t); };
    if (name == "one") {
        return [](std::span<const double>) { return 1.0; };
    }
    if (order != 2) {
        throw std::invalid_argument("raw preset '" + name + "' is defined for order 2");
    }
    if (name == "product_e1") {
        return [e1](std::span<const double> p) { return e1(p[0]) * e1(p[1]); };
    }
    if (name == "sum_e1") {
        return [e1](std::span<const double> p) { return e1(p[0]) + e1(p[1]); };
    }
    if (name == "shifted_product_e1") {
        return [e1](std::span<const double> p) { return (e1(p[0]) + 1.0) * (e1(p[1]) + 1.0); };
    }
    throw std::invalid_argument("unknown raw kernel preset '" + name + "'");
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    json document;
    try {
        document = json::parse(text);
    } catch (const json::parse_error& error) {
        const auto [line, column] = line_column_of(text, error.byte);
        throw ConfigError("parse error in '" + path.string() + "' at line " +
                          std::to_string(line) + ", column " + std::to_string(column) + ": " +
                          error.what());
    }
    if (!document.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(document, {"basis", "kernel", "process", "experiment", "output"}, "");

    RunConfig config;
    config.canonical_dump = document.dump();
    if (document.contains("basis")) config.basis = parse_basis(document.at("basis"));
    if (document.contains("kernel")) {
        if (!config.basis) throw ConfigError("kernel section requires a basis section");
        parse_kernel(document.at("kernel"), *config.basis, config);
    }
    if (document.contains("process")) config.process = parse_process(document.at("process"));
    if (document.contains("experiment")) {
        config.experiment = parse_experiment(document.at("experiment"));
    }
    if (document.contains("output")) {
        const json& output = document.at("output");
        reject_unknown_keys(output, {"path"}, "/output");
        if (!output.contains("path")) fail("/output", "missing path");
        config.output_path = as_string(output.at("path"), "/output/path");
    }
    return config;
}

TailExperimentConfig make_tail_config(const RunConfig& config) {
    if (!config.kernel) throw ConfigError("experiment requires a series kernel section");
    if (!config.process) throw ConfigError("experiment requires a process section");
    if (!config.experiment) throw ConfigError("experiment section missing");
    TailExperimentConfig tail{*config.process,       *config.kernel,
                              config.experiment->statistic, config.experiment->n,
                              config.experiment->replications, config.experiment->x_grid,
                              config.experiment->base_seed};
    return tail;
}

}  // namespace ustat
