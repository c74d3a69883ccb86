#include "mixlasso/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace mixlasso {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
    // std::from_chars for double is unavailable on some standard libraries; strtod on a copy.
    const std::string copy(value);
    char* end = nullptr;
    const double out = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size())
        throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + copy + "'");
    return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config: '" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: '" + std::string(key) + "' expects true/false, got '" + std::string(value) + "'");
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

}  // namespace

std::string_view to_string(CenterSource source) {
    switch (source) {
        case CenterSource::gaussian: return "gaussian";
        case CenterSource::orthonormal: return "orthonormal";
        case CenterSource::file: return "file";
    }
    return "gaussian";
}

void ExperimentConfig::validate() const {
    if (schema_version != kSchemaVersion)
        throw ConfigError("config: unsupported schema_version " + std::to_string(schema_version));
    if (trials < 1) throw ConfigError("config: experiment.trials must be >= 1");
    if (threads < 1) throw ConfigError("config: experiment.threads must be >= 1");
    if (!(sigma > 0.0)) throw ConfigError("config: truth.sigma must be positive");
    if (center_source == CenterSource::file && center_file.empty())
        throw ConfigError("config: centers.file is required when centers.source = file");
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    key = trim(key);
    if (key == "schema_version") c.schema_version = to_int<int>(key, value);
    else if (key == "mixture.n") c.spec.n = to_int<int>(key, value);
    else if (key == "mixture.p") c.spec.p = to_int<int>(key, value);
    else if (key == "mixture.K") c.spec.K = to_int<int>(key, value);
    else if (key == "mixture.s_star") c.spec.s_star = to_int<int>(key, value);
    else if (key == "mixture.sigma_frak") c.spec.sigma_frak = to_double(key, value);
    else if (key == "mixture.weights") {
        c.spec.weights.clear();
        if (value != "uniform") {
            std::size_t start = 0;
            while (start <= value.size()) {
                const auto comma = value.find(',', start);
                const auto item = trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
                c.spec.weights.push_back(to_double(key, item));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
        }
    } else if (key == "centers.source") {
        if (value == "gaussian") c.center_source = CenterSource::gaussian;
        else if (value == "orthonormal") c.center_source = CenterSource::orthonormal;
        else if (value == "file") c.center_source = CenterSource::file;
        else throw ConfigError("config: centers.source must be gaussian, orthonormal or file");
    } else if (key == "centers.file") c.center_file = std::string(value);
    else if (key == "centers.redraw") c.redraw_centers = to_bool(key, value);
    else if (key == "theorem.alpha") c.params.alpha = to_double(key, value);
    else if (key == "theorem.r") c.params.r = to_double(key, value);
    else if (key == "theorem.vartheta_star") c.params.vartheta_star = to_double(key, value);
    else if (key == "theorem.nu") c.params.nu = to_int<int>(key, value);
    else if (key == "theorem.c_chi") {
        if (value == "auto") c.params.c_chi.reset();
        else c.params.c_chi = to_double(key, value);
    } else if (key == "theorem.dev_C") c.params.dev_C = to_double(key, value);
    else if (key == "theorem.dev_c") c.params.dev_c = to_double(key, value);
    else if (key == "theorem.rho_C") {
        if (value == "measured") c.params.rho_C.reset();
        else c.params.rho_C = to_double(key, value);
    } else if (key == "truth.sigma") c.sigma = to_double(key, value);
    else if (key == "truth.s") c.truth.s = value == "auto" ? -1 : to_int<int>(key, value);
    else if (key == "truth.support") {
        if (value == "one_per_cluster") c.truth.support = TruthRule::Support::one_per_cluster;
        else if (value == "uniform") c.truth.support = TruthRule::Support::uniform;
        else throw ConfigError("config: truth.support must be one_per_cluster or uniform");
    } else if (key == "truth.magnitude") {
        // constant:<v>  or  uniform:<low>,<high>
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) throw ConfigError("config: truth.magnitude expects kind:values");
        const auto kind = value.substr(0, colon);
        const auto args = value.substr(colon + 1);
        if (kind == "constant") {
            c.truth.magnitude = {MagnitudeRule::Kind::constant, to_double(key, args), to_double(key, args)};
        } else if (kind == "uniform") {
            const auto comma = args.find(',');
            if (comma == std::string_view::npos) throw ConfigError("config: uniform magnitude needs low,high");
            c.truth.magnitude = {MagnitudeRule::Kind::uniform, to_double(key, trim(args.substr(0, comma))),
                                 to_double(key, trim(args.substr(comma + 1)))};
        } else {
            throw ConfigError("config: truth.magnitude kind must be constant or uniform");
        }
    } else if (key == "truth.random_signs") c.truth.random_signs = to_bool(key, value);
    else if (key == "solver.lambda") {
        if (value == "default") c.solver.lambda.reset();
        else c.solver.lambda = to_double(key, value);
    } else if (key == "solver.tol") c.solver.tol = to_double(key, value);
    else if (key == "solver.max_iter") c.solver.max_iter = to_int<int>(key, value);
    else if (key == "solver.kkt_tol") c.solver.kkt_tol = to_double(key, value);
    else if (key == "experiment.trials") c.trials = to_int<long>(key, value);
    else if (key == "experiment.seed") c.master_seed = to_int<std::uint64_t>(key, value);
    else if (key == "experiment.threads") c.threads = to_int<int>(key, value);
    else if (key == "output.dir") c.out_dir = std::string(value);
    else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override must look like key=value: " + std::string(assignment));
    apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    bool saw_version = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key == "schema_version") saw_version = true;
        apply_setting(config, key, line.substr(eq + 1));
    }
    if (!saw_version) throw ConfigError("config: missing schema_version");
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& c, bool include_runtime) {
    std::string out;
    auto put = [&](std::string_view key, const std::string& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    put("schema_version", std::to_string(c.schema_version));
    put("mixture.n", std::to_string(c.spec.n));
    put("mixture.p", std::to_string(c.spec.p));
    put("mixture.K", std::to_string(c.spec.K));
    put("mixture.s_star", std::to_string(c.spec.s_star));
    put("mixture.sigma_frak", fmt_double(c.spec.sigma_frak));
    if (c.spec.weights.empty()) {
        put("mixture.weights", "uniform");
    } else {
        std::string w;
        for (std::size_t i = 0; i < c.spec.weights.size(); ++i) w += (i ? "," : "") + fmt_double(c.spec.weights[i]);
        put("mixture.weights", w);
    }
    put("centers.source", std::string(to_string(c.center_source)));
    if (!c.center_file.empty()) put("centers.file", c.center_file);
    put("centers.redraw", c.redraw_centers ? "true" : "false");
    put("theorem.alpha", fmt_double(c.params.alpha));
    put("theorem.r", fmt_double(c.params.r));
    put("theorem.vartheta_star", fmt_double(c.params.vartheta_star));
    put("theorem.nu", std::to_string(c.params.nu));
    put("theorem.c_chi", c.params.c_chi ? fmt_double(*c.params.c_chi) : "auto");
    put("theorem.dev_C", fmt_double(c.params.dev_C));
    put("theorem.dev_c", fmt_double(c.params.dev_c));
    put("theorem.rho_C", c.params.rho_C ? fmt_double(*c.params.rho_C) : "measured");
    put("truth.sigma", fmt_double(c.sigma));
    put("truth.s", c.truth.s < 0 ? "auto" : std::to_string(c.truth.s));
    put("truth.support", c.truth.support == TruthRule::Support::one_per_cluster ? "one_per_cluster" : "uniform");
    if (c.truth.magnitude.kind == MagnitudeRule::Kind::constant)
        put("truth.magnitude", "constant:" + fmt_double(c.truth.magnitude.low));
    else
        put("truth.magnitude",
            "uniform:" + fmt_double(c.truth.magnitude.low) + "," + fmt_double(c.truth.magnitude.high));
    put("truth.random_signs", c.truth.random_signs ? "true" : "false");
    put("solver.lambda", c.solver.lambda ? fmt_double(*c.solver.lambda) : "default");
    put("solver.tol", fmt_double(c.solver.tol));
    put("solver.max_iter", std::to_string(c.solver.max_iter));
    put("solver.kkt_tol", fmt_double(c.solver.kkt_tol));
    put("experiment.trials", std::to_string(c.trials));
    put("experiment.seed", std::to_string(c.master_seed));
    if (include_runtime) {
        put("experiment.threads", std::to_string(c.threads));
        put("output.dir", c.out_dir);
    }
    return out;
}

}  // namespace mixlasso
