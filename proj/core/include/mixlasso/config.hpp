#pragma once

// Experiment configuration and its key-value text format.
//
// One `key = value` setting per line, `#` starts a comment. Keys are dotted
// (`mixture.n`, `theorem.alpha`, ...); the complete list with defaults is
// produced by `to_text(ExperimentConfig{})`. The file must declare
// `schema_version = 1`.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mixlasso/mixture.hpp"
#include "mixlasso/proxy.hpp"
#include "mixlasso/theory.hpp"

namespace mixlasso {

inline constexpr int kSchemaVersion = 1;

enum class CenterSource { gaussian, orthonormal, file };

struct SolverConfig {
    std::optional<double> lambda;  // unset: 2 sigma sqrt(2 alpha log p)
    double tol = 1e-9;
    int max_iter = 50000;
    double kkt_tol = 1e-6;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    MixtureSpec spec{200, 2000, 40, 8, 1e-3, {}};
    TheoremParams params;
    CenterSource center_source = CenterSource::orthonormal;
    std::string center_file;
    bool redraw_centers = false;
    TruthRule truth;
    double sigma = 0.1;
    SolverConfig solver;
    long trials = 1;
    std::uint64_t master_seed = 0;
    int threads = 1;
    std::string out_dir = "out";

    void validate() const;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Applies one `key = value` setting; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Applies an override of the form "key=value".
void apply_override(ExperimentConfig& config, std::string_view assignment);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c. Runtime-only
/// settings (threads, output directory) are omitted when `include_runtime` is
/// false, so the echo stored in data files does not depend on them.
std::string to_text(const ExperimentConfig& config, bool include_runtime = true);

std::string_view to_string(CenterSource source);

}  // namespace mixlasso
