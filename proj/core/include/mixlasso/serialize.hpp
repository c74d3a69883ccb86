#pragma once

// JSON / CSV persistence for trial records, summaries and design instances.
// Doubles are written in shortest round-trip form in JSON and with 17
// significant digits in CSV, so re-reading a file reproduces every value.

#include <string>
#include <string_view>

#include "mixlasso/harness.hpp"

namespace mixlasso {

/// One-line JSON object (no trailing newline).
std::string trial_to_json(const TrialResult& trial);
TrialResult trial_from_json(std::string_view line);

std::string summary_to_json(const ExperimentSummary& summary);

/// The config text stored in a summary.json document.
std::string config_echo_from_summary(std::string_view summary_json);

/// Column order of trials.csv.
std::string csv_header();
std::string csv_row(const TrialResult& trial);

/// Design instance (and optionally the ground truth) as JSON. Matrices are
/// referenced by seed only unless `embed_matrices` is set, in which case X,
/// beta and y are stored as base64 of little-endian float64, column-major.
std::string instance_to_json(const ExperimentConfig& config, long trial_index, const TrialArtifacts& artifacts,
                             bool embed_matrices);

struct EmbeddedProblem {
    Matrix X;
    Vector y;
    Vector beta;  // empty when absent
};

/// Reads the embedded matrices back from instance_to_json output.
EmbeddedProblem problem_from_json(std::string_view text);

std::string base64_encode_doubles(const double* data, std::size_t count);
std::vector<double> base64_decode_doubles(std::string_view text);

}  // namespace mixlasso
