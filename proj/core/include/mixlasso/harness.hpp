#pragma once

// Seeded Monte Carlo runner.
//
// Trial i of an experiment uses the stream key derive_seed(master_seed, i)
// and its named children "design", "truth" and "noise". Centers come from the
// child "centers" of the master seed (or of the trial seed when they are
// redrawn per trial), so every trial can be reproduced in isolation.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mixlasso/config.hpp"
#include "mixlasso/lasso.hpp"
#include "mixlasso/mixture.hpp"
#include "mixlasso/proxy.hpp"
#include "mixlasso/stats.hpp"
#include "mixlasso/theory.hpp"

namespace mixlasso {

struct SolverDiagnostics {
    double lambda = 0.0;
    int iterations = 0;
    double objective = 0.0;
    double kkt_infinity = 0.0;
    double duality_gap = 0.0;
};

struct TrialResult {
    long trial_index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // set when !ok

    int s = 0;                    // |T|
    int s_star = 0;               // |T*|
    int clusters_in_support = 0;  // |K_T|
    double prediction_error = 0.0;
    double center_energy = 0.0;   // ||C_T beta_T||
    double signal_energy = 0.0;   // ||X beta||
    double proxy_discrepancy = 0.0;
    double delta_empirical = 0.0;
    double bound_rhs = 0.0;  // with delta_empirical
    bool bound_holds = false;
    bool analytic_available = false;
    double delta_analytic = 0.0;
    double bound_rhs_analytic = 0.0;
    bool bound_holds_analytic = false;
    ConditionReport conditions;
    AssumptionReport assumptions;
    SolverDiagnostics solver;
};

/// Everything drawn for one trial, kept for inspection (CLI `gen`/`verify`).
struct TrialArtifacts {
    CenterMatrix centers;
    DesignInstance instance;
    GroundTruth truth;
    ProxyVector proxy;
    std::optional<LassoSolution> solution;
};

/// Centers for an experiment (or for one trial when `trial_seed` is given and
/// centers are redrawn per trial).
CenterMatrix make_centers(const ExperimentConfig& config, std::optional<std::uint64_t> trial_seed = std::nullopt);

/// Loads a whitespace-separated n x K matrix (one row per line).
Matrix load_matrix_text(const std::string& path);

std::uint64_t trial_seed(const ExperimentConfig& config, long trial_index);

/// Draws design, truth and proxy for trial `trial_index` (no solve).
TrialArtifacts draw_trial(const ExperimentConfig& config, long trial_index, const CenterMatrix* shared_centers = nullptr);

/// Full trial. Errors from any stage are captured into a failed record.
TrialResult run_trial(const ExperimentConfig& config, long trial_index, const CenterMatrix* shared_centers = nullptr,
                      TrialArtifacts* artifacts = nullptr);

struct FrequencyStat {
    std::size_t count = 0;   // occurrences
    std::size_t total = 0;
    double frequency = 0.0;
    Interval wilson;
};

struct QuantileSummary {
    double min = 0.0, q05 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q95 = 0.0, max = 0.0;
};

struct ExperimentSummary {
    std::string config_echo;  // to_text(config, false)
    std::uint64_t master_seed = 0;
    long trials = 0;
    std::size_t failed_trials = 0;
    std::array<FrequencyStat, 4> event_failures{};  // events I..IV not holding
    FrequencyStat bound_violation;                  // empirical delta
    FrequencyStat bound_violation_assumptions_met;
    FrequencyStat bound_violation_assumptions_unmet;
    FrequencyStat analytic_bound_holds;
    FrequencyStat analytic_bound_holds_assumptions_met;
    FrequencyStat analytic_bound_holds_assumptions_unmet;
    std::array<FrequencyStat, 10> assumption_pass{};
    std::size_t decomposition_violations = 0;  // proxy_discrepancy > A + B + A* + B*
    double max_step1_error = 0.0;               // max |step1 - proxy_discrepancy|
    QuantileSummary prediction_error;
    QuantileSummary delta_empirical;
    QuantileSummary delta_analytic;
    QuantileSummary proxy_discrepancy;
    QuantileSummary norm_A, norm_B, norm_A_star, norm_B_star;
};

/// Aggregates trial records; used both after a run and by `report`.
ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials);

/// Runs config.trials trials on config.threads workers. `sink` receives the
/// records in trial order as soon as each prefix is complete.
std::vector<TrialResult> run_trials(const ExperimentConfig& config,
                                    const std::function<void(const TrialResult&)>& sink = {});

struct ExperimentOutput {
    std::vector<TrialResult> trials;
    ExperimentSummary summary;
};

/// Runs the experiment and writes, under config.out_dir:
///   trials.jsonl   one TrialResult per line
///   summary.json   ExperimentSummary
///   trials.csv     one row per trial (see csv_header())
///   meta.json      timestamp and host; the only non-reproducible file
/// Throws Error naming the path on I/O failure.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Re-reads trials.jsonl from `dir` and rewrites summary.json and trials.csv.
ExperimentOutput report_from_directory(const std::string& dir, const std::string& out_dir);

}  // namespace mixlasso
