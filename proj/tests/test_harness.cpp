#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixlasso/harness.hpp"
#include "mixlasso/serialize.hpp"

using namespace mixlasso;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(long trials = 4) {
    ExperimentConfig c = load_config(MIXLASSO_SOURCE_DIR "/configs/small.cfg");
    c.trials = trials;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mixlasso_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(RunTrial, Deterministic) {
    const ExperimentConfig c = small_config();
    for (long i = 0; i < 3; ++i) EXPECT_EQ(trial_to_json(run_trial(c, i)), trial_to_json(run_trial(c, i)));
}

TEST(RunTrial, SharedCentersMatchOwn) {
    const ExperimentConfig c = small_config();
    const CenterMatrix centers = make_centers(c);
    EXPECT_EQ(trial_to_json(run_trial(c, 2, &centers)), trial_to_json(run_trial(c, 2)));
}

TEST(RunTrial, RecordInvariants) {
    const ExperimentConfig c = small_config();
    for (long i = 0; i < 4; ++i) {
        const TrialResult t = run_trial(c, i);
        ASSERT_TRUE(t.ok) << t.error;
        EXPECT_EQ(t.bound_holds, t.prediction_error <= t.bound_rhs);
        EXPECT_EQ(t.seed, trial_seed(c, i));
        for (double v : {t.prediction_error, t.bound_rhs, t.proxy_discrepancy, t.delta_empirical, t.center_energy,
                         t.signal_energy, t.conditions.comp_size, t.solver.objective})
            EXPECT_TRUE(std::isfinite(v));
        EXPECT_NEAR(t.delta_empirical, t.proxy_discrepancy / t.center_energy, 1e-15);
        EXPECT_EQ(t.s_star, c.spec.s_star);
        if (t.analytic_available) EXPECT_EQ(t.bound_holds_analytic, t.prediction_error <= t.bound_rhs_analytic);
    }
}

TEST(RunTrial, TooManyActiveClustersGivesFailedRecord) {
    ExperimentConfig c = small_config(1);
    c.spec.s_star = c.spec.K + 1;
    const TrialResult t = run_trial(c, 0);
    EXPECT_FALSE(t.ok);
    EXPECT_NE(t.error.find("s_star"), std::string::npos);
    const auto all = run_trials(c);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(summarize(c, all).failed_trials, 1u);
}

TEST(RunTrial, NoiselessZeroVarianceLimit) {
    ExperimentConfig c = small_config(1);
    c.spec.sigma_frak = 0.0;
    c.sigma = 1e-12;
    c.solver.lambda = 1e-9;
    for (long i = 0; i < 3; ++i) {
        const TrialResult t = run_trial(c, i);
        ASSERT_TRUE(t.ok) << t.error;
        EXPECT_LE(t.prediction_error, 1e-8);
        EXPECT_LE(t.proxy_discrepancy, 1e-10);
    }
}

TEST(Summary, Consistency) {
    const ExperimentConfig c = small_config(6);
    const auto trials = run_trials(c);
    const ExperimentSummary s = summarize(c, trials);
    std::size_t violations = 0;
    for (const auto& t : trials) violations += !t.bound_holds;
    EXPECT_EQ(s.bound_violation.count, violations);
    EXPECT_DOUBLE_EQ(s.bound_violation.frequency, double(violations) / trials.size());
    for (const auto& f : s.event_failures) {
        EXPECT_GE(f.frequency, 0.0);
        EXPECT_LE(f.frequency, 1.0);
        EXPECT_LE(f.wilson.low, f.frequency);
        EXPECT_GE(f.wilson.high, f.frequency);
    }
    EXPECT_EQ(summary_to_json(summarize(c, trials)), summary_to_json(s));
}

TEST(Summary, SingleTrialFrequencies) {
    const ExperimentConfig c = small_config(1);
    const ExperimentSummary s = summarize(c, run_trials(c));
    for (const auto& f : s.event_failures) EXPECT_TRUE(f.frequency == 0.0 || f.frequency == 1.0);
    EXPECT_TRUE(s.bound_violation.frequency == 0.0 || s.bound_violation.frequency == 1.0);
}

TEST(RunTrials, ThreadCountDoesNotChangeRecords) {
    ExperimentConfig c = small_config(5);
    const auto serial = run_trials(c);
    c.threads = 3;
    std::vector<long> order;
    const auto parallel = run_trials(c, [&](const TrialResult& t) { order.push_back(t.trial_index); });
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(trial_to_json(serial[i]), trial_to_json(parallel[i]));
    EXPECT_EQ(order, (std::vector<long>{0, 1, 2, 3, 4}));
}

TEST(RunExperiment, FilesReproduceAndReportMatches) {
    const fs::path a = scratch("a"), b = scratch("b"), r = scratch("r");
    ExperimentConfig c = small_config(3);
    c.out_dir = a.string();
    run_experiment(c);
    c.out_dir = b.string();
    c.threads = 2;
    run_experiment(c);
    for (const char* f : {"trials.jsonl", "summary.json", "trials.csv"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    EXPECT_TRUE(fs::exists(a / "meta.json"));
    EXPECT_EQ(slurp(a / "summary.json").find("timestamp"), std::string::npos);

    report_from_directory(a.string(), r.string());
    EXPECT_EQ(slurp(r / "summary.json"), slurp(a / "summary.json"));
    EXPECT_EQ(slurp(r / "trials.csv"), slurp(a / "trials.csv"));
    for (const auto& d : {a, b, r}) fs::remove_all(d);
}

TEST(RunExperiment, UnwritableDirectoryNamesPath) {
    ExperimentConfig c = small_config(1);
    c.out_dir = "/proc/mixlasso_cannot_write_here";
    try {
        run_experiment(c);
        FAIL() << "expected Error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("/proc/mixlasso_cannot_write_here"), std::string::npos);
    }
}
