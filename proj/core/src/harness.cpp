#include "mixlasso/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <unistd.h>

#include "mixlasso/serialize.hpp"

namespace mixlasso {
namespace {

FrequencyStat frequency(std::size_t count, std::size_t total) {
    FrequencyStat f;
    f.count = count;
    f.total = total;
    f.frequency = total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
    f.wilson = wilson_interval(count, total);
    return f;
}

QuantileSummary quantiles(const std::vector<double>& v) {
    QuantileSummary q;
    if (v.empty()) return q;
    q.min = quantile(v, 0.0);
    q.q05 = quantile(v, 0.05);
    q.q25 = quantile(v, 0.25);
    q.median = quantile(v, 0.5);
    q.q75 = quantile(v, 0.75);
    q.q95 = quantile(v, 0.95);
    q.max = quantile(v, 1.0);
    return q;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    auto out = open_for_write(path);
    out << content;
    check_written(out, path);
}

void make_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_summary_and_csv(const std::filesystem::path& dir, const ExperimentSummary& summary,
                           const std::vector<TrialResult>& trials) {
    write_file(dir / "summary.json", summary_to_json(summary));
    std::string csv = csv_header();
    for (const auto& t : trials) csv += csv_row(t);
    write_file(dir / "trials.csv", csv);
}

std::string meta_json(const ExperimentConfig& config) {
    char host[256] = {0};
    if (gethostname(host, sizeof(host) - 1) != 0) host[0] = '\0';
    const std::time_t now = std::time(nullptr);
    char stamp[64] = {0};
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return fmt::format("{{\n  \"timestamp\": \"{}\",\n  \"host\": \"{}\",\n  \"threads\": {},\n  \"master_seed\": {}\n}}\n",
                       stamp, host, config.threads, config.master_seed);
}

}  // namespace

Matrix load_matrix_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix file '" + path + "'");
    std::vector<double> values;
    long rows = 0;
    long cols = -1;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> row;
        double v = 0.0;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw Error("matrix file '" + path + "': bad number on row " + std::to_string(rows + 1));
        if (row.empty()) continue;
        if (cols < 0) cols = static_cast<long>(row.size());
        if (static_cast<long>(row.size()) != cols)
            throw Error("matrix file '" + path + "': ragged row " + std::to_string(rows + 1));
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw Error("matrix file '" + path + "' is empty");
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    return m;
}

CenterMatrix make_centers(const ExperimentConfig& config, std::optional<std::uint64_t> trial_seed) {
    const auto& spec = config.spec;
    Rng rng(derive_seed(trial_seed.value_or(config.master_seed), "centers"));
    switch (config.center_source) {
        case CenterSource::gaussian: return gaussian_centers(spec.n, spec.K, rng);
        case CenterSource::orthonormal: return orthonormal_centers(spec.n, spec.K, rng);
        case CenterSource::file: {
            const Matrix m = load_matrix_text(config.center_file);
            if (m.rows() != spec.n || m.cols() != spec.K)
                throw InvalidArgument(fmt::format("centers file '{}' is {}x{}, expected {}x{}", config.center_file,
                                                  m.rows(), m.cols(), spec.n, spec.K));
            return CenterMatrix::from_matrix(m);
        }
    }
    throw InvalidArgument("unknown center source");
}

std::uint64_t trial_seed(const ExperimentConfig& config, long trial_index) {
    return derive_seed(config.master_seed, static_cast<std::uint64_t>(trial_index));
}

TrialArtifacts draw_trial(const ExperimentConfig& config, long trial_index, const CenterMatrix* shared_centers) {
    config.spec.validate();
    const std::uint64_t seed = trial_seed(config, trial_index);
    std::optional<CenterMatrix> own;
    if (!shared_centers || config.redraw_centers) {
        own = make_centers(config, config.redraw_centers ? std::optional(seed) : std::nullopt);
        shared_centers = &*own;
    }
    Rng design_rng(derive_seed(seed, "design"));
    Rng truth_rng(derive_seed(seed, "truth"));
    Rng noise_rng(derive_seed(seed, "noise"));
    DesignInstance instance = sample_design(config.spec, *shared_centers, design_rng);
    GroundTruth truth = sample_ground_truth(instance, config.truth, config.sigma, truth_rng, noise_rng);
    ProxyVector proxy = build_beta_star(truth, instance, best_representatives(instance, *shared_centers));
    return {*shared_centers, std::move(instance), std::move(truth), std::move(proxy), std::nullopt};
}

TrialResult run_trial(const ExperimentConfig& config, long trial_index, const CenterMatrix* shared_centers,
                      TrialArtifacts* artifacts) {
    TrialResult res;
    res.trial_index = trial_index;
    res.seed = trial_seed(config, trial_index);
    try {
        TrialArtifacts a = draw_trial(config, trial_index, shared_centers);
        const DesignInstance& inst = a.instance;
        const GroundTruth& truth = a.truth;
        const ProxyVector& proxy = a.proxy;
        const TheoremParams& params = config.params;
        params.validate();

        const double lambda = config.solver.lambda.value_or(
            default_lambda(config.sigma, params.alpha, static_cast<double>(config.spec.p)));
        LassoOptions opts;
        opts.tol = config.solver.tol;
        opts.max_iter = config.solver.max_iter;
        opts.kkt_tol = config.solver.kkt_tol;
        a.solution = solve_lasso(inst.X, truth.y, lambda, opts);
        const LassoSolution& sol = *a.solution;
        res.solver = {lambda, sol.iterations, sol.objective, sol.kkt_infinity, sol.duality_gap};

        res.s = truth.s();
        res.s_star = proxy.s_star();
        res.clusters_in_support = proxy.clusters_in_support;
        res.prediction_error = prediction_error(inst.X, truth.beta, sol.beta_hat);
        res.center_energy = center_energy(a.centers, inst, truth);
        res.signal_energy = (inst.X * truth.beta).norm();
        res.proxy_discrepancy = proxy_discrepancy(inst.X, truth.beta, proxy.beta_star);
        res.conditions = check_events(a.centers, inst, truth, proxy, lambda, params);
        res.assumptions = check_assumptions(config.spec, params, a.centers, inst, truth, proxy);

        if (res.center_energy > 0.0) {
            res.delta_empirical = res.proxy_discrepancy / res.center_energy;
        } else if (res.proxy_discrepancy == 0.0) {
            res.delta_empirical = 0.0;
        } else {
            throw Error("empirical delta undefined: center energy is zero but the proxy discrepancy is not");
        }
        const double r_star = r_star_level(params.r);
        res.bound_rhs = theorem_rhs(res.s_star, r_star, lambda, res.delta_empirical, res.center_energy,
                                    res.signal_energy);
        res.bound_holds = res.prediction_error <= res.bound_rhs;

        // The analytic delta needs sfrak sqrt(n Q) < 1 and an invertible center Gram.
        const double rho = params.rho_C.value_or(res.conditions.rho_measured);
        if (rho > 0.0) {
            try {
                const TheoremConstants k = compute_constants(config.spec, params, res.s);
                res.delta_analytic = delta_lower_bound(k, config.spec, params, res.s_star, rho).total;
                res.bound_rhs_analytic = theorem_rhs(res.s_star, r_star, lambda, res.delta_analytic,
                                                     res.center_energy, res.signal_energy);
                res.analytic_available = std::isfinite(res.bound_rhs_analytic);
                if (!res.analytic_available) res.delta_analytic = res.bound_rhs_analytic = 0.0;
                res.bound_holds_analytic = res.analytic_available && res.prediction_error <= res.bound_rhs_analytic;
            } catch (const AssumptionViolated&) {
                res.analytic_available = false;
            }
        }
        res.ok = true;
        if (artifacts) *artifacts = std::move(a);
    } catch (const std::exception& e) {
        TrialResult failed;
        failed.trial_index = trial_index;
        failed.seed = res.seed;
        failed.ok = false;
        failed.error = e.what();
        return failed;
    }
    return res;
}

ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<TrialResult>& trials) {
    ExperimentSummary s;
    s.config_echo = to_text(config, false);
    s.master_seed = config.master_seed;
    s.trials = static_cast<long>(trials.size());

    std::size_t ok = 0;
    std::array<std::size_t, 4> event_fail{};
    std::size_t violations = 0, violations_met = 0, violations_unmet = 0, met = 0;
    std::size_t analytic = 0, analytic_holds = 0, analytic_met = 0, analytic_met_holds = 0;
    std::size_t analytic_unmet = 0, analytic_unmet_holds = 0;
    std::array<std::size_t, 10> assumption_pass{};
    std::vector<double> pe, de, da, pd, na, nb, nas, nbs;
    for (const auto& t : trials) {
        if (!t.ok) {
            ++s.failed_trials;
            continue;
        }
        ++ok;
        for (std::size_t i = 0; i < 4; ++i)
            if (!t.conditions.event_flags[i]) ++event_fail[i];
        const bool all = t.assumptions.all_pass();
        if (all) ++met;
        if (!t.bound_holds) {
            ++violations;
            ++(all ? violations_met : violations_unmet);
        }
        if (t.analytic_available) {
            ++analytic;
            analytic_holds += t.bound_holds_analytic;
            if (all) {
                ++analytic_met;
                analytic_met_holds += t.bound_holds_analytic;
            } else {
                ++analytic_unmet;
                analytic_unmet_holds += t.bound_holds_analytic;
            }
            da.push_back(t.delta_analytic);
        }
        for (std::size_t i = 0; i < 10; ++i) assumption_pass[i] += t.assumptions.checks[i].pass;
        const auto& d = t.conditions.decomposition;
        if (t.proxy_discrepancy > d.sum()) ++s.decomposition_violations;
        s.max_step1_error = std::max(s.max_step1_error, std::abs(d.step1 - t.proxy_discrepancy));
        pe.push_back(t.prediction_error);
        de.push_back(t.delta_empirical);
        pd.push_back(t.proxy_discrepancy);
        na.push_back(d.A);
        nb.push_back(d.B);
        nas.push_back(d.A_star);
        nbs.push_back(d.B_star);
    }
    for (std::size_t i = 0; i < 4; ++i) s.event_failures[i] = frequency(event_fail[i], ok);
    s.bound_violation = frequency(violations, ok);
    s.bound_violation_assumptions_met = frequency(violations_met, met);
    s.bound_violation_assumptions_unmet = frequency(violations_unmet, ok - met);
    s.analytic_bound_holds = frequency(analytic_holds, analytic);
    s.analytic_bound_holds_assumptions_met = frequency(analytic_met_holds, analytic_met);
    s.analytic_bound_holds_assumptions_unmet = frequency(analytic_unmet_holds, analytic_unmet);
    for (std::size_t i = 0; i < 10; ++i) s.assumption_pass[i] = frequency(assumption_pass[i], ok);
    s.prediction_error = quantiles(pe);
    s.delta_empirical = quantiles(de);
    s.delta_analytic = quantiles(da);
    s.proxy_discrepancy = quantiles(pd);
    s.norm_A = quantiles(na);
    s.norm_B = quantiles(nb);
    s.norm_A_star = quantiles(nas);
    s.norm_B_star = quantiles(nbs);
    return s;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config,
                                    const std::function<void(const TrialResult&)>& sink) {
    config.validate();
    const auto total = static_cast<std::size_t>(config.trials);
    std::vector<TrialResult> results(total);

    // Shared centers; a failure here is reported by each trial instead.
    std::optional<CenterMatrix> centers;
    if (!config.redraw_centers) {
        try {
            centers = make_centers(config);
        } catch (const std::exception&) {
        }
    }
    const CenterMatrix* shared = centers ? &*centers : nullptr;

    std::vector<char> done(total, 0);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            TrialResult r = run_trial(config, static_cast<long>(i), shared);
            std::lock_guard lock(mu);
            results[i] = std::move(r);
            done[i] = 1;
            cv.notify_one();
        }
    };

    const auto width = static_cast<std::size_t>(std::max(1, config.threads));
    if (width == 1 || total == 1) {
        for (std::size_t i = 0; i < total; ++i) {
            results[i] = run_trial(config, static_cast<long>(i), shared);
            if (sink) sink(results[i]);
        }
        return results;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(width, total); ++w) pool.emplace_back(worker);
    // Emit records in order as the completed prefix grows.
    std::size_t emitted = 0;
    while (emitted < total) {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return done[emitted] != 0; });
        while (emitted < total && done[emitted]) {
            const TrialResult& r = results[emitted];
            lock.unlock();
            if (sink) sink(r);
            lock.lock();
            ++emitted;
        }
    }
    for (auto& t : pool) t.join();
    return results;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    config.validate();
    const std::filesystem::path dir(config.out_dir);
    make_directory(dir);
    const auto jsonl_path = dir / "trials.jsonl";
    auto jsonl = open_for_write(jsonl_path);
    ExperimentOutput out;
    out.trials = run_trials(config, [&](const TrialResult& t) {
        jsonl << trial_to_json(t) << '\n';
        if (!jsonl) throw Error("write failed for '" + jsonl_path.string() + "'");
    });
    check_written(jsonl, jsonl_path);
    out.summary = summarize(config, out.trials);
    write_summary_and_csv(dir, out.summary, out.trials);
    write_file(dir / "meta.json", meta_json(config));
    return out;
}

ExperimentOutput report_from_directory(const std::string& dir, const std::string& out_dir) {
    const std::filesystem::path in_dir(dir);
    const auto summary_path = in_dir / "summary.json";
    const auto jsonl_path = in_dir / "trials.jsonl";
    std::ifstream in(jsonl_path);
    if (!in) throw Error("cannot open '" + jsonl_path.string() + "'");

    // The config echo lives in summary.json; recover it to re-summarize.
    ExperimentConfig config;
    {
        std::ifstream sj(summary_path);
        if (!sj) throw Error("cannot open '" + summary_path.string() + "'");
        std::stringstream buf;
        buf << sj.rdbuf();
        config = parse_config(config_echo_from_summary(buf.str()));
    }
    ExperimentOutput out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.trials.push_back(trial_from_json(line));
        } catch (const std::exception& e) {
            throw Error(fmt::format("'{}' line {}: {}", jsonl_path.string(), line_no, e.what()));
        }
    }
    out.summary = summarize(config, out.trials);
    const std::filesystem::path target(out_dir);
    make_directory(target);
    write_summary_and_csv(target, out.summary, out.trials);
    return out;
}

}  // namespace mixlasso
