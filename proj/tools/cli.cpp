#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mixlasso/config.hpp"
#include "mixlasso/harness.hpp"
#include "mixlasso/lasso.hpp"
#include "mixlasso/serialize.hpp"
#include "mixlasso/theory.hpp"

namespace mixlasso::cli {
namespace {

constexpr const char* kOutDirEnv = "MIXLASSO_OUT_DIR";

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::string out;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_trials, bool with_out) {
    app->add_option("--config", f.config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "Master seed (overrides experiment.seed)");
    if (with_trials) app->add_option("--trials", f.trials, "Number of trials (overrides experiment.trials)");
    if (with_out) app->add_option("--out", f.out, "Output path");
    app->add_option("--override", f.overrides, "key=value config override (repeatable)");
}

ExperimentConfig resolve_config(const CommonFlags& f) {
    ExperimentConfig c = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
    if (const char* env = std::getenv(kOutDirEnv); env && *env) c.out_dir = env;
    for (const auto& o : f.overrides) apply_override(c, o);
    if (f.seed) c.master_seed = *f.seed;
    if (f.trials) c.trials = *f.trials;
    c.validate();
    return c;
}

// Writes to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw Error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string constants_table(const ExperimentConfig& c, int s) {
    const TheoremConstants k = compute_constants(c.spec, c.params, s);
    std::string t;
    auto row = [&](std::string_view name, std::string_view formula, double v) {
        t += fmt::format("{:<18} {:<52} {:.17g}\n", name, formula, v);
    };
    t += fmt::format("# n={} p={} K={} s*={} s={} sfrak={} alpha={} r={}\n", c.spec.n, c.spec.p, c.spec.K,
                     c.spec.s_star, s, c.spec.sigma_frak, c.params.alpha, c.params.r);
    t += fmt::format("{:<18} {:<52} {}\n", "# name", "formula", "value");
    row("log_p", "L = log p", k.log_p);
    row("C_mu", "r/(1+alpha)", k.C_mu);
    row("C_spar", "r^2/((1+alpha) e^2)", k.C_spar);
    row("C_col", "(sqrt2/sqrt((1-r)(1+alpha)) - (1+r))/2", k.C_col);
    row("C_int", "int_0^3 sqrt(log(3/e)) de", k.C_int);
    row("C_int_star", "same integral as C_int", k.C_int_star);
    row("log_C_chi", "log C_chi (configured or chi-square tail fit)", k.log_c_chi);
    row("tail_factor", "Q = (alpha(1-1/e)/(theta C_chi))^(1/n) L^((1-nu)/n)", k.tail_factor);
    row("tail_radius", "sfrak sqrt(n Q)", k.tail_radius);
    row("r_max", "1 + sfrak(sqrt n + sqrt(alpha L/c + log(s)/c))", k.r_max);
    row("mu_max", "sfrak(sqrt n + sqrt s + sqrt(2 alpha L))/2", k.mu_max);
    row("sigma_max_sq", "sqrt(s) sfrak^2/2", k.sigma_max_sq);
    row("r_star_max", "1/(1 - sfrak sqrt(n Q))", k.r_star_max);
    row("K_n_sstar", "sqrt(alpha n L Q)", k.K_n_sstar);
    row("mu_star_max", "sfrak K_n_sstar", k.mu_star_max);
    row("sigma_star_max_sq", "Q sqrt(s*) sfrak^2/(1 - sfrak sqrt(n Q))", k.sigma_star_max_sq);
    row("r_star_coeff", "1.1 r (1.1 + 0.11 r)", k.r_star_coeff);
    row("r_star_eq", "max of the two Gram-deviation levels", k.r_star_eq);
    row("C_s_n_p", "sfrak sqrt(L)(sqrt n + sqrt((alpha+1)L/c))", k.C_s_n_p);
    row("C_s_n_p_cap", "min{0.1 r/sqrt(alpha Q), sqrt(L)/2}", k.C_s_n_p_cap);
    row("rho_C", "||(C_K^t C_K)^-1|| (configured or default)", k.rho_C);
    const char* delta_formulas[] = {
        "4(r_max-1)(1 + 8 sqrt2 w sqrt(s* rho))",
        "(12 C_int sfrak sqrt(n) r_max + alpha L mu_max) sqrt(s* rho)",
        "4 sfrak sqrt(nQ)(1 + 2 sqrt2 sqrt(rho) w)",
        "(24 r*_max sfrak sqrt(Q) C_int + mu*_max alpha L) sqrt(rho)"};
    for (std::size_t i = 0; i < k.delta.terms.size(); ++i)
        row(fmt::format("delta_term_{}", i + 1), delta_formulas[i], k.delta.terms[i]);
    row("delta_lower", "sum of delta terms, w = sqrt(alpha L + log(2n+2))", k.delta_lower);
    row("lambda_default", "2 sigma sqrt(2 alpha L)", default_lambda(c.sigma, c.params.alpha, c.spec.p));
    return t;
}

std::string verify_text(const ExperimentConfig& c, long index, const TrialResult& r) {
    std::string t = fmt::format("trial {} seed {}\n", index, r.seed);
    if (!r.ok) return t + "failed: " + r.error + "\n";
    const auto& ev = r.conditions;
    const char* names[] = {"I  center Gram dev", "II design Gram dev", "III noise corr", "IV complementarity"};
    const double measured[] = {ev.center_gram_dev, ev.design_gram_dev, ev.noise_corr_inf, ev.comp_size};
    t += "events:\n";
    for (int i = 0; i < 4; ++i)
        t += fmt::format("  {:<20} {:>14.6g} < {:<14.6g} {}\n", names[i], measured[i], ev.thresholds[i],
                         ev.event_flags[i] ? "holds" : "FAILS");
    t += "assumptions:\n";
    for (std::size_t i = 0; i < r.assumptions.checks.size(); ++i) {
        const auto& a = r.assumptions.checks[i];
        t += fmt::format("  {:>2} {:<5} margin {:>14.6g}{}{}\n", i + 1, a.pass ? "pass" : "FAIL", a.margin,
                         a.evaluable ? "" : "  (not evaluable)", a.note.empty() ? "" : "  " + a.note);
    }
    const auto& d = ev.decomposition;
    t += fmt::format("decomposition: A {:.6g} B {:.6g} A* {:.6g} B* {:.6g} sum {:.6g} >= proxy discrepancy {:.6g}\n",
                     d.A, d.B, d.A_star, d.B_star, d.sum(), r.proxy_discrepancy);
    t += fmt::format("prediction error {:.6g}  rhs(empirical delta {:.6g}) {:.6g}  {}\n", r.prediction_error,
                     r.delta_empirical, r.bound_rhs, r.bound_holds ? "holds" : "VIOLATED");
    if (r.analytic_available)
        t += fmt::format("rhs(analytic delta {:.6g}) {:.6g}  {}\n", r.delta_analytic, r.bound_rhs_analytic,
                         r.bound_holds_analytic ? "holds" : "VIOLATED");
    else
        t += "analytic delta unavailable at this configuration\n";
    t += fmt::format("solver: lambda {:.6g} iterations {} gap {:.3g} kkt {:.6g}\n", r.solver.lambda,
                     r.solver.iterations, r.solver.duality_gap, r.solver.kkt_infinity);
    (void)c;
    return t;
}

std::string summary_text(const ExperimentSummary& s) {
    std::string t = fmt::format("trials {} (failed {})\n", s.trials, s.failed_trials);
    const char* names[] = {"I", "II", "III", "IV"};
    for (int i = 0; i < 4; ++i) {
        const auto& f = s.event_failures[static_cast<std::size_t>(i)];
        t += fmt::format("event {:<3} failure {:.4f}  [{:.4f}, {:.4f}]\n", names[i], f.frequency, f.wilson.low,
                         f.wilson.high);
    }
    t += fmt::format("bound violation (empirical delta) {:.4f}  [{:.4f}, {:.4f}]\n", s.bound_violation.frequency,
                     s.bound_violation.wilson.low, s.bound_violation.wilson.high);
    t += fmt::format("bound holds (analytic delta) {}/{}\n", s.analytic_bound_holds.count,
                     s.analytic_bound_holds.total);
    t += fmt::format("decomposition violations {}  max step-1 error {:.3g}\n", s.decomposition_violations,
                     s.max_step1_error);
    return t;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"LASSO under the Gaussian-mixture design: sampling, solving and bound checks", "mixlasso"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    CommonFlags gen_f, solve_f, const_f, verify_f, exp_f;
    long gen_trial = 0, verify_trial = 0;
    bool embed = false;
    auto* gen = app.add_subcommand("gen", "Emit one design instance as JSON");
    add_common(gen, gen_f, false, true);
    gen->add_option("--trial", gen_trial, "Trial index")->check(CLI::NonNegativeNumber);
    gen->add_flag("--embed", embed, "Embed X, beta and y (base64 float64)");

    std::string solve_input, solve_x, solve_y;
    std::optional<double> solve_lambda;
    auto* solve = app.add_subcommand("solve", "One LASSO solve from files");
    add_common(solve, solve_f, false, true);
    solve->add_option("--input", solve_input, "Instance JSON written by `gen --embed`");
    solve->add_option("--X", solve_x, "Design matrix, whitespace-separated rows");
    solve->add_option("--y", solve_y, "Response, one value per line");
    solve->add_option("--lambda", solve_lambda, "Penalty (default: 2 sigma sqrt(2 alpha log p))");

    int const_s = -1;
    auto* constants = app.add_subcommand("constants", "Print the table of theorem constants");
    add_common(constants, const_f, false, true);
    constants->add_option("--s", const_s, "Support size (default: from truth.s, else s_star)");

    auto* verify = app.add_subcommand("verify", "Assumptions and events on one trial");
    add_common(verify, verify_f, false, true);
    verify->add_option("--trial", verify_trial, "Trial index")->check(CLI::NonNegativeNumber);

    int threads = 0;
    auto* experiment = app.add_subcommand("experiment", "Full Monte Carlo run");
    add_common(experiment, exp_f, true, true);
    experiment->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string report_in, report_out;
    auto* report = app.add_subcommand("report", "Recompute summary.json and trials.csv from trials.jsonl");
    report->add_option("--in", report_in, "Experiment directory")->required();
    report->add_option("--out", report_out, "Output directory (default: --in)");

    if (argc <= 1) {
        out << app.help();
        return kUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*gen) {
            const ExperimentConfig c = resolve_config(gen_f);
            const TrialArtifacts a = draw_trial(c, gen_trial);
            emit(gen_f.out, instance_to_json(c, gen_trial, a, embed), out);
        } else if (*solve) {
            const ExperimentConfig c = resolve_config(solve_f);
            EmbeddedProblem prob;
            if (!solve_input.empty()) {
                prob = problem_from_json(read_file(solve_input));
            } else if (!solve_x.empty() && !solve_y.empty()) {
                prob.X = load_matrix_text(solve_x);
                const Matrix y = load_matrix_text(solve_y);
                if (y.cols() != 1 || y.rows() != prob.X.rows()) throw Error("--y must be a column with one entry per row of X");
                prob.y = y.col(0);
            } else {
                err << "error: solve needs --input, or both --X and --y\n";
                return kUsage;
            }
            const double lambda = solve_lambda.value_or(
                default_lambda(c.sigma, c.params.alpha, static_cast<double>(prob.X.cols())));
            LassoOptions opts;
            opts.tol = c.solver.tol;
            opts.max_iter = c.solver.max_iter;
            opts.kkt_tol = c.solver.kkt_tol;
            const LassoSolution sol = solve_lasso(prob.X, prob.y, lambda, opts);
            std::string t = fmt::format("lambda {:.17g}\nobjective {:.17g}\niterations {}\nduality_gap {:.17g}\nkkt_inf {:.17g}\n",
                                        sol.lambda, sol.objective, sol.iterations, sol.duality_gap, sol.kkt_infinity);
            if (prob.beta.size() == prob.X.cols())
                t += fmt::format("prediction_error {:.17g}\n", prediction_error(prob.X, prob.beta, sol.beta_hat));
            t += "nonzeros";
            for (Eigen::Index j = 0; j < sol.beta_hat.size(); ++j)
                if (sol.beta_hat[j] != 0.0) t += fmt::format(" {}:{:.17g}", j, sol.beta_hat[j]);
            t += "\n";
            emit(solve_f.out, t, out);
        } else if (*constants) {
            const ExperimentConfig c = resolve_config(const_f);
            const int s = const_s > 0 ? const_s : (c.truth.s > 0 ? c.truth.s : c.spec.s_star);
            emit(const_f.out, constants_table(c, s), out);
        } else if (*verify) {
            const ExperimentConfig c = resolve_config(verify_f);
            const TrialResult r = run_trial(c, verify_trial);
            emit(verify_f.out, verify_text(c, verify_trial, r), out);
            return r.ok ? kOk : kRuntime;
        } else if (*experiment) {
            ExperimentConfig c = resolve_config(exp_f);
            if (!exp_f.out.empty()) c.out_dir = exp_f.out;
            if (threads > 0) c.threads = threads;
            const ExperimentOutput o = run_experiment(c);
            out << summary_text(o.summary) << "written to " << c.out_dir << "\n";
        } else if (*report) {
            const ExperimentOutput o = report_from_directory(report_in, report_out.empty() ? report_in : report_out);
            out << summary_text(o.summary);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}

}  // namespace mixlasso::cli
