#include "mixlasso/serialize.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <fmt/format.h>
#include <json.hpp>

namespace mixlasso {
namespace {

using nlohmann::json;

json to_j(const DecompositionNorms& d) {
    return {{"A", d.A}, {"B", d.B}, {"A_star", d.A_star}, {"B_star", d.B_star}, {"step1", d.step1}};
}

DecompositionNorms decomposition_from(const json& j) {
    DecompositionNorms d;
    d.A = j.at("A");
    d.B = j.at("B");
    d.A_star = j.at("A_star");
    d.B_star = j.at("B_star");
    d.step1 = j.at("step1");
    return d;
}

json to_j(const ConditionReport& c) {
    return {{"center_gram_dev", c.center_gram_dev},
            {"design_gram_dev", c.design_gram_dev},
            {"noise_corr_inf", c.noise_corr_inf},
            {"comp_size", c.comp_size},
            {"thresholds", c.thresholds},
            {"event_flags", c.event_flags},
            {"iv_singular", c.iv_singular},
            {"rho_measured", c.rho_measured},
            {"decomposition", to_j(c.decomposition)}};
}

ConditionReport conditions_from(const json& j) {
    ConditionReport c;
    c.center_gram_dev = j.at("center_gram_dev");
    c.design_gram_dev = j.at("design_gram_dev");
    c.noise_corr_inf = j.at("noise_corr_inf");
    c.comp_size = j.at("comp_size");
    c.thresholds = j.at("thresholds").get<std::array<double, 4>>();
    c.event_flags = j.at("event_flags").get<std::array<bool, 4>>();
    c.iv_singular = j.at("iv_singular");
    c.rho_measured = j.at("rho_measured");
    c.decomposition = decomposition_from(j.at("decomposition"));
    return c;
}

json to_j(const AssumptionReport& a) {
    json out = json::array();
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        const auto& c = a.checks[i];
        json e = {{"id", i + 1}, {"pass", c.pass}, {"margin", c.margin}, {"clause_margins", c.clause_margins},
                  {"evaluable", c.evaluable}};
        if (!c.note.empty()) e["note"] = c.note;
        out.push_back(std::move(e));
    }
    return out;
}

AssumptionReport assumptions_from(const json& j) {
    AssumptionReport a;
    if (j.size() != a.checks.size()) throw Error("trial record: expected 10 assumption entries");
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        const json& e = j[i];
        auto& c = a.checks[i];
        c.pass = e.at("pass");
        c.margin = e.at("margin");
        c.clause_margins = e.at("clause_margins").get<std::vector<double>>();
        c.evaluable = e.at("evaluable");
        c.note = e.value("note", std::string{});
    }
    return a;
}

json to_j(const FrequencyStat& f) {
    return {{"count", f.count}, {"total", f.total}, {"frequency", f.frequency},
            {"wilson95", {f.wilson.low, f.wilson.high}}};
}

json to_j(const QuantileSummary& q) {
    return {{"min", q.min},       {"q05", q.q05}, {"q25", q.q25}, {"median", q.median},
            {"q75", q.q75},       {"q95", q.q95}, {"max", q.max}};
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string trial_to_json(const TrialResult& t) {
    json j;
    j["trial_index"] = t.trial_index;
    j["seed"] = t.seed;
    j["ok"] = t.ok;
    if (!t.ok) j["error"] = t.error;
    j["s"] = t.s;
    j["s_star"] = t.s_star;
    j["clusters_in_support"] = t.clusters_in_support;
    j["prediction_error"] = t.prediction_error;
    j["center_energy"] = t.center_energy;
    j["signal_energy"] = t.signal_energy;
    j["proxy_discrepancy"] = t.proxy_discrepancy;
    j["delta_empirical"] = t.delta_empirical;
    j["bound_rhs"] = t.bound_rhs;
    j["bound_holds"] = t.bound_holds;
    j["analytic_available"] = t.analytic_available;
    j["delta_analytic"] = t.delta_analytic;
    j["bound_rhs_analytic"] = t.bound_rhs_analytic;
    j["bound_holds_analytic"] = t.bound_holds_analytic;
    j["conditions"] = to_j(t.conditions);
    j["assumptions"] = to_j(t.assumptions);
    j["solver"] = {{"lambda", t.solver.lambda},
                   {"iterations", t.solver.iterations},
                   {"objective", t.solver.objective},
                   {"kkt_infinity", t.solver.kkt_infinity},
                   {"duality_gap", t.solver.duality_gap}};
    return j.dump();
}

TrialResult trial_from_json(std::string_view line) {
    const json j = json::parse(line);
    TrialResult t;
    t.trial_index = j.at("trial_index");
    t.seed = j.at("seed");
    t.ok = j.at("ok");
    t.error = j.value("error", std::string{});
    t.s = j.at("s");
    t.s_star = j.at("s_star");
    t.clusters_in_support = j.at("clusters_in_support");
    t.prediction_error = j.at("prediction_error");
    t.center_energy = j.at("center_energy");
    t.signal_energy = j.at("signal_energy");
    t.proxy_discrepancy = j.at("proxy_discrepancy");
    t.delta_empirical = j.at("delta_empirical");
    t.bound_rhs = j.at("bound_rhs");
    t.bound_holds = j.at("bound_holds");
    t.analytic_available = j.at("analytic_available");
    t.delta_analytic = j.at("delta_analytic");
    t.bound_rhs_analytic = j.at("bound_rhs_analytic");
    t.bound_holds_analytic = j.at("bound_holds_analytic");
    t.conditions = conditions_from(j.at("conditions"));
    t.assumptions = assumptions_from(j.at("assumptions"));
    const json& s = j.at("solver");
    t.solver.lambda = s.at("lambda");
    t.solver.iterations = s.at("iterations");
    t.solver.objective = s.at("objective");
    t.solver.kkt_infinity = s.at("kkt_infinity");
    t.solver.duality_gap = s.at("duality_gap");
    return t;
}

std::string summary_to_json(const ExperimentSummary& s) {
    json j;
    j["config"] = s.config_echo;
    j["master_seed"] = s.master_seed;
    j["trials"] = s.trials;
    j["failed_trials"] = s.failed_trials;
    json events = json::object();
    const char* names[] = {"I", "II", "III", "IV"};
    for (std::size_t i = 0; i < 4; ++i) events[names[i]] = to_j(s.event_failures[i]);
    j["event_failures"] = events;
    j["bound_violation"] = to_j(s.bound_violation);
    j["bound_violation_assumptions_met"] = to_j(s.bound_violation_assumptions_met);
    j["bound_violation_assumptions_unmet"] = to_j(s.bound_violation_assumptions_unmet);
    j["analytic_bound_holds"] = to_j(s.analytic_bound_holds);
    j["analytic_bound_holds_assumptions_met"] = to_j(s.analytic_bound_holds_assumptions_met);
    j["analytic_bound_holds_assumptions_unmet"] = to_j(s.analytic_bound_holds_assumptions_unmet);
    json assumptions = json::object();
    for (std::size_t i = 0; i < s.assumption_pass.size(); ++i)
        assumptions[std::to_string(i + 1)] = to_j(s.assumption_pass[i]);
    j["assumption_pass"] = assumptions;
    j["decomposition_violations"] = s.decomposition_violations;
    j["max_step1_error"] = s.max_step1_error;
    j["quantiles"] = {{"prediction_error", to_j(s.prediction_error)},
                      {"delta_empirical", to_j(s.delta_empirical)},
                      {"delta_analytic", to_j(s.delta_analytic)},
                      {"proxy_discrepancy", to_j(s.proxy_discrepancy)},
                      {"norm_A", to_j(s.norm_A)},
                      {"norm_B", to_j(s.norm_B)},
                      {"norm_A_star", to_j(s.norm_A_star)},
                      {"norm_B_star", to_j(s.norm_B_star)}};
    return j.dump(2) + "\n";
}

std::string config_echo_from_summary(std::string_view summary_json) {
    try {
        return json::parse(summary_json).at("config").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("summary.json: ") + e.what());
    }
}

std::string csv_header() {
    return "trial_index,seed,ok,s,s_star,prediction_error,bound_rhs,bound_holds,delta_empirical,"
           "delta_analytic,bound_rhs_analytic,bound_holds_analytic,proxy_discrepancy,center_energy,signal_energy,"
           "center_gram_dev,design_gram_dev,noise_corr_inf,comp_size,event_I,event_II,event_III,event_IV,"
           "norm_A,norm_B,norm_A_star,norm_B_star,assumptions_all_pass,lambda,iterations,duality_gap\n";
}

std::string csv_row(const TrialResult& t) {
    const auto& c = t.conditions;
    const auto& d = c.decomposition;
    std::string row = fmt::format("{},{},{},{},{},", t.trial_index, t.seed, int(t.ok), t.s, t.s_star);
    row += fmt::format("{},{},{},{},", g17(t.prediction_error), g17(t.bound_rhs), int(t.bound_holds),
                       g17(t.delta_empirical));
    row += fmt::format("{},{},{},", g17(t.delta_analytic), g17(t.bound_rhs_analytic), int(t.bound_holds_analytic));
    row += fmt::format("{},{},{},", g17(t.proxy_discrepancy), g17(t.center_energy), g17(t.signal_energy));
    row += fmt::format("{},{},{},{},", g17(c.center_gram_dev), g17(c.design_gram_dev), g17(c.noise_corr_inf),
                       g17(c.comp_size));
    row += fmt::format("{},{},{},{},", int(c.event_flags[0]), int(c.event_flags[1]), int(c.event_flags[2]),
                       int(c.event_flags[3]));
    row += fmt::format("{},{},{},{},", g17(d.A), g17(d.B), g17(d.A_star), g17(d.B_star));
    row += fmt::format("{},{},{},{}\n", int(t.assumptions.all_pass()), g17(t.solver.lambda), t.solver.iterations,
                       g17(t.solver.duality_gap));
    return row;
}

std::string base64_encode_doubles(const double* data, std::size_t count) {
    using namespace boost::archive::iterators;
    using Encoder = base64_from_binary<transform_width<const unsigned char*, 6, 8>>;
    std::vector<unsigned char> bytes(count * sizeof(double));
    std::memcpy(bytes.data(), data, bytes.size());
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < count; ++i) std::reverse(bytes.begin() + i * 8, bytes.begin() + i * 8 + 8);
    std::string out(Encoder(bytes.data()), Encoder(bytes.data() + bytes.size()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

std::vector<double> base64_decode_doubles(std::string_view text) {
    using namespace boost::archive::iterators;
    using Decoder = transform_width<binary_from_base64<const char*>, 8, 6>;
    std::size_t len = text.size();
    std::size_t pad = 0;
    while (len > 0 && text[len - 1] == '=') {
        --len;
        ++pad;
    }
    if ((len + pad) % 4 != 0) throw Error("base64: length is not a multiple of 4");
    std::vector<unsigned char> bytes;
    try {
        bytes.assign(Decoder(text.data()), Decoder(text.data() + len));
    } catch (const std::exception& e) {
        throw Error(std::string("base64: ") + e.what());
    }
    bytes.resize((len + pad) / 4 * 3 - pad);
    if (bytes.size() % sizeof(double) != 0) throw Error("base64: payload is not a whole number of float64 values");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < bytes.size(); i += 8) std::reverse(bytes.begin() + i, bytes.begin() + i + 8);
    std::vector<double> out(bytes.size() / sizeof(double));
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

std::string instance_to_json(const ExperimentConfig& config, long trial_index, const TrialArtifacts& a,
                             bool embed_matrices) {
    const DesignInstance& inst = a.instance;
    json j;
    j["config"] = to_text(config, false);
    j["trial_index"] = trial_index;
    j["trial_seed"] = trial_seed(config, trial_index);
    j["design_seed"] = inst.seed;
    j["n"] = inst.n();
    j["p"] = inst.p();
    j["active_set"] = inst.active_set;
    j["counts"] = inst.counts;
    j["labels"] = inst.labels;
    j["resampled_columns"] = inst.resampled_columns;
    j["center_coherence"] = a.centers.coherence_mu();
    j["support"] = a.truth.support;
    j["sigma"] = a.truth.sigma;
    j["support_star"] = a.proxy.support_star;
    json reps = json::object();
    for (const auto& [k, jstar] : a.proxy.representative_of) reps[std::to_string(k)] = jstar;
    j["representatives"] = reps;
    if (embed_matrices) {
        j["encoding"] = "base64-f64le-colmajor";
        j["X"] = base64_encode_doubles(inst.X.data(), static_cast<std::size_t>(inst.X.size()));
        j["y"] = base64_encode_doubles(a.truth.y.data(), static_cast<std::size_t>(a.truth.y.size()));
        j["beta"] = base64_encode_doubles(a.truth.beta.data(), static_cast<std::size_t>(a.truth.beta.size()));
    }
    return j.dump(2) + "\n";
}

EmbeddedProblem problem_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("instance file: ") + e.what());
    }
    if (!j.contains("X") || !j.contains("y"))
        throw Error("instance file has no embedded matrices (regenerate with --embed)");
    const int n = j.at("n");
    const int p = j.at("p");
    EmbeddedProblem out;
    const auto x = base64_decode_doubles(j.at("X").get<std::string>());
    const auto y = base64_decode_doubles(j.at("y").get<std::string>());
    if (x.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(p) || y.size() != static_cast<std::size_t>(n))
        throw Error("instance file: matrix sizes do not match n and p");
    out.X = Eigen::Map<const Matrix>(x.data(), n, p);
    out.y = Eigen::Map<const Vector>(y.data(), n);
    if (j.contains("beta")) {
        const auto b = base64_decode_doubles(j.at("beta").get<std::string>());
        if (b.size() != static_cast<std::size_t>(p)) throw Error("instance file: beta has wrong length");
        out.beta = Eigen::Map<const Vector>(b.data(), p);
    }
    return out;
}

}  // namespace mixlasso
