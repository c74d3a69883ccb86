#include "mixlasso/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mixlasso {

std::map<int, int> best_representatives(const DesignInstance& instance, const CenterMatrix& centers) {
    std::map<int, int> reps;
    const Matrix& C = centers.centers();
    for (int k : instance.active_set) {
        const auto& members = instance.clusters[static_cast<std::size_t>(k)];
        if (members.empty()) throw AssumptionViolated(3, "active cluster " + std::to_string(k) + " has no columns");
        int best = members.front();
        double best_dist = (instance.X.col(best) - C.col(k)).norm();
        for (int j : members) {
            const double d = (instance.X.col(j) - C.col(k)).norm();
            if (d < best_dist || (d == best_dist && j < best)) {
                best = j;
                best_dist = d;
            }
        }
        reps[k] = best;
    }
    return reps;
}

ProxyVector build_beta_star(const GroundTruth& truth, const DesignInstance& instance,
                            const std::map<int, int>& representatives) {
    ProxyVector proxy;
    proxy.beta_star = Vector::Zero(instance.p());
    std::vector<int> hit;
    for (int j : truth.support) {
        const int k = instance.labels[static_cast<std::size_t>(j)];
        auto it = representatives.find(k);
        if (it == representatives.end())
            throw InvalidArgument("build_beta_star: no representative for cluster " + std::to_string(k));
        proxy.beta_star[it->second] += truth.beta[j];
        hit.push_back(k);
    }
    std::sort(hit.begin(), hit.end());
    proxy.clusters_in_support = static_cast<int>(std::unique(hit.begin(), hit.end()) - hit.begin());
    proxy.representative_of = representatives;
    for (const auto& [k, j] : representatives) proxy.support_star.push_back(j);
    return proxy;
}

double proxy_discrepancy(const MatrixRef& X, const VectorRef& beta, const VectorRef& beta_star) {
    if (X.cols() != beta.size() || X.cols() != beta_star.size())
        throw InvalidArgument("proxy_discrepancy: dimension mismatch");
    return (X * (beta - beta_star)).norm();
}

namespace {

std::vector<int> sample_without_replacement(std::vector<int> pool, int count, Rng& rng) {
    for (int i = 0; i < count; ++i) {
        const auto remaining = static_cast<std::uint64_t>(pool.size()) - static_cast<std::uint64_t>(i);
        const auto j = i + static_cast<int>(rng.uniform_index(remaining));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(count));
    return pool;
}

}  // namespace

GroundTruth sample_ground_truth(const DesignInstance& instance, const TruthRule& rule, double sigma, Rng& rng) {
    return sample_ground_truth(instance, rule, sigma, rng, rng);
}

GroundTruth sample_ground_truth(const DesignInstance& instance, const TruthRule& rule, double sigma, Rng& rng,
                                Rng& noise_rng) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sample_ground_truth: sigma must be >= 0");
    const int p = instance.p();
    const int s = rule.s < 0 ? static_cast<int>(instance.active_set.size()) : rule.s;
    if (s < 1) throw InvalidArgument("sample_ground_truth: s must be >= 1");

    std::vector<int> support;
    if (rule.support == TruthRule::Support::one_per_cluster) {
        std::vector<int> candidates;
        for (int k : instance.active_set)
            if (!instance.clusters[static_cast<std::size_t>(k)].empty()) candidates.push_back(k);
        if (s > static_cast<int>(candidates.size()))
            throw InvalidArgument("sample_ground_truth: s=" + std::to_string(s) + " exceeds the " +
                                  std::to_string(candidates.size()) + " nonempty active clusters");
        const auto chosen = sample_without_replacement(std::move(candidates), s, rng);
        for (int k : chosen) {
            const auto& members = instance.clusters[static_cast<std::size_t>(k)];
            support.push_back(members[rng.uniform_index(members.size())]);
        }
    } else {
        if (s > p) throw InvalidArgument("sample_ground_truth: s exceeds p");
        std::vector<int> all(static_cast<std::size_t>(p));
        std::iota(all.begin(), all.end(), 0);
        support = sample_without_replacement(std::move(all), s, rng);
    }
    std::sort(support.begin(), support.end());

    GroundTruth truth;
    truth.sigma = sigma;
    truth.support = support;
    truth.beta = Vector::Zero(p);
    for (int j : support) {
        double magnitude = rule.magnitude.low;
        if (rule.magnitude.kind == MagnitudeRule::Kind::uniform)
            magnitude = rule.magnitude.low + (rule.magnitude.high - rule.magnitude.low) * rng.uniform();
        truth.beta[j] = magnitude;
    }
    if (rule.random_signs)
        for (int j : support) truth.beta[j] *= rng.sign();

    truth.z.resize(instance.n());
    for (Eigen::Index i = 0; i < truth.z.size(); ++i) truth.z[i] = sigma * noise_rng.normal();
    truth.y = instance.X * truth.beta + truth.z;
    return truth;
}

}  // namespace mixlasso
