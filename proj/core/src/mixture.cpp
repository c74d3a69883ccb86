#include "mixlasso/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mixlasso {

void MixtureSpec::validate() const {
    if (n < 1) throw InvalidArgument("mixture: n must be >= 1");
    if (p < 1) throw InvalidArgument("mixture: p must be >= 1");
    if (!(1 <= s_star && s_star <= K))
        throw InvalidArgument("mixture: require 1 <= s_star <= K (s_star=" + std::to_string(s_star) +
                              ", K=" + std::to_string(K) + ")");
    if (K > p) throw InvalidArgument("mixture: require K <= p");
    if (!(sigma_frak >= 0.0) || !std::isfinite(sigma_frak))
        throw InvalidArgument("mixture: sigma_frak must be finite and >= 0");
    if (!weights.empty()) {
        if (static_cast<int>(weights.size()) != K) throw InvalidArgument("mixture: weights must have K entries");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw InvalidArgument("mixture: weights must be nonnegative");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture: weights must sum to 1");
    }
}

CenterMatrix CenterMatrix::from_matrix(const MatrixRef& centers) {
    require_finite(centers, "centers");
    if (centers.cols() < 1) throw InvalidArgument("centers: need at least one column");
    CenterMatrix out;
    out.centers_ = normalize_columns(centers);
    out.coherence_mu_ = out.centers_.cols() >= 2 ? coherence(out.centers_) : 0.0;
    out.op_norm_ = spectral_norm(out.centers_).operator_norm;
    return out;
}

std::vector<int> draw_active_set(int K, int s_star, Rng& rng) {
    if (K < 1) throw InvalidArgument("draw_active_set: K must be >= 1");
    if (!(1 <= s_star && s_star <= K))
        throw InvalidArgument("draw_active_set: s_star=" + std::to_string(s_star) + " must lie in [1, K=" +
                              std::to_string(K) + "]");
    // Partial Fisher-Yates: the first s_star slots are a uniform subset.
    std::vector<int> pool(static_cast<std::size_t>(K));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < s_star; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(K - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(s_star));
    std::sort(pool.begin(), pool.end());
    return pool;
}

DesignInstance sample_design(const MixtureSpec& spec, const CenterMatrix& centers, Rng& rng) {
    spec.validate();
    auto active = draw_active_set(spec.K, spec.s_star, rng);
    return sample_design_given_active(spec, centers, std::move(active), rng);
}

DesignInstance sample_design_given_active(const MixtureSpec& spec, const CenterMatrix& centers,
                                          std::vector<int> active_set, Rng& rng) {
    spec.validate();
    if (centers.K() != spec.K || centers.n() != spec.n)
        throw InvalidArgument("sample_design: centers are " + std::to_string(centers.n()) + "x" +
                              std::to_string(centers.K()) + ", spec expects " + std::to_string(spec.n) + "x" +
                              std::to_string(spec.K));
    if (static_cast<int>(active_set.size()) != spec.s_star)
        throw InvalidArgument("sample_design: active set size differs from s_star");

    // Cumulative label distribution restricted to the active set.
    std::vector<double> cumulative(active_set.size());
    double total = 0.0;
    for (std::size_t i = 0; i < active_set.size(); ++i) {
        total += spec.weights.empty() ? 1.0 : spec.weights[static_cast<std::size_t>(active_set[i])];
        cumulative[i] = total;
    }
    if (!(total > 0.0)) throw InvalidArgument("sample_design: weights vanish on the active set");
    for (double& c : cumulative) c /= total;

    const Eigen::Index n = spec.n;
    const Eigen::Index p = spec.p;
    DesignInstance inst;
    inst.seed = rng.key();
    inst.X_o.resize(n, p);
    inst.X.resize(n, p);
    inst.E.resize(n, p);
    inst.labels.resize(static_cast<std::size_t>(p));
    inst.clusters.assign(static_cast<std::size_t>(spec.K), {});
    inst.counts.assign(static_cast<std::size_t>(spec.K), 0);
    inst.active_set = std::move(active_set);

    const Matrix& C = centers.centers();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double u = rng.uniform();
        auto slot = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                             cumulative.begin());
        slot = std::min(slot, cumulative.size() - 1);
        const int k = inst.active_set[slot];

        double nrm = 0.0;
        for (int attempt = 0; attempt < 2; ++attempt) {
            for (Eigen::Index i = 0; i < n; ++i) inst.E(i, j) = spec.sigma_frak * rng.normal();
            inst.X_o.col(j) = C.col(k) + inst.E.col(j);
            nrm = inst.X_o.col(j).norm();
            if (nrm > kColumnNormFloor) break;
            if (attempt == 0) {
                ++inst.resampled_columns;
            } else {
                throw DegenerateColumn(static_cast<std::size_t>(j), nrm,
                                       "sample_design, rng key " + std::to_string(inst.seed));
            }
        }
        inst.X.col(j) = inst.X_o.col(j) / nrm;
        inst.labels[static_cast<std::size_t>(j)] = k;
        inst.clusters[static_cast<std::size_t>(k)].push_back(static_cast<int>(j));
        ++inst.counts[static_cast<std::size_t>(k)];
    }
    return inst;
}

CenterMatrix gaussian_centers(int n, int K, Rng& rng) {
    if (n < 1 || K < 1) throw InvalidArgument("gaussian_centers: n and K must be positive");
    Matrix raw(n, K);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < K; ++j)
        for (Eigen::Index i = 0; i < n; ++i) raw(i, j) = scale * rng.normal();
    return CenterMatrix::from_matrix(raw);
}

CenterMatrix orthonormal_centers(int n, int K, Rng& rng) {
    if (K > n) throw InvalidArgument("orthonormal_centers: need K <= n");
    Matrix raw(n, K);
    for (Eigen::Index j = 0; j < K; ++j)
        for (Eigen::Index i = 0; i < n; ++i) raw(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(raw);
    Matrix q = qr.householderQ() * Matrix::Identity(n, K);
    return CenterMatrix::from_matrix(q);
}

}  // namespace mixlasso
