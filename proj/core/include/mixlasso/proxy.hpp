#pragma once

// Ground-truth regression vectors and the cluster-representative proxy.
//
// For every active cluster k the representative j*_k is the column of J_k
// closest to the center C_k. The proxy beta* lives on T* = {j*_k} and carries
// the within-cluster sum of the true coefficients, so that
//
//     C[:, K_{T*}] beta*_{T*} = C[:, K_T] beta_T.

#include <map>
#include <vector>

#include "mixlasso/linalg.hpp"
#include "mixlasso/mixture.hpp"
#include "mixlasso/rng.hpp"

namespace mixlasso {

struct GroundTruth {
    Vector beta;
    std::vector<int> support;  // T, sorted
    double sigma = 0.0;
    Vector z;
    Vector y;  // X * beta + z

    int s() const noexcept { return static_cast<int>(support.size()); }
};

struct ProxyVector {
    std::vector<int> support_star;           // T*, sorted by cluster index
    Vector beta_star;                        // full length p, zero off T*
    std::map<int, int> representative_of;    // cluster k -> j*_k
    int clusters_in_support = 0;             // |K_T| (distinct clusters hit by T)

    int s_star() const noexcept { return static_cast<int>(support_star.size()); }
};

struct MagnitudeRule {
    enum class Kind { constant, uniform };
    Kind kind = Kind::constant;
    double low = 1.0;   // the constant when kind == constant
    double high = 1.0;
};

struct TruthRule {
    enum class Support {
        one_per_cluster,  // s distinct active clusters, one uniform column in each
        uniform           // s distinct columns uniformly among all p
    };
    Support support = Support::one_per_cluster;
    int s = -1;  // -1: s = s_star
    MagnitudeRule magnitude;
    bool random_signs = true;  // otherwise all coefficients positive
};

/// j*_k = argmin_{j in J_k} ||X_j - C_k||_2 for each active cluster; ties go to
/// the smallest column index. Throws AssumptionViolated(3) for an empty cluster.
std::map<int, int> best_representatives(const DesignInstance& instance, const CenterMatrix& centers);

/// beta*_{j*_k} = sum_{j in J_k ∩ T} beta_j. Every active cluster keeps its
/// representative in T*, with a zero coefficient when no support index falls in it.
ProxyVector build_beta_star(const GroundTruth& truth, const DesignInstance& instance,
                            const std::map<int, int>& representatives);

/// ||X beta - X beta*||_2.
double proxy_discrepancy(const MatrixRef& X, const VectorRef& beta, const VectorRef& beta_star);

/// Draws support, magnitudes and signs (in that order) and then the noise z.
GroundTruth sample_ground_truth(const DesignInstance& instance, const TruthRule& rule, double sigma, Rng& rng);

/// Same with an explicit noise stream, so noise can be redrawn independently.
GroundTruth sample_ground_truth(const DesignInstance& instance, const TruthRule& rule, double sigma, Rng& rng,
                                Rng& noise_rng);

}  // namespace mixlasso
