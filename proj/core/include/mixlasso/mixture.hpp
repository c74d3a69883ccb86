#pragma once

// Gaussian-mixture design model.
//
// A random s*-subset of the K clusters is activated. Each of the p columns
// picks an active cluster k_j with probability proportional to pi_k, gets a
// perturbation eps_j ~ N(0, sfrak^2 I_n) around the unit-norm center C_k, and
// is finally scaled to unit norm:
//
//     X_o[:, j] = C[:, k_j] + E[:, j],      X[:, j] = X_o[:, j] / ||X_o[:, j]||.
//
// Cluster and column indices are zero-based throughout.

#include <cstdint>
#include <vector>

#include "mixlasso/linalg.hpp"
#include "mixlasso/rng.hpp"

namespace mixlasso {

struct MixtureSpec {
    int n = 0;        // ambient dimension
    int p = 0;        // number of columns
    int K = 0;        // number of clusters
    int s_star = 0;   // number of active clusters
    double sigma_frak = 0.0;
    // Cluster weights pi over all K clusters; restricted to the active set and
    // renormalized at sampling time. Empty means uniform.
    std::vector<double> weights;

    /// Throws InvalidArgument describing the first violated invariant.
    void validate() const;
};

class CenterMatrix {
public:
    /// Normalizes the columns of `centers` and caches coherence and operator norm.
    static CenterMatrix from_matrix(const MatrixRef& centers);

    const Matrix& centers() const noexcept { return centers_; }
    int n() const noexcept { return static_cast<int>(centers_.rows()); }
    int K() const noexcept { return static_cast<int>(centers_.cols()); }
    double coherence_mu() const noexcept { return coherence_mu_; }
    double op_norm() const noexcept { return op_norm_; }

private:
    Matrix centers_;
    double coherence_mu_ = 0.0;
    double op_norm_ = 0.0;
};

struct DesignInstance {
    Matrix X_o;
    Matrix X;
    Matrix E;
    std::vector<int> labels;                 // k_j for every column
    std::vector<std::vector<int>> clusters;  // J_k for every k in [0, K); empty when inactive
    std::vector<int> active_set;             // sorted
    std::vector<int> counts;                 // n_k for every k in [0, K)
    std::uint64_t seed = 0;                  // rng key the instance was drawn from
    int resampled_columns = 0;

    int p() const noexcept { return static_cast<int>(X.cols()); }
    int n() const noexcept { return static_cast<int>(X.rows()); }
};

/// Uniformly random `s_star`-subset of {0, ..., K-1}, sorted ascending.
std::vector<int> draw_active_set(int K, int s_star, Rng& rng);

/// One draw of the mixture design. The active set is drawn first from `rng`,
/// followed by (label, perturbation) for each column in order.
DesignInstance sample_design(const MixtureSpec& spec, const CenterMatrix& centers, Rng& rng);

/// Same as sample_design with a fixed active set (used to re-draw designs
/// conditionally on the active clusters).
DesignInstance sample_design_given_active(const MixtureSpec& spec, const CenterMatrix& centers,
                                          std::vector<int> active_set, Rng& rng);

/// Centers with i.i.d. N(0, 1/n) entries, then column-normalized.
CenterMatrix gaussian_centers(int n, int K, Rng& rng);

/// Centers with exactly orthonormal columns (Householder QR of a Gaussian
/// matrix); coherence is zero up to rounding. Requires K <= n.
CenterMatrix orthonormal_centers(int n, int K, Rng& rng);

}  // namespace mixlasso
