#ifndef ADMIX_ESTIMATION_H_
#define ADMIX_ESTIMATION_H_

#include "admix/model.hpp"
#include "admix/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace admix {

// Which parameters to estimate. The first n_free individuals and the first
// m_free markers are free; the remainder is fixed at the supplied values.
struct EstimationProblem {
    GenotypeMatrix x;
    int k = 2;
    std::optional<Mat> known_q; // full N x K; rows >= n_free are used
    std::optional<Mat> known_p; // full K x M; cols >= m_free are used
    Index n_free = -1;          // defaults to N when known_q is absent
    Index m_free = -1;          // defaults to M when known_p is absent
    ModelConfig config;

    Index n() const { return x.n_individuals(); }
    Index m() const { return x.n_markers(); }
    Index effective_n_free() const { return known_q ? n_free : n(); }
    Index effective_m_free() const { return known_p ? m_free : m(); }
    bool supervised() const { return effective_m_free() == 0; }

    void validate() const;
};

struct FitResult {
    AncestryMatrix q_hat;
    AlleleFreqMatrix p_hat;
    std::vector<double> loglik_trace; // unnormalized, one entry per iteration incl. start
    Index iterations = 0;
    bool converged = false;
    std::vector<std::pair<Index, Index>> boundary_flags_q; // (i,k) with q near 0 or 1

    double final_loglik() const { return loglik_trace.back(); }
};

// Block EM with exact box-constrained M-steps. The trace is non-decreasing.
FitResult fit_em(const EstimationProblem& problem, Index max_iter, double tol_ll,
                 std::uint64_t seed, Exec exec = Exec::Parallel);

// Active-set projected Newton for one individual's ancestry row with P fully
// known. Can land exactly on the simplex boundary; the terminal point
// satisfies the simplex KKT conditions to kkt_tol. Falls back to EM steps
// when the Newton step is unusable.
Vec fit_supervised_newton(const GenotypeMatrix& x, const AlleleFreqMatrix& p, Index individual,
                          const ModelConfig& config,
                          const std::optional<RowVec>& start = std::nullopt,
                          double kkt_tol = 1e-8, Index max_iter = 200);

// Largest component of the projection of the per-row gradient onto the
// feasible directions at q_row (the KKT residual reported by tests).
double simplex_kkt_residual(const GenotypeMatrix& x, const AlleleFreqMatrix& p, Index individual,
                            const RowVec& q_row);

struct AlignResult {
    std::vector<int> perm; // aligned column j comes from source column perm[j]
    Mat q_aligned;
    Mat p_aligned;
    double l1_cost = 0;
};

// Exhaustive search over the K! relabelings minimizing the L1 distance of Q
// to the reference; ties break to the lexicographically smallest permutation.
AlignResult align_labels(const Mat& q_hat, const Mat& p_hat, const Mat& q_ref, const Mat& p_ref);

// Geometrically weighted L1 distance between parameter pairs.
double metric_d(const Mat& q_a, const Mat& p_a, const Mat& q_b, const Mat& p_b);

// Maximizer of sum_k w_k log q_k over the simplex intersected with
// [lo, hi]^K (exact water-filling solution). Exposed for tests.
RowVec box_simplex_weight_opt(const RowVec& w, double lo, double hi);

} // namespace admix

#endif // ADMIX_ESTIMATION_H_
