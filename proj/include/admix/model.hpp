#ifndef ADMIX_MODEL_H_
#define ADMIX_MODEL_H_

#include "admix/parallel.hpp"
#include "admix/types.hpp"

namespace admix {

// c_{i,m} = <q_{i,.}, p_{.,m}>.
SuccessProbMatrix success_probs(const AncestryMatrix& q, const AlleleFreqMatrix& p);

// Per-cell term x log c + (2-x) log(1-c) with the 0*log(0) = 0 convention;
// -inf when the data are impossible under c.
double cell_loglik(int x, double c);

// Unnormalized log-likelihood sum over observed cells. -inf is an explicit
// sentinel, never a floating exception.
double log_likelihood(const GenotypeMatrix& x, const AncestryMatrix& q,
                      const AlleleFreqMatrix& p, Exec exec = Exec::Parallel);

// Same sum divided by 2 * (number of observed cells).
double log_likelihood_normalized(const GenotypeMatrix& x, const AncestryMatrix& q,
                                 const AlleleFreqMatrix& p, Exec exec = Exec::Parallel);

// Unnormalized log-likelihood of one individual's row.
double row_log_likelihood(const GenotypeMatrix& x, const RowVec& q_row,
                          const AlleleFreqMatrix& p, Index individual);

// Derivative of the per-individual sum with respect to (q_{i,1},...,q_{i,K-1})
// with q_K = 1 - sum eliminated. Requires a strictly interior row.
Vec grad_q(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
           Index individual);

// Derivative of the per-marker sum with respect to (p_{1,m},...,p_{K,m}).
Vec grad_p(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
           Index marker);

// Observed Hessians of the same sums.
Mat hessian_q(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
              Index individual);
Mat hessian_p(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
              Index marker);

} // namespace admix

#endif // ADMIX_MODEL_H_
