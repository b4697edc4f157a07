#include "admix/model.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace admix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dims(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p)
{
    if(q.k() != p.k())
        throw InputError("population count mismatch: Q has " + std::to_string(q.k())
                         + ", P has " + std::to_string(p.k()));
    if(x.n_individuals() != q.n_individuals())
        throw InputError("individual count mismatch between genotypes and Q");
    if(x.n_markers() != p.n_markers())
        throw InputError("marker count mismatch between genotypes and P");
}

} // namespace

SuccessProbMatrix success_probs(const AncestryMatrix& q, const AlleleFreqMatrix& p)
{
    if(q.k() != p.k())
        throw InputError("population count mismatch: Q has " + std::to_string(q.k())
                         + ", P has " + std::to_string(p.k()));
    SuccessProbMatrix out;
    out.c = q.q * p.p;
    // Dot products of simplex rows with [0,1] columns land in [0,1]; only
    // roundoff can leak out.
    out.c = out.c.cwiseMax(0.0).cwiseMin(1.0);
    return out;
}

double cell_loglik(int x, double c)
{
    double t = 0;
    if(x > 0) {
        if(c <= 0.0) return kNegInf;
        t += double(x) * std::log(c);
    }
    if(x < 2) {
        if(c >= 1.0) return kNegInf;
        t += double(2 - x) * std::log1p(-c);
    }
    return t;
}

namespace {

double row_ll(const GenotypeMatrix& x, const Mat& q, const Mat& p, Index i)
{
    double s = 0;
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto g = x.counts(i, m);
        if(g == kMissing) continue;
        const double c = q.row(i).dot(p.col(m));
        s += cell_loglik(g, c);
        if(s == kNegInf) return kNegInf;
    }
    return s;
}

} // namespace

double log_likelihood(const GenotypeMatrix& x, const AncestryMatrix& q,
                      const AlleleFreqMatrix& p, Exec exec)
{
    check_dims(x, q, p);
    const Index n = x.n_individuals();
    std::vector<double> partial(std::size_t(n));
    parallel_for(n, exec, [&](Index i) { partial[std::size_t(i)] = row_ll(x, q.q, p.p, i); });
    double s = 0;
    for(double v : partial) {
        if(v == kNegInf) return kNegInf;
        s += v;
    }
    return s;
}

double log_likelihood_normalized(const GenotypeMatrix& x, const AncestryMatrix& q,
                                 const AlleleFreqMatrix& p, Exec exec)
{
    Index observed = 0;
    for(Index i = 0; i < x.n_individuals(); ++i) observed += x.observed_in_row(i);
    if(observed == 0) throw InputError("no observed genotype cells");
    return log_likelihood(x, q, p, exec) / (2.0 * double(observed));
}

double row_log_likelihood(const GenotypeMatrix& x, const RowVec& q_row,
                          const AlleleFreqMatrix& p, Index individual)
{
    double s = 0;
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto g = x.counts(individual, m);
        if(g == kMissing) continue;
        const double c = q_row.dot(p.p.col(m));
        s += cell_loglik(g, c);
        if(s == kNegInf) return kNegInf;
    }
    return s;
}

namespace {

// Residual x/c - (2-x)/(1-c), with inactive terms dropped under the
// 0*log(0) convention. Throws when the likelihood itself is -inf there.
double residual(int x, double c, const char* who)
{
    double r = 0;
    if(x > 0) {
        if(c <= 0.0)
            throw NumericalError(std::string(who) + ": likelihood is -inf at this point (c=0 with x>0)");
        r += double(x) / c;
    }
    if(x < 2) {
        if(c >= 1.0)
            throw NumericalError(std::string(who) + ": likelihood is -inf at this point (c=1 with x<2)");
        r -= double(2 - x) / (1.0 - c);
    }
    return r;
}

double curvature(int x, double c, const char* who)
{
    double s = 0;
    if(x > 0) {
        if(c <= 0.0) throw NumericalError(std::string(who) + ": likelihood is -inf at this point");
        s += double(x) / (c * c);
    }
    if(x < 2) {
        if(c >= 1.0) throw NumericalError(std::string(who) + ": likelihood is -inf at this point");
        s += double(2 - x) / ((1.0 - c) * (1.0 - c));
    }
    return s;
}

void require_interior_row(const RowVec& row, Index i)
{
    for(Index k = 0; k < row.size(); ++k)
        if(!(row[k] > 0.0 && row[k] < 1.0))
            throw NumericalError("q row " + std::to_string(i)
                                 + " is on the simplex boundary; q-derivatives need an interior row");
}

} // namespace

Vec grad_q(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
           Index individual)
{
    check_dims(x, q, p);
    const Index kk = q.k();
    require_interior_row(q.q.row(individual), individual);
    Vec g = Vec::Zero(kk - 1);
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto gx = x.counts(individual, m);
        if(gx == kMissing) continue;
        const double c = q.q.row(individual).dot(p.p.col(m));
        const double r = residual(gx, c, "grad_q");
        for(Index k = 0; k + 1 < kk; ++k) g[k] += r * (p.p(k, m) - p.p(kk - 1, m));
    }
    return g;
}

Vec grad_p(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
           Index marker)
{
    check_dims(x, q, p);
    const Index kk = q.k();
    Vec g = Vec::Zero(kk);
    for(Index i = 0; i < x.n_individuals(); ++i) {
        const auto gx = x.counts(i, marker);
        if(gx == kMissing) continue;
        const double c = q.q.row(i).dot(p.p.col(marker));
        const double r = residual(gx, c, "grad_p");
        g += r * q.q.row(i).transpose();
    }
    return g;
}

Mat hessian_q(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
              Index individual)
{
    check_dims(x, q, p);
    const Index kk = q.k();
    require_interior_row(q.q.row(individual), individual);
    Mat h = Mat::Zero(kk - 1, kk - 1);
    Vec u(kk - 1);
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto gx = x.counts(individual, m);
        if(gx == kMissing) continue;
        const double c = q.q.row(individual).dot(p.p.col(m));
        const double s = curvature(gx, c, "hessian_q");
        for(Index k = 0; k + 1 < kk; ++k) u[k] = p.p(k, m) - p.p(kk - 1, m);
        h.noalias() -= s * u * u.transpose();
    }
    return h;
}

Mat hessian_p(const GenotypeMatrix& x, const AncestryMatrix& q, const AlleleFreqMatrix& p,
              Index marker)
{
    check_dims(x, q, p);
    const Index kk = q.k();
    Mat h = Mat::Zero(kk, kk);
    for(Index i = 0; i < x.n_individuals(); ++i) {
        const auto gx = x.counts(i, marker);
        if(gx == kMissing) continue;
        const double c = q.q.row(i).dot(p.p.col(marker));
        const double s = curvature(gx, c, "hessian_p");
        h.noalias() -= s * q.q.row(i).transpose() * q.q.row(i);
    }
    return h;
}

} // namespace admix
