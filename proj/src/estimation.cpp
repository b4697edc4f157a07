#include "admix/estimation.hpp"

#include "admix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace admix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void EstimationProblem::validate() const
{
    x.validate();
    config.validate();
    if(k != config.k_populations)
        throw InputError("problem k and config k_populations disagree");
    if(k < 1) throw InputError("k must be >= 1");
    if(known_q) {
        if(known_q->rows() != n() || known_q->cols() != k)
            throw InputError("known_q must be N x K");
        if(n_free < 0 || n_free > n()) throw InputError("n_free outside [0, N]");
    }
    if(known_p) {
        if(known_p->rows() != k || known_p->cols() != m())
            throw InputError("known_p must be K x M");
        if(m_free < 0 || m_free > m()) throw InputError("m_free outside [0, M]");
    }
    if(effective_n_free() == 0 && effective_m_free() == 0)
        throw InputError("nothing to estimate: all ancestries and frequencies are fixed");
    const bool unsupervised = !known_q && !known_p;
    if(unsupervised && (k > n() || k > m()))
        throw InputError("unsupervised fit needs K <= min(N, M)");
}

RowVec box_simplex_weight_opt(const RowVec& w, double lo, double hi)
{
    const Index kk = w.size();
    if(kk == 1) return RowVec::Ones(1);
    const double wsum = w.sum();
    if(!(wsum > 0)) throw std::invalid_argument("box_simplex_weight_opt: weights must sum > 0");

    // Fast path: unconstrained maximizer w/sum(w) already inside the box.
    RowVec q = w / wsum;
    if((q.array() >= lo).all() && (q.array() <= hi).all()) return q;

    // KKT form q_k = clip(w_k/lambda, lo, hi); sum is decreasing in lambda.
    // Scan the segments between breakpoints; on each, the clip sets are fixed.
    std::vector<double> bp;
    bp.reserve(std::size_t(2 * kk));
    for(Index k = 0; k < kk; ++k) {
        if(w[k] > 0) {
            bp.push_back(w[k] / hi);
            bp.push_back(w[k] / lo);
        }
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    auto solve_segment = [&](double lam_lo, double lam_hi) -> double {
        const double probe = 0.5 * (lam_lo + lam_hi);
        int n_hi = 0, n_lo = 0;
        double wfree = 0;
        for(Index k = 0; k < kk; ++k) {
            const double r = w[k] / probe;
            if(r >= hi)
                ++n_hi;
            else if(r <= lo)
                ++n_lo;
            else
                wfree += w[k];
        }
        const double budget = 1.0 - hi * n_hi - lo * n_lo;
        if(wfree <= 0) return budget == 0 ? probe : -1.0;
        const double lam = wfree / budget;
        if(budget <= 0) return -1.0;
        return (lam >= lam_lo - 1e-12 * lam_hi && lam <= lam_hi * (1 + 1e-12)) ? lam : -1.0;
    };

    double lambda = -1.0;
    double prev = bp.front() * 0.5;
    for(std::size_t s = 0; s <= bp.size() && lambda < 0; ++s) {
        const double next = (s < bp.size()) ? bp[s] : bp.back() * 2.0;
        if(next > prev) lambda = solve_segment(prev, next);
        prev = next;
    }
    if(lambda < 0) {
        // Degenerate fallback: saturate extremes and renormalize the rest.
        lambda = wsum;
    }
    for(Index k = 0; k < kk; ++k) q[k] = std::clamp(w[k] / lambda, lo, hi);
    const double drift = q.sum();
    if(std::abs(drift - 1.0) > 1e-12) {
        // Distribute roundoff over the interior coordinates.
        double interior = 0;
        for(Index k = 0; k < kk; ++k)
            if(q[k] > lo && q[k] < hi) interior += q[k];
        if(interior > 0) {
            const double scale = (1.0 - (drift - interior)) / interior;
            for(Index k = 0; k < kk; ++k)
                if(q[k] > lo && q[k] < hi) q[k] *= scale;
        }
    }
    return q;
}

namespace {

struct WorkState {
    Mat q;  // N x K
    Mat p;  // K x M
};

void init_state(const EstimationProblem& pr, std::uint64_t seed, WorkState& st)
{
    const Index n = pr.n(), m = pr.m(), kk = pr.k;
    const double eps = pr.config.eps_clamp;
    Xoshiro256 rng(derive_stream(seed, 0x1717));

    st.q.resize(n, kk);
    if(pr.known_q) st.q = *pr.known_q;
    const Index nf = pr.effective_n_free();
    for(Index i = 0; i < nf; ++i) {
        RowVec row = simplex_uniform(rng, kk);
        // Affine shrink keeps the draw inside the clamp box.
        st.q.row(i) = RowVec::Constant(kk, eps) + (1.0 - double(kk) * eps) * row;
    }

    st.p.resize(kk, m);
    if(pr.known_p) st.p = *pr.known_p;
    const Index mf = pr.effective_m_free();
    for(Index mm = 0; mm < mf; ++mm)
        for(Index k = 0; k < kk; ++k) st.p(k, mm) = uniform(rng, 0.1, 0.9);
}

double state_loglik(const GenotypeMatrix& x, const WorkState& st, Exec exec)
{
    AncestryMatrix q{st.q};
    AlleleFreqMatrix p{st.p};
    return log_likelihood(x, q, p, exec);
}

void em_q_step(const EstimationProblem& pr, WorkState& st, Exec exec)
{
    const Index kk = pr.k;
    const double eps = pr.config.eps_clamp;
    parallel_for(pr.effective_n_free(), exec, [&](Index i) {
        RowVec w = RowVec::Zero(kk);
        Index observed = 0;
        for(Index m = 0; m < pr.m(); ++m) {
            const auto g = pr.x.counts(i, m);
            if(g == kMissing) continue;
            ++observed;
            const double c = st.q.row(i).dot(st.p.col(m));
            for(Index k = 0; k < kk; ++k) {
                double t = 0;
                if(g > 0) t += double(g) * st.p(k, m) / c;
                if(g < 2) t += double(2 - g) * (1.0 - st.p(k, m)) / (1.0 - c);
                w[k] += st.q(i, k) * t;
            }
        }
        if(observed == 0 || !(w.sum() > 0)) return;
        st.q.row(i) = box_simplex_weight_opt(w, eps, 1.0 - eps);
    });
}

void em_p_step(const EstimationProblem& pr, WorkState& st, Exec exec)
{
    const Index kk = pr.k;
    const double eps = pr.config.eps_clamp;
    parallel_for(pr.effective_m_free(), exec, [&](Index m) {
        Vec a = Vec::Zero(kk), b = Vec::Zero(kk);
        for(Index i = 0; i < pr.n(); ++i) {
            const auto g = pr.x.counts(i, m);
            if(g == kMissing) continue;
            const double c = st.q.row(i).dot(st.p.col(m));
            for(Index k = 0; k < kk; ++k) {
                if(g > 0) a[k] += double(g) * st.q(i, k) * st.p(k, m) / c;
                if(g < 2) b[k] += double(2 - g) * st.q(i, k) * (1.0 - st.p(k, m)) / (1.0 - c);
            }
        }
        for(Index k = 0; k < kk; ++k) {
            const double tot = a[k] + b[k];
            if(tot > 0) st.p(k, m) = std::clamp(a[k] / tot, eps, 1.0 - eps);
        }
    });
}

} // namespace

FitResult fit_em(const EstimationProblem& problem, Index max_iter, double tol_ll,
                 std::uint64_t seed, Exec exec)
{
    problem.validate();
    WorkState st;
    init_state(problem, seed, st);

    FitResult res;
    double ll = state_loglik(problem.x, st, exec);
    if(!std::isfinite(ll))
        throw InputError("log-likelihood is not finite at the starting point; "
                         "the fixed parameter blocks are incompatible with the data");
    res.loglik_trace.push_back(ll);

    for(Index it = 0; it < max_iter; ++it) {
        em_q_step(problem, st, exec);
        em_p_step(problem, st, exec);
        const double ll_new = state_loglik(problem.x, st, exec);
        res.loglik_trace.push_back(ll_new);
        res.iterations = it + 1;
        if(ll_new - ll < tol_ll) {
            res.converged = true;
            break;
        }
        ll = ll_new;
    }

    res.q_hat.q = std::move(st.q);
    res.p_hat.p = std::move(st.p);
    const double eb = problem.config.eps_boundary;
    for(Index i = 0; i < problem.effective_n_free(); ++i)
        for(Index k = 0; k < problem.k; ++k) {
            const double v = res.q_hat.q(i, k);
            if(v <= eb || v >= 1.0 - eb) res.boundary_flags_q.emplace_back(i, k);
        }
    return res;
}

namespace {

double newton_row_ll(const GenotypeMatrix& x, const Mat& p, Index i, const RowVec& q)
{
    double s = 0;
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto g = x.counts(i, m);
        if(g == kMissing) continue;
        const double c = q.dot(p.col(m));
        s += cell_loglik(g, c);
        if(s == kNegInf) return kNegInf;
    }
    return s;
}

// One supervised EM sweep for a single row; exact zeros are preserved.
RowVec em_row_step(const GenotypeMatrix& x, const Mat& p, Index i, const RowVec& q)
{
    const Index kk = q.size();
    RowVec w = RowVec::Zero(kk);
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto g = x.counts(i, m);
        if(g == kMissing) continue;
        const double c = q.dot(p.col(m));
        for(Index k = 0; k < kk; ++k) {
            double t = 0;
            if(g > 0) t += double(g) * p(k, m) / c;
            if(g < 2) t += double(2 - g) * (1.0 - p(k, m)) / (1.0 - c);
            w[k] += q[k] * t;
        }
    }
    const double s = w.sum();
    return s > 0 ? RowVec(w / s) : q;
}

} // namespace

Vec fit_supervised_newton(const GenotypeMatrix& x, const AlleleFreqMatrix& p, Index individual,
                          const ModelConfig& config, const std::optional<RowVec>& start,
                          double kkt_tol, Index max_iter)
{
    config.validate();
    const Index kk = p.k();
    if(individual < 0 || individual >= x.n_individuals())
        throw InputError("individual index out of range");

    RowVec q = start ? *start : RowVec::Constant(kk, 1.0 / double(kk));
    if(std::abs(q.sum() - 1.0) > config.tol_simplex || (q.array() <= 0).any())
        throw InputError("fit_supervised_newton needs a strictly interior start on the simplex");

    double ll = newton_row_ll(x, p.p, individual, q);
    if(!std::isfinite(ll))
        throw InputError("log-likelihood not finite at the starting point");

    std::vector<bool> pinned(std::size_t(kk), false);

    for(Index it = 0; it < max_iter; ++it) {
        std::vector<Index> free;
        for(Index k = 0; k < kk; ++k)
            if(!pinned[std::size_t(k)]) free.push_back(k);

        // Pivot: the largest free coordinate absorbs the simplex constraint.
        Index kappa = free[0];
        for(Index k : free)
            if(q[k] > q[kappa]) kappa = k;

        std::vector<Index> red; // free minus pivot
        for(Index k : free)
            if(k != kappa) red.push_back(k);
        const Index d = Index(red.size());

        // Per-marker residuals and curvatures at the current point.
        Vec g = Vec::Zero(d);
        Mat h = Mat::Zero(d, d);
        Vec gfull = Vec::Zero(kk); // unreduced gradient, for multiplier checks
        Vec u(d);
        for(Index m = 0; m < x.n_markers(); ++m) {
            const auto gx = x.counts(individual, m);
            if(gx == kMissing) continue;
            const double c = q.dot(p.p.col(m));
            double r = 0, s = 0;
            if(gx > 0) {
                r += double(gx) / c;
                s += double(gx) / (c * c);
            }
            if(gx < 2) {
                r -= double(2 - gx) / (1.0 - c);
                s += double(2 - gx) / ((1.0 - c) * (1.0 - c));
            }
            for(Index j = 0; j < d; ++j) u[j] = p.p(red[std::size_t(j)], m) - p.p(kappa, m);
            g.noalias() += r * u;
            h.noalias() += s * u * u.transpose();
            for(Index k = 0; k < kk; ++k) gfull[k] += r * p.p(k, m);
        }

        const double gnorm = d > 0 ? g.lpNorm<Eigen::Infinity>() : 0.0;
        if(gnorm <= kkt_tol) {
            // Stationary on the free set; release pinned coordinates whose
            // multiplier has the wrong sign.
            bool released = false;
            for(Index k = 0; k < kk; ++k) {
                if(!pinned[std::size_t(k)]) continue;
                if(gfull[k] - gfull[kappa] > kkt_tol) {
                    pinned[std::size_t(k)] = false;
                    released = true;
                }
            }
            if(!released) break;
            continue;
        }

        // Ascent direction: Newton when the curvature matrix is usable.
        Vec dir;
        bool newton_ok = false;
        if(d > 0) {
            Eigen::LDLT<Mat> ldlt(h);
            if(ldlt.info() == Eigen::Success) {
                dir = ldlt.solve(g);
                newton_ok = dir.allFinite() && dir.dot(g) > 0;
            }
        }

        RowVec q_new;
        double ll_new = kNegInf;
        if(newton_ok) {
            // Largest feasible step, then backtrack on the likelihood.
            double alpha = 1.0;
            const double pivot_move = -dir.sum();
            for(Index j = 0; j < d; ++j)
                if(dir[j] < 0) alpha = std::min(alpha, -q[red[std::size_t(j)]] / dir[j]);
            if(pivot_move < 0) alpha = std::min(alpha, -q[kappa] / pivot_move);

            while(alpha > 1e-14) {
                q_new = q;
                for(Index j = 0; j < d; ++j) q_new[red[std::size_t(j)]] += alpha * dir[j];
                q_new[kappa] += alpha * pivot_move;
                for(Index k : free) q_new[k] = std::max(q_new[k], 0.0);
                q_new /= q_new.sum();
                ll_new = newton_row_ll(x, p.p, individual, q_new);
                if(ll_new >= ll) break;
                alpha *= 0.5;
            }
            if(!(ll_new >= ll)) newton_ok = false;
        }
        if(!newton_ok) {
            q_new = em_row_step(x, p.p, individual, q);
            ll_new = newton_row_ll(x, p.p, individual, q_new);
            if(!(ll_new >= ll) || (q_new - q).lpNorm<Eigen::Infinity>() < 1e-16) {
                // No usable direction and EM is stalled: accept stationarity.
                break;
            }
        }

        q = q_new;
        ll = ll_new;
        for(Index k : free) {
            if(q[k] <= 1e-15) {
                q[k] = 0.0;
                pinned[std::size_t(k)] = true;
            }
        }
        q /= q.sum();
    }
    return q.transpose();
}

double simplex_kkt_residual(const GenotypeMatrix& x, const AlleleFreqMatrix& p, Index individual,
                            const RowVec& q_row)
{
    const Index kk = p.k();
    Vec g = Vec::Zero(kk);
    for(Index m = 0; m < x.n_markers(); ++m) {
        const auto gx = x.counts(individual, m);
        if(gx == kMissing) continue;
        const double c = q_row.dot(p.p.col(m));
        double r = 0;
        if(gx > 0) {
            if(c <= 0) return std::numeric_limits<double>::infinity();
            r += double(gx) / c;
        }
        if(gx < 2) {
            if(c >= 1) return std::numeric_limits<double>::infinity();
            r -= double(2 - gx) / (1.0 - c);
        }
        for(Index k = 0; k < kk; ++k) g[k] += r * p.p(k, m);
    }
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    int n_sup = 0;
    for(Index k = 0; k < kk; ++k) {
        if(q_row[k] > 1e-12) {
            gmax = std::max(gmax, g[k]);
            gmin = std::min(gmin, g[k]);
            ++n_sup;
        }
    }
    double resid = n_sup > 0 ? gmax - gmin : 0.0;
    for(Index k = 0; k < kk; ++k)
        if(q_row[k] <= 1e-12) resid = std::max(resid, g[k] - gmax);
    return resid;
}

AlignResult align_labels(const Mat& q_hat, const Mat& p_hat, const Mat& q_ref, const Mat& p_ref)
{
    const Index kk = q_hat.cols();
    if(q_ref.cols() != kk || p_hat.rows() != kk || p_ref.rows() != kk)
        throw InputError("align_labels: population counts disagree");
    if(q_hat.rows() != q_ref.rows()) throw InputError("align_labels: individual counts disagree");
    if(kk > 8) throw InputError("align_labels: exhaustive search supports K <= 8");

    std::vector<int> perm(std::size_t(kk));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0;
        for(Index k = 0; k < kk; ++k)
            cost += (q_hat.col(perm[std::size_t(k)]) - q_ref.col(k)).lpNorm<1>();
        if(cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while(std::next_permutation(perm.begin(), perm.end()));

    AlignResult out;
    out.perm = best;
    out.l1_cost = best_cost;
    out.q_aligned.resize(q_hat.rows(), kk);
    out.p_aligned.resize(kk, p_hat.cols());
    for(Index k = 0; k < kk; ++k) {
        out.q_aligned.col(k) = q_hat.col(best[std::size_t(k)]);
        out.p_aligned.row(k) = p_hat.row(best[std::size_t(k)]);
    }
    return out;
}

double metric_d(const Mat& q_a, const Mat& p_a, const Mat& q_b, const Mat& p_b)
{
    if(q_a.rows() != q_b.rows() || q_a.cols() != q_b.cols() || p_a.rows() != p_b.rows()
       || p_a.cols() != p_b.cols())
        throw InputError("metric_d: dimension mismatch");
    double s = 0;
    double w = 0.5;
    for(Index i = 0; i < q_a.rows(); ++i, w *= 0.5)
        s += w * (q_a.row(i) - q_b.row(i)).lpNorm<1>();
    w = 0.5;
    for(Index m = 0; m < p_a.cols(); ++m, w *= 0.5)
        s += w * (p_a.col(m) - p_b.col(m)).lpNorm<1>();
    return s;
}

} // namespace admix
