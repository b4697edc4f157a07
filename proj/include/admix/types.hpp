#ifndef ADMIX_TYPES_H_
#define ADMIX_TYPES_H_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace admix {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using Index = Eigen::Index;
using GenoMat = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Genotype value marking an unobserved cell (matches the on-disk convention).
inline constexpr std::int8_t kMissing = 9;

// Thrown on malformed files, invalid matrices and inconsistent problem
// setups. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on numerical failures (singular information blocks etc.).
// The CLI maps this to exit code 4.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// N x M matrix of reference-allele counts, entries 0/1/2 or kMissing.
struct GenotypeMatrix {
    GenoMat counts;

    Index n_individuals() const { return counts.rows(); }
    Index n_markers() const { return counts.cols(); }

    bool observed(Index i, Index m) const { return counts(i, m) != kMissing; }

    Index observed_in_row(Index i) const
    {
        Index n = 0;
        for(Index m = 0; m < counts.cols(); ++m) n += observed(i, m);
        return n;
    }

    Index observed_in_col(Index m) const
    {
        Index n = 0;
        for(Index i = 0; i < counts.rows(); ++i) n += observed(i, m);
        return n;
    }

    void validate() const
    {
        if(counts.rows() <= 0 || counts.cols() <= 0)
            throw InputError("genotype matrix must have positive dimensions");
        for(Index i = 0; i < counts.rows(); ++i)
            for(Index m = 0; m < counts.cols(); ++m) {
                const auto v = counts(i, m);
                if(v != 0 && v != 1 && v != 2 && v != kMissing)
                    throw InputError("genotype entry at (" + std::to_string(i) + ","
                                     + std::to_string(m) + ") is " + std::to_string(int(v))
                                     + "; expected 0, 1, 2 or " + std::to_string(int(kMissing)));
            }
    }
};

// N x K row-stochastic ancestry fractions.
struct AncestryMatrix {
    Mat q;

    Index n_individuals() const { return q.rows(); }
    Index k() const { return q.cols(); }

    void validate(double tol_simplex = 1e-9) const
    {
        if(q.rows() <= 0 || q.cols() <= 0)
            throw InputError("ancestry matrix must have positive dimensions");
        for(Index i = 0; i < q.rows(); ++i) {
            double s = 0;
            for(Index k = 0; k < q.cols(); ++k) {
                const double v = q(i, k);
                if(!(v >= 0.0 && v <= 1.0))
                    throw InputError("ancestry entry at (" + std::to_string(i) + ","
                                     + std::to_string(k) + ") outside [0,1]");
                s += v;
            }
            if(std::abs(s - 1.0) > tol_simplex)
                throw InputError("ancestry row " + std::to_string(i)
                                 + " sums to " + std::to_string(s) + ", not 1");
        }
    }
};

// K x M reference-allele frequencies.
struct AlleleFreqMatrix {
    Mat p;

    Index k() const { return p.rows(); }
    Index n_markers() const { return p.cols(); }

    void validate() const
    {
        if(p.rows() <= 0 || p.cols() <= 0)
            throw InputError("allele frequency matrix must have positive dimensions");
        for(Index k = 0; k < p.rows(); ++k)
            for(Index m = 0; m < p.cols(); ++m)
                if(!(p(k, m) >= 0.0 && p(k, m) <= 1.0))
                    throw InputError("allele frequency at (" + std::to_string(k) + ","
                                     + std::to_string(m) + ") outside [0,1]");
    }
};

// N x M Binomial success probabilities c_{i,m} = <q_i, p_m>.
struct SuccessProbMatrix {
    Mat c;
};

struct ModelConfig {
    int k_populations = 2;
    double eps_clamp = 1e-6;    // interior clamp for EM iterates
    double eps_boundary = 1e-4; // boundary-detection threshold
    double tol_simplex = 1e-9;

    void validate() const
    {
        if(k_populations < 1) throw InputError("k_populations must be >= 1");
        if(!(0.0 < eps_clamp && eps_clamp < eps_boundary && eps_boundary < 0.5))
            throw InputError("require 0 < eps_clamp < eps_boundary < 0.5");
        if(!(tol_simplex > 0)) throw InputError("tol_simplex must be positive");
    }
};

} // namespace admix

#endif // ADMIX_TYPES_H_
