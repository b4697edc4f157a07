#ifndef ADMIX_RNG_H_
#define ADMIX_RNG_H_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <utility>

// Counter-friendly RNG utilities. Streams are derived from (seed, index)
// pairs so that parallel loops produce identical draws regardless of
// thread count or iteration order.

namespace admix {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and up to two indices.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ (b + 0xd1b54a32d192ed03ULL));
    return h;
}

// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256 {
  public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed)
    {
        std::uint64_t x = seed;
        for(auto& w : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()()
    {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Uniform on (0,1]; never returns 0 so log(u) is safe.
template <class Rng>
inline double uniform01(Rng& rng)
{
    return (double((rng() >> 11)) + 1.0) * 0x1.0p-53;
}

// Uniform on [lo, hi).
template <class Rng>
inline double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53;
}

// One standard-normal pair via Box-Muller.
template <class Rng>
inline std::pair<double, double> normal_pair(Rng& rng)
{
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

template <class Rng>
inline Eigen::VectorXd standard_normal(Rng& rng, Eigen::Index n)
{
    Eigen::VectorXd z(n);
    Eigen::Index i = 0;
    while(i + 1 < n) {
        auto [a, b] = normal_pair(rng);
        z[i++] = a;
        z[i++] = b;
    }
    if(i < n) z[i] = normal_pair(rng).first;
    return z;
}

// Binomial(2, c) from a single uniform.
inline int binomial2(double c, double u)
{
    const double p0 = (1.0 - c) * (1.0 - c);
    if(u <= p0) return 0;
    if(u <= p0 + 2.0 * c * (1.0 - c)) return 1;
    return 2;
}

// Uniform draw from the (k-1)-simplex via normalized exponentials.
template <class Rng>
inline Eigen::RowVectorXd simplex_uniform(Rng& rng, Eigen::Index k)
{
    Eigen::RowVectorXd e(k);
    for(Eigen::Index j = 0; j < k; ++j) e[j] = -std::log(uniform01(rng));
    return e / e.sum();
}

} // namespace admix

#endif // ADMIX_RNG_H_
