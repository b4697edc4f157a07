#ifndef ADMIX_PARALLEL_H_
#define ADMIX_PARALLEL_H_

#include <Eigen/Dense>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace admix {

// Every parallel kernel has a serial twin selected by this switch; the
// serial path is the reference the tests compare against.
enum class Exec { Serial, Parallel };

inline int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n)
{
#ifdef _OPENMP
    if(n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline double wall_time()
{
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return 0.0;
#endif
}

// Runs f(i) for i in [0, n). Bodies must write to disjoint state; results
// are then identical between the serial and parallel paths.
template <class F>
inline void parallel_for(Eigen::Index n, Exec exec, F&& f)
{
    if(exec == Exec::Serial) {
        for(Eigen::Index i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for(Eigen::Index i = 0; i < n; ++i) f(i);
#else
    for(Eigen::Index i = 0; i < n; ++i) f(i);
#endif
}

} // namespace admix

#endif // ADMIX_PARALLEL_H_
