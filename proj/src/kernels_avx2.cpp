#include "rivulet/kernels/kernels.hpp"

#if RIVULET_X86_64

#include <cassert>
#include <cmath>
#include <immintrin.h>

// Functions are compiled with per-function target attributes so the rest of
// the build stays at the baseline ISA. FMA is deliberately left out of the
// target set: mul followed by add keeps the elementwise kernels bit-identical
// to the scalar reference.
#define RIVULET_TARGET_AVX2 __attribute__((target("avx2")))

namespace rivulet::kernels::avx2 {

namespace {

RIVULET_TARGET_AVX2
inline double hsum(__m256d v)
{
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

} // namespace

RIVULET_TARGET_AVX2
double dot(std::span<const double> x, std::span<const double> y)
{
    assert(x.size() == y.size());
    const std::size_t n    = x.size();
    const std::size_t step = n & ~std::size_t{3};

    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < step; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d yv = _mm256_loadu_pd(y.data() + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(xv, yv));
    }
    double sum = hsum(acc);
    for (std::size_t i = step; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

RIVULET_TARGET_AVX2
double nrm2(std::span<const double> x)
{
    return std::sqrt(dot(x, x));
}

RIVULET_TARGET_AVX2
void axpy(double a, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    const std::size_t n    = x.size();
    const std::size_t step = n & ~std::size_t{3};
    const __m256d     av   = _mm256_set1_pd(a);

    for (std::size_t i = 0; i < step; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d yv = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
    }
    for (std::size_t i = step; i < n; ++i) y[i] += a * x[i];
}

RIVULET_TARGET_AVX2
void aypx(double b, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    const std::size_t n    = x.size();
    const std::size_t step = n & ~std::size_t{3};
    const __m256d     bv   = _mm256_set1_pd(b);

    for (std::size_t i = 0; i < step; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d yv = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(xv, _mm256_mul_pd(bv, yv)));
    }
    for (std::size_t i = step; i < n; ++i) y[i] = x[i] + b * y[i];
}

RIVULET_TARGET_AVX2
void waxpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> w)
{
    assert(x.size() == y.size() && x.size() == w.size());
    const std::size_t n    = x.size();
    const std::size_t step = n & ~std::size_t{3};
    const __m256d     av   = _mm256_set1_pd(a);

    for (std::size_t i = 0; i < step; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d yv = _mm256_loadu_pd(y.data() + i);
        _mm256_storeu_pd(w.data() + i, _mm256_add_pd(_mm256_mul_pd(av, xv), yv));
    }
    for (std::size_t i = step; i < n; ++i) w[i] = a * x[i] + y[i];
}

RIVULET_TARGET_AVX2
void scale(double a, std::span<double> x)
{
    const std::size_t n    = x.size();
    const std::size_t step = n & ~std::size_t{3};
    const __m256d     av   = _mm256_set1_pd(a);

    for (std::size_t i = 0; i < step; i += 4)
        _mm256_storeu_pd(x.data() + i, _mm256_mul_pd(av, _mm256_loadu_pd(x.data() + i)));
    for (std::size_t i = step; i < n; ++i) x[i] *= a;
}

RIVULET_TARGET_AVX2
void pointwise_mult(std::span<const double> a, std::span<const double> b, std::span<double> out)
{
    assert(a.size() == b.size() && a.size() == out.size());
    const std::size_t n    = a.size();
    const std::size_t step = n & ~std::size_t{3};

    for (std::size_t i = 0; i < step; i += 4) {
        const __m256d av = _mm256_loadu_pd(a.data() + i);
        const __m256d bv = _mm256_loadu_pd(b.data() + i);
        _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(av, bv));
    }
    for (std::size_t i = step; i < n; ++i) out[i] = a[i] * b[i];
}

RIVULET_TARGET_AVX2
void csr_spmv(std::span<const std::int64_t> row_offsets, std::span<const std::int32_t> cols,
              std::span<const double> vals, std::span<const double> x, std::span<double> y)
{
    const auto n_rows = row_offsets.size() - 1;
    for (std::size_t row = 0; row < n_rows; ++row) {
        const auto begin = static_cast<std::size_t>(row_offsets[row]);
        const auto end   = static_cast<std::size_t>(row_offsets[row + 1]);
        const auto len   = end - begin;
        const auto step  = len & ~std::size_t{3};

        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < step; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols.data() + begin + k));
            const __m256d xv  = _mm256_i32gather_pd(x.data(), idx, 8);
            const __m256d av  = _mm256_loadu_pd(vals.data() + begin + k);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(av, xv));
        }
        double sum = hsum(acc);
        for (std::size_t k = begin + step; k < end; ++k)
            sum += vals[k] * x[static_cast<std::size_t>(cols[k])];
        y[row] = sum;
    }
}

} // namespace rivulet::kernels::avx2

#endif // RIVULET_X86_64
