#pragma once

// Arithmetic inner loops backing the vector/matrix operations. Every kernel
// exists in a scalar reference form and (on x86-64) an AVX2 form; the
// dispatch layer picks one at startup and can be overridden for testing.
//
// Elementwise kernels produce bit-identical results across backends (no FMA
// contraction). Reductions use a fixed lane/accumulation order, so results
// are deterministic for a given backend but may differ between backends by
// rounding; callers that compare across backends use a tolerance.

#include <cstdint>
#include <span>

#if defined(__x86_64__) || defined(_M_X64)
#define RIVULET_X86_64 1
#else
#define RIVULET_X86_64 0
#endif

namespace rivulet::kernels {

enum class Backend { Scalar, Avx2 };

const char* to_string(Backend backend);

bool    avx2_supported();
Backend active_backend();

// Throws if the requested backend is unsupported on this machine. The
// RIVULET_KERNELS environment variable ("scalar" or "avx2") overrides the
// automatic pick at first use.
void select_backend(Backend backend);
void select_auto();

// ---- dispatched entry points ----------------------------------------------

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void   axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x
void   aypx(double b, std::span<const double> x, std::span<double> y);  // y = x + b*y
void   waxpy(double a, std::span<const double> x, std::span<const double> y,
             std::span<double> w);                                      // w = a*x + y
void   scale(double a, std::span<double> x);                            // x *= a
void   pointwise_mult(std::span<const double> a, std::span<const double> b,
                      std::span<double> out);                           // out = a.*b
void   csr_spmv(std::span<const std::int64_t> row_offsets, std::span<const std::int32_t> cols,
                std::span<const double> vals, std::span<const double> x, std::span<double> y);

// ---- per-backend implementations (exposed for equivalence tests) ----------

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void   axpy(double a, std::span<const double> x, std::span<double> y);
void   aypx(double b, std::span<const double> x, std::span<double> y);
void   waxpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> w);
void   scale(double a, std::span<double> x);
void   pointwise_mult(std::span<const double> a, std::span<const double> b, std::span<double> out);
void   csr_spmv(std::span<const std::int64_t> row_offsets, std::span<const std::int32_t> cols,
                std::span<const double> vals, std::span<const double> x, std::span<double> y);
} // namespace scalar

#if RIVULET_X86_64
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);
void   axpy(double a, std::span<const double> x, std::span<double> y);
void   aypx(double b, std::span<const double> x, std::span<double> y);
void   waxpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> w);
void   scale(double a, std::span<double> x);
void   pointwise_mult(std::span<const double> a, std::span<const double> b, std::span<double> out);
void   csr_spmv(std::span<const std::int64_t> row_offsets, std::span<const std::int32_t> cols,
                std::span<const double> vals, std::span<const double> x, std::span<double> y);
} // namespace avx2
#endif

} // namespace rivulet::kernels
