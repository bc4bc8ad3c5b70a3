#include "rivulet/kernels/kernels.hpp"

#include "rivulet/common.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace rivulet::kernels {

const char* to_string(Backend backend)
{
    switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "?";
}

bool avx2_supported()
{
#if RIVULET_X86_64
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

struct Table {
    double (*dot)(std::span<const double>, std::span<const double>);
    double (*nrm2)(std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    void (*aypx)(double, std::span<const double>, std::span<double>);
    void (*waxpy)(double, std::span<const double>, std::span<const double>, std::span<double>);
    void (*scale)(double, std::span<double>);
    void (*pointwise_mult)(std::span<const double>, std::span<const double>, std::span<double>);
    void (*csr_spmv)(std::span<const std::int64_t>, std::span<const std::int32_t>,
                     std::span<const double>, std::span<const double>, std::span<double>);
};

constexpr Table kScalarTable{scalar::dot,   scalar::nrm2,  scalar::axpy,
                             scalar::aypx,  scalar::waxpy, scalar::scale,
                             scalar::pointwise_mult, scalar::csr_spmv};

#if RIVULET_X86_64
constexpr Table kAvx2Table{avx2::dot,   avx2::nrm2,  avx2::axpy,
                           avx2::aypx,  avx2::waxpy, avx2::scale,
                           avx2::pointwise_mult, avx2::csr_spmv};
#endif

std::atomic<const Table*> g_table{nullptr};
std::atomic<Backend>      g_backend{Backend::Scalar};
std::once_flag            g_init_once;

void install(Backend backend)
{
    switch (backend) {
    case Backend::Scalar:
        g_table.store(&kScalarTable, std::memory_order_release);
        break;
    case Backend::Avx2:
#if RIVULET_X86_64
        if (!avx2_supported()) throw Error("kernels: AVX2 not supported on this CPU");
        g_table.store(&kAvx2Table, std::memory_order_release);
        break;
#else
        throw Error("kernels: AVX2 backend unavailable on this architecture");
#endif
    }
    g_backend.store(backend, std::memory_order_release);
}

void auto_install()
{
    if (const char* env = std::getenv("RIVULET_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return install(Backend::Scalar);
        if (std::strcmp(env, "avx2") == 0) return install(Backend::Avx2);
    }
    install(avx2_supported() ? Backend::Avx2 : Backend::Scalar);
}

const Table& table()
{
    std::call_once(g_init_once, auto_install);
    return *g_table.load(std::memory_order_acquire);
}

} // namespace

Backend active_backend()
{
    table();
    return g_backend.load(std::memory_order_acquire);
}

void select_backend(Backend backend)
{
    table();
    install(backend);
}

void select_auto()
{
    table();
    auto_install();
}

double dot(std::span<const double> x, std::span<const double> y) { return table().dot(x, y); }
double nrm2(std::span<const double> x) { return table().nrm2(x); }

void axpy(double a, std::span<const double> x, std::span<double> y) { table().axpy(a, x, y); }
void aypx(double b, std::span<const double> x, std::span<double> y) { table().aypx(b, x, y); }

void waxpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> w)
{
    table().waxpy(a, x, y, w);
}

void scale(double a, std::span<double> x) { table().scale(a, x); }

void pointwise_mult(std::span<const double> a, std::span<const double> b, std::span<double> out)
{
    table().pointwise_mult(a, b, out);
}

void csr_spmv(std::span<const std::int64_t> row_offsets, std::span<const std::int32_t> cols,
              std::span<const double> vals, std::span<const double> x, std::span<double> y)
{
    table().csr_spmv(row_offsets, cols, vals, x, y);
}

} // namespace rivulet::kernels
