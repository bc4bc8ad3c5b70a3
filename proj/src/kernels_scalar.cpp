#include "rivulet/kernels/kernels.hpp"

#include <cassert>
#include <cmath>

namespace rivulet::kernels::scalar {

// Reductions accumulate left to right in a single chain; this order is the
// reference the managed-value coherence tests are pinned to.

double dot(std::span<const double> x, std::span<const double> y)
{
    assert(x.size() == y.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

double nrm2(std::span<const double> x)
{
    return std::sqrt(dot(x, x));
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void aypx(double b, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + b * y[i];
}

void waxpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> w)
{
    assert(x.size() == y.size() && x.size() == w.size());
    for (std::size_t i = 0; i < x.size(); ++i) w[i] = a * x[i] + y[i];
}

void scale(double a, std::span<double> x)
{
    for (auto& v : x) v *= a;
}

void pointwise_mult(std::span<const double> a, std::span<const double> b, std::span<double> out)
{
    assert(a.size() == b.size() && a.size() == out.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
}

void csr_spmv(std::span<const std::int64_t> row_offsets, std::span<const std::int32_t> cols,
              std::span<const double> vals, std::span<const double> x, std::span<double> y)
{
    const auto n_rows = row_offsets.size() - 1;
    for (std::size_t row = 0; row < n_rows; ++row) {
        double sum = 0.0;
        for (auto k = row_offsets[row]; k < row_offsets[row + 1]; ++k)
            sum += vals[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])];
        y[row] = sum;
    }
}

} // namespace rivulet::kernels::scalar
