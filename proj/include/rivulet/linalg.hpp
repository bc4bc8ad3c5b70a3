#pragma once

#include "rivulet/context.hpp"
#include "rivulet/csr.hpp"
#include "rivulet/expr.hpp"
#include "rivulet/managed.hpp"
#include "rivulet/vector.hpp"

#include <string>

namespace rivulet {

enum class NormType { Norm2 };

namespace detail {

// Scalar argument to a stream-augmented vector operation: a managed value, a
// small expression over managed values (e.g. a negated scalar), or a plain
// constant. Expressions are folded at issue time and evaluated inside the
// consuming kernel, so the value never has to visit the host.
class ScalarArg {
public:
    ScalarArg(const Managed& m);
    ScalarArg(const Expr& e);
    ScalarArg(double v);

    const std::vector<std::shared_ptr<ManagedState>>& leaves() const { return leaves_; }
    const std::vector<ObjectId>& leaf_ids() const { return leaf_ids_; }
    std::size_t op_count() const { return op_count_; }

    double value_on(bool device) const;

private:
    ExprNodePtr                                root_;
    std::vector<std::shared_ptr<ManagedState>> leaves_;
    std::vector<ObjectId>                      leaf_ids_;
    std::size_t                                op_count_ = 0;
};

} // namespace detail

// ---- stream-augmented (asynchronous) operations ----------------------------
//
// Each call enqueues exactly one kernel task on `ctx`, bracketed with the
// access marks its operands require. The optional label names the kernel in
// traces and dependency diagnostics.

void vec_norm_async(const DenseVector& v, NormType type, Managed& out, const Context& ctx,
                    std::string label = "");
void vec_scale_async(DenseVector& v, detail::ScalarArg alpha, const Context& ctx,
                     std::string label = "");
void vec_dot_async(const DenseVector& x, const DenseVector& y, Managed& out, const Context& ctx,
                   std::string label = "");
void vec_axpy_async(DenseVector& y, detail::ScalarArg alpha, const DenseVector& x,
                    const Context& ctx, std::string label = "");
void vec_aypx_async(DenseVector& y, detail::ScalarArg beta, const DenseVector& x,
                    const Context& ctx, std::string label = "");
void vec_waxpy_async(DenseVector& w, detail::ScalarArg alpha, const DenseVector& x,
                     const DenseVector& y, const Context& ctx, std::string label = "");
void vec_copy_async(const DenseVector& src, DenseVector& dst, const Context& ctx,
                    std::string label = "");
void vec_set_async(DenseVector& v, double value, const Context& ctx, std::string label = "");

// Elementwise multiply; the Jacobi preconditioner application.
void vec_pointwise_mult_async(const DenseVector& a, const DenseVector& b, DenseVector& out,
                              const Context& ctx, std::string label = "");

void mat_mult(const CsrMatrix& A, const DenseVector& x, DenseVector& y, const Context& ctx,
              std::string label = "");

// ---- synchronous forms ------------------------------------------------------
//
// Routed through the shared globally-blocking context: they wait for all
// prior work everywhere and complete before returning, which is what keeps
// them coherent with any asynchronous work already in flight.

void vec_aypx(DenseVector& y, double beta, const DenseVector& x); // y <- x + beta*y
void mat_mult(const CsrMatrix& A, const DenseVector& x, DenseVector& y);

} // namespace rivulet
