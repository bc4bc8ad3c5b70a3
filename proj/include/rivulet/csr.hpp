#pragma once

#include "rivulet/common.hpp"
#include "rivulet/deptrack.hpp"
#include "rivulet/detail/dual_buffer.hpp"
#include "rivulet/vector.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace rivulet {

namespace detail {

struct MatState {
    MatState(std::size_t n_rows_in, std::size_t n_cols_in, std::vector<std::int64_t> offsets_in,
             std::vector<std::int32_t> cols_in, std::size_t nnz, std::string name_in)
        : id(deptrack::tracker().register_object(name_in.empty() ? "mat" : name_in)),
          name(std::move(name_in)),
          n_rows(n_rows_in),
          n_cols(n_cols_in),
          row_offsets(std::move(offsets_in)),
          col_indices(std::move(cols_in)),
          values(nnz, id)
    {
    }

    ~MatState() { deptrack::tracker().unregister_object(id); }

    ObjectId    id;
    std::string name;
    std::size_t n_rows;
    std::size_t n_cols;

    std::vector<std::int64_t> row_offsets;
    std::vector<std::int32_t> col_indices;
    DualBuffer                values;

    // The index arrays are immutable, so their one-time device push is
    // tracked with a flag rather than a dual buffer.
    std::mutex structure_mutex;
    bool       structure_on_device = false;
};

} // namespace detail

// Compressed sparse row matrix. Construction validates well-formedness:
// row_offsets starts at 0, is nondecreasing and ends at nnz; column indices
// are in range and strictly increasing within each row.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::int64_t> row_offsets,
              std::vector<std::int32_t> col_indices, std::vector<double> values,
              std::string name = "");

    static CsrMatrix identity(std::size_t n, std::string name = "");

    std::size_t rows() const { return state_->n_rows; }
    std::size_t cols() const { return state_->n_cols; }
    std::size_t nnz() const { return state_->col_indices.size(); }
    ObjectId    id() const { return state_->id; }
    const std::string& name() const { return state_->name; }

    std::span<const std::int64_t> row_offsets() const { return state_->row_offsets; }
    std::span<const std::int32_t> col_indices() const { return state_->col_indices; }

    // Host view of the values; the matrix is never written on the device, so
    // this is always current.
    std::span<const double> values() const { return state_->values.read(false); }

    // Diagonal entries as a fresh vector (zero where absent).
    DenseVector diagonal(std::string name = "") const;

    void evict_device();

    const std::shared_ptr<detail::MatState>& state() const { return state_; }

private:
    std::shared_ptr<detail::MatState> state_;
};

} // namespace rivulet
