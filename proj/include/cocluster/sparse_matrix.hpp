#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocluster {

using Index = std::size_t;

/// Compressed-row storage for a nonnegative weight matrix. Rows are terms,
/// columns are documents in the text-clustering setting, but nothing here
/// cares. Column indices are strictly increasing within a row; explicit
/// zeros may be stored but carry no meaning.
struct SparseMatrix {
    Index n_rows = 0;
    Index n_cols = 0;
    std::vector<Index> row_offsets;  // length n_rows + 1
    std::vector<Index> col_indices;
    std::vector<double> values;

    SparseMatrix() : row_offsets(1, 0) {}

    SparseMatrix(Index rows, Index cols, std::vector<Index> offsets,
                 std::vector<Index> cols_idx, std::vector<double> vals)
        : n_rows(rows),
          n_cols(cols),
          row_offsets(std::move(offsets)),
          col_indices(std::move(cols_idx)),
          values(std::move(vals)) {
        validate();
    }

    Index nnz() const { return col_indices.size(); }

    std::span<const Index> row_cols(Index i) const {
        return {col_indices.data() + row_offsets[i],
                col_indices.data() + row_offsets[i + 1]};
    }
    std::span<const double> row_vals(Index i) const {
        return {values.data() + row_offsets[i],
                values.data() + row_offsets[i + 1]};
    }

    void validate() const {
        if (row_offsets.size() != n_rows + 1)
            throw std::invalid_argument("SparseMatrix: row_offsets length mismatch");
        if (row_offsets.front() != 0)
            throw std::invalid_argument("SparseMatrix: row_offsets[0] != 0");
        if (row_offsets.back() != col_indices.size() ||
            col_indices.size() != values.size())
            throw std::invalid_argument("SparseMatrix: entry count mismatch");
        for (Index i = 0; i < n_rows; ++i) {
            if (row_offsets[i] > row_offsets[i + 1])
                throw std::invalid_argument("SparseMatrix: row_offsets not nondecreasing");
            for (Index p = row_offsets[i]; p < row_offsets[i + 1]; ++p) {
                if (col_indices[p] >= n_cols)
                    throw std::invalid_argument("SparseMatrix: column index out of range");
                if (p > row_offsets[i] && col_indices[p - 1] >= col_indices[p])
                    throw std::invalid_argument(
                        "SparseMatrix: column indices not strictly increasing in row " +
                        std::to_string(i));
            }
        }
        for (double v : values)
            if (!(v >= 0.0))
                throw std::invalid_argument("SparseMatrix: negative or NaN value");
    }
};

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Assemble from an unordered triplet list; duplicate coordinates are summed.
inline SparseMatrix from_triplets(Index n_rows, Index n_cols,
                                  std::vector<Triplet> entries) {
    for (const Triplet& t : entries) {
        if (t.row >= n_rows || t.col >= n_cols)
            throw std::invalid_argument("from_triplets: entry out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Index> offsets(n_rows + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t p = 0; p < entries.size();) {
        std::size_t q = p;
        double sum = 0.0;
        while (q < entries.size() && entries[q].row == entries[p].row &&
               entries[q].col == entries[p].col)
            sum += entries[q++].value;
        cols.push_back(entries[p].col);
        vals.push_back(sum);
        offsets[entries[p].row + 1]++;
        p = q;
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols),
                        std::move(vals));
}

inline SparseMatrix from_dense(Index n_rows, Index n_cols,
                               std::span<const double> row_major) {
    std::vector<Triplet> ts;
    for (Index i = 0; i < n_rows; ++i)
        for (Index j = 0; j < n_cols; ++j)
            if (row_major[i * n_cols + j] != 0.0)
                ts.push_back({i, j, row_major[i * n_cols + j]});
    return from_triplets(n_rows, n_cols, std::move(ts));
}

/// result[i] = sum_j A[i,j] x[j]
inline std::vector<double> spmv(const SparseMatrix& a, std::span<const double> x) {
    if (x.size() != a.n_cols)
        throw std::invalid_argument("spmv: x length != n_cols");
    std::vector<double> y(a.n_rows, 0.0);
    for (Index i = 0; i < a.n_rows; ++i) {
        double sum = 0.0;
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            sum += a.values[p] * x[a.col_indices[p]];
        y[i] = sum;
    }
    return y;
}

/// result[j] = sum_i A[i,j] x[i]
inline std::vector<double> spmv_transpose(const SparseMatrix& a,
                                          std::span<const double> x) {
    if (x.size() != a.n_rows)
        throw std::invalid_argument("spmv_transpose: x length != n_rows");
    std::vector<double> y(a.n_cols, 0.0);
    for (Index i = 0; i < a.n_rows; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            y[a.col_indices[p]] += a.values[p] * xi;
    }
    return y;
}

inline std::vector<double> row_sums(const SparseMatrix& a) {
    std::vector<double> s(a.n_rows, 0.0);
    for (Index i = 0; i < a.n_rows; ++i)
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            s[i] += a.values[p];
    return s;
}

inline std::vector<double> col_sums(const SparseMatrix& a) {
    std::vector<double> s(a.n_cols, 0.0);
    for (Index i = 0; i < a.n_rows; ++i)
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
            s[a.col_indices[p]] += a.values[p];
    return s;
}

inline double total_weight(const SparseMatrix& a) {
    double s = 0.0;
    for (double v : a.values) s += v;
    return s;
}

inline SparseMatrix transpose(const SparseMatrix& a) {
    std::vector<Index> offsets(a.n_cols + 1, 0);
    for (Index c : a.col_indices) offsets[c + 1]++;
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<Index> cols(a.nnz());
    std::vector<double> vals(a.nnz());
    std::vector<Index> cursor(offsets.begin(), offsets.end() - 1);
    for (Index i = 0; i < a.n_rows; ++i) {
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const Index pos = cursor[a.col_indices[p]]++;
            cols[pos] = i;
            vals[pos] = a.values[p];
        }
    }
    return SparseMatrix(a.n_cols, a.n_rows, std::move(offsets), std::move(cols),
                        std::move(vals));
}

/// Induced submatrix on the given row/column subsets (order preserved).
inline SparseMatrix select_submatrix(const SparseMatrix& a,
                                     std::span<const Index> rows,
                                     std::span<const Index> cols) {
    constexpr Index kAbsent = static_cast<Index>(-1);
    std::vector<Index> col_map(a.n_cols, kAbsent);
    for (Index k = 0; k < cols.size(); ++k) {
        if (cols[k] >= a.n_cols)
            throw std::invalid_argument("select_submatrix: column out of range");
        col_map[cols[k]] = k;
    }
    std::vector<Triplet> ts;
    for (Index k = 0; k < rows.size(); ++k) {
        const Index i = rows[k];
        if (i >= a.n_rows)
            throw std::invalid_argument("select_submatrix: row out of range");
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const Index j = col_map[a.col_indices[p]];
            if (j != kAbsent) ts.push_back({k, j, a.values[p]});
        }
    }
    return from_triplets(rows.size(), cols.size(), std::move(ts));
}

}  // namespace cocluster
