#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "cocluster/sparse_matrix.hpp"

namespace cocluster {

/// MatrixMarket coordinate I/O. This is the interchange format for all CLI
/// commands: 1-based indices, one "rows cols nnz" size line, then triplets.
inline SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("matrix market: empty input");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
        throw std::invalid_argument("matrix market: unsupported header: " + line);
    if (field != "real" && field != "integer" && field != "pattern")
        throw std::invalid_argument("matrix market: unsupported field: " + field);
    if (symmetry != "general")
        throw std::invalid_argument("matrix market: only general symmetry supported");
    const bool pattern = field == "pattern";

    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream size_line(line);
    Index rows = 0, cols = 0;
    std::size_t count = 0;
    if (!(size_line >> rows >> cols >> count))
        throw std::invalid_argument("matrix market: bad size line");

    std::vector<Triplet> ts;
    ts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        long long i = 0, j = 0;
        double v = 1.0;
        if (!(in >> i >> j)) throw std::invalid_argument("matrix market: truncated data");
        if (!pattern && !(in >> v))
            throw std::invalid_argument("matrix market: truncated data");
        if (i < 1 || j < 1 || static_cast<Index>(i) > rows || static_cast<Index>(j) > cols)
            throw std::invalid_argument("matrix market: index out of range");
        ts.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
    }
    return from_triplets(rows, cols, std::move(ts));
}

inline SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
    return read_matrix_market(in);
}

inline void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz() << '\n';
    char buf[64];
    for (Index i = 0; i < a.n_rows; ++i) {
        for (Index p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i + 1,
                          a.col_indices[p] + 1, a.values[p]);
            out << buf;
        }
    }
}

inline void write_matrix_market(const std::string& path, const SparseMatrix& a) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open output file: " + path);
    write_matrix_market(out, a);
}

}  // namespace cocluster
